//! One engine search, with the per-round counts, under both policies.
//!
//! cargo run --example negative_cycle [n] [seed]

use derangement::cli::gen_instance;
use derangement::engine::{candidates, EngineConfig, Policy};
use derangement::{DerivedMatrix, Permutation};

fn main() -> derangement::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(9);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let m = gen_instance(n, seed, -50, 50)?;
    let d = Permutation::n_cycle(n);
    let dm = DerivedMatrix::new(&m, &d)?;
    println!("n = {n}, seed {seed}, D = {}, |D| = {}", d.cycles(), m.permutation_cost(&d)?);

    for policy in [Policy::First, Policy::Best] {
        let config = EngineConfig {
            policy,
            ..EngineConfig::default()
        };
        let outcome = candidates(&dm, &config, 3);
        println!("\npolicy {policy}");
        for r in &outcome.iterations {
            println!("  {}", r.render());
        }
        if outcome.cycles.is_empty() {
            println!("  no admissible negative cycle");
        }
        for c in &outcome.cycles {
            println!("  {}  weight {}  found after {} columns", c.cycle, c.weight, c.columns_used.get());
        }
    }
    Ok(())
}
