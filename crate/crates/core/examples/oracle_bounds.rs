//! Exhaustive minima: assignment <= two-factor <= tour on non-negative costs.
//!
//! cargo run --example oracle_bounds [n] [instances]

use derangement::cli::gen_instance;
use derangement::oracle::DEFAULT_ORACLE_LIMIT;
use derangement::{min_derangement, min_tour, DerangementMode};

fn main() -> derangement::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);

    println!("{:>4} {:>10} {:>10} {:>6}  witness", "seed", "assignment", "two-factor", "tour");
    for seed in 0..count {
        let m = gen_instance(n, seed, 0, 50)?;
        let a = min_derangement(&m, DerangementMode::Assignment, DEFAULT_ORACLE_LIMIT)?;
        let f = min_derangement(&m, DerangementMode::TwoFactor, DEFAULT_ORACLE_LIMIT)?;
        let t = min_tour(&m, DEFAULT_ORACLE_LIMIT)?;
        assert!(a.optimum_value <= f.optimum_value && f.optimum_value <= t.optimum_value);
        println!(
            "{seed:>4} {:>10} {:>10} {:>6}  {}",
            a.optimum_value,
            f.optimum_value,
            t.optimum_value,
            t.witness.cycles()
        );
    }
    Ok(())
}
