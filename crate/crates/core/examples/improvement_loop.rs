//! The full loop from the n-cycle, in both modes, checked by the oracle.
//!
//! cargo run --example improvement_loop [n] [seed]

use derangement::cli::gen_instance;
use derangement::{improve, DerangementMode, LoopConfig, Permutation};

fn main() -> derangement::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let m = gen_instance(n, seed, -50, 50)?;

    for mode in [DerangementMode::Assignment, DerangementMode::TwoFactor] {
        let config = LoopConfig {
            mode,
            oracle_check: true,
            ..LoopConfig::default()
        };
        let trace = improve(&m, &Permutation::n_cycle(n), &config)?;
        println!("{}", trace.render());
    }
    Ok(())
}
