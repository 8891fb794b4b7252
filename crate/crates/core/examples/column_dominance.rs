//! A loop found inside a non-simple walk costs fewer columns when built on
//! its own from the vertex where the walk enters it.
//!
//! cargo run --example column_dominance

use derangement::cli::gen_instance;
use derangement::engine::{column_dominance, search, EngineConfig, PathFlavor, Provenance};
use derangement::{DerivedMatrix, Permutation};

fn main() -> derangement::Result<()> {
    let config = EngineConfig {
        flavor: PathFlavor::NonSimple,
        ..EngineConfig::default()
    };
    let mut shown = 0;
    for seed in 0.. {
        let n = 6 + seed as usize % 5;
        let m = gen_instance(n, seed, -50, 50)?;
        let dm = DerivedMatrix::new(&m, &Permutation::n_cycle(n))?;
        for source in 1..=n {
            let outcome = search(&dm, &config, &[source], usize::MAX);
            let Some(c) = outcome.cycles.iter().find(|c| {
                c.provenance == Provenance::ExtractedFromNonsimple && !c.vertices().contains(&source)
            }) else {
                continue;
            };
            let cmp = column_dominance(&dm, c, &config)?;
            let route: Vec<String> = c.route.iter().map(|v| v.to_string()).collect();
            println!(
                "seed {seed:>3}  walk {:<28} loop {:<20} weight {:>4}  columns {:>3} vs {:>3}",
                route.join(" "),
                c.cycle.to_string(),
                c.weight,
                cmp.path_columns,
                cmp.cycle_columns
            );
            shown += 1;
            break;
        }
        if shown == 8 {
            break;
        }
    }
    Ok(())
}
