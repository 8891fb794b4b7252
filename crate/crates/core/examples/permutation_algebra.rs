//! Composition, inversion and the two text forms of a permutation.
//!
//! cargo run --example permutation_algebra

use derangement::{CycleForm, DerangementMode, Permutation};

fn main() -> derangement::Result<()> {
    let d: Permutation = "2 1 4 3".parse()?;
    let c = Permutation::from_cycles(&CycleForm::parse("(1 3 2 4)", 4)?);

    // right to left: apply c first
    let dc = d.compose(&c)?;
    println!("D       = {d}   {}", d.cycles());
    println!("C       = {c}   {}", c.cycles());
    println!("D C     = {dc}   {}", dc.cycles());
    println!("(D C)^-1 = {}", dc.inverse());
    println!("\n{}", dc.row_form());

    for mode in [DerangementMode::Assignment, DerangementMode::TwoFactor] {
        println!("{d} valid in {mode} mode: {}", d.is_derangement(mode));
    }
    Ok(())
}
