//! The derived matrix of a derangement and the telescoping identity.
//!
//! cargo run --example derived_matrix

use derangement::{CostMatrix, CycleForm, DerivedMatrix, Permutation};

fn main() -> derangement::Result<()> {
    let m = CostMatrix::parse("4\n0 10 1 1\n10 0 1 1\n1 1 0 10\n1 1 10 0")?;
    let d = Permutation::from_mapping(&[2, 1, 4, 3])?;
    let dm = DerivedMatrix::new(&m, &d)?;
    print!("{}", dm.to_text());

    let c = CycleForm::parse("(1 3 2 4)", 4)?;
    let next = d.compose(&Permutation::from_cycles(&c))?;
    let before = m.permutation_cost(&d)?;
    let after = m.permutation_cost(&next)?;
    println!("\nweight of {c}: {}", dm.cycle_weight(&c)?);
    println!("|D| = {before}, |D C| = {after}, change {}", after - before);
    Ok(())
}
