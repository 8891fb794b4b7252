//! Machine traces round-trip through the verifier; a tampered one does not.
//!
//! cargo run --example trace_verify

use derangement::cli::gen_instance;
use derangement::improve::verify_trace;
use derangement::{improve, LoopConfig, Permutation};

fn main() -> derangement::Result<()> {
    let m = gen_instance(10, 11, -50, 50)?;
    let trace = improve(&m, &Permutation::n_cycle(10), &LoopConfig::default())?;
    let jsonl = trace.to_jsonl();
    print!("{jsonl}");

    let report = verify_trace(&m, &jsonl)?;
    println!("verified: {} steps, final cost {}", report.steps, report.final_cost);

    let first = jsonl.lines().next().unwrap();
    let cost = trace.steps[0].cost;
    let forged = jsonl.replacen(first, &first.replace(&format!("\"cost\":{cost}"), "\"cost\":0"), 1);
    match verify_trace(&m, &forged) {
        Ok(_) => println!("forged trace accepted"),
        Err(e) => println!("forged trace rejected: {e}"),
    }
    Ok(())
}
