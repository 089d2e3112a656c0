//! Best CZ settings as the auxiliary rail carries more photons.
//!
//! cargo run -p lopsim --release --example tower

use lopsim::solver::{solve, ConditionProblem, SolveOptions};

fn main() -> lopsim::Result<()> {
    println!("{:>2}  {:>34}  {:>8}  {:>6}", "k", "t", "|A|", "found");
    for k in 1..=7 {
        let out = solve(&ConditionProblem::Tower { k }, &SolveOptions::default())?;
        match out.best() {
            Some(s) => println!(
                "{k:>2}  ({:>9.6}, {:>9.6}, {:>9.6})  {:>8.5}  {:>6}",
                s.t[0],
                s.t[1],
                s.t[2],
                s.amplitude.norm(),
                out.solutions.len()
            ),
            None => println!("{k:>2}  no solution"),
        }
    }
    Ok(())
}
