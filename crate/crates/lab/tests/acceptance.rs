//! Runs all twelve acceptance criteria and prints one line per criterion.
//! Plain `main` so the lines show without `--nocapture`.

use std::process::ExitCode;

use liedeg::acceptance::{run_all, AcceptanceOptions};

fn main() -> ExitCode {
    let results = match run_all(&AcceptanceOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("acceptance suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("\nacceptance: {} passed, {failed} failed", results.len() - failed);
    if results.len() == 12 && failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
