//! Runs every acceptance criterion at full size against its time budget and
//! prints one PASS/FAIL line each.

use std::time::Instant;

use ribbonlab::random::DEFAULT_SEED;
use ribbonlab::selftest::CRITERIA;

fn main() {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = c.check(DEFAULT_SEED, 1);
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|()| {
            if secs > c.budget_secs as f64 {
                Err(format!("took {secs:.2}s, budget {}s", c.budget_secs))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {} ({secs:.2}s, budget {}s)", c.id, c.name, c.budget_secs),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} ({secs:.2}s): {msg}", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
