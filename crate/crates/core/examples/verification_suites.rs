//! Runs every randomized verification suite at a small size and prints a
//! one-line summary per suite.

use channel_resource::harness::{verify, RunConfig, Suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig {
        trials: 5,
        seed: 2024,
        restarts: 8,
        ..Default::default()
    };
    for suite in Suite::ALL {
        let r = verify(suite, &config)?;
        println!(
            "{:<18} {} records, max violation {:+.3e}, {}",
            suite.as_str(),
            r.trials.len(),
            r.max_violation,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
