//! Runs selected acceptance criteria (default: the quick ones) and prints
//! their reports, e.g. `cargo run --release --example acceptance_subset -- 1 2 4 5`.

use pd_limits::verify::{run_criterion, VerifyConfig};

fn main() -> pd_limits::error::Result<()> {
    let mut ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if ids.is_empty() {
        ids = vec![1, 4, 5];
    }
    let config = VerifyConfig::default();
    for id in ids {
        let report = run_criterion(id, &config)?;
        println!("{}", report.line());
    }
    Ok(())
}
