//! Fixture × measure comparison table.
//!
//! cargo run --release --example measure_sweep

use hysim::cli::{bench, BenchArgs};

fn main() -> hysim::Result<()> {
    let table = bench(&BenchArgs {
        size: 48,
        ..BenchArgs::default()
    })?;
    print!("{}", table.to_text());
    Ok(())
}
