//! Compare every distance family on one pair of masked patches.
//!
//! cargo run --example patch_distances

use hysim::measures::{evaluate, MaskedPair, MeasureConfig};

fn main() -> hysim::Result<()> {
    // Two 3×3 gray patches; the center of the target is still unknown.
    let target = [10.0, 12.0, 11.0, 9.0, 0.0, 13.0, 10.0, 11.0, 12.0];
    let candidate = [10.0, 40.0, 11.0, 9.0, 77.0, 13.0, 10.0, 11.0, 12.0];
    let known = [true, true, true, true, false, true, true, true, true];
    let pair = MaskedPair::new(&target, &candidate, &known)?;

    let configs = [
        MeasureConfig::ssd(),
        MeasureConfig::chebyshev(),
        MeasureConfig::minkowski(1.0),
        MeasureConfig::minkowski(2.0),
        MeasureConfig::hysim(1.0, 1.0, 2.0),
        MeasureConfig::hysim(2.0, 0.5, 3.0),
        MeasureConfig::hysim(1.0, 1.0, 64.0),
    ];
    println!("{} of {} elements known", pair.known_count(), known.len());
    for cfg in configs {
        println!("{:<22} {:>10.4}", cfg.label(), evaluate(&pair, &cfg)?);
    }
    Ok(())
}
