//! Turn a distance into a bounded similarity score.
//!
//! cargo run --example similarity

use hysim::measures::{
    evaluate, max_distance, similarity_from_distance, MaskedPair, MeasureConfig,
};

fn main() -> hysim::Result<()> {
    let n = 9 * 9 * 3;
    let known = vec![true; n];
    let base: Vec<f64> = (0..n).map(|i| (i * 37 % 256) as f64).collect();
    for cfg in [
        MeasureConfig::ssd(),
        MeasureConfig::chebyshev(),
        MeasureConfig::default(),
    ] {
        let bound = max_distance(&cfg, n)?;
        println!("{} (bound {bound:.2})", cfg.label());
        for noise in [0.0, 5.0, 25.0, 100.0] {
            let other: Vec<f64> = base
                .iter()
                .enumerate()
                .map(|(i, v)| (v + if i % 2 == 0 { noise } else { -noise }).clamp(0.0, 255.0))
                .collect();
            let d = evaluate(&MaskedPair::new(&base, &other, &known)?, &cfg)?;
            println!(
                "  noise {noise:>5}: distance {d:>12.3}  similarity {:>12.3}",
                similarity_from_distance(d, bound)
            );
        }
    }
    Ok(())
}
