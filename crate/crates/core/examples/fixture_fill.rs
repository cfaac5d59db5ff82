//! Fill a generated fixture and score the result.
//!
//! cargo run --release --example fixture_fill -- [fixture] [size]

use hysim::cli::save_image;
use hysim::quality::{generate_fixture, psnr, region_bleed, FixtureName};
use hysim::{inpaint, EngineConfig};

fn main() -> hysim::Result<()> {
    let mut args = std::env::args().skip(1);
    let name: FixtureName = args
        .next()
        .as_deref()
        .unwrap_or("two_region_straddle")
        .parse()?;
    let size: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(64);

    let fx = generate_fixture(name, size)?;
    let (filled, report) = inpaint(&fx.image, &fx.mask, &EngineConfig::default())?;
    println!(
        "{name} {size}x{size}: {} target pixels filled in {} iterations",
        report.initial_target, report.iterations
    );
    for rec in report.records.iter().take(5) {
        println!(
            "  #{:<3} target ({:>3},{:>3}) <- source ({:>3},{:>3})  distance {:.2}",
            rec.iteration,
            rec.target.row,
            rec.target.col,
            rec.source.row,
            rec.source.col,
            rec.distance
        );
    }
    println!(
        "bleed {:.2}%",
        region_bleed(&filled, &fx.regions, &fx.mask)? * 100.0
    );
    println!("psnr {:.2} dB", psnr(&filled, &fx.truth)?);

    save_image(format!("{name}_input.png").as_ref(), &fx.image)?;
    save_image(format!("{name}_filled.png").as_ref(), &filled)?;
    Ok(())
}
