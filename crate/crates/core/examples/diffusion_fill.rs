//! Perona–Malik diffusion next to exemplar filling on the same hole.
//!
//! cargo run --release --example diffusion_fill

use hysim::diffusion::{pm_inpaint, Conductance, DiffusionConfig};
use hysim::quality::{generate_fixture, psnr, region_bleed, FixtureName};
use hysim::{inpaint, EngineConfig};

fn main() -> hysim::Result<()> {
    let fx = generate_fixture(FixtureName::CurveGap, 64)?;
    for conductance in [Conductance::Exponential, Conductance::Rational] {
        let cfg = DiffusionConfig {
            conductance,
            ..DiffusionConfig::default()
        };
        let (out, rep) = pm_inpaint(&fx.image, &fx.mask, &cfg)?;
        println!(
            "pm {conductance:?}: {} steps (converged {}), bleed {:.2}%, psnr {:.2}",
            rep.steps,
            rep.converged,
            region_bleed(&out, &fx.regions, &fx.mask)? * 100.0,
            psnr(&out, &fx.truth)?
        );
    }
    let (out, rep) = inpaint(&fx.image, &fx.mask, &EngineConfig::default())?;
    println!(
        "exemplar: {} iterations, bleed {:.2}%, psnr {:.2}",
        rep.iterations,
        region_bleed(&out, &fx.regions, &fx.mask)? * 100.0,
        psnr(&out, &fx.truth)?
    );
    Ok(())
}
