//! Object removal from files on disk.
//!
//! cargo run --release --example file_inpaint -- image.png mask.png out.png
//!
//! Without arguments a demo image and mask are written to the current directory first.

use std::path::PathBuf;

use hysim::cli::{load_image, load_mask, save_image, save_mask};
use hysim::quality::{generate_fixture, FixtureName};
use hysim::{inpaint, EngineConfig, MeasureConfig};

fn main() -> hysim::Result<()> {
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let (image_path, mask_path, out_path) = match args.as_slice() {
        [i, m, o] => (i.clone(), m.clone(), o.clone()),
        _ => {
            let fx = generate_fixture(FixtureName::TriangleApex, 96)?;
            save_image("demo_image.png".as_ref(), &fx.image)?;
            save_mask("demo_mask.png".as_ref(), &fx.mask)?;
            (
                "demo_image.png".into(),
                "demo_mask.png".into(),
                "demo_out.png".into(),
            )
        }
    };

    let image = load_image(&image_path)?;
    let mask = load_mask(&mask_path)?;
    let cfg = EngineConfig {
        patch_side: 7,
        ..EngineConfig::with_measure(MeasureConfig::hysim(1.0, 1.0, 3.0))
    };
    let (out, report) = inpaint(&image, &mask, &cfg)?;
    save_image(&out_path, &out)?;
    println!(
        "{} -> {} ({} pixels, {} iterations)",
        image_path.display(),
        out_path.display(),
        report.initial_target,
        report.iterations
    );
    Ok(())
}
