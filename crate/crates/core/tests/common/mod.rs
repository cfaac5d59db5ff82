//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use hysim::measures::{MeasureConfig, MeasureFamily};
use hysim::raster::{InpaintMask, Pixel, RasterImage};
use rand::Rng;

/// Textbook distance over explicit vectors, no shared code with the crate.
pub fn reference_distance(a: &[f64], b: &[f64], cfg: &MeasureConfig) -> f64 {
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    let cheb = diffs.iter().cloned().fold(0.0, f64::max);
    let p = cfg.p_exponent;
    let mink = || {
        let s: f64 = diffs.iter().map(|d| d.powf(p)).sum();
        s.powf(1.0 / p)
    };
    match cfg.family {
        MeasureFamily::Ssd => diffs.iter().map(|d| d * d).sum(),
        MeasureFamily::Chebyshev => cheb,
        MeasureFamily::Minkowski => mink(),
        MeasureFamily::HySim => cfg.alpha * cheb + cfg.beta * mink(),
    }
}

/// Double loop over every candidate center; returns `(center, distance)`
/// of the first strict minimum in row-major order.
pub fn brute_force_search(
    image: &RasterImage,
    mask: &InpaintMask,
    target: Pixel,
    side: usize,
    cfg: &MeasureConfig,
) -> Option<(Pixel, f64)> {
    let (h, w, ch) = image.shape();
    let half = (side / 2) as isize;
    let (tr, tc) = (target.row as isize, target.col as isize);
    let inside = |r: isize, c: isize| r >= 0 && c >= 0 && r < h as isize && c < w as isize;
    let mut best: Option<(Pixel, f64)> = None;
    for r in 0..h as isize {
        for c in 0..w as isize {
            if !inside(r - half, c - half) || !inside(r + half, c + half) {
                continue;
            }
            let mut clean = true;
            for dr in -half..=half {
                for dc in -half..=half {
                    if mask.is_target((r + dr) as usize, (c + dc) as usize) {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let mut a = Vec::new();
            let mut b = Vec::new();
            for dr in -half..=half {
                for dc in -half..=half {
                    let (qr, qc) = (tr + dr, tc + dc);
                    if !inside(qr, qc) || mask.is_target(qr as usize, qc as usize) {
                        continue;
                    }
                    for k in 0..ch {
                        a.push(image.pixel(qr as usize, qc as usize)[k]);
                        b.push(image.pixel((r + dr) as usize, (c + dc) as usize)[k]);
                    }
                }
            }
            let d = reference_distance(&a, &b, cfg);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((Pixel::new(r as usize, c as usize), d));
            }
        }
    }
    best
}

/// Fill-front by set comprehension.
pub fn brute_force_front(mask: &InpaintMask) -> Vec<Pixel> {
    let (h, w) = (mask.height() as isize, mask.width() as isize);
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if !mask.is_target(r as usize, c as usize) {
                continue;
            }
            let known_neighbor = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
                .into_iter()
                .any(|(nr, nc)| {
                    nr >= 0
                        && nc >= 0
                        && nr < h
                        && nc < w
                        && !mask.is_target(nr as usize, nc as usize)
                });
            if known_neighbor {
                out.push(Pixel::new(r as usize, c as usize));
            }
        }
    }
    out
}

/// Random 8-bit RGB image; `levels` > 0 quantizes to that many gray levels
/// per channel to provoke ties.
pub fn random_image<R: Rng>(rng: &mut R, h: usize, w: usize, levels: u32) -> RasterImage {
    let data = (0..h * w * 3)
        .map(|_| {
            if levels == 0 {
                rng.random_range(0..=255u32) as f64
            } else {
                (rng.random_range(0..levels) * (255 / (levels - 1).max(1))) as f64
            }
        })
        .collect();
    RasterImage::new(h, w, 3, data).unwrap()
}

/// Square hole of side `hole` with its top-left corner at `(r0, c0)`.
pub fn square_hole(h: usize, w: usize, r0: usize, c0: usize, hole: usize) -> InpaintMask {
    InpaintMask::from_fn(h, w, |r, c| {
        (r0..r0 + hole).contains(&r) && (c0..c0 + hole).contains(&c)
    })
}

pub fn families() -> Vec<MeasureConfig> {
    vec![
        MeasureConfig::ssd(),
        MeasureConfig::chebyshev(),
        MeasureConfig::minkowski(1.0),
        MeasureConfig::minkowski(2.0),
        MeasureConfig::minkowski(3.0),
        MeasureConfig::hysim(1.0, 1.0, 1.0),
        MeasureConfig::hysim(1.0, 1.0, 2.0),
        MeasureConfig::hysim(1.0, 1.0, 3.0),
        MeasureConfig::hysim(1.0, 1.0, 4.0),
        MeasureConfig::hysim(0.5, 2.0, 3.0),
    ]
}
