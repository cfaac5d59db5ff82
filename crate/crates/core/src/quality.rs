//! Fidelity metrics and synthetic evaluation scenes.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{InpaintMask, RasterImage};

/// Reported PSNR for identical images.
pub const PSNR_CAP: f64 = 99.0;

pub const DEFAULT_BLEED_TOLERANCE: f64 = 10.0;

pub const MIN_FIXTURE_SIZE: usize = 32;

/// `10 log10(255² / MSE)` in dB, capped at [`PSNR_CAP`].
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(a.shape(), b.shape()));
    }
    let n = a.data().len();
    if n == 0 {
        return Ok(PSNR_CAP);
    }
    let se: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let mse = se / n as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP);
    }
    Ok((10.0 * (255.0 * 255.0 / mse).log10()).min(PSNR_CAP))
}

/// Semantic labelling of a scene: every pixel belongs to one region and each
/// region has an expected color.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    height: usize,
    width: usize,
    labels: Vec<u8>,
    names: Vec<String>,
    palette: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl RegionSpec {
    pub fn new(
        height: usize,
        width: usize,
        labels: Vec<u8>,
        names: Vec<String>,
        palette: Vec<Vec<f64>>,
        tolerance: f64,
    ) -> Result<Self> {
        if labels.len() != height * width {
            return Err(Error::InvalidRegionSpec(format!(
                "{} labels for a {height}x{width} grid",
                labels.len()
            )));
        }
        if names.len() != palette.len() {
            return Err(Error::InvalidRegionSpec(
                "names and palette differ in length".into(),
            ));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= palette.len()) {
            return Err(Error::InvalidRegionSpec(format!(
                "label {l} has no palette entry"
            )));
        }
        let channels = palette.first().map_or(0, Vec::len);
        if palette.iter().any(|p| p.len() != channels) {
            return Err(Error::InvalidRegionSpec(
                "palette entries differ in channel count".into(),
            ));
        }
        Ok(Self {
            height,
            width,
            labels,
            names,
            palette,
            tolerance,
        })
    }

    pub fn label(&self, row: usize, col: usize) -> u8 {
        self.labels[row * self.width + col]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn color(&self, label: u8) -> &[f64] {
        &self.palette[label as usize]
    }

    /// Every pixel painted with its region color.
    pub fn render(&self) -> Result<RasterImage> {
        let channels = self.palette.first().map_or(1, Vec::len);
        RasterImage::from_fn(self.height, self.width, channels, |r, c| {
            self.color(self.label(r, c)).to_vec()
        })
    }

    /// Whether `pixel` is within tolerance of its region color (max-channel).
    pub fn agrees(&self, row: usize, col: usize, pixel: &[f64]) -> bool {
        self.color(self.label(row, col))
            .iter()
            .zip(pixel)
            .all(|(e, v)| (e - v).abs() <= self.tolerance)
    }
}

/// Fraction of target pixels whose result color deviates from the expected
/// region color by more than the tolerance. Zero when there are no targets.
pub fn region_bleed(result: &RasterImage, spec: &RegionSpec, target: &InpaintMask) -> Result<f64> {
    target.matches(result)?;
    let (h, w, ch) = result.shape();
    if spec.height != h || spec.width != w {
        return Err(Error::DimensionMismatch {
            image_h: h,
            image_w: w,
            mask_h: spec.height,
            mask_w: spec.width,
        });
    }
    if spec.palette.first().map_or(0, Vec::len) != ch {
        return Err(Error::InvalidRegionSpec(format!(
            "palette has a different channel count than the {ch}-channel image"
        )));
    }
    let mut total = 0usize;
    let mut wrong = 0usize;
    for r in 0..h {
        for c in 0..w {
            if target.is_target(r, c) {
                total += 1;
                if !spec.agrees(r, c, result.pixel(r, c)) {
                    wrong += 1;
                }
            }
        }
    }
    Ok(if total == 0 {
        0.0
    } else {
        wrong as f64 / total as f64
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureName {
    /// Gray over black halves with a dot over the dividing line.
    TwoToneDot,
    /// Green triangle on white with its apex removed.
    TriangleApex,
    /// Thick sinusoidal stroke on white with a disk cut out of it.
    CurveGap,
    /// Flat sky over a lightly textured ground, hole across the skyline.
    TwoRegionStraddle,
}

impl FixtureName {
    pub const ALL: [FixtureName; 4] = [
        FixtureName::TwoToneDot,
        FixtureName::TriangleApex,
        FixtureName::CurveGap,
        FixtureName::TwoRegionStraddle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureName::TwoToneDot => "two_tone_dot",
            FixtureName::TriangleApex => "triangle_apex",
            FixtureName::CurveGap => "curve_gap",
            FixtureName::TwoRegionStraddle => "two_region_straddle",
        }
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// A generated scene: the damaged input, its hole, the semantic labels and
/// the undamaged scene.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: FixtureName,
    pub image: RasterImage,
    pub mask: InpaintMask,
    pub regions: RegionSpec,
    pub truth: RasterImage,
}

const GRAY: [f64; 3] = [128.0, 128.0, 128.0];
const BLACK: [f64; 3] = [0.0, 0.0, 0.0];
const WHITE: [f64; 3] = [255.0, 255.0, 255.0];
const GREEN: [f64; 3] = [0.0, 160.0, 0.0];
const NAVY: [f64; 3] = [20.0, 30.0, 120.0];
const SKY: [f64; 3] = [135.0, 190.0, 235.0];
const FOREST: [f64; 3] = [40.0, 90.0, 40.0];

const DOT: [f64; 3] = [0.0, 255.0, 0.0];
const RED: [f64; 3] = [230.0, 20.0, 20.0];
const MAGENTA: [f64; 3] = [255.0, 0.0, 255.0];
const ORANGE: [f64; 3] = [250.0, 140.0, 0.0];

/// Small deterministic texture in `[-4, 4]`.
fn grain(row: usize, col: usize) -> f64 {
    let mut x = (row as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (col as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    x ^= x >> 29;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 32;
    (x % 9) as f64 - 4.0
}

fn disk(cr: f64, cc: f64, radius: f64) -> impl Fn(usize, usize) -> bool {
    move |r, c| {
        let (dr, dc) = (r as f64 - cr, c as f64 - cc);
        dr * dr + dc * dc <= radius * radius
    }
}

struct Scene {
    label_of: Box<dyn Fn(usize, usize) -> u8>,
    names: [&'static str; 2],
    palette: [[f64; 3]; 2],
    hole: Box<dyn Fn(usize, usize) -> bool>,
    object: [f64; 3],
    /// Region that receives [`grain`] texture.
    textured: Option<u8>,
}

/// Deterministic synthetic scene `name` of size `size × size`.
pub fn generate_fixture(name: FixtureName, size: usize) -> Result<Fixture> {
    if size < MIN_FIXTURE_SIZE {
        return Err(Error::FixtureTooSmall(size));
    }
    let n = size as f64;
    let scale = n / 64.0;
    let half = (size / 2) as f64;

    let scene = match name {
        FixtureName::TwoToneDot => {
            let radius = (6.0 * scale).round();
            Scene {
                label_of: Box::new(move |r, _| (r >= size / 2) as u8),
                names: ["gray", "black"],
                palette: [GRAY, BLACK],
                hole: Box::new(disk(half, half, radius)),
                object: DOT,
                textured: None,
            }
        }
        FixtureName::TriangleApex => {
            let apex = 0.25 * n;
            let base = 0.75 * n;
            let spread = 0.25 * n / (base - apex);
            let radius = (7.0 * scale).round();
            Scene {
                label_of: Box::new(move |r, c| {
                    let (r, c) = (r as f64, c as f64 + 0.5);
                    (r >= apex && r <= base && (c - half).abs() <= (r - apex + 0.5) * spread) as u8
                }),
                names: ["background", "triangle"],
                palette: [WHITE, GREEN],
                hole: Box::new(disk(apex + 3.0 * scale, half, radius)),
                object: MAGENTA,
                textured: None,
            }
        }
        FixtureName::CurveGap => {
            let amp = 0.2 * n;
            let thickness = 3.0 * scale;
            let centre = move |c: f64| half + amp * (2.0 * PI * c / n).sin();
            let slope = move |c: f64| amp * 2.0 * PI / n * (2.0 * PI * c / n).cos();
            let radius = (5.0 * scale).round();
            Scene {
                label_of: Box::new(move |r, c| {
                    let cf = c as f64;
                    ((r as f64 - centre(cf)).abs() <= thickness * (1.0 + slope(cf).powi(2)).sqrt())
                        as u8
                }),
                names: ["background", "curve"],
                palette: [WHITE, NAVY],
                hole: Box::new(disk(centre(half).round(), half, radius)),
                object: RED,
                textured: None,
            }
        }
        FixtureName::TwoRegionStraddle => {
            let skyline = move |c: usize| 0.55 * n + 0.08 * (c as f64 - half);
            let hole_half = (0.125 * n).round();
            let hole_row = skyline(size / 2).round();
            Scene {
                label_of: Box::new(move |r, c| (r as f64 >= skyline(c)) as u8),
                names: ["sky", "forest"],
                palette: [SKY, FOREST],
                hole: Box::new(move |r, c| {
                    (r as f64 - hole_row).abs() <= hole_half && (c as f64 - half).abs() <= hole_half
                }),
                object: ORANGE,
                textured: Some(1),
            }
        }
    };
    let Scene {
        label_of,
        names,
        palette,
        hole,
        object,
        textured,
    } = scene;

    let mut labels = Vec::with_capacity(size * size);
    for r in 0..size {
        for c in 0..size {
            labels.push(label_of(r, c));
        }
    }
    let regions = RegionSpec::new(
        size,
        size,
        labels,
        names.into_iter().map(String::from).collect(),
        palette.iter().map(|p| p.to_vec()).collect(),
        DEFAULT_BLEED_TOLERANCE,
    )?;
    let truth = RasterImage::from_fn(size, size, 3, |r, c| {
        let label = regions.label(r, c);
        let base = regions.color(label);
        if textured == Some(label) {
            let g = grain(r, c);
            base.iter().map(|v| (v + g).clamp(0.0, 255.0)).collect()
        } else {
            base.to_vec()
        }
    })?;
    let mask = InpaintMask::from_fn(size, size, hole);
    let mut image = truth.clone();
    for r in 0..size {
        for c in 0..size {
            if mask.is_target(r, c) {
                image.set_pixel(r, c, &object);
            }
        }
    }
    Ok(Fixture {
        name,
        image,
        mask,
        regions,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_examples() {
        let a = RasterImage::filled(8, 8, 3, 30.0).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), 99.0);

        let zero = RasterImage::filled(4, 4, 1, 0.0).unwrap();
        let full = RasterImage::filled(4, 4, 1, 255.0).unwrap();
        assert!(psnr(&zero, &full).unwrap().abs() < 1e-12);

        let gray = RasterImage::filled(16, 16, 1, 100.0).unwrap();
        let mut off = gray.clone();
        off.set_pixel(3, 7, &[116.0]);
        let expected = 10.0 * (65025.0f64).log10();
        assert!((psnr(&gray, &off).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 48.13).abs() < 0.01);
    }

    #[test]
    fn psnr_shape_mismatch() {
        let a = RasterImage::filled(4, 4, 1, 0.0).unwrap();
        let b = RasterImage::filled(4, 5, 1, 0.0).unwrap();
        assert!(matches!(psnr(&a, &b), Err(Error::ShapeMismatch(..))));
    }

    fn stripes() -> RegionSpec {
        let labels = (0..60).map(|i| (i % 2) as u8).collect();
        RegionSpec::new(
            6,
            10,
            labels,
            vec!["a".into(), "b".into()],
            vec![vec![0.0], vec![200.0]],
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn bleed_examples() {
        let spec = stripes();
        let all = InpaintMask::from_fn(6, 10, |_, _| true);
        let perfect = spec.render().unwrap();
        assert_eq!(region_bleed(&perfect, &spec, &all).unwrap(), 0.0);

        let inverted = RasterImage::from_fn(6, 10, 1, |r, c| {
            vec![if spec.label(r, c) == 0 { 200.0 } else { 0.0 }]
        })
        .unwrap();
        assert_eq!(region_bleed(&inverted, &spec, &all).unwrap(), 1.0);

        let mut three = perfect.clone();
        three.set_pixel(0, 0, &[50.0]);
        three.set_pixel(2, 5, &[150.0]);
        three.set_pixel(5, 9, &[0.0]);
        // within tolerance, not counted
        three.set_pixel(4, 4, &[9.0]);
        assert!((region_bleed(&three, &spec, &all).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn bleed_dimension_mismatch() {
        let spec = stripes();
        let img = RasterImage::filled(6, 11, 1, 0.0).unwrap();
        let mask = InpaintMask::empty(6, 11);
        assert!(region_bleed(&img, &spec, &mask).is_err());
    }

    #[test]
    fn region_spec_rejects_missing_palette() {
        assert!(
            RegionSpec::new(1, 2, vec![0, 3], vec!["a".into()], vec![vec![0.0]], 10.0).is_err()
        );
    }

    #[test]
    fn two_tone_dot_layout() {
        let f = generate_fixture(FixtureName::TwoToneDot, 64).unwrap();
        assert_eq!(f.image.shape(), (64, 64, 3));
        assert_eq!(f.truth.pixel(10, 10), &GRAY);
        assert_eq!(f.truth.pixel(50, 10), &BLACK);
        assert!(f.mask.is_target(32, 32));
        assert!(f.mask.is_target(26, 32));
        assert!(!f.mask.is_target(25, 32));
        assert!(f.mask.is_target(32, 38));
        assert!(!f.mask.is_target(32, 39));
    }

    #[test]
    fn triangle_labels() {
        let f = generate_fixture(FixtureName::TriangleApex, 64).unwrap();
        assert_eq!(
            f.regions.names(),
            &["background".to_string(), "triangle".to_string()]
        );
        assert_eq!(f.regions.label(40, 32), 1);
        assert_eq!(f.regions.label(5, 5), 0);
    }

    #[test]
    fn fixtures_are_deterministic_and_self_consistent() {
        for name in FixtureName::ALL {
            let a = generate_fixture(name, 48).unwrap();
            let b = generate_fixture(name, 48).unwrap();
            assert_eq!(a, b);
            let mask = a.mask.clone();
            assert!(mask.target_count() > 0);
            for r in 0..48 {
                for c in 0..48 {
                    if !mask.is_target(r, c) {
                        assert!(
                            a.regions.agrees(r, c, a.image.pixel(r, c)),
                            "{name} ({r},{c})"
                        );
                    }
                    assert!(a.regions.agrees(r, c, a.truth.pixel(r, c)));
                }
            }
            // The pasted object is visibly foreign to the scene.
            assert!(
                region_bleed(&a.image, &a.regions, &mask).unwrap() > 0.5,
                "{name}"
            );
        }
    }

    #[test]
    fn fixture_too_small() {
        assert!(matches!(
            generate_fixture(FixtureName::CurveGap, 31),
            Err(Error::FixtureTooSmall(31))
        ));
        assert!("nope".parse::<FixtureName>().is_err());
    }
}
