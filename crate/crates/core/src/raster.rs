//! Image, mask and patch data model plus the fill-front geometry consumed by
//! the priority computation.
//!
//! Two-dimensional vectors are expressed as `(row, col)` components, i.e. the
//! first component points down the image and the second to the right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rec. 601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Tolerance used when deciding that a normal has unit length.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl From<(usize, usize)> for Pixel {
    fn from((row, col): (usize, usize)) -> Self {
        Self { row, col }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub row: f64,
    pub col: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { row: 0.0, col: 0.0 };

    pub const fn new(row: f64, col: f64) -> Self {
        Self { row, col }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.row * other.row + self.col * other.col
    }

    pub fn norm(self) -> f64 {
        self.row.hypot(self.col)
    }

    /// Counter-clockwise quarter turn: `(a, b) -> (-b, a)`.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.col, self.row)
    }

    pub fn is_zero(self) -> bool {
        self.row == 0.0 && self.col == 0.0
    }
}

/// Row-major grid of samples with a fixed number of interleaved channels.
pub trait Grid {
    fn height(&self) -> usize;
    fn width(&self) -> usize;
    fn channels(&self) -> usize;
    fn samples(&self) -> &[f64];

    fn sample(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.samples()[(row * self.width() + col) * self.channels() + channel]
    }

    fn contains(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height() && (col as usize) < self.width()
    }
}

/// H×W×C image with real-valued intensities in `[0, 255]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterImage {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        if data.len() != height * width * channels {
            return Err(Error::DataLength {
                height,
                width,
                channels,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=255.0).contains(*v))
        {
            return Err(Error::IntensityOutOfRange { index, value });
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    /// Image where every sample equals `value` (clamped to `[0, 255]`).
    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(
            height,
            width,
            channels,
            vec![value.clamp(0.0, 255.0); height * width * channels],
        )
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn<F>(height: usize, width: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<f64>,
    {
        let mut data = Vec::with_capacity(height * width * channels);
        for row in 0..height {
            for col in 0..width {
                let px = f(row, col);
                if px.len() != channels {
                    return Err(Error::UnsupportedChannels(px.len()));
                }
                data.extend(px);
            }
        }
        Self::new(height, width, channels, data)
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// Overwrites one pixel. Values are clamped to the valid intensity range.
    pub fn set_pixel(&mut self, row: usize, col: usize, values: &[f64]) {
        let start = (row * self.width + col) * self.channels;
        for (dst, &v) in self.data[start..start + self.channels]
            .iter_mut()
            .zip(values)
        {
            *dst = v.clamp(0.0, 255.0);
        }
    }
}

impl Grid for RasterImage {
    fn height(&self) -> usize {
        self.height
    }
    fn width(&self) -> usize {
        self.width
    }
    fn channels(&self) -> usize {
        self.channels
    }
    fn samples(&self) -> &[f64] {
        &self.data
    }
}

/// Single-channel real field, e.g. the luma of an image.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::DataLength {
                height,
                width,
                channels: 1,
                actual: data.len(),
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }
}

impl Grid for ScalarField {
    fn height(&self) -> usize {
        self.height
    }
    fn width(&self) -> usize {
        self.width
    }
    fn channels(&self) -> usize {
        1
    }
    fn samples(&self) -> &[f64] {
        &self.data
    }
}

/// Binary mask: `true` marks a target pixel (to be filled), `false` a known
/// source pixel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InpaintMask {
    height: usize,
    width: usize,
    data: Vec<bool>,
}

impl InpaintMask {
    pub fn new(height: usize, width: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::DataLength {
                height,
                width,
                channels: 1,
                actual: data.len(),
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    /// Mask with no target pixels.
    pub fn empty(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: vec![false; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn is_target(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    /// Target test with out-of-bounds coordinates treated as "not target".
    pub fn is_target_at(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.data[row as usize * self.width + col as usize]
    }

    pub fn set(&mut self, row: usize, col: usize, target: bool) {
        self.data[row * self.width + col] = target;
    }

    pub fn target_count(&self) -> usize {
        self.data.iter().filter(|&&t| t).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&t| t)
    }

    pub fn matches(&self, image: &RasterImage) -> Result<()> {
        if self.height != image.height || self.width != image.width {
            return Err(Error::DimensionMismatch {
                image_h: image.height,
                image_w: image.width,
                mask_h: self.height,
                mask_w: self.width,
            });
        }
        Ok(())
    }

    fn value_clamped(&self, row: isize, col: isize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        if self.is_target(r, c) {
            1.0
        } else {
            0.0
        }
    }
}

/// Square window of odd side centered on a pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatchRef {
    pub center: Pixel,
    side: usize,
}

impl PatchRef {
    pub fn new(center: Pixel, side: usize) -> Result<Self> {
        validate_side(side)?;
        Ok(Self { center, side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn half(&self) -> usize {
        self.side / 2
    }

    /// Whether the whole window lies inside an image of the given size.
    pub fn fits(&self, height: usize, width: usize) -> bool {
        let h = self.half();
        self.center.row >= h
            && self.center.col >= h
            && self.center.row + h < height
            && self.center.col + h < width
    }

    /// Window coordinates in row-major order (may be out of bounds).
    pub fn offsets(&self) -> impl Iterator<Item = (isize, isize)> {
        let h = self.half() as isize;
        (-h..=h).flat_map(move |dr| (-h..=h).map(move |dc| (dr, dc)))
    }
}

pub(crate) fn validate_side(side: usize) -> Result<()> {
    if side < 3 || side.is_multiple_of(2) {
        return Err(Error::InvalidPatchSide(side));
    }
    Ok(())
}

/// Per-pixel confidence, in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceField {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl ConfidenceField {
    /// 1 on the source region, 0 on the target region.
    pub fn from_mask(mask: &InpaintMask) -> Self {
        Self {
            height: mask.height,
            width: mask.width,
            values: mask
                .data
                .iter()
                .map(|&t| if t { 0.0 } else { 1.0 })
                .collect(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.width + col] = value.clamp(0.0, 1.0);
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Luma of one 1- or 3-channel pixel.
pub fn pixel_luma(px: &[f64]) -> f64 {
    match px {
        [v] => *v,
        [r, g, b] if r == g && g == b => *r,
        [r, g, b] => {
            (LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b).clamp(0.0, 255.0)
        }
        _ => f64::NAN,
    }
}

/// Collapses an image into a scalar field: 1-channel images pass through,
/// 3-channel images use Rec. 601 weights.
pub fn to_luma(image: &RasterImage) -> Result<ScalarField> {
    let data = match image.channels {
        1 | 3 => image
            .data
            .chunks_exact(image.channels)
            .map(pixel_luma)
            .collect(),
        c => return Err(Error::UnsupportedChannels(c)),
    };
    ScalarField::new(image.height, image.width, data)
}

const NEIGHBORS4: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];

/// True when `p` is a target pixel with at least one known 4-neighbor.
pub fn is_front(mask: &InpaintMask, p: Pixel) -> bool {
    if !mask.is_target(p.row, p.col) {
        return false;
    }
    let (r, c) = (p.row as isize, p.col as isize);
    NEIGHBORS4.iter().any(|&(dr, dc)| {
        let (nr, nc) = (r + dr, c + dc);
        nr >= 0
            && nc >= 0
            && (nr as usize) < mask.height
            && (nc as usize) < mask.width
            && !mask.is_target(nr as usize, nc as usize)
    })
}

/// Pixels of the fill front in row-major order.
pub fn extract_front(mask: &InpaintMask) -> Vec<Pixel> {
    let mut front = Vec::new();
    for row in 0..mask.height {
        for col in 0..mask.width {
            let p = Pixel::new(row, col);
            if is_front(mask, p) {
                front.push(p);
            }
        }
    }
    front
}

/// Normal to the fill front and whether it had to fall back to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontPixel {
    pub position: Pixel,
    pub normal: Vec2,
    pub degenerate: bool,
}

/// Normalized central-difference gradient of the mask at a front pixel.
///
/// Out-of-bounds samples are clamped to the border. A symmetric neighborhood
/// yields the zero vector with `degenerate` set.
pub fn front_normal(mask: &InpaintMask, p: Pixel) -> Result<FrontPixel> {
    if p.row >= mask.height || p.col >= mask.width || !is_front(mask, p) {
        return Err(Error::NotOnFront(p.row, p.col));
    }
    let (r, c) = (p.row as isize, p.col as isize);
    let g = Vec2::new(
        (mask.value_clamped(r + 1, c) - mask.value_clamped(r - 1, c)) / 2.0,
        (mask.value_clamped(r, c + 1) - mask.value_clamped(r, c - 1)) / 2.0,
    );
    let n = g.norm();
    if n == 0.0 {
        return Ok(FrontPixel {
            position: p,
            normal: Vec2::ZERO,
            degenerate: true,
        });
    }
    Ok(FrontPixel {
        position: p,
        normal: Vec2::new(g.row / n, g.col / n),
        degenerate: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isophote {
    pub vector: Vec2,
    /// False when no fully known 3×3 stencil exists inside the patch.
    pub has_stencil: bool,
}

/// Strongest isophote inside the patch centered on `p`.
///
/// Gradients are taken by central differences at every pixel whose full 3×3
/// neighborhood is in bounds and known. The largest-magnitude gradient wins
/// (first in row-major order on ties) and is rotated by a quarter turn.
pub fn isophote(luma: &ScalarField, mask: &InpaintMask, p: Pixel, side: usize) -> Isophote {
    let half = (side / 2) as isize;
    let (pr, pc) = (p.row as isize, p.col as isize);
    let mut best: Option<(f64, Vec2)> = None;
    for r in (pr - half).max(1)..=(pr + half).min(luma.height as isize - 2) {
        for c in (pc - half).max(1)..=(pc + half).min(luma.width as isize - 2) {
            let stencil_known = (-1..=1)
                .all(|dr| (-1..=1).all(|dc| !mask.is_target((r + dr) as usize, (c + dc) as usize)));
            if !stencil_known {
                continue;
            }
            let (ru, cu) = (r as usize, c as usize);
            let g = Vec2::new(
                (luma.get(ru + 1, cu) - luma.get(ru - 1, cu)) / 2.0,
                (luma.get(ru, cu + 1) - luma.get(ru, cu - 1)) / 2.0,
            );
            let m = g.norm();
            if best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, g));
            }
        }
    }
    match best {
        Some((_, g)) => Isophote {
            vector: g.perp(),
            has_stencil: true,
        },
        None => Isophote {
            vector: Vec2::ZERO,
            has_stencil: false,
        },
    }
}

/// Dense copy of a patch window.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchWindow {
    pub side: usize,
    pub channels: usize,
    /// `side × side × channels` samples; out-of-bounds entries are 0.
    pub values: Vec<f64>,
    /// Per window pixel: whether it lies inside the image.
    pub in_bounds: Vec<bool>,
    /// Whether the whole window lies inside the image.
    pub valid: bool,
}

pub fn patch_window<G: Grid + ?Sized>(grid: &G, patch: PatchRef) -> PatchWindow {
    let channels = grid.channels();
    let n = patch.side * patch.side;
    let mut values = Vec::with_capacity(n * channels);
    let mut in_bounds = Vec::with_capacity(n);
    let (cr, cc) = (patch.center.row as isize, patch.center.col as isize);
    for (dr, dc) in patch.offsets() {
        let (r, c) = (cr + dr, cc + dc);
        if grid.contains(r, c) {
            in_bounds.push(true);
            for ch in 0..channels {
                values.push(grid.sample(r as usize, c as usize, ch));
            }
        } else {
            in_bounds.push(false);
            values.extend(std::iter::repeat_n(0.0, channels));
        }
    }
    PatchWindow {
        side: patch.side,
        channels,
        values,
        valid: patch.fits(grid.height(), grid.width()),
        in_bounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb(px: [f64; 3]) -> RasterImage {
        RasterImage::new(1, 1, 3, px.to_vec()).unwrap()
    }

    #[test]
    fn luma_examples() {
        assert_eq!(to_luma(&rgb([128.0; 3])).unwrap().get(0, 0), 128.0);
        assert!((to_luma(&rgb([255.0; 3])).unwrap().get(0, 0) - 255.0).abs() < 1e-12);
        assert!((to_luma(&rgb([255.0, 0.0, 0.0])).unwrap().get(0, 0) - 76.245).abs() < 1e-12);
        let gray = RasterImage::new(1, 2, 1, vec![3.0, 7.0]).unwrap();
        assert_eq!(to_luma(&gray).unwrap().samples(), &[3.0, 7.0]);
    }

    #[test]
    fn rejects_bad_images() {
        assert!(matches!(
            RasterImage::new(1, 1, 2, vec![0.0, 0.0]),
            Err(Error::UnsupportedChannels(2))
        ));
        assert!(matches!(
            RasterImage::new(2, 2, 1, vec![0.0; 3]),
            Err(Error::DataLength { .. })
        ));
        assert!(matches!(
            RasterImage::new(1, 1, 1, vec![256.0]),
            Err(Error::IntensityOutOfRange { .. })
        ));
    }

    #[test]
    fn front_of_empty_mask_is_empty() {
        assert!(extract_front(&InpaintMask::empty(5, 5)).is_empty());
    }

    #[test]
    fn isolated_target_is_its_own_front() {
        let mask = InpaintMask::from_fn(5, 5, |r, c| (r, c) == (2, 3));
        assert_eq!(extract_front(&mask), vec![Pixel::new(2, 3)]);
    }

    #[test]
    fn block_front_is_perimeter() {
        let mask = InpaintMask::from_fn(7, 7, |r, c| (2..=4).contains(&r) && (2..=4).contains(&c));
        let expected: Vec<Pixel> = [
            (2, 2),
            (2, 3),
            (2, 4),
            (3, 2),
            (3, 4),
            (4, 2),
            (4, 3),
            (4, 4),
        ]
        .into_iter()
        .map(Pixel::from)
        .collect();
        assert_eq!(extract_front(&mask), expected);
    }

    #[test]
    fn fully_masked_image_has_no_front() {
        let mask = InpaintMask::from_fn(4, 4, |_, _| true);
        assert!(extract_front(&mask).is_empty());
    }

    #[test]
    fn vertical_boundary_normal_is_horizontal() {
        let mask = InpaintMask::from_fn(6, 6, |_, c| c < 3);
        for row in 0..6 {
            let fp = front_normal(&mask, Pixel::new(row, 2)).unwrap();
            assert!(!fp.degenerate);
            assert_eq!(fp.normal.row, 0.0);
            assert!((fp.normal.col.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_pixel_normal_is_degenerate() {
        let mask = InpaintMask::from_fn(5, 5, |r, c| (r, c) == (2, 2));
        let fp = front_normal(&mask, Pixel::new(2, 2)).unwrap();
        assert!(fp.degenerate);
        assert_eq!(fp.normal, Vec2::ZERO);
    }

    #[test]
    fn diagonal_boundary_normal() {
        // Hand evaluation: both central differences equal -1/2.
        let mask = InpaintMask::from_fn(8, 8, |r, c| r + c < 8);
        let fp = front_normal(&mask, Pixel::new(3, 4)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((fp.normal.row + h).abs() < 1e-6);
        assert!((fp.normal.col + h).abs() < 1e-6);
    }

    #[test]
    fn normal_requires_front_pixel() {
        let mask = InpaintMask::from_fn(5, 5, |r, c| (1..=3).contains(&r) && (1..=3).contains(&c));
        assert!(matches!(
            front_normal(&mask, Pixel::new(2, 2)),
            Err(Error::NotOnFront(2, 2))
        ));
        assert!(front_normal(&mask, Pixel::new(0, 0)).is_err());
    }

    #[test]
    fn isophote_of_constant_field_is_zero() {
        let luma = ScalarField::new(9, 9, vec![42.0; 81]).unwrap();
        let mask = InpaintMask::from_fn(9, 9, |r, c| (r, c) == (4, 4));
        let iso = isophote(&luma, &mask, Pixel::new(4, 4), 5);
        assert!(iso.has_stencil);
        assert_eq!(iso.vector.norm(), 0.0);
    }

    #[test]
    fn isophote_follows_step_edge() {
        // Step of 100 between columns 3 and 4; central difference gives 50.
        let mut data = vec![0.0; 81];
        for r in 0..9 {
            for c in 4..9 {
                data[r * 9 + c] = 100.0;
            }
        }
        let luma = ScalarField::new(9, 9, data).unwrap();
        let mask = InpaintMask::from_fn(9, 9, |r, c| r >= 6 && c >= 6);
        let iso = isophote(&luma, &mask, Pixel::new(6, 6), 9);
        assert!(iso.has_stencil);
        assert_eq!(iso.vector.col, 0.0);
        assert!((iso.vector.row.abs() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn isophote_without_known_stencil() {
        let luma = ScalarField::new(9, 9, vec![1.0; 81]).unwrap();
        let mask = InpaintMask::from_fn(9, 9, |r, c| !(r == 0 && c == 0));
        let iso = isophote(&luma, &mask, Pixel::new(4, 4), 3);
        assert!(!iso.has_stencil);
        assert_eq!(iso.vector, Vec2::ZERO);
    }

    #[test]
    fn windows() {
        let img = RasterImage::filled(9, 9, 1, 5.0).unwrap();
        let w = patch_window(&img, PatchRef::new(Pixel::new(4, 4), 3).unwrap());
        assert!(w.valid);
        assert_eq!(w.values.len(), 9);

        let w = patch_window(&img, PatchRef::new(Pixel::new(0, 0), 3).unwrap());
        assert!(!w.valid);
        assert_eq!(w.in_bounds.iter().filter(|&&b| b).count(), 4);

        let w = patch_window(&img, PatchRef::new(Pixel::new(4, 4), 9).unwrap());
        assert!(w.valid);
        assert_eq!(w.values, img.data());
    }

    #[test]
    fn patch_side_must_be_odd() {
        assert!(PatchRef::new(Pixel::new(0, 0), 4).is_err());
        assert!(PatchRef::new(Pixel::new(0, 0), 1).is_err());
        assert!(PatchRef::new(Pixel::new(0, 0), 3).is_ok());
    }
}
