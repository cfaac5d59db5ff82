//! Exemplar-based region filling.
//!
//! Each iteration computes `priority = confidence * data` over the fill
//! front, picks the highest-priority target patch, scans every fully known
//! source patch for the one with the smallest masked distance, copies its
//! pixels into the unknown part of the target and propagates confidence.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Accumulator, MeasureConfig};
use crate::raster::{
    self, extract_front, front_normal, isophote, ConfidenceField, Grid, InpaintMask, PatchRef,
    Pixel, RasterImage, ScalarField,
};

/// Normalizer of the data term (maximum 8-bit intensity).
pub const DATA_NORMALIZER: f64 = 255.0;

pub const DEFAULT_PATCH_SIDE: usize = 9;
pub const DEFAULT_DATA_TERM_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub patch_side: usize,
    pub measure: MeasureConfig,
    pub data_term_floor: f64,
    /// `None` means one iteration per target pixel at most.
    pub max_iterations: Option<usize>,
    /// Keep a copy of the image every N iterations; 0 disables snapshots.
    pub snapshot_every: usize,
    /// Evaluate front priorities and candidates on the rayon pool.
    pub parallel: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            patch_side: DEFAULT_PATCH_SIDE,
            measure: MeasureConfig::default(),
            data_term_floor: DEFAULT_DATA_TERM_FLOOR,
            max_iterations: None,
            snapshot_every: 0,
            parallel: true,
        }
    }
}

impl EngineConfig {
    pub fn with_measure(measure: MeasureConfig) -> Self {
        Self {
            measure,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        raster::validate_side(self.patch_side)?;
        self.measure.validate()?;
        if !(self.data_term_floor > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "data_term_floor must be positive, got {}",
                self.data_term_floor
            )));
        }
        Ok(())
    }
}

/// Evolving image, mask and confidence during a fill.
#[derive(Clone, Debug)]
pub struct FillState {
    image: RasterImage,
    mask: InpaintMask,
    confidence: ConfidenceField,
    luma: ScalarField,
    iteration: usize,
}

impl FillState {
    pub fn new(image: RasterImage, mask: InpaintMask) -> Result<Self> {
        mask.matches(&image)?;
        let luma = raster::to_luma(&image)?;
        Ok(Self {
            confidence: ConfidenceField::from_mask(&mask),
            image,
            mask,
            luma,
            iteration: 0,
        })
    }

    pub fn image(&self) -> &RasterImage {
        &self.image
    }

    pub fn mask(&self) -> &InpaintMask {
        &self.mask
    }

    pub fn confidence(&self) -> &ConfidenceField {
        &self.confidence
    }

    pub fn luma(&self) -> &ScalarField {
        &self.luma
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn into_image(self) -> RasterImage {
        self.image
    }
}

fn window_bounds(center: usize, half: usize, len: usize) -> (usize, usize) {
    (center.saturating_sub(half), (center + half).min(len - 1))
}

/// `C(p)`: summed confidence of the known pixels in the patch divided by
/// the full patch area `side²`, even when the patch is clipped.
pub fn confidence_term(state: &FillState, p: Pixel, side: usize) -> f64 {
    let half = side / 2;
    let (r0, r1) = window_bounds(p.row, half, state.mask.height());
    let (c0, c1) = window_bounds(p.col, half, state.mask.width());
    let mut sum = 0.0;
    for r in r0..=r1 {
        for c in c0..=c1 {
            if !state.mask.is_target(r, c) {
                sum += state.confidence.get(r, c);
            }
        }
    }
    sum / (side * side) as f64
}

/// `D(p) = max(|isophote · normal| / 255, floor)`.
pub fn data_term(state: &FillState, p: Pixel, side: usize, floor: f64) -> f64 {
    let normal = match front_normal(&state.mask, p) {
        Ok(fp) if !fp.degenerate => fp.normal,
        _ => return floor,
    };
    let iso = isophote(&state.luma, &state.mask, p, side);
    (iso.vector.dot(normal).abs() / DATA_NORMALIZER).max(floor)
}

pub fn priority(state: &FillState, p: Pixel, side: usize, floor: f64) -> f64 {
    confidence_term(state, p, side) * data_term(state, p, side, floor)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetChoice {
    pub patch: PatchRef,
    pub priority: f64,
    pub confidence: f64,
}

/// Highest-priority front pixel; ties go to the smallest row-major index.
pub fn select_target(state: &FillState, cfg: &EngineConfig) -> Result<TargetChoice> {
    let front = extract_front(&state.mask);
    if front.is_empty() {
        return Err(Error::EmptyFront);
    }
    let side = cfg.patch_side;
    let floor = cfg.data_term_floor;
    let score = |&p: &Pixel| priority(state, p, side, floor);
    let priorities: Vec<f64> = if cfg.parallel {
        front.par_iter().map(score).collect()
    } else {
        front.iter().map(score).collect()
    };
    let mut best = 0;
    for (i, &value) in priorities.iter().enumerate().skip(1) {
        if value > priorities[best] {
            best = i;
        }
    }
    let p = front[best];
    Ok(TargetChoice {
        patch: PatchRef::new(p, side)?,
        priority: priorities[best],
        confidence: confidence_term(state, p, side),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceMatch {
    pub patch: PatchRef,
    pub distance: f64,
}

/// Known part of a target patch, flattened for repeated comparison.
struct TargetProbe {
    /// Per known pixel: signed sample offset relative to the window center.
    offsets: Vec<isize>,
    /// Known samples, row-major and channel-interleaved.
    values: Vec<f64>,
}

impl TargetProbe {
    fn new(state: &FillState, target: PatchRef) -> Self {
        let img = &state.image;
        let (w, ch) = (img.width() as isize, img.channels());
        let (cr, cc) = (target.center.row as isize, target.center.col as isize);
        let mut offsets = Vec::new();
        let mut values = Vec::new();
        for (dr, dc) in target.offsets() {
            let (r, c) = (cr + dr, cc + dc);
            if img.contains(r, c) && !state.mask.is_target(r as usize, c as usize) {
                offsets.push((dr * w + dc) * ch as isize);
                values.extend_from_slice(img.pixel(r as usize, c as usize));
            }
        }
        Self { offsets, values }
    }

    fn distance(&self, data: &[f64], channels: usize, center: usize, cfg: &MeasureConfig) -> f64 {
        let mut acc = Accumulator::new(cfg);
        let base = center as isize;
        for (k, &off) in self.offsets.iter().enumerate() {
            let start = (base + off) as usize;
            let tv = &self.values[k * channels..(k + 1) * channels];
            for (&t, &s) in tv.iter().zip(&data[start..start + channels]) {
                acc.push(t, s);
            }
        }
        // The probe is never empty: the target center lies on the front.
        acc.finish().unwrap_or(f64::INFINITY)
    }
}

/// Summed-area table over target pixels, for O(1) "window is fully known".
struct TargetCounts {
    width: usize,
    table: Vec<u32>,
}

impl TargetCounts {
    fn new(mask: &InpaintMask) -> Self {
        let (h, w) = (mask.height(), mask.width());
        let mut table = vec![0u32; (h + 1) * (w + 1)];
        for r in 0..h {
            let mut row_sum = 0;
            for c in 0..w {
                row_sum += mask.is_target(r, c) as u32;
                table[(r + 1) * (w + 1) + c + 1] = table[r * (w + 1) + c + 1] + row_sum;
            }
        }
        Self { width: w, table }
    }

    /// Targets in rows `r0..r1` and cols `c0..c1` (exclusive ends).
    fn count(&self, r0: usize, c0: usize, r1: usize, c1: usize) -> u32 {
        let s = self.width + 1;
        self.table[r1 * s + c1] + self.table[r0 * s + c0]
            - self.table[r0 * s + c1]
            - self.table[r1 * s + c0]
    }
}

/// Exhaustive search over every in-bounds, fully known source window.
///
/// Distances use only the known pixels of the target patch. Ties go to the
/// smallest row-major candidate center.
pub fn search_best(state: &FillState, target: PatchRef, cfg: &EngineConfig) -> Result<SourceMatch> {
    cfg.measure.validate()?;
    let side = target.side();
    let img = &state.image;
    let (h, w) = (img.height(), img.width());
    if side > h || side > w {
        return Err(Error::NoCandidate(side));
    }
    let half = side / 2;
    let probe = TargetProbe::new(state, target);
    if probe.offsets.is_empty() {
        return Err(Error::NoKnownElements);
    }
    let counts = TargetCounts::new(&state.mask);
    let channels = img.channels();
    let data = img.data();

    let scan_row = |r: usize| -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for c in half..w - half {
            if counts.count(r - half, c - half, r + half + 1, c + half + 1) != 0 {
                continue;
            }
            let center = (r * w + c) * channels;
            let d = probe.distance(data, channels, center, &cfg.measure);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, r * w + c));
            }
        }
        best
    };

    let rows = half..h - half;
    let per_row: Vec<Option<(f64, usize)>> = if cfg.parallel {
        rows.into_par_iter().map(scan_row).collect()
    } else {
        rows.map(scan_row).collect()
    };

    let mut best: Option<(f64, usize)> = None;
    for (d, idx) in per_row.into_iter().flatten() {
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, idx));
        }
    }
    let (distance, idx) = best.ok_or(Error::NoCandidate(side))?;
    Ok(SourceMatch {
        patch: PatchRef::new(Pixel::new(idx / w, idx % w), side)?,
        distance,
    })
}

/// Copies source pixels into the unknown part of the target window, marks
/// them known and assigns them the target center's confidence. Returns the
/// number of pixels filled.
pub fn transfer(state: &mut FillState, target: PatchRef, source: PatchRef) -> usize {
    let fill_confidence = confidence_term(state, target.center, target.side());
    let (cr, cc) = (target.center.row as isize, target.center.col as isize);
    let (sr, sc) = (source.center.row as isize, source.center.col as isize);
    let channels = state.image.channels();
    let mut px = [0.0f64; 3];
    let mut filled = 0;
    for (dr, dc) in target.offsets() {
        let (r, c) = (cr + dr, cc + dc);
        if !state.mask.is_target_at(r, c) {
            continue;
        }
        let (r, c) = (r as usize, c as usize);
        let (qr, qc) = ((sr + dr) as usize, (sc + dc) as usize);
        px[..channels].copy_from_slice(state.image.pixel(qr, qc));
        state.image.set_pixel(r, c, &px[..channels]);
        state.mask.set(r, c, false);
        state.confidence.set(r, c, fill_confidence);
        filled += 1;
    }
    if filled > 0 {
        state.refresh_luma(target);
    }
    filled
}

impl FillState {
    fn refresh_luma(&mut self, window: PatchRef) {
        let half = window.half();
        let (r0, r1) = window_bounds(window.center.row, half, self.image.height());
        let (c0, c1) = window_bounds(window.center.col, half, self.image.width());
        for r in r0..=r1 {
            for c in c0..=c1 {
                self.luma
                    .set(r, c, raster::pixel_luma(self.image.pixel(r, c)));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub target: Pixel,
    pub source: Pixel,
    pub distance: f64,
    pub priority: f64,
    pub filled: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FillReport {
    pub iterations: usize,
    /// True when the target region was emptied.
    pub completed: bool,
    pub initial_target: usize,
    pub records: Vec<IterationRecord>,
    /// `(iteration, image)` pairs taken every `snapshot_every` iterations.
    pub snapshots: Vec<(usize, RasterImage)>,
}

/// Runs the fill loop until the target region is empty or the iteration
/// budget is spent.
pub fn inpaint(
    image: &RasterImage,
    mask: &InpaintMask,
    cfg: &EngineConfig,
) -> Result<(RasterImage, FillReport)> {
    cfg.validate()?;
    mask.matches(image)?;
    let initial_target = mask.target_count();
    if initial_target == 0 {
        return Ok((
            image.clone(),
            FillReport {
                completed: true,
                ..FillReport::default()
            },
        ));
    }
    if initial_target == mask.height() * mask.width() {
        return Err(Error::NoSourceRegion);
    }
    if cfg.patch_side > image.height() || cfg.patch_side > image.width() {
        return Err(Error::PatchTooLarge {
            side: cfg.patch_side,
            height: image.height(),
            width: image.width(),
        });
    }

    let mut state = FillState::new(image.clone(), mask.clone())?;
    let budget = cfg.max_iterations.unwrap_or(initial_target);
    let mut report = FillReport {
        initial_target,
        ..FillReport::default()
    };
    let mut remaining = initial_target;
    while remaining > 0 && state.iteration < budget {
        let choice = select_target(&state, cfg)?;
        let found = search_best(&state, choice.patch, cfg)?;
        let filled = transfer(&mut state, choice.patch, found.patch);
        debug_assert!(filled > 0);
        remaining -= filled;
        state.iteration += 1;
        report.records.push(IterationRecord {
            iteration: state.iteration,
            target: choice.patch.center,
            source: found.patch.center,
            distance: found.distance,
            priority: choice.priority,
            filled,
        });
        if cfg.snapshot_every > 0 && state.iteration % cfg.snapshot_every == 0 {
            report
                .snapshots
                .push((state.iteration, state.image.clone()));
        }
    }
    report.iterations = state.iteration;
    report.completed = remaining == 0;
    Ok((state.into_image(), report))
}
