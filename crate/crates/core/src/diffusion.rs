//! Perona–Malik diffusion used as a fill baseline.
//!
//! Explicit 4-neighbor scheme applied to target pixels only, channel by
//! channel, with the known pixels held fixed as boundary data. Missing
//! neighbors at the image border contribute no flux.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Grid, InpaintMask, RasterImage};

/// Largest stable step for the explicit 4-neighbor update.
pub const MAX_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conductance {
    /// `exp(-(g/κ)²)`
    Exponential,
    /// `1 / (1 + (g/κ)²)`
    Rational,
}

impl std::str::FromStr for Conductance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(Conductance::Exponential),
            "rational" => Ok(Conductance::Rational),
            _ => Err(Error::Usage(format!("unknown conductance {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    pub kappa: f64,
    pub step: f64,
    pub max_steps: usize,
    /// Stop once the mean absolute update over target samples drops below this.
    pub tol: f64,
    pub conductance: Conductance,
    pub parallel: bool,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            kappa: 30.0,
            step: 0.2,
            max_steps: 5000,
            tol: 1e-4,
            conductance: Conductance::Exponential,
            parallel: true,
        }
    }
}

impl DiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidDiffusion(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if !(self.step > 0.0 && self.step <= MAX_STEP) {
            return Err(Error::InvalidDiffusion(format!(
                "step must be in (0, {MAX_STEP}], got {}",
                self.step
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidDiffusion(format!(
                "tol must be >= 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

pub fn pm_conductance(g: f64, kappa: f64, kind: Conductance) -> f64 {
    let s = (g / kappa) * (g / kappa);
    match kind {
        Conductance::Exponential => (-s).exp(),
        Conductance::Rational => 1.0 / (1.0 + s),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiffusionReport {
    pub steps: usize,
    pub final_update: f64,
    pub converged: bool,
}

/// Fills the target region by anisotropic diffusion from the known pixels.
///
/// Target pixels start at the per-channel mean of the known region.
pub fn pm_inpaint(
    image: &RasterImage,
    mask: &InpaintMask,
    cfg: &DiffusionConfig,
) -> Result<(RasterImage, DiffusionReport)> {
    cfg.validate()?;
    mask.matches(image)?;
    let (h, w, ch) = image.shape();
    let targets: Vec<usize> = (0..h * w).filter(|&i| mask.data()[i]).collect();
    if targets.is_empty() {
        return Ok((
            image.clone(),
            DiffusionReport {
                converged: true,
                ..DiffusionReport::default()
            },
        ));
    }
    if targets.len() == h * w {
        return Err(Error::NoSourceRegion);
    }

    let mut means = vec![0.0; ch];
    let known = h * w - targets.len();
    for i in (0..h * w).filter(|&i| !mask.data()[i]) {
        for (m, &v) in means.iter_mut().zip(&image.data()[i * ch..(i + 1) * ch]) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= known as f64);

    let mut current = image.data().to_vec();
    for &i in &targets {
        current[i * ch..(i + 1) * ch].copy_from_slice(&means);
    }

    let update = |cur: &[f64], i: usize| -> [f64; 3] {
        let (r, c) = (i / w, i % w);
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate().take(ch) {
            let u = cur[i * ch + k];
            let mut flux = 0.0;
            let mut add = |j: usize| {
                let diff = cur[j * ch + k] - u;
                flux += pm_conductance(diff.abs(), cfg.kappa, cfg.conductance) * diff;
            };
            if r > 0 {
                add(i - w);
            }
            if r + 1 < h {
                add(i + w);
            }
            if c > 0 {
                add(i - 1);
            }
            if c + 1 < w {
                add(i + 1);
            }
            *slot = u + cfg.step * flux;
        }
        out
    };

    let mut report = DiffusionReport::default();
    let samples = (targets.len() * ch) as f64;
    while report.steps < cfg.max_steps {
        let next: Vec<[f64; 3]> = if cfg.parallel {
            targets.par_iter().map(|&i| update(&current, i)).collect()
        } else {
            targets.iter().map(|&i| update(&current, i)).collect()
        };
        let mut total = 0.0;
        for (&i, values) in targets.iter().zip(&next) {
            for k in 0..ch {
                total += (values[k] - current[i * ch + k]).abs();
                current[i * ch + k] = values[k];
            }
        }
        report.steps += 1;
        report.final_update = total / samples;
        if report.final_update < cfg.tol {
            report.converged = true;
            break;
        }
    }

    for v in &mut current {
        *v = v.clamp(0.0, 255.0);
    }
    Ok((RasterImage::new(h, w, image.channels(), current)?, report))
}
