//! Patch distances and the distance-to-similarity construction.
//!
//! Every family is evaluated over a [`MaskedPair`]: only elements flagged as
//! known take part. HySim is `alpha * chebyshev + beta * minkowski(P)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureFamily {
    Ssd,
    Minkowski,
    Chebyshev,
    #[serde(rename = "hysim")]
    HySim,
}

impl MeasureFamily {
    pub const ALL: [MeasureFamily; 4] = [
        MeasureFamily::Ssd,
        MeasureFamily::Minkowski,
        MeasureFamily::Chebyshev,
        MeasureFamily::HySim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureFamily::Ssd => "ssd",
            MeasureFamily::Minkowski => "minkowski",
            MeasureFamily::Chebyshev => "chebyshev",
            MeasureFamily::HySim => "hysim",
        }
    }

    /// Whether the family reads the Minkowski exponent.
    pub fn uses_exponent(self) -> bool {
        matches!(self, MeasureFamily::Minkowski | MeasureFamily::HySim)
    }
}

impl fmt::Display for MeasureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MeasureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown measure {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub family: MeasureFamily,
    pub alpha: f64,
    pub beta: f64,
    pub p_exponent: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self::hysim(1.0, 1.0, 2.0)
    }
}

impl MeasureConfig {
    pub fn ssd() -> Self {
        Self {
            family: MeasureFamily::Ssd,
            alpha: 1.0,
            beta: 1.0,
            p_exponent: 2.0,
        }
    }

    pub fn chebyshev() -> Self {
        Self {
            family: MeasureFamily::Chebyshev,
            ..Self::ssd()
        }
    }

    pub fn minkowski(p_exponent: f64) -> Self {
        Self {
            family: MeasureFamily::Minkowski,
            p_exponent,
            ..Self::ssd()
        }
    }

    pub fn hysim(alpha: f64, beta: f64, p_exponent: f64) -> Self {
        Self {
            family: MeasureFamily::HySim,
            alpha,
            beta,
            p_exponent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family.uses_exponent() && !(self.p_exponent >= 1.0) {
            return Err(Error::InvalidExponent(self.p_exponent));
        }
        if self.family == MeasureFamily::HySim {
            let ok = |w: f64| w.is_finite() && w >= 0.0;
            if !ok(self.alpha) || !ok(self.beta) || (self.alpha == 0.0 && self.beta == 0.0) {
                return Err(Error::InvalidWeights {
                    alpha: self.alpha,
                    beta: self.beta,
                });
            }
        }
        Ok(())
    }

    /// Short label such as `hysim(1,1,P=2)`.
    pub fn label(&self) -> String {
        match self.family {
            MeasureFamily::Ssd => "ssd".into(),
            MeasureFamily::Chebyshev => "chebyshev".into(),
            MeasureFamily::Minkowski => format!("minkowski(P={})", self.p_exponent),
            MeasureFamily::HySim => {
                format!("hysim({},{},P={})", self.alpha, self.beta, self.p_exponent)
            }
        }
    }
}

/// Two equally long sample vectors and the elements that may be compared.
#[derive(Clone, Copy, Debug)]
pub struct MaskedPair<'a> {
    a: &'a [f64],
    b: &'a [f64],
    known: &'a [bool],
}

impl<'a> MaskedPair<'a> {
    pub fn new(a: &'a [f64], b: &'a [f64], known: &'a [bool]) -> Result<Self> {
        if a.len() != b.len() || a.len() != known.len() {
            return Err(Error::PairLength {
                a: a.len(),
                b: b.len(),
                known: known.len(),
            });
        }
        Ok(Self { a, b, known })
    }

    pub fn swapped(self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            known: self.known,
        }
    }

    pub fn known_count(&self) -> usize {
        self.known.iter().filter(|&&k| k).count()
    }

    fn accumulate(&self, cfg: &MeasureConfig) -> Result<f64> {
        let mut acc = Accumulator::new(cfg);
        for ((&a, &b), _) in self
            .a
            .iter()
            .zip(self.b)
            .zip(self.known)
            .filter(|(_, &k)| k)
        {
            acc.push(a, b);
        }
        acc.finish()
    }
}

/// `|d|^p`, exact for small integer exponents.
#[inline]
pub(crate) fn abs_pow(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

#[inline]
pub(crate) fn root(sum: f64, p: f64) -> f64 {
    if p == 1.0 {
        sum
    } else {
        sum.powf(1.0 / p)
    }
}

/// Streaming evaluator for a single pair. Feeding the known elements in
/// order and calling [`Accumulator::finish`] gives the same bits as
/// [`evaluate`] on the equivalent [`MaskedPair`].
#[derive(Clone, Copy, Debug)]
pub struct Accumulator {
    cfg: MeasureConfig,
    max: f64,
    sum: f64,
    count: usize,
}

impl Accumulator {
    pub fn new(cfg: &MeasureConfig) -> Self {
        Self {
            cfg: *cfg,
            max: 0.0,
            sum: 0.0,
            count: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, a: f64, b: f64) {
        let d = (a - b).abs();
        self.count += 1;
        match self.cfg.family {
            MeasureFamily::Ssd => self.sum += d * d,
            MeasureFamily::Chebyshev => self.max = self.max.max(d),
            MeasureFamily::Minkowski => self.sum += abs_pow(d, self.cfg.p_exponent),
            MeasureFamily::HySim => {
                self.max = self.max.max(d);
                self.sum += abs_pow(d, self.cfg.p_exponent);
            }
        }
    }

    pub fn finish(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::NoKnownElements);
        }
        let p = self.cfg.p_exponent;
        Ok(match self.cfg.family {
            MeasureFamily::Ssd => self.sum,
            MeasureFamily::Chebyshev => self.max,
            MeasureFamily::Minkowski => root(self.sum, p),
            MeasureFamily::HySim => self.cfg.alpha * self.max + self.cfg.beta * root(self.sum, p),
        })
    }
}

/// Sum of squared differences over the known elements.
pub fn ssd(pair: &MaskedPair<'_>) -> Result<f64> {
    pair.accumulate(&MeasureConfig::ssd())
}

/// `(Σ |a - b|^P)^(1/P)` over the known elements.
pub fn minkowski(pair: &MaskedPair<'_>, p_exponent: f64) -> Result<f64> {
    let cfg = MeasureConfig::minkowski(p_exponent);
    cfg.validate()?;
    pair.accumulate(&cfg)
}

/// Largest absolute difference over the known elements.
pub fn chebyshev(pair: &MaskedPair<'_>) -> Result<f64> {
    pair.accumulate(&MeasureConfig::chebyshev())
}

pub fn hysim(pair: &MaskedPair<'_>, cfg: &MeasureConfig) -> Result<f64> {
    if cfg.family != MeasureFamily::HySim {
        return Err(Error::FamilyMismatch {
            expected: "hysim",
            actual: cfg.family.name(),
        });
    }
    cfg.validate()?;
    pair.accumulate(cfg)
}

/// Dispatches to the configured family.
pub fn evaluate(pair: &MaskedPair<'_>, cfg: &MeasureConfig) -> Result<f64> {
    cfg.validate()?;
    pair.accumulate(cfg)
}

/// `s = S - d`: larger means more similar, `S` is reached only at `d = 0`.
pub fn similarity_from_distance(d_value: f64, bound: f64) -> f64 {
    bound - d_value
}

/// Distance between an all-0 and an all-255 vector of `elements` samples,
/// the largest value any family attains on 8-bit data.
pub fn max_distance(cfg: &MeasureConfig, elements: usize) -> Result<f64> {
    cfg.validate()?;
    let mut acc = Accumulator::new(cfg);
    for _ in 0..elements {
        acc.push(0.0, 255.0);
    }
    acc.finish()
}
