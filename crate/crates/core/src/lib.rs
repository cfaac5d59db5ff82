//! Exemplar-based image inpainting with a hybrid Chebyshev/Minkowski patch
//! distance (HySim), SSD/Minkowski/Chebyshev baselines, a Perona–Malik
//! diffusion baseline, synthetic evaluation scenes and quality metrics.

pub mod cli;
pub mod diffusion;
pub mod error;
pub mod exemplar;
pub mod measures;
pub mod quality;
pub mod raster;

pub use error::{Error, Result};
pub use exemplar::{inpaint, EngineConfig, FillReport};
pub use measures::{MeasureConfig, MeasureFamily};
pub use raster::{InpaintMask, PatchRef, Pixel, RasterImage};
