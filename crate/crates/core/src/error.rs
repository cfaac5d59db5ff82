use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(usize),

    #[error("data length {actual} does not match {height}x{width}x{channels}")]
    DataLength {
        height: usize,
        width: usize,
        channels: usize,
        actual: usize,
    },

    #[error("intensity {value} at index {index} is outside [0, 255]")]
    IntensityOutOfRange { index: usize, value: f64 },

    #[error("dimension mismatch: image is {image_h}x{image_w}, mask is {mask_h}x{mask_w}")]
    DimensionMismatch {
        image_h: usize,
        image_w: usize,
        mask_h: usize,
        mask_w: usize,
    },

    #[error("images differ in shape: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize, usize), (usize, usize, usize)),

    #[error("patch side {0} must be odd and at least 3")]
    InvalidPatchSide(usize),

    #[error("patch side {side} does not fit inside a {height}x{width} image")]
    PatchTooLarge {
        side: usize,
        height: usize,
        width: usize,
    },

    #[error("pixel ({0}, {1}) is not on the fill front")]
    NotOnFront(usize, usize),

    #[error("no known elements to compare")]
    NoKnownElements,

    #[error("masked pair vectors differ in length ({a}, {b}, known {known})")]
    PairLength { a: usize, b: usize, known: usize },

    #[error("Minkowski exponent {0} must be >= 1")]
    InvalidExponent(f64),

    #[error("invalid measure weights alpha={alpha}, beta={beta}")]
    InvalidWeights { alpha: f64, beta: f64 },

    #[error("measure family mismatch: expected {expected}, got {actual}")]
    FamilyMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("mask covers the whole image; there is no source region")]
    NoSourceRegion,

    #[error("fill front is empty")]
    EmptyFront,

    #[error("no fully known source patch of side {0} exists")]
    NoCandidate(usize),

    #[error("invalid diffusion config: {0}")]
    InvalidDiffusion(String),

    #[error("fixture size {0} is too small (minimum 32)")]
    FixtureTooSmall(usize),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("region spec is inconsistent: {0}")]
    InvalidRegionSpec(String),

    #[error("invalid engine config: {0}")]
    InvalidConfig(String),

    #[error("image codec error for {path}: {source}")]
    Codec {
        path: String,
        #[source]
        source: image::ImageError,
    },

    #[error("I/O error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("report error: {0}")]
    Report(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}
