//! Batch front end: file codecs, run reports, the `run` and `bench`
//! commands.
//!
//! The argument structs double as the library entry points so the thin
//! binary only parses and forwards.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use image::{DynamicImage, ImageBuffer, Luma, Rgb};
use serde::{Deserialize, Serialize};

use crate::diffusion::{pm_inpaint, Conductance, DiffusionConfig};
use crate::error::{Error, Result};
use crate::exemplar::{self, EngineConfig, IterationRecord};
use crate::measures::{MeasureConfig, MeasureFamily};
use crate::quality::{self, generate_fixture, FixtureName};
use crate::raster::{to_luma, Grid, InpaintMask, RasterImage};

/// Mask luma at or above this marks a target pixel.
pub const MASK_THRESHOLD: f64 = 128.0;

#[derive(Debug, Parser)]
#[command(
    name = "hysim",
    version,
    about = "Exemplar-based inpainting with hybrid patch distances"
)]
pub struct Cli {
    /// Worker threads for the patch search (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inpaint one image (or generated fixture) and write the result.
    Run(RunArgs),
    /// Sweep fixtures × measures and print a comparison table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exemplar,
    Pm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Ssd,
    Minkowski,
    Chebyshev,
    Hysim,
}

impl From<MeasureArg> for MeasureFamily {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Ssd => MeasureFamily::Ssd,
            MeasureArg::Minkowski => MeasureFamily::Minkowski,
            MeasureArg::Chebyshev => MeasureFamily::Chebyshev,
            MeasureArg::Hysim => MeasureFamily::HySim,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConductanceArg {
    Exponential,
    Rational,
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Output image (.png, .ppm or .pgm).
    #[arg(long, default_value = "out.png")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Minkowski exponent P.
    #[arg(long = "p")]
    pub p_exponent: Option<f64>,
    #[arg(long)]
    pub patch_size: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Write `<out>_NNNN.<ext>` every N iterations.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long)]
    pub data_floor: Option<f64>,
    /// Structured run report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Run on a generated scene instead of --image/--mask.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub fixture_size: Option<usize>,
    /// Ground truth for PSNR when running on files.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Reserved; the engine is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub pm_steps: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub conductance: Option<ConductanceArg>,
    /// Re-run the configuration echoed in a previous report.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[arg(skip)]
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureRef {
    pub name: FixtureName,
    pub size: usize,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: Method,
    pub image: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub fixture: Option<FixtureRef>,
    pub out: PathBuf,
    pub engine: EngineConfig,
    pub diffusion: DiffusionConfig,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub psnr: Option<f64>,
    pub region_bleed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub iterations: usize,
    pub completed: bool,
    pub wall_time: f64,
    pub records: Vec<IterationRecord>,
    pub metrics: Metrics,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn codec_err(path: &Path) -> impl FnOnce(image::ImageError) -> Error + '_ {
    move |source| Error::Codec {
        path: path.display().to_string(),
        source,
    }
}

/// Decodes an 8-bit image. Grayscale files become 1-channel, everything
/// else 3-channel RGB (alpha is dropped).
pub fn load_image(path: &Path) -> Result<RasterImage> {
    let img = image::open(path).map_err(codec_err(path))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(_)
        | DynamicImage::ImageLumaA8(_)
        | DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_) => {
            let buf = img.to_luma8();
            RasterImage::new(h, w, 1, buf.into_raw().into_iter().map(f64::from).collect())
        }
        _ => {
            let buf = img.to_rgb8();
            RasterImage::new(h, w, 3, buf.into_raw().into_iter().map(f64::from).collect())
        }
    }
}

/// Any image; luma at or above [`MASK_THRESHOLD`] marks the target region.
pub fn load_mask(path: &Path) -> Result<InpaintMask> {
    let img = load_image(path)?;
    let luma = to_luma(&img)?;
    InpaintMask::new(
        img.height(),
        img.width(),
        luma.samples()
            .iter()
            .map(|&v| v >= MASK_THRESHOLD)
            .collect(),
    )
}

/// Rounds half away from zero and clamps to 8 bits.
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn save_image(path: &Path, image: &RasterImage) -> Result<()> {
    let (h, w, ch) = image.shape();
    let raw: Vec<u8> = image.data().iter().map(|&v| quantize(v)).collect();
    let dynamic = if ch == 1 {
        DynamicImage::ImageLuma8(
            ImageBuffer::<Luma<u8>, _>::from_raw(w as u32, h as u32, raw).expect("buffer size"),
        )
    } else {
        DynamicImage::ImageRgb8(
            ImageBuffer::<Rgb<u8>, _>::from_raw(w as u32, h as u32, raw).expect("buffer size"),
        )
    };
    dynamic.save(path).map_err(codec_err(path))
}

pub fn save_mask(path: &Path, mask: &InpaintMask) -> Result<()> {
    let img = RasterImage::new(
        mask.height(),
        mask.width(),
        1,
        mask.data()
            .iter()
            .map(|&t| if t { 255.0 } else { 0.0 })
            .collect(),
    )?;
    save_image(path, &img)
}

/// `dir/out.png` -> `dir/out_0012.png`.
pub fn snapshot_path(out: &Path, iteration: usize) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("png");
    out.with_file_name(format!("{stem}_{iteration:04}.{ext}"))
}

/// Runs `f` on a pool with `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

impl RunArgs {
    /// Resolves flags (or a replayed report) into a complete config plus
    /// warnings about flags that have no effect.
    pub fn resolve(&self) -> Result<(RunConfig, Vec<String>)> {
        let mut warnings = Vec::new();
        if let Some(path) = &self.replay {
            let mut config = RunReport::read(path)?.config;
            if self.out != Path::new("out.png") {
                config.out = self.out.clone();
            }
            return Ok((config, warnings));
        }

        let method = self.method.unwrap_or(Method::Exemplar);
        let family: MeasureFamily = self.measure.map_or(MeasureFamily::HySim, Into::into);
        let defaults = MeasureConfig::default();
        let measure = MeasureConfig {
            family,
            alpha: self.alpha.unwrap_or(defaults.alpha),
            beta: self.beta.unwrap_or(defaults.beta),
            p_exponent: self.p_exponent.unwrap_or(defaults.p_exponent),
        };
        if self.p_exponent.is_some() && !family.uses_exponent() {
            warnings.push(format!(
                "--p has no effect with --measure {family}; ignored"
            ));
        }
        if (self.alpha.is_some() || self.beta.is_some()) && family != MeasureFamily::HySim {
            warnings.push(format!(
                "--alpha/--beta have no effect with --measure {family}; ignored"
            ));
        }
        if method == Method::Pm && self.measure.is_some() {
            warnings.push("--measure has no effect with --method pm; ignored".into());
        }
        if method == Method::Exemplar
            && (self.kappa.is_some() || self.step.is_some() || self.pm_steps.is_some())
        {
            warnings.push("diffusion flags have no effect with --method exemplar; ignored".into());
        }
        if self.seed.is_some() {
            warnings.push("--seed is reserved; the engine is deterministic".into());
        }

        let engine = EngineConfig {
            patch_side: self.patch_size.unwrap_or(exemplar::DEFAULT_PATCH_SIDE),
            measure,
            data_term_floor: self.data_floor.unwrap_or(exemplar::DEFAULT_DATA_TERM_FLOOR),
            max_iterations: self.max_iters,
            snapshot_every: self.snapshot_every.unwrap_or(0),
            parallel: true,
        };
        let dd = DiffusionConfig::default();
        let diffusion = DiffusionConfig {
            kappa: self.kappa.unwrap_or(dd.kappa),
            step: self.step.unwrap_or(dd.step),
            max_steps: self.pm_steps.unwrap_or(dd.max_steps),
            tol: self.tol.unwrap_or(dd.tol),
            conductance: match self.conductance {
                Some(ConductanceArg::Rational) => Conductance::Rational,
                Some(ConductanceArg::Exponential) => Conductance::Exponential,
                None => dd.conductance,
            },
            parallel: true,
        };

        let fixture = match &self.fixture {
            Some(name) => {
                if self.image.is_some() || self.mask.is_some() {
                    warnings.push("--fixture given; --image/--mask ignored".into());
                }
                Some(FixtureRef {
                    name: name.parse()?,
                    size: self.fixture_size.unwrap_or(64),
                })
            }
            None => {
                if self.image.is_none() || self.mask.is_none() {
                    return Err(Error::Usage(
                        "either --fixture or both --image and --mask are required".into(),
                    ));
                }
                None
            }
        };

        engine.validate()?;
        if method == Method::Pm {
            diffusion.validate()?;
        }
        Ok((
            RunConfig {
                method,
                image: self.image.clone(),
                mask: self.mask.clone(),
                truth: self.truth.clone(),
                fixture,
                out: self.out.clone(),
                engine,
                diffusion,
                seed: self.seed,
            },
            warnings,
        ))
    }
}

/// Result of a `run`, kept in memory for callers that want the pixels.
#[derive(Debug)]
pub struct RunOutcome {
    pub image: RasterImage,
    pub report: RunReport,
}

/// Executes a resolved config: decode, fill, encode, report.
pub fn execute(
    config: RunConfig,
    warnings: Vec<String>,
    report_path: Option<&Path>,
) -> Result<RunOutcome> {
    let (image, mask, truth, regions) = match &config.fixture {
        Some(f) => {
            let fx = generate_fixture(f.name, f.size)?;
            (fx.image, fx.mask, Some(fx.truth), Some(fx.regions))
        }
        None => {
            let image_path = config
                .image
                .as_deref()
                .expect("resolved config has an image");
            let mask_path = config.mask.as_deref().expect("resolved config has a mask");
            let image = load_image(image_path)?;
            let mask = load_mask(mask_path)?;
            mask.matches(&image)?;
            let truth = config.truth.as_deref().map(load_image).transpose()?;
            (image, mask, truth, None)
        }
    };

    let started = Instant::now();
    let (result, iterations, completed, records, snapshots) = match config.method {
        Method::Exemplar => {
            let (img, rep) = exemplar::inpaint(&image, &mask, &config.engine)?;
            (
                img,
                rep.iterations,
                rep.completed,
                rep.records,
                rep.snapshots,
            )
        }
        Method::Pm => {
            let (img, rep) = pm_inpaint(&image, &mask, &config.diffusion)?;
            (img, rep.steps, rep.converged, Vec::new(), Vec::new())
        }
    };
    let wall_time = started.elapsed().as_secs_f64();

    save_image(&config.out, &result)?;
    let mut outputs = vec![config.out.clone()];
    for (iteration, snap) in &snapshots {
        let path = snapshot_path(&config.out, *iteration);
        save_image(&path, snap)?;
        outputs.push(path);
    }

    let metrics = Metrics {
        psnr: truth
            .as_ref()
            .map(|t| quality::psnr(&result, t))
            .transpose()?,
        region_bleed: regions
            .as_ref()
            .map(|r| quality::region_bleed(&result, r, &mask))
            .transpose()?,
    };

    let report = RunReport {
        config,
        iterations,
        completed,
        wall_time,
        records,
        metrics,
        outputs,
        warnings,
    };
    if let Some(path) = report_path {
        report.write(path)?;
    }
    Ok(RunOutcome {
        image: result,
        report,
    })
}

pub fn run(args: &RunArgs) -> Result<RunOutcome> {
    let (config, warnings) = args.resolve()?;
    let report_path = args.report.clone();
    with_threads(args.threads, move || {
        execute(config, warnings, report_path.as_deref())
    })?
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated fixture names (default: all).
    #[arg(long, value_delimiter = ',')]
    pub fixtures: Vec<String>,
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long, default_value_t = exemplar::DEFAULT_PATCH_SIDE)]
    pub patch_size: usize,
    /// HySim exponents to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0, 4.0])]
    pub p_values: Vec<f64>,
    /// Write the rows as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Directory for the filled images, one per row.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(skip)]
    pub threads: usize,
}

impl Default for BenchArgs {
    fn default() -> Self {
        Self {
            fixtures: Vec::new(),
            size: 64,
            patch_size: exemplar::DEFAULT_PATCH_SIDE,
            p_values: vec![1.0, 2.0, 3.0, 4.0],
            json: None,
            out_dir: None,
            threads: 0,
        }
    }
}

/// The measures compared on every fixture.
pub fn bench_measures(p_values: &[f64]) -> Vec<MeasureConfig> {
    let mut out = vec![
        MeasureConfig::ssd(),
        MeasureConfig::chebyshev(),
        MeasureConfig::minkowski(2.0),
    ];
    out.extend(p_values.iter().map(|&p| MeasureConfig::hysim(1.0, 1.0, p)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub fixture: FixtureName,
    pub measure: String,
    pub config: MeasureConfig,
    pub bleed: Option<f64>,
    pub psnr: Option<f64>,
    pub iterations: Option<usize>,
    pub time_s: f64,
    pub error: Option<String>,
}

impl BenchRow {
    /// Row without the timing column, for reproducibility checks.
    pub fn metrics_key(
        &self,
    ) -> (
        FixtureName,
        String,
        Option<u64>,
        Option<u64>,
        Option<usize>,
        Option<String>,
    ) {
        (
            self.fixture,
            self.measure.clone(),
            self.bleed.map(f64::to_bits),
            self.psnr.map(f64::to_bits),
            self.iterations,
            self.error.clone(),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<20} {:<22} {:>8} {:>8} {:>6} {:>8}",
            "fixture", "measure", "bleed%", "psnr", "iters", "time_s"
        );
        for row in &self.rows {
            match &row.error {
                Some(e) => {
                    let _ = writeln!(
                        s,
                        "{:<20} {:<22} error: {e}",
                        row.fixture.as_str(),
                        row.measure
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        "{:<20} {:<22} {:>8.3} {:>8.2} {:>6} {:>8.3}",
                        row.fixture.as_str(),
                        row.measure,
                        row.bleed.unwrap_or(f64::NAN) * 100.0,
                        row.psnr.unwrap_or(f64::NAN),
                        row.iterations.unwrap_or(0),
                        row.time_s
                    );
                }
            }
        }
        s
    }
}

/// Runs one fixture × measure cell. Failures are recorded in the row.
pub fn bench_cell(
    fixture: FixtureName,
    size: usize,
    patch_side: usize,
    measure: MeasureConfig,
) -> (Option<RasterImage>, BenchRow) {
    let started = Instant::now();
    let outcome = generate_fixture(fixture, size).and_then(|fx| {
        let cfg = EngineConfig {
            patch_side,
            measure,
            ..EngineConfig::default()
        };
        let (img, rep) = exemplar::inpaint(&fx.image, &fx.mask, &cfg)?;
        let bleed = quality::region_bleed(&img, &fx.regions, &fx.mask)?;
        let psnr = quality::psnr(&img, &fx.truth)?;
        Ok((img, bleed, psnr, rep.iterations))
    });
    let time_s = started.elapsed().as_secs_f64();
    let mut row = BenchRow {
        fixture,
        measure: measure.label(),
        config: measure,
        bleed: None,
        psnr: None,
        iterations: None,
        time_s,
        error: None,
    };
    match outcome {
        Ok((img, bleed, psnr, iterations)) => {
            row.bleed = Some(bleed);
            row.psnr = Some(psnr);
            row.iterations = Some(iterations);
            (Some(img), row)
        }
        Err(e) => {
            row.error = Some(e.to_string());
            (None, row)
        }
    }
}

impl BenchArgs {
    pub fn fixture_names(&self) -> Result<Vec<FixtureName>> {
        if self.fixtures.is_empty() {
            return Ok(FixtureName::ALL.to_vec());
        }
        self.fixtures.iter().map(|s| s.parse()).collect()
    }
}

/// Full sweep; also returns the filled image of every successful cell.
pub fn bench_with_images(args: &BenchArgs) -> Result<(BenchTable, Vec<Option<RasterImage>>)> {
    let fixtures = args.fixture_names()?;
    let measures = bench_measures(&args.p_values);
    with_threads(args.threads, || {
        let mut table = BenchTable::default();
        let mut images = Vec::new();
        for &fixture in &fixtures {
            for &measure in &measures {
                let (img, row) = bench_cell(fixture, args.size, args.patch_size, measure);
                table.rows.push(row);
                images.push(img);
            }
        }
        (table, images)
    })
}

pub fn bench(args: &BenchArgs) -> Result<BenchTable> {
    let (table, images) = bench_with_images(args)?;
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (row, img) in table.rows.iter().zip(&images) {
            if let Some(img) = img {
                let safe: String = row
                    .measure
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                    .collect();
                save_image(&dir.join(format!("{}_{safe}.png", row.fixture)), img)?;
            }
        }
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&table)?;
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(table)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match cli.command {
        Command::Run(mut args) => {
            args.threads = cli.threads;
            match run(&args) {
                Ok(outcome) => {
                    for w in &outcome.report.warnings {
                        eprintln!("warning: {w}");
                    }
                    let r = &outcome.report;
                    println!(
                        "wrote {} ({} iterations, {:.3}s)",
                        r.config.out.display(),
                        r.iterations,
                        r.wall_time
                    );
                    if let Some(b) = r.metrics.region_bleed {
                        println!("region_bleed {:.4}", b);
                    }
                    if let Some(p) = r.metrics.psnr {
                        println!("psnr {:.2} dB", p);
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    match e {
                        Error::Usage(_) => 2,
                        _ => 1,
                    }
                }
            }
        }
        Command::Bench(mut args) => {
            args.threads = cli.threads;
            match bench(&args) {
                Ok(table) => {
                    print!("{}", table.to_text());
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
    }
}
