//! Command-line surface. Every subcommand is a plain function so it can be
//! driven from tests and examples; [`main_with_args`] only parses arguments
//! and maps errors to exit codes.
//!
//! Exit codes: `0` success, `1` validation error, `2` usage error (from the
//! argument parser), `3` I/O error, `4` internal invariant violation.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorKind, Result};
use crate::eval::{EvalReport, Evaluator, DEFAULT_THRESHOLD_MM};
use crate::fusion::{fuse_batch_maps, DecodeMethod, FusionConfig, PriorSigma};
use crate::geometry::{augment_seeded, AugmentMode, AugmentationRanges, Range};
use crate::heatmap::{decode_argmax, decode_centroid, render_label_stack, LABEL_SIGMA};
use crate::io::hmap;
use crate::io::landmarks;
use crate::io::manifest::{DatasetManifest, ManifestRecord};
use crate::io::{pgm, write_atomic};
use crate::preprocess::{equalize_histogram, resize_bilinear, resize_landmarks};
use crate::rng::{RngSeed, StreamKind};
use crate::simulate::{generate_phantom, run_trial, PhantomConfig, SimulationConfig, SimulationReport};
use crate::types::{GrayImage, Point};

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Validation => EXIT_VALIDATION,
        ErrorKind::Io => EXIT_IO,
        ErrorKind::Internal => EXIT_INTERNAL,
    }
}

/// Optional tables read from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub fusion: Option<FusionConfig>,
    pub augment: Option<AugmentationRanges>,
    pub phantom: Option<PhantomConfig>,
    pub simulation: Option<SimulationConfig>,
}

impl ToolConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }
}

/// Result of a command that processes many files independently.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub written: Vec<PathBuf>,
    pub failures: Vec<Error>,
}

impl BatchOutcome {
    fn absorb(&mut self, r: Result<Vec<PathBuf>>) {
        match r {
            Ok(paths) => self.written.extend(paths),
            Err(e) => self.failures.push(e),
        }
    }

    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }

    /// Exit code of the first failure, 0 when everything succeeded.
    pub fn exit_code(&self) -> i32 {
        self.failures.first().map_or(0, |e| exit_code(e.kind()))
    }
}

fn file_name(p: &Path) -> Result<&std::ffi::OsStr> {
    p.file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no file name", p.display())))
}

fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.toml")
}

/// Renders a synthetic sagittal-slice-like image: noisy dark background
/// with a bright blob per landmark.
pub fn render_phantom_image<R: Rng + ?Sized>(
    rng: &mut R,
    points: &[Point],
    width: u32,
    height: u32,
    spacing: f64,
) -> Result<GrayImage> {
    let blob = 2.0 * 7.0f64.powi(2);
    let mut px = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let bright: f64 = points
                .iter()
                .map(|p| (-((x as f64 - p.x).powi(2) + (y as f64 - p.y).powi(2)) / blob).exp())
                .sum();
            let noise: f64 = rng.random_range(0.0..24.0);
            px.push((25.0 + noise + 140.0 * bright).round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(width, height, px, spacing)
}

/// Writes `count` phantom images, their landmark files and a manifest.
pub fn cmd_phantom(out: &Path, count: usize, cfg: &PhantomConfig, seed: RngSeed) -> Result<DatasetManifest> {
    let records: Vec<ManifestRecord> = (0..count)
        .into_par_iter()
        .map(|i| {
            let phantom = generate_phantom(&mut seed.stream(StreamKind::Phantom, i as u64), cfg)?;
            let pts = phantom.landmarks.points();
            let img = render_phantom_image(
                &mut seed.stream(StreamKind::Corpus, i as u64),
                pts,
                cfg.width,
                cfg.height,
                cfg.spacing_mm_per_px,
            )?;
            let rec = ManifestRecord {
                image: format!("case_{i:04}.pgm").into(),
                landmarks: format!("case_{i:04}.txt").into(),
                spacing_mm_per_px: cfg.spacing_mm_per_px,
            };
            pgm::write(&out.join(&rec.image), &img)?;
            landmarks::write(&out.join(&rec.landmarks), pts)?;
            Ok(rec)
        })
        .collect::<Result<_>>()?;
    let manifest = DatasetManifest {
        landmark_count: cfg.landmark_count,
        working_size: cfg.width.max(cfg.height),
        records,
        base_dir: out.to_path_buf(),
        ..DatasetManifest::default()
    };
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    manifest.save(&manifest_path(out))?;
    Ok(manifest)
}

/// Histogram-equalizes every manifest image into `out`, copying landmark
/// files alongside and writing a manifest of the records that succeeded.
pub fn cmd_equalize(manifest: &Path, out: &Path) -> Result<BatchOutcome> {
    let m = DatasetManifest::load(manifest)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let results: Vec<Result<(ManifestRecord, Vec<PathBuf>)>> = m
        .records
        .par_iter()
        .map(|rec| {
            let img = pgm::read(&m.resolve(&rec.image), rec.spacing_mm_per_px)?;
            let lm_src = m.resolve(&rec.landmarks);
            let pts = landmarks::read(&lm_src)?;
            let new = ManifestRecord {
                image: file_name(&rec.image)?.into(),
                landmarks: file_name(&rec.landmarks)?.into(),
                spacing_mm_per_px: rec.spacing_mm_per_px,
            };
            let (img_out, lm_out) = (out.join(&new.image), out.join(&new.landmarks));
            pgm::write(&img_out, &equalize_histogram(&img))?;
            landmarks::write(&lm_out, &pts)?;
            Ok((new, vec![img_out, lm_out]))
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    let mut records = Vec::new();
    for r in results {
        outcome.absorb(r.map(|(rec, paths)| {
            records.push(rec);
            paths
        }));
    }
    let out_manifest = DatasetManifest {
        records,
        base_dir: out.to_path_buf(),
        ..m
    };
    out_manifest.save(&manifest_path(out))?;
    outcome.written.push(manifest_path(out));
    Ok(outcome)
}

#[derive(Debug, Clone)]
pub struct AugmentOptions {
    pub count: usize,
    pub ranges: AugmentationRanges,
    pub mode: AugmentMode,
    pub epoch: u64,
    pub seed: RngSeed,
}

/// Emits `count` augmented copies of every record, resized to the
/// manifest's working size.
pub fn cmd_augment(manifest: &Path, out: &Path, opts: &AugmentOptions) -> Result<BatchOutcome> {
    opts.ranges.validate()?;
    let m = DatasetManifest::load(manifest)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let size = m.working_size;
    let jobs: Vec<(usize, usize)> = (0..m.records.len())
        .flat_map(|i| (0..opts.count).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<(ManifestRecord, Vec<PathBuf>)>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let loaded = m.load_record(i)?;
            let aug = augment_seeded(
                opts.seed,
                opts.mode,
                (i as u64, j as u64, opts.epoch),
                &loaded.image,
                &loaded.landmarks,
                &opts.ranges,
            )?;
            let from = aug.image.dims();
            let image = resize_bilinear(&aug.image, size, size)?;
            let lms = resize_landmarks(&aug.landmarks, from, (size, size))?;
            let stem = m.records[i].stem();
            let rec = ManifestRecord {
                image: format!("{stem}_aug{j:03}.pgm").into(),
                landmarks: format!("{stem}_aug{j:03}.txt").into(),
                spacing_mm_per_px: image.spacing(),
            };
            let (img_out, lm_out) = (out.join(&rec.image), out.join(&rec.landmarks));
            pgm::write(&img_out, &image)?;
            landmarks::write(&lm_out, lms.points())?;
            Ok((rec, vec![img_out, lm_out]))
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    let mut records = Vec::new();
    for r in results {
        outcome.absorb(r.map(|(rec, paths)| {
            records.push(rec);
            paths
        }));
    }
    let out_manifest = DatasetManifest {
        records,
        base_dir: out.to_path_buf(),
        ..m
    };
    out_manifest.save(&manifest_path(out))?;
    outcome.written.push(manifest_path(out));
    Ok(outcome)
}

/// One label heatmap stack per record, `<image stem>.hmap` in `out`.
pub fn cmd_gen_heatmaps(manifest: &Path, sigma: f64, out: &Path) -> Result<BatchOutcome> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be > 0")));
    }
    let m = DatasetManifest::load(manifest)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let results: Vec<Result<Vec<PathBuf>>> = (0..m.records.len())
        .into_par_iter()
        .map(|i| {
            let loaded = m.load_record(i)?;
            let (w, h) = loaded.image.dims();
            let stack = render_label_stack(&loaded.landmarks, sigma, w, h)?;
            let path = out.join(format!("{}.hmap", m.records[i].stem()));
            hmap::write(&path, &stack, w, h)?;
            Ok(vec![path])
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    results.into_iter().for_each(|r| outcome.absorb(r));
    Ok(outcome)
}

/// Pairs of (input, output) paths. A directory input pairs every `*.hmap`
/// file in it, sorted by name, with `<stem>` outputs in the target directory.
fn hmap_jobs(heatmaps: &Path, out: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if heatmaps.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(heatmaps)
            .map_err(|e| Error::io(heatmaps, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "hmap"))
            .collect();
        entries.sort();
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        Ok(entries
            .into_iter()
            .map(|p| {
                let stem = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                let target = out.join(format!("{stem}.txt"));
                (stem, p, target)
            })
            .collect())
    } else {
        let stem = heatmaps.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        Ok(vec![(stem, heatmaps.to_path_buf(), out.to_path_buf())])
    }
}

#[derive(Debug, Clone)]
pub struct FuseOptions {
    pub config: FusionConfig,
    pub dump_dir: Option<PathBuf>,
}

/// Fuses heatmap stacks with coordinate predictions. `heatmaps`, `coords`
/// and `out` are either all files or all directories (paired by stem).
pub fn cmd_fuse(heatmaps: &Path, coords: &Path, out: &Path, opts: &FuseOptions) -> Result<BatchOutcome> {
    opts.config.validate()?;
    let jobs = hmap_jobs(heatmaps, out)?;
    let dir_mode = heatmaps.is_dir();
    let results: Vec<Result<Vec<PathBuf>>> = jobs
        .par_iter()
        .map(|(stem, hm_path, target)| {
            let coord_path = if dir_mode {
                coords.join(format!("{stem}.txt"))
            } else {
                coords.to_path_buf()
            };
            let stack = hmap::read(hm_path)?;
            let pts = landmarks::read(&coord_path)?;
            if stack.channels.len() != pts.len() {
                return Err(Error::format(
                    hm_path,
                    format!(
                        "{} heatmap channels but {} coordinates in {}",
                        stack.channels.len(),
                        pts.len(),
                        coord_path.display()
                    ),
                ));
            }
            let fused = fuse_batch_maps(&stack.channels, &pts, &opts.config)?;
            let decoded: Vec<Point> = fused.iter().map(|(p, _)| *p).collect();
            landmarks::write(target, &decoded)?;
            let mut written = vec![target.clone()];
            if let Some(dir) = &opts.dump_dir {
                let maps: Vec<_> = fused.into_iter().map(|(_, m)| m).collect();
                let dump = dir.join(format!("{stem}.hmap"));
                hmap::write(&dump, &maps, stack.width, stack.height)?;
                written.push(dump);
            }
            Ok(written)
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    results.into_iter().for_each(|r| outcome.absorb(r));
    Ok(outcome)
}

/// Decodes heatmap stacks without fusion.
pub fn cmd_decode(heatmaps: &Path, out: &Path, method: DecodeMethod, window: u32) -> Result<BatchOutcome> {
    let jobs = hmap_jobs(heatmaps, out)?;
    let results: Vec<Result<Vec<PathBuf>>> = jobs
        .par_iter()
        .map(|(_, hm_path, target)| {
            let stack = hmap::read(hm_path)?;
            let pts = stack
                .channels
                .iter()
                .enumerate()
                .map(|(k, hm)| {
                    match method {
                        DecodeMethod::Argmax => decode_argmax(hm).map(|(x, y)| Point::new(x as f64, y as f64)),
                        DecodeMethod::Centroid => decode_centroid(hm, window),
                    }
                    .map_err(|e| Error::Channel {
                        channel: k,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            landmarks::write(target, &pts)?;
            Ok(vec![target.clone()])
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    results.into_iter().for_each(|r| outcome.absorb(r));
    Ok(outcome)
}

/// Scores `<predictions>/<image stem>.txt` against each manifest record.
pub fn cmd_eval(predictions: &Path, manifest: &Path, threshold_mm: f64) -> Result<EvalReport> {
    let m = DatasetManifest::load(manifest)?;
    let mut ev = Evaluator::new(threshold_mm)?;
    for rec in &m.records {
        let gt = landmarks::read(&m.resolve(&rec.landmarks))?;
        if gt.len() != m.landmark_count {
            return Err(Error::format(
                m.resolve(&rec.landmarks),
                format!("{} landmarks, manifest expects {}", gt.len(), m.landmark_count),
            ));
        }
        let pred_path = predictions.join(format!("{}.txt", rec.stem()));
        let pred = landmarks::read(&pred_path)?;
        ev.add(&pred, &gt, rec.spacing_mm_per_px)
            .map_err(|e| Error::format(&pred_path, e.to_string()))?;
    }
    ev.finish()
}

pub fn cmd_simulate(config: &SimulationConfig, seed: RngSeed) -> Result<SimulationReport> {
    run_trial(seed, config)
}

pub fn report_to_toml<T: Serialize>(report: &T) -> Result<String> {
    toml::to_string(report).map_err(|e| Error::Internal(format!("report serialization: {e}")))
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "landmark-fusion",
    version,
    about = "Heatmap and coordinate-prior fusion for landmark localization"
)]
pub struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// TOML file with optional [fusion], [augment], [phantom], [simulation] tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecodeArg {
    Argmax,
    Centroid,
}

impl From<DecodeArg> for DecodeMethod {
    fn from(d: DecodeArg) -> Self {
        match d {
            DecodeArg::Argmax => DecodeMethod::Argmax,
            DecodeArg::Centroid => DecodeMethod::Centroid,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Dynamic,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetArg {
    Default,
    Noiseless,
    Calibrated,
}

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let (a, b) = s.split_once(',').ok_or("expected MIN,MAX")?;
    let min = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let max = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    Ok(Range::new(min, max))
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Horizontal translation range in px, e.g. `-35,35`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub tx_range: Option<Range>,
    /// Vertical translation range in px.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub ty_range: Option<Range>,
    /// Rotation range in degrees.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub angle_range: Option<Range>,
    /// Scale range.
    #[arg(long, value_parser = parse_range)]
    pub scale_range: Option<Range>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic phantom corpus with a manifest.
    Phantom {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    /// Histogram-equalize every image of a manifest.
    Equalize {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write augmented, resized (image, landmarks) pairs.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Dynamic)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        epoch: u64,
        #[command(flatten)]
        ranges: RangeArgs,
    },
    /// Render Gaussian label heatmaps (HMAP v1) for every record.
    GenHeatmaps {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = LABEL_SIGMA)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fuse heatmap stacks with coordinate predictions and decode.
    Fuse {
        #[arg(long)]
        heatmaps: PathBuf,
        #[arg(long)]
        coords: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        prior_sigma: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum)]
        decode: Option<DecodeArg>,
        /// Also write fused heatmap stacks here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Decode heatmap stacks directly.
    Decode {
        #[arg(long)]
        heatmaps: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = DecodeArg::Argmax)]
        method: DecodeArg,
        #[arg(long, default_value_t = 3)]
        window: u32,
    },
    /// Score predictions against a ground-truth manifest.
    Eval {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_MM)]
        threshold_mm: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo comparison of coordinate-only, heatmap-only and fused decoding.
    Simulate {
        #[arg(long, value_enum, default_value_t = PresetArg::Default)]
        preset: PresetArg,
        /// Override the number of simulated images.
        #[arg(long)]
        images: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_batch(name: &str, outcome: &BatchOutcome) -> i32 {
    for e in &outcome.failures {
        eprintln!("{name}: {e}");
    }
    eprintln!(
        "{name}: {} file(s) written, {} failure(s)",
        outcome.written.len(),
        outcome.failures.len()
    );
    outcome.exit_code()
}

fn run(cli: Cli) -> Result<i32> {
    let seed = RngSeed(cli.seed);
    let tool = match &cli.config {
        Some(p) => ToolConfig::load(p)?,
        None => ToolConfig::default(),
    };
    let code = match cli.command {
        Command::Phantom { out, count } => {
            let cfg = tool.phantom.unwrap_or_default();
            let m = cmd_phantom(&out, count, &cfg, seed)?;
            eprintln!("phantom: {} case(s) in {}", m.records.len(), out.display());
            0
        }
        Command::Equalize { manifest, out } => report_batch("equalize", &cmd_equalize(&manifest, &out)?),
        Command::Augment {
            manifest,
            out,
            count,
            mode,
            epoch,
            ranges,
        } => {
            let mut r = tool.augment.unwrap_or_default();
            r.tx = ranges.tx_range.unwrap_or(r.tx);
            r.ty = ranges.ty_range.unwrap_or(r.ty);
            r.angle_deg = ranges.angle_range.unwrap_or(r.angle_deg);
            r.scale = ranges.scale_range.unwrap_or(r.scale);
            let mode = match mode {
                ModeArg::Dynamic => AugmentMode::Dynamic,
                ModeArg::Fixed => AugmentMode::Fixed,
            };
            let opts = AugmentOptions {
                count,
                ranges: r,
                mode,
                epoch,
                seed,
            };
            report_batch("augment", &cmd_augment(&manifest, &out, &opts)?)
        }
        Command::GenHeatmaps { manifest, sigma, out } => {
            report_batch("gen-heatmaps", &cmd_gen_heatmaps(&manifest, sigma, &out)?)
        }
        Command::Fuse {
            heatmaps,
            coords,
            out,
            prior_sigma,
            epsilon,
            decode,
            dump,
        } => {
            let mut config = tool.fusion.unwrap_or_default();
            if let Some(s) = prior_sigma {
                config.prior_sigma = PriorSigma::Uniform(s);
            }
            if let Some(e) = epsilon {
                config.floor_epsilon = e;
            }
            if let Some(d) = decode {
                config.decode = d.into();
            }
            let opts = FuseOptions { config, dump_dir: dump };
            report_batch("fuse", &cmd_fuse(&heatmaps, &coords, &out, &opts)?)
        }
        Command::Decode {
            heatmaps,
            out,
            method,
            window,
        } => report_batch("decode", &cmd_decode(&heatmaps, &out, method.into(), window)?),
        Command::Eval {
            predictions,
            manifest,
            threshold_mm,
            out,
        } => {
            let report = cmd_eval(&predictions, &manifest, threshold_mm)?;
            emit(&report_to_toml(&report)?, out.as_deref())?;
            0
        }
        Command::Simulate { preset, images, out } => {
            let mut cfg = match (tool.simulation, preset) {
                (Some(cfg), _) => cfg,
                (None, PresetArg::Default) => SimulationConfig::default(),
                (None, PresetArg::Noiseless) => SimulationConfig::noiseless(),
                (None, PresetArg::Calibrated) => SimulationConfig::calibrated(4546),
            };
            if let Some(n) = images {
                cfg.images = n;
            }
            let report = cmd_simulate(&cfg, seed)?;
            emit(&report_to_toml(&report)?, out.as_deref())?;
            0
        }
    };
    Ok(code)
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INTERNAL;
        }
    };
    match pool.install(|| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}
