//! `acoustir` command line: trace, filter, auralize and bench.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage error (including a
//! missing scene file).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use acoustir_core::{filter_paths, trace_with, FilterPolicy, SimConfig};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchOptions, Experiment};
use crate::parallel::{Threads, WORKERS_ENV};
use crate::pathstore::{read_paths, write_paths};
use crate::scene_file::{load_config, load_scene, Overrides, SceneDesc, SceneFileError};
use crate::synth::{synthesize_ir, BandConfig, DEFAULT_PADDING_S, DEFAULT_SAMPLE_RATE};
use crate::wav::write_wav;

#[derive(Debug, Parser)]
#[command(name = "acoustir", version, about = "Acoustic ray tracing, path storage and Ambisonic rendering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace a scene and write its paths as Parquet.
    Trace(TraceArgs),
    /// Keep the highest-energy paths of a Parquet path file.
    Filter(FilterArgs),
    /// Render a path file to an Ambisonic WAV impulse response.
    Auralize(AuralizeArgs),
    /// Run a benchmark sweep and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// JSON simulation config; missing fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
    pub workers: usize,
    /// Band center frequencies in Hz, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<f64>>,
    /// Multiply geometry and placements by this factor.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub n_diffuse: Option<usize>,
    #[arg(long)]
    pub n_specular: Option<usize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PolicyArgs {
    /// Keep the N highest-energy paths.
    #[arg(long)]
    pub top_count: Option<usize>,
    /// Keep the top fraction P of paths by count, 0 < P <= 1.
    #[arg(long)]
    pub top_fraction: Option<f64>,
    /// Keep the fewest paths holding fraction Q of the energy, 0 < Q <= 1.
    #[arg(long)]
    pub energy_coverage: Option<f64>,
}

impl PolicyArgs {
    fn policy(&self) -> FilterPolicy {
        match (self.top_count, self.top_fraction, self.energy_coverage) {
            (Some(n), _, _) => FilterPolicy::TopCount(n),
            (_, Some(p), _) => FilterPolicy::TopFraction(p),
            (_, _, Some(q)) => FilterPolicy::EnergyCoverage(q),
            _ => unreachable!("clap enforces exactly one policy"),
        }
    }
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct AuralizeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Ambisonic order, 0 to 9.
    #[arg(long, default_value_t = 9)]
    pub order: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
    pub sample_rate: u32,
    /// Noise seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seconds appended after the last arrival.
    #[arg(long, default_value_t = DEFAULT_PADDING_S)]
    pub padding: f64,
    /// Expected band centers; must match the path file.
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// room-size, ray-count, energy or storage.
    pub experiment: Experiment,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Scene file; defaults to the 10 x 4 x 4 m reference room.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Multi-worker timings are not comparable with the single-worker default.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<f64>>,
    /// Room-size sweep scales (default 0.1 to 10 in steps of 0.1).
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Ray-count sweep diffuse counts (default 30 steps from 5000 to 80000).
    #[arg(long, value_delimiter = ',')]
    pub diffuse_counts: Option<Vec<usize>>,
    /// Diffuse rays for the energy and storage experiments.
    #[arg(long, default_value_t = 80_000)]
    pub n_diffuse: usize,
    /// Specular rays for the energy and storage experiments.
    #[arg(long, default_value_t = 24_000)]
    pub n_specular: usize,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Trace(a) => cmd_trace(a, out),
        Command::Filter(a) => cmd_filter(a, out, err),
        Command::Auralize(a) => cmd_auralize(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            match e.downcast_ref::<SceneFileError>() {
                Some(SceneFileError::NotFound(_)) => 2,
                _ => 1,
            }
        }
    }
}

fn cmd_trace(a: &TraceArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let overrides = Overrides { scale: a.scale, bands: a.bands.clone(), ..Default::default() };
    let scene = load_scene(&a.scene, &overrides)?;
    let mut config = match &a.config {
        Some(p) => load_config(p)?,
        None => SimConfig::default(),
    };
    if let Some(s) = a.seed {
        config.rng_seed = s;
    }
    if let Some(n) = a.n_diffuse {
        config.n_diffuse = n;
    }
    if let Some(n) = a.n_specular {
        config.n_specular = n;
    }
    let t0 = Instant::now();
    let paths = trace_with(&scene, &config, &Threads::new(a.workers))?;
    let elapsed = t0.elapsed().as_secs_f64();
    write_paths(&paths, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
    let [d, s, f, _] = paths.count_by_type();
    writeln!(out, "paths: {} (direct {d}, specular {s}, diffuse {f})", paths.len())?;
    writeln!(out, "trace time: {elapsed:.3} s")?;
    Ok(())
}

fn cmd_filter(a: &FilterArgs, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    let policy = a.policy.policy();
    policy.validate()?;
    let paths = read_paths(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    if policy == FilterPolicy::TopCount(0) {
        writeln!(err, "warning: --top-count 0 keeps no paths")?;
    }
    let kept = filter_paths(&paths, policy)?;
    write_paths(&kept, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
    let total = paths.grand_total_energy();
    let fraction = if total > 0.0 { kept.grand_total_energy() / total } else { 0.0 };
    writeln!(out, "retained: {} of {} paths", kept.len(), paths.len())?;
    writeln!(out, "retained energy fraction: {fraction:.6}")?;
    Ok(())
}

fn cmd_auralize(a: &AuralizeArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let paths = read_paths(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let centers = a.bands.clone().unwrap_or_else(|| paths.meta().band_centers.clone());
    let config = BandConfig { sample_rate: a.sample_rate, seed: a.seed, padding: a.padding, centers };
    let ir = synthesize_ir(&paths, a.order, &config)?;
    write_wav(&ir, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
    writeln!(out, "channels: {}", ir.num_channels())?;
    writeln!(out, "length: {} samples ({:.3} s)", ir.len(), ir.len() as f64 / a.sample_rate as f64)?;
    for ch in 0..ir.num_channels() {
        writeln!(out, "energy[{ch}]: {:.6e}", ir.channel_energy(ch))?;
    }
    Ok(())
}

fn bench_scene(a: &BenchArgs) -> anyhow::Result<acoustir_core::Scene> {
    let overrides = Overrides { bands: a.bands.clone(), ..Default::default() };
    Ok(match &a.scene {
        Some(p) => load_scene(p, &overrides)?,
        None => SceneDesc::benchmark_room().build(&overrides, Path::new("."))?,
    })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    if a.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let scene = bench_scene(a)?;
    let base = SimConfig { rng_seed: a.seed, ..SimConfig::default() };
    let heavy = SimConfig { n_diffuse: a.n_diffuse, n_specular: a.n_specular, ..base };
    let opts = BenchOptions { reps: a.reps, workers: a.workers, config: base };
    let report = match a.experiment {
        Experiment::RoomSize => {
            let scales = a.scales.clone().unwrap_or_else(bench::default_scales);
            bench::room_size(&scene, &scales, &opts)?
        }
        Experiment::RayCount => {
            let counts = a.diffuse_counts.clone().unwrap_or_else(bench::default_diffuse_counts);
            bench::ray_count(&scene, &counts, &bench::DEFAULT_SPECULAR_RATIOS, &opts)?
        }
        Experiment::Energy => bench::energy(&scene, &BenchOptions { config: heavy, ..opts })?.0,
        Experiment::Storage => {
            let paths = trace_with(&scene, &heavy, &Threads::new(a.workers))?;
            let dir = a.output.with_extension("parts");
            std::fs::create_dir_all(&dir)?;
            let report = bench::storage(&paths, &bench::DEFAULT_STORED_FRACTIONS, a.reps, &dir);
            std::fs::remove_dir_all(&dir)?;
            report?
        }
    };
    let file = std::fs::File::create(&a.output).with_context(|| format!("writing {}", a.output.display()))?;
    report.write_csv(std::io::BufWriter::new(file))?;
    writeln!(out, "{}: {} samples x {} reps -> {}", a.experiment, report.samples.len(), a.reps, a.output.display())?;
    if a.experiment == Experiment::Energy {
        for s in report.group("curve") {
            if [0.001, 0.1].iter().any(|p| (s.x - p).abs() < 1e-9) {
                writeln!(out, "top {:.1}% of paths: {:.4} of energy", s.x * 100.0, s.energy_fraction.unwrap_or(0.0))?;
            }
        }
    }
    Ok(())
}
