//! Benchmark sweeps: room size, ray count, energy distribution and storage.
//!
//! Every sample is measured `reps` times; the CSV reports mean and sample
//! standard deviation per sample alongside the raw timings.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use acoustir_core::{cumulative_energy_curve, filter_paths, trace_with, FilterPolicy, PathSet, Scene, SimConfig};
use serde::{Deserialize, Serialize};

use crate::analysis::mean_sd;
use crate::parallel::Threads;
use crate::pathstore::{write_paths, PathStoreError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    RoomSize,
    RayCount,
    Energy,
    Storage,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [Experiment::RoomSize, Experiment::RayCount, Experiment::Energy, Experiment::Storage];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::RoomSize => "room-size",
            Experiment::RayCount => "ray-count",
            Experiment::Energy => "energy",
            Experiment::Storage => "storage",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}` (expected room-size, ray-count, energy or storage)"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Trace(#[from] acoustir_core::TraceError),
    #[error(transparent)]
    Scene(#[from] acoustir_core::SceneError),
    #[error(transparent)]
    Filter(#[from] acoustir_core::FilterError),
    #[error(transparent)]
    Store(#[from] PathStoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Raw repetitions of one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub group: String,
    pub x: f64,
    pub seconds: Vec<f64>,
    pub paths: Vec<f64>,
    pub bytes: Vec<f64>,
    pub energy_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub experiment: Experiment,
    pub reps: usize,
    pub samples: Vec<Sample>,
}

/// One CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub experiment: String,
    pub group: String,
    pub x: f64,
    pub reps: usize,
    pub time_mean_s: f64,
    pub time_sd_s: f64,
    pub paths_mean: f64,
    pub paths_sd: f64,
    pub bytes_mean: f64,
    pub bytes_sd: f64,
    pub energy_fraction: Option<f64>,
    /// Raw timings joined by `;`.
    pub times_s: String,
}

impl BenchReport {
    pub fn rows(&self) -> Vec<BenchRow> {
        self.samples
            .iter()
            .map(|s| {
                let stats = |v: &[f64]| if v.is_empty() { (0.0, 0.0) } else { mean_sd(v) };
                let (tm, ts) = stats(&s.seconds);
                let (pm, ps) = stats(&s.paths);
                let (bm, bs) = stats(&s.bytes);
                BenchRow {
                    experiment: self.experiment.name().to_string(),
                    group: s.group.clone(),
                    x: s.x,
                    reps: s.seconds.len(),
                    time_mean_s: tm,
                    time_sd_s: ts,
                    paths_mean: pm,
                    paths_sd: ps,
                    bytes_mean: bm,
                    bytes_sd: bs,
                    energy_fraction: s.energy_fraction,
                    times_s: s.seconds.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(";"),
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Samples of one group, in sweep order.
    pub fn group(&self, name: &str) -> Vec<&Sample> {
        self.samples.iter().filter(|s| s.group == name).collect()
    }
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRow>, BenchError> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(BenchError::from)).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    pub reps: usize,
    pub workers: usize,
    pub config: SimConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { reps: 3, workers: 1, config: SimConfig::default() }
    }
}

fn timed_trace(scene: &Scene, config: &SimConfig, workers: usize) -> Result<(f64, PathSet), BenchError> {
    let exec = Threads::new(workers);
    let t0 = Instant::now();
    let paths = trace_with(scene, config, &exec)?;
    Ok((t0.elapsed().as_secs_f64(), paths))
}

/// `0.1, 0.2, ..., 10.0`.
pub fn default_scales() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 10.0).collect()
}

/// 30 evenly spaced diffuse counts from 5,000 to 80,000.
pub fn default_diffuse_counts() -> Vec<usize> {
    (0..30).map(|i| (5_000.0 + i as f64 * 75_000.0 / 29.0).round() as usize).collect()
}

pub const DEFAULT_SPECULAR_RATIOS: [f64; 3] = [0.1, 0.2, 0.3];

pub const DEFAULT_STORED_FRACTIONS: [f64; 7] = [0.01, 0.02, 0.05, 0.10, 0.25, 0.50, 1.0];

/// Traces the scene scaled by each factor. `paths` is the valid-path count.
pub fn room_size(scene: &Scene, scales: &[f64], opts: &BenchOptions) -> Result<BenchReport, BenchError> {
    let mut samples = Vec::with_capacity(scales.len());
    for &s in scales {
        let scaled = scene.scaled(s)?;
        let mut sample = Sample {
            group: "all".into(),
            x: s,
            seconds: vec![],
            paths: vec![],
            bytes: vec![],
            energy_fraction: None,
        };
        for _ in 0..opts.reps {
            let (t, paths) = timed_trace(&scaled, &opts.config, opts.workers)?;
            sample.seconds.push(t);
            sample.paths.push(paths.len() as f64);
        }
        samples.push(sample);
    }
    Ok(BenchReport { experiment: Experiment::RoomSize, reps: opts.reps, samples })
}

/// For each specular ratio `r` and diffuse count `n`, traces with `n`
/// diffuse and `round(r n)` specular rays; `x` is the total ray count.
pub fn ray_count(
    scene: &Scene,
    diffuse: &[usize],
    ratios: &[f64],
    opts: &BenchOptions,
) -> Result<BenchReport, BenchError> {
    let mut samples = Vec::new();
    for &r in ratios {
        for &n in diffuse {
            let config = SimConfig { n_diffuse: n, n_specular: (r * n as f64).round() as usize, ..opts.config };
            let mut sample = Sample {
                group: format!("specular={r}"),
                x: (config.n_diffuse + config.n_specular) as f64,
                seconds: vec![],
                paths: vec![],
                bytes: vec![],
                energy_fraction: None,
            };
            for _ in 0..opts.reps {
                let (t, paths) = timed_trace(scene, &config, opts.workers)?;
                sample.seconds.push(t);
                sample.paths.push(paths.len() as f64);
            }
            samples.push(sample);
        }
    }
    Ok(BenchReport { experiment: Experiment::RayCount, reps: opts.reps, samples })
}

/// Fractions of the path count at which the energy curve is reported.
fn curve_points() -> Vec<f64> {
    let mut p: Vec<f64> = (0..=40).map(|i| 10f64.powf(-4.0 + i as f64 * 0.1)).collect();
    p.extend([0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
    p.sort_by(f64::total_cmp);
    p.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    p
}

/// Traces once per repetition (timed) and reports the cumulative energy
/// curve of the last run. Returns the traced paths too.
pub fn energy(scene: &Scene, opts: &BenchOptions) -> Result<(BenchReport, PathSet), BenchError> {
    let mut run = Sample {
        group: "trace".into(),
        x: (opts.config.n_diffuse + opts.config.n_specular) as f64,
        seconds: vec![],
        paths: vec![],
        bytes: vec![],
        energy_fraction: None,
    };
    let mut last = None;
    for _ in 0..opts.reps.max(1) {
        let (t, paths) = timed_trace(scene, &opts.config, opts.workers)?;
        run.seconds.push(t);
        run.paths.push(paths.len() as f64);
        last = Some(paths);
    }
    let paths = last.expect("at least one repetition");
    let curve = cumulative_energy_curve(&paths)?;
    let mut samples = vec![run];
    for p in curve_points() {
        samples.push(Sample {
            group: "curve".into(),
            x: p,
            seconds: vec![],
            paths: vec![acoustir_core::filter::fraction_count(p, paths.len()) as f64],
            bytes: vec![],
            energy_fraction: Some(curve.at_fraction(p)),
        });
    }
    Ok((BenchReport { experiment: Experiment::Energy, reps: opts.reps, samples }, paths))
}

/// Writes the top fraction of `paths` for each stored fraction into `dir`.
pub fn storage(paths: &PathSet, fractions: &[f64], reps: usize, dir: &Path) -> Result<BenchReport, BenchError> {
    let mut samples = Vec::new();
    for &f in fractions {
        let subset = filter_paths(paths, FilterPolicy::TopFraction(f))?;
        let file = dir.join(format!("stored_{f}.parquet"));
        let mut sample = Sample {
            group: "all".into(),
            x: f,
            seconds: vec![],
            paths: vec![],
            bytes: vec![],
            energy_fraction: None,
        };
        for _ in 0..reps {
            let stats = write_paths(&subset, &file)?;
            sample.seconds.push(stats.seconds);
            sample.paths.push(stats.rows as f64);
            sample.bytes.push(stats.bytes as f64);
        }
        std::fs::remove_file(&file)?;
        samples.push(sample);
    }
    Ok(BenchReport { experiment: Experiment::Storage, reps, samples })
}
