//! Scaling experiment over Bernoulli rasters.
//!
//! For each raster size and each probability on an even grid over `[0, 1]`,
//! seeded rasters are pushed through [`detect`] and [`form_rings`] and the
//! wall-clock time is averaged. Raster generation is never inside the timed
//! region, each configuration gets one untimed warm-up run, output buffers
//! are reused across runs of the same size, and trials of different sizes
//! are interleaved.

use std::hint::black_box;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::delineate::{detect_into, DelineationResult};
use crate::raster::{gen_bernoulli, BitRaster};
use crate::rings::{form_rings_into, RingOptions, Rings};
use crate::transform::AffineTransform;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Vec<u32>,
    pub p_steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Small enough to finish in a few minutes on a laptop.
    pub fn desk() -> Self {
        Self {
            sizes: vec![250, 500, 1000],
            p_steps: 11,
            trials: 10,
            seed: 0,
        }
    }

    /// 1000², 2000² and 4000² rasters, 100 trials per point.
    pub fn full() -> Self {
        Self {
            sizes: vec![1000, 2000, 4000],
            p_steps: 11,
            trials: 100,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(BenchError::InvalidConfig(
                "sizes must be non-empty and >= 1".into(),
            ));
        }
        if self.p_steps < 2 {
            return Err(BenchError::InvalidConfig("p_steps must be >= 2".into()));
        }
        if self.trials == 0 {
            return Err(BenchError::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::desk()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub size: u32,
    pub p: f64,
    pub trials: usize,
    /// Mean of detection plus ring formation.
    pub mean_seconds: f64,
    /// Sample standard deviation; zero for a single trial.
    pub stddev_seconds: f64,
    /// Mean of the ring-formation step alone.
    pub ring_mean_seconds: f64,
    pub mean_vertices: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineTiming {
    pub detect: Duration,
    pub rings: Duration,
    pub vertices: usize,
}

impl PipelineTiming {
    pub fn total(&self) -> Duration {
        self.detect + self.rings
    }
}

/// Output buffers kept across timed runs, so repeated runs measure the
/// algorithm rather than the allocator fetching fresh pages from the OS.
#[derive(Debug, Default)]
pub struct Workspace {
    result: DelineationResult,
    rings: Rings,
}

/// Runs detection and ring formation once with the identity transform.
pub fn time_pipeline(raster: &BitRaster) -> PipelineTiming {
    time_pipeline_in(raster, &mut Workspace::default())
}

pub fn time_pipeline_in(raster: &BitRaster, ws: &mut Workspace) -> PipelineTiming {
    // Freeing the previous run's rings is not part of the pipeline.
    ws.rings.grid.clear();
    ws.rings.world.clear();
    let start = Instant::now();
    detect_into(black_box(raster), &mut ws.result);
    let detected = Instant::now();
    form_rings_into(
        &mut ws.result,
        &AffineTransform::IDENTITY,
        RingOptions::default(),
        &mut ws.rings,
    );
    let done = Instant::now();
    black_box(&ws.rings);
    PipelineTiming {
        detect: detected - start,
        rings: done - detected,
        vertices: ws.result.vertex_count(),
    }
}

/// `steps` evenly spaced probabilities from 0 to 1 inclusive.
pub fn p_grid(steps: usize) -> Vec<f64> {
    assert!(steps >= 2, "need at least two grid points");
    let last = (steps - 1) as f64;
    (0..steps).map(|i| i as f64 / last).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `seed XOR hash(size, p, trial)`, with the hash built by chaining the
/// SplitMix64 finalizer over the three fields.
pub fn trial_seed(seed: u64, size: u32, p: f64, trial: usize) -> u64 {
    let h = splitmix64(u64::from(size));
    let h = splitmix64(h ^ p.to_bits());
    let h = splitmix64(h ^ trial as u64);
    seed ^ h
}

fn mean_and_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TimingRecord>, BenchError> {
    run_experiment_with(config, |_| {})
}

/// Like [`run_experiment`], calling `on_record` as each record completes.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    mut on_record: impl FnMut(&TimingRecord),
) -> Result<Vec<TimingRecord>, BenchError> {
    config.validate()?;
    // Slow phases of a shared machine then hit every size alike instead of
    // skewing their ratios.
    let mut workspaces: Vec<Workspace> =
        config.sizes.iter().map(|_| Workspace::default()).collect();
    let mut records = Vec::with_capacity(config.sizes.len() * config.p_steps);
    for p in p_grid(config.p_steps) {
        let mut totals = vec![Vec::with_capacity(config.trials); config.sizes.len()];
        let mut rings = vec![0.0; config.sizes.len()];
        let mut vertices = vec![0usize; config.sizes.len()];
        for trial in 0..config.trials {
            for (k, &size) in config.sizes.iter().enumerate() {
                let ws = &mut workspaces[k];
                let seed = trial_seed(config.seed, size, p, trial);
                let raster =
                    gen_bernoulli(size, size, p, seed).expect("p on the grid is in [0, 1]");
                if trial == 0 {
                    black_box(time_pipeline_in(&raster, ws));
                }
                let timing = time_pipeline_in(&raster, ws);
                totals[k].push(timing.total().as_secs_f64());
                rings[k] += timing.rings.as_secs_f64();
                vertices[k] += timing.vertices;
            }
        }
        for (k, &size) in config.sizes.iter().enumerate() {
            let (mean, stddev) = mean_and_stddev(&totals[k]);
            let record = TimingRecord {
                size,
                p,
                trials: config.trials,
                mean_seconds: mean,
                stddev_seconds: stddev,
                ring_mean_seconds: rings[k] / config.trials as f64,
                mean_vertices: vertices[k] as f64 / config.trials as f64,
            };
            on_record(&record);
            records.push(record);
        }
    }
    // Size-major, in configuration order, then by p.
    let steps = config.p_steps;
    let sizes = config.sizes.len();
    let mut ordered = Vec::with_capacity(records.len());
    for k in 0..sizes {
        ordered.extend((0..steps).map(|i| records[i * sizes + k].clone()));
    }
    Ok(ordered)
}

/// Lowest and highest probability allowed for the peak.
pub const PEAK_RANGE: (f64, f64) = (0.3, 0.7);
/// Means at `p = 0` and `p = 1` must be below this fraction of the peak.
pub const EDGE_FRACTION: f64 = 0.5;
/// Peak-time ratio over pixel-count ratio must be within `1 ± this`.
pub const LINEARITY_TOLERANCE: f64 = 0.5;
pub const MIN_SERIES_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesShape {
    pub size: u32,
    pub peak_p: f64,
    pub peak_mean: f64,
    pub mean_at_zero: f64,
    pub mean_at_one: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    pub base_size: u32,
    pub size: u32,
    pub time_ratio: f64,
    pub pixel_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub series: Vec<SeriesShape>,
    pub scaling: Vec<ScalingCheck>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ShapeViolation {
    #[error("size {size}: only {count} p-values, need at least {MIN_SERIES_POINTS}")]
    TooFewPoints { size: u32, count: usize },
    #[error("size {size}: no record at p = {p}")]
    MissingEndpoint { size: u32, p: f64 },
    #[error("size {}: peak at p = {} is outside [0.3, 0.7]", .0.size, .0.peak_p)]
    PeakOutOfRange(SeriesShape),
    #[error("size {}: edge means {} (p=0) / {} (p=1) not below half the peak {}",
        .0.size, .0.mean_at_zero, .0.mean_at_one, .0.peak_mean)]
    EdgeTooHigh(SeriesShape),
    #[error("size {} vs {}: peak time ratio {:.2} does not track pixel ratio {:.2}",
        .0.size, .0.base_size, .0.time_ratio, .0.pixel_ratio)]
    NonLinear(ScalingCheck),
}

/// Checks each size's series for a bell shape and the peaks for linear
/// growth in pixel count, relative to the smallest size.
pub fn check_shape(records: &[TimingRecord]) -> Result<ShapeReport, ShapeViolation> {
    let mut sizes: Vec<u32> = records.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();

    let mut series = Vec::with_capacity(sizes.len());
    for &size in &sizes {
        let points: Vec<&TimingRecord> = records.iter().filter(|r| r.size == size).collect();
        if points.len() < MIN_SERIES_POINTS {
            return Err(ShapeViolation::TooFewPoints {
                size,
                count: points.len(),
            });
        }
        let at = |p: f64| {
            points
                .iter()
                .find(|r| r.p == p)
                .map(|r| r.mean_seconds)
                .ok_or(ShapeViolation::MissingEndpoint { size, p })
        };
        let peak = points
            .iter()
            .max_by(|a, b| a.mean_seconds.total_cmp(&b.mean_seconds))
            .expect("non-empty series");
        let shape = SeriesShape {
            size,
            peak_p: peak.p,
            peak_mean: peak.mean_seconds,
            mean_at_zero: at(0.0)?,
            mean_at_one: at(1.0)?,
        };
        if !(PEAK_RANGE.0..=PEAK_RANGE.1).contains(&shape.peak_p) {
            return Err(ShapeViolation::PeakOutOfRange(shape));
        }
        let limit = EDGE_FRACTION * shape.peak_mean;
        if shape.mean_at_zero >= limit || shape.mean_at_one >= limit {
            return Err(ShapeViolation::EdgeTooHigh(shape));
        }
        series.push(shape);
    }

    let mut scaling = Vec::new();
    if let Some((base, rest)) = series.split_first() {
        for s in rest {
            let check = ScalingCheck {
                base_size: base.size,
                size: s.size,
                time_ratio: s.peak_mean / base.peak_mean,
                pixel_ratio: (f64::from(s.size) / f64::from(base.size)).powi(2),
            };
            let relative = check.time_ratio / check.pixel_ratio;
            if (relative - 1.0).abs() > LINEARITY_TOLERANCE {
                return Err(ShapeViolation::NonLinear(check));
            }
            scaling.push(check);
        }
    }
    Ok(ShapeReport { series, scaling })
}
