//! Monte-Carlo sweeps and their aggregation.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::config::SimConfig;
use super::trial::{Point, TrialContext, TrialResult};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; results do not depend on this.
    pub threads: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1) }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResults {
    pub config: SimConfig,
    pub fingerprint: String,
    pub points: Vec<Point>,
    /// Sorted by point, trial, turbo round.
    pub trials: Vec<TrialResult>,
}

/// Statistics of one (point, turbo round) curve sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub point: usize,
    pub snr_db: f64,
    pub pdr_db: Option<f64>,
    pub turbo: usize,
    pub trials: usize,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub ber: f64,
    /// 95% Wilson score interval.
    pub ber_ci: (f64, f64),
    pub median_nmse: Option<f64>,
    pub mean_cgm_iterations: Option<f64>,
}

/// Run every point of the sweep. Invalid configs fail before any trial.
pub fn run_sweep(cfg: &SimConfig, opts: &RunOptions) -> Result<SweepResults> {
    let ctx = TrialContext::new(cfg)?;
    let points = ctx.points();
    let mut trials = Vec::new();
    for point in &points {
        trials.extend(run_point(&ctx, point, opts.threads.max(1))?);
    }
    Ok(SweepResults { config: cfg.clone(), fingerprint: ctx.fingerprint.clone(), points, trials })
}

fn run_point(ctx: &TrialContext, point: &Point, threads: usize) -> Result<Vec<TrialResult>> {
    let max_trials = ctx.cfg.sweep.trials;
    let min_errors = ctx.cfg.sweep.min_errors;
    let mut out = Vec::new();
    let mut errors = 0u64;
    let mut next = 0;
    while next < max_trials {
        let batch = if min_errors.is_some() { threads.min(max_trials - next) } else { max_trials - next };
        let results = run_batch(ctx, point, next..next + batch, threads)?;
        for rows in results {
            // the stopping rule counts errors of the final turbo round
            errors += rows.last().map_or(0, |r| r.bit_errors);
            out.extend(rows);
            next += 1;
            if min_errors.is_some_and(|m| errors >= m) {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn run_batch(
    ctx: &TrialContext,
    point: &Point,
    range: std::ops::Range<usize>,
    threads: usize,
) -> Result<Vec<Vec<TrialResult>>> {
    if threads == 1 {
        return range.map(|t| ctx.run(point, t)).collect();
    }
    let start = range.start;
    let counter = AtomicUsize::new(start);
    let mut slots: Vec<Option<Result<Vec<TrialResult>>>> = (0..range.len()).map(|_| None).collect();
    let collected: Vec<Vec<(usize, Result<Vec<TrialResult>>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads.min(range.len()))
            .map(|_| {
                s.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let t = counter.fetch_add(1, Ordering::Relaxed);
                        if t >= range.end {
                            break mine;
                        }
                        mine.push((t, ctx.run(point, t)));
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect()
    });
    for (t, r) in collected.into_iter().flatten() {
        slots[t - start] = Some(r);
    }
    slots.into_iter().map(|s| s.expect("every trial ran")).collect()
}

/// 95% Wilson score interval for `k` successes in `n` draws.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let (n, p) = (n as f64, k as f64 / n as f64);
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Aggregate per (point, turbo round), in that order.
pub fn aggregate(trials: &[TrialResult]) -> Vec<PointSummary> {
    let mut keys: Vec<(usize, usize)> = trials.iter().map(|t| (t.point, t.turbo)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(point, turbo)| {
            let rows: Vec<&TrialResult> = trials.iter().filter(|t| t.point == point && t.turbo == turbo).collect();
            let bit_errors: u64 = rows.iter().map(|r| r.bit_errors).sum();
            let bits_total: u64 = rows.iter().map(|r| r.bits_total).sum();
            let iters: Vec<f64> = rows.iter().filter_map(|r| r.cgm_iterations.map(|i| i as f64)).collect();
            PointSummary {
                point,
                snr_db: rows[0].snr_db,
                pdr_db: rows[0].pdr_db,
                turbo,
                trials: rows.len(),
                bit_errors,
                bits_total,
                ber: if bits_total == 0 { 0.0 } else { bit_errors as f64 / bits_total as f64 },
                ber_ci: wilson_interval(bit_errors, bits_total),
                median_nmse: median(rows.iter().filter_map(|r| r.nmse).collect()),
                mean_cgm_iterations: (!iters.is_empty()).then(|| iters.iter().sum::<f64>() / iters.len() as f64),
            }
        })
        .collect()
}

impl SweepResults {
    pub fn summary(&self) -> Vec<PointSummary> {
        aggregate(&self.trials)
    }
}
