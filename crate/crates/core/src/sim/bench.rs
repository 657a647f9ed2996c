//! Equalizer wall time against frame size.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use super::streams::{stream, trial_seed, Purpose};
use crate::channel::{effective_channel, periodize, veh_a_paths, FdChannel, PulseShape};
use crate::equalizer::{apply_channel, cgm_equalize, lmmse_direct, CgmOptions, NullSpaceMask};
use crate::grid::GridParams;
use crate::zak::{idfzt, DdFrame};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub b: usize,
    /// CG iterations; the tolerance is zero so every grid runs exactly `k`.
    pub k: usize,
    /// Timed repetitions per grid; the median is reported.
    pub reps: usize,
    /// Dense LMMSE is timed only up to this frame size.
    pub dense_max_mn: usize,
    pub nu_max: f64,
    pub snr_db: f64,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { b: 3, k: 250, reps: 5, dense_max_mn: 1200, nu_max: 815.0, snr_db: 20.0, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub grid: GridParams,
    pub cgm_seconds: f64,
    pub cgm_iterations: usize,
    /// Share of profiled CG time spent in banded products.
    pub operator_share: f64,
    pub dense_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `ln t` against `ln MN`.
    pub cgm_slope: f64,
    pub dense_slope: Option<f64>,
}

pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn median_time(reps: usize, mut f: impl FnMut()) -> f64 {
    let mut t: Vec<Duration> = (0..reps.max(1))
        .map(|_| {
            let s = Instant::now();
            f();
            s.elapsed()
        })
        .collect();
    t.sort();
    t[t.len() / 2].as_secs_f64()
}

pub fn bench_complexity(grids: &[GridParams], opts: &BenchOptions) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for (gi, &grid) in grids.iter().enumerate() {
        let seed = trial_seed(opts.seed, gi);
        let paths = veh_a_paths(opts.nu_max, &mut stream(seed, Purpose::Channel))?;
        let fd = FdChannel::new(&periodize(&effective_channel(&paths, &PulseShape::rrc(), &grid)?));
        let mask = NullSpaceMask::new(grid, opts.b)?;
        let mut rng = stream(seed, Purpose::Data);
        let x: Vec<Complex64> = (0..mask.data_len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let s = idfzt(&DdFrame::from_vec(grid, mask.embed(&x)?)?);
        let sigma2 = 10f64.powf(-opts.snr_db / 10.0);
        let r = apply_channel(&fd, s.as_slice(), sigma2, &mut stream(seed, Purpose::Noise));
        let band = fd.band(opts.b);

        let cg = CgmOptions { eps: 0.0, max_iter: opts.k, profile: false };
        let mut iterations = 0;
        let cgm_seconds = median_time(opts.reps, || iterations = cgm_equalize(&band, &r, sigma2, &cg).iterations);
        let prof = cgm_equalize(&band, &r, sigma2, &CgmOptions { profile: true, ..cg })
            .profile
            .expect("profiling requested");
        let total = (prof.operator + prof.vector).as_secs_f64();
        let operator_share = if total > 0.0 { prof.operator.as_secs_f64() / total } else { 0.0 };

        let dense_seconds = if grid.frame_size() <= opts.dense_max_mn {
            let dense = fd.to_dense();
            let mut res = Ok(());
            let t = median_time(opts.reps.min(3), || res = lmmse_direct(&dense, &r, sigma2).map(|_| ()));
            res?;
            Some(t)
        } else {
            None
        };
        rows.push(BenchRow { grid, cgm_seconds, cgm_iterations: iterations, operator_share, dense_seconds });
    }
    let cgm: Vec<(f64, f64)> = rows.iter().map(|r| (r.grid.frame_size() as f64, r.cgm_seconds)).collect();
    let dense: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.dense_seconds.map(|t| (r.grid.frame_size() as f64, t))).collect();
    Ok(BenchReport {
        cgm_slope: loglog_slope(&cgm),
        dense_slope: (dense.len() >= 2).then(|| loglog_slope(&dense)),
        rows,
    })
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,n,mn,cgm_seconds,cgm_iterations,operator_share,dense_seconds\n");
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{},{},{}\n",
                r.grid.m(),
                r.grid.n(),
                r.grid.frame_size(),
                r.cgm_seconds,
                r.cgm_iterations,
                r.operator_share,
                r.dense_seconds.map(|t| t.to_string()).unwrap_or_default()
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }
}
