//! Discrete effective DD channel and its MN-periodization.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::paths::PathSet;
use super::pulse::PulseShape;
use crate::grid::GridParams;
use crate::zak::cis_frac;
use crate::{Error, Result};

/// Default truncation floor relative to the peak tap magnitude.
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Inclusive rectangle of integer (delay, Doppler) bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TapWindow {
    pub k_min: i64,
    pub k_max: i64,
    pub l_min: i64,
    pub l_max: i64,
}

impl TapWindow {
    pub fn new(k_min: i64, k_max: i64, l_min: i64, l_max: i64) -> Result<Self> {
        if k_min > k_max || l_min > l_max {
            return Err(Error::InvalidParameter(format!(
                "empty tap window [{k_min}, {k_max}] x [{l_min}, {l_max}]"
            )));
        }
        Ok(Self { k_min, k_max, l_min, l_max })
    }

    /// One fundamental period around a channel whose delays occupy bins
    /// `0..=delay_bins`: `M` delay bins centred on the spread and `N`
    /// Doppler bins centred on zero.
    pub fn fundamental(grid: &GridParams, delay_bins: usize) -> Self {
        let (m, n) = (grid.m() as i64, grid.n() as i64);
        let spread = (delay_bins as i64).min(m - 1);
        let k_min = -((m - 1 - spread) / 2);
        let l_min = -((n - 1) / 2);
        Self { k_min, k_max: k_min + m - 1, l_min, l_max: l_min + n - 1 }
    }

    pub fn delay_len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn doppler_len(&self) -> usize {
        (self.l_max - self.l_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.delay_len() * self.doppler_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        (self.k_min..=self.k_max).contains(&k) && (self.l_min..=self.l_max).contains(&l)
    }

    /// Flat index, delay fastest.
    pub fn index(&self, k: i64, l: i64) -> Option<usize> {
        self.contains(k, l)
            .then(|| (k - self.k_min) as usize + (l - self.l_min) as usize * self.delay_len())
    }

    pub fn coords(&self, idx: usize) -> (i64, i64) {
        let dl = self.delay_len();
        (self.k_min + (idx % dl) as i64, self.l_min + (idx / dl) as i64)
    }

    /// Intersection with another window, if non-empty.
    pub fn intersect(&self, other: &TapWindow) -> Option<TapWindow> {
        TapWindow::new(
            self.k_min.max(other.k_min),
            self.k_max.min(other.k_max),
            self.l_min.max(other.l_min),
            self.l_max.min(other.l_max),
        )
        .ok()
    }
}

/// Effective DD taps `h_eff[k, l]` stored densely over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    grid: GridParams,
    window: TapWindow,
    taps: Vec<Complex64>,
}

impl EffectiveChannel {
    pub fn zeros(grid: GridParams, window: TapWindow) -> Self {
        Self { grid, window, taps: vec![Complex64::new(0.0, 0.0); window.len()] }
    }

    /// Build from `(k, l, h)` triples; repeated bins accumulate.
    pub fn from_taps(
        grid: GridParams,
        window: TapWindow,
        taps: impl IntoIterator<Item = (i64, i64, Complex64)>,
    ) -> Result<Self> {
        let mut ch = Self::zeros(grid, window);
        for (k, l, h) in taps {
            let idx = window.index(k, l).ok_or_else(|| {
                Error::InvalidParameter(format!("tap ({k}, {l}) outside window {window:?}"))
            })?;
            ch.taps[idx] += h;
        }
        Ok(ch)
    }

    pub fn grid(&self) -> GridParams {
        self.grid
    }

    pub fn window(&self) -> TapWindow {
        self.window
    }

    /// Dense tap storage over the window, delay index fastest.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.taps
    }

    /// Tap value; zero outside the window.
    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        self.window.index(k, l).map_or(Complex64::new(0.0, 0.0), |i| self.taps[i])
    }

    /// Non-zero taps as `(k, l, h)`.
    pub fn taps(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.taps
            .iter()
            .enumerate()
            .filter(|(_, h)| **h != Complex64::new(0.0, 0.0))
            .map(|(i, h)| {
                let (k, l) = self.window.coords(i);
                (k, l, *h)
            })
    }

    /// The support set `S`.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.taps().map(|(k, l, _)| (k, l)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|h| h.norm_sqr()).sum()
    }

    pub fn peak(&self) -> f64 {
        self.taps.iter().map(|h| h.norm()).fold(0.0, f64::max)
    }

    /// Copy of the taps re-windowed; taps outside `window` are dropped.
    pub fn restrict(&self, window: TapWindow) -> EffectiveChannel {
        let mut out = Self::zeros(self.grid, window);
        for (k, l, h) in self.taps() {
            if let Some(i) = window.index(k, l) {
                out.taps[i] = h;
            }
        }
        out
    }

    /// Zero every tap below `floor * peak`.
    pub fn truncate(&mut self, floor: f64) {
        let thr = floor * self.peak();
        for h in &mut self.taps {
            if h.norm() < thr {
                *h = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Linear combination `a self + b other` over this channel's window.
    pub fn axpby(&self, a: Complex64, other: &EffectiveChannel, b: Complex64) -> EffectiveChannel {
        let mut out = self.clone();
        for (i, h) in out.taps.iter_mut().enumerate() {
            let (k, l) = self.window.coords(i);
            *h = a * *h + b * other.get(k, l);
        }
        out
    }
}

/// Default window for a path set: one fundamental period around its spread.
pub fn default_window(paths: &PathSet, grid: &GridParams) -> TapWindow {
    let delay_bins = (paths.max_delay() * grid.bandwidth() - 1e-9).ceil().max(0.0) as usize;
    TapWindow::fundamental(grid, delay_bins)
}

/// Sample the pulse-shaped channel on the default window with the default
/// truncation floor.
pub fn effective_channel(paths: &PathSet, pulse: &PulseShape, grid: &GridParams) -> Result<EffectiveChannel> {
    effective_channel_in(paths, pulse, grid, default_window(paths, grid), DEFAULT_FLOOR)
}

/// `h_eff[k, l] = sum_p h_p g_tau(k - tau_p B) g_nu(l - nu_p T) e^{-j 2 pi nu_p (k / B - tau_p)}`
/// sampled on `window`, then truncated below `floor` times the peak.
pub fn effective_channel_in(
    paths: &PathSet,
    pulse: &PulseShape,
    grid: &GridParams,
    window: TapWindow,
    floor: f64,
) -> Result<EffectiveChannel> {
    pulse.validate()?;
    if window.delay_len() > grid.m() || window.doppler_len() > grid.n() {
        return Err(Error::InvalidParameter(format!(
            "tap window {window:?} exceeds one {}x{} fundamental period",
            grid.m(),
            grid.n()
        )));
    }
    let (b, t) = (grid.bandwidth(), grid.duration());
    for (i, p) in paths.paths().iter().enumerate() {
        if p.delay >= grid.tau_p() {
            return Err(Error::InvalidParameter(format!(
                "path {i} delay {} s is not below the delay period {} s",
                p.delay,
                grid.tau_p()
            )));
        }
        let kb = p.delay * b;
        if kb > window.k_max as f64 || kb < window.k_min as f64 {
            return Err(Error::InvalidParameter(format!("path {i} delay lies outside the tap window")));
        }
    }
    let mut ch = EffectiveChannel::zeros(*grid, window);
    for p in paths.paths() {
        let dk: Vec<f64> = (window.k_min..=window.k_max).map(|k| pulse.delay_response(k as f64 - p.delay * b)).collect();
        let phase: Vec<Complex64> = (window.k_min..=window.k_max)
            .map(|k| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * p.doppler * (k as f64 / b - p.delay)))
            .collect();
        for (li, l) in (window.l_min..=window.l_max).enumerate() {
            let gl = pulse.doppler_response(l as f64 - p.doppler * t);
            let row = &mut ch.taps[li * window.delay_len()..(li + 1) * window.delay_len()];
            for ((h, g), ph) in row.iter_mut().zip(&dk).zip(&phase) {
                *h += p.gain * (g * gl) * ph;
            }
        }
    }
    ch.truncate(floor);
    Ok(ch)
}

/// `MN`-periodized channel `h[kb, lb]`, both indices in `0..MN`, stored
/// sparsely and sorted by `(lb, kb)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodizedChannel {
    grid: GridParams,
    taps: Vec<(usize, usize, Complex64)>,
}

impl PeriodizedChannel {
    /// Fold arbitrary integer taps modulo `MN`; aliased taps add.
    pub fn from_taps(grid: GridParams, taps: impl IntoIterator<Item = (i64, i64, Complex64)>) -> Self {
        let mn = grid.frame_size() as i64;
        let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (k, l, h) in taps {
            let key = (l.rem_euclid(mn) as usize, k.rem_euclid(mn) as usize);
            *acc.entry(key).or_default() += h;
        }
        let taps = acc
            .into_iter()
            .filter(|(_, h)| *h != Complex64::new(0.0, 0.0))
            .map(|((l, k), h)| (k, l, h))
            .collect();
        Self { grid, taps }
    }

    /// The identity channel `h = delta`.
    pub fn identity(grid: GridParams) -> Self {
        Self::from_taps(grid, [(0, 0, Complex64::new(1.0, 0.0))])
    }

    pub fn grid(&self) -> GridParams {
        self.grid
    }

    /// Non-zero taps `(kb, lb, h)`.
    pub fn taps(&self) -> &[(usize, usize, Complex64)] {
        &self.taps
    }

    pub fn get(&self, kb: usize, lb: usize) -> Complex64 {
        self.taps
            .iter()
            .find(|(k, l, _)| *k == kb && *l == lb)
            .map_or(Complex64::new(0.0, 0.0), |t| t.2)
    }

    /// Distinct Doppler indices in the support.
    pub fn doppler_support(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.taps.iter().map(|t| t.1).collect();
        v.dedup();
        v
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.2.norm_sqr()).sum()
    }

    /// Tap phase factor `e^{j 2 pi lb n / MN}` helper.
    pub(crate) fn tone(&self, lb: usize, n: usize) -> Complex64 {
        let mn = self.grid.frame_size();
        cis_frac(((lb * n) % mn) as i64, mn as i64)
    }
}

/// Fold the effective taps modulo `MN` in both indices.
pub fn periodize(h: &EffectiveChannel) -> PeriodizedChannel {
    PeriodizedChannel::from_taps(h.grid(), h.taps())
}
