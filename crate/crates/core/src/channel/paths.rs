//! Physical multipath descriptions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result};

/// Veh-A path delays in microseconds.
pub const VEH_A_DELAYS_US: [f64; 6] = [0.0, 0.31, 0.71, 1.09, 1.73, 2.51];
/// Veh-A relative path powers in dB.
pub const VEH_A_POWERS_DB: [f64; 6] = [0.0, -1.0, -9.0, -10.0, -15.0, -20.0];

/// One propagation path: complex gain, delay (s) and Doppler shift (Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: Complex64,
    pub delay: f64,
    pub doppler: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        for (i, p) in paths.iter().enumerate() {
            if !(p.delay >= 0.0 && p.delay.is_finite()) {
                return Err(Error::InvalidParameter(format!("path {i}: delay {} must be >= 0", p.delay)));
            }
            if !p.doppler.is_finite() || !p.gain.re.is_finite() || !p.gain.im.is_finite() {
                return Err(Error::InvalidParameter(format!("path {i}: non-finite parameter")));
            }
        }
        Ok(Self { paths })
    }

    /// A single path with the given parameters.
    pub fn single(gain: Complex64, delay: f64, doppler: f64) -> Result<Self> {
        Self::new(vec![Path { gain, delay, doppler }])
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    pub fn max_delay(&self) -> f64 {
        self.paths.iter().map(|p| p.delay).fold(0.0, f64::max)
    }

    pub fn max_doppler(&self) -> f64 {
        self.paths.iter().map(|p| p.doppler.abs()).fold(0.0, f64::max)
    }
}

/// Draw a Veh-A realization: fixed delays and power profile normalized to
/// unit total power, uniform gain phases, and Doppler `nu_max cos(theta)`
/// with `theta ~ U(-pi, pi)` per path.
///
/// Per path the generator is consumed in the order `theta`, then phase.
pub fn veh_a_paths<R: Rng + ?Sized>(nu_max: f64, rng: &mut R) -> Result<PathSet> {
    if !(nu_max >= 0.0 && nu_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("nu_max must be >= 0, got {nu_max}")));
    }
    let lin: Vec<f64> = VEH_A_POWERS_DB.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let total: f64 = lin.iter().sum();
    let paths = VEH_A_DELAYS_US
        .iter()
        .zip(&lin)
        .map(|(&d_us, &p)| {
            let theta = rng.gen_range(-PI..PI);
            let phase = rng.gen_range(-PI..PI);
            Path {
                gain: Complex64::from_polar((p / total).sqrt(), phase),
                delay: d_us * 1e-6,
                doppler: nu_max * theta.cos(),
            }
        })
        .collect();
    PathSet::new(paths)
}
