//! Transmit/receive pulse pairs, described by their end-to-end (matched
//! filtered) response in resolution-bin units.
//!
//! | kind       | response `g(x)`                                  |
//! |------------|--------------------------------------------------|
//! | sinc       | `sinc(x)`                                        |
//! | rrc        | raised cosine `sinc(x) cos(pi b x) / (1 - (2 b x)^2)` |
//! | gauss      | `exp(-a x^2 / 2)` (autocorrelation of `exp(-a x^2)`) |
//! | gauss-sinc | `sinc(x) exp(-a x^2)`                            |
//!
//! `sinc(x) = sin(pi x) / (pi x)`. The delay axis uses `x = k - tau B`, the
//! Doppler axis `x = l - nu T`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::GridParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PulseShape {
    Sinc,
    Rrc { beta_tau: f64, beta_nu: f64 },
    Gauss { alpha_tau: f64, alpha_nu: f64 },
    GaussSinc { alpha_tau: f64, alpha_nu: f64 },
}

impl Default for PulseShape {
    fn default() -> Self {
        Self::rrc()
    }
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Raised-cosine response with roll-off `beta`.
pub fn raised_cosine(x: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return sinc(x);
    }
    let t = 2.0 * beta * x;
    if (t.abs() - 1.0).abs() < 1e-9 {
        // removable singularity at |x| = 1 / (2 beta)
        return PI / 4.0 * sinc(1.0 / (2.0 * beta));
    }
    sinc(x) * (PI * beta * x).cos() / (1.0 - t * t)
}

impl PulseShape {
    /// RRC with roll-off 0.6 on both axes.
    pub fn rrc() -> Self {
        Self::Rrc { beta_tau: 0.6, beta_nu: 0.6 }
    }

    /// Gaussian with width parameter 1.584 on both axes.
    pub fn gauss() -> Self {
        Self::Gauss { alpha_tau: 1.584, alpha_nu: 1.584 }
    }

    /// Gaussian-sinc with width parameter 0.044 on both axes.
    pub fn gauss_sinc() -> Self {
        Self::GaussSinc { alpha_tau: 0.044, alpha_nu: 0.044 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sinc => "sinc",
            Self::Rrc { .. } => "rrc",
            Self::Gauss { .. } => "gauss",
            Self::GaussSinc { .. } => "gauss-sinc",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Self::Sinc => Ok(()),
            Self::Rrc { beta_tau, beta_nu } => {
                if !(0.0..=1.0).contains(&beta_tau) || !(0.0..=1.0).contains(&beta_nu) {
                    return bad(format!("RRC roll-offs must lie in [0, 1], got {beta_tau}, {beta_nu}"));
                }
                Ok(())
            }
            Self::Gauss { alpha_tau, alpha_nu } | Self::GaussSinc { alpha_tau, alpha_nu } => {
                if !(alpha_tau > 0.0 && alpha_nu > 0.0 && alpha_tau.is_finite() && alpha_nu.is_finite()) {
                    return bad(format!("Gaussian widths must be positive, got {alpha_tau}, {alpha_nu}"));
                }
                Ok(())
            }
        }
    }

    fn response(&self, x: f64, delay_axis: bool) -> f64 {
        let pick = |a: f64, b: f64| if delay_axis { a } else { b };
        match *self {
            Self::Sinc => sinc(x),
            Self::Rrc { beta_tau, beta_nu } => raised_cosine(x, pick(beta_tau, beta_nu)),
            Self::Gauss { alpha_tau, alpha_nu } => (-pick(alpha_tau, alpha_nu) * x * x / 2.0).exp(),
            Self::GaussSinc { alpha_tau, alpha_nu } => sinc(x) * (-pick(alpha_tau, alpha_nu) * x * x).exp(),
        }
    }

    /// End-to-end delay response at offset `x` delay bins.
    pub fn delay_response(&self, x: f64) -> f64 {
        self.response(x, true)
    }

    /// End-to-end Doppler response at offset `x` Doppler bins.
    pub fn doppler_response(&self, x: f64) -> f64 {
        self.response(x, false)
    }

    /// Equalizer half-bandwidth used with this pulse: `ceil(nu_max T) + 1`
    /// for RRC and Gauss, `ceil(5 nu_max T)` for Gauss-sinc, `N + 1` for sinc.
    pub fn preset_band(&self, nu_max: f64, grid: &GridParams) -> usize {
        let spread = nu_max * grid.duration();
        match self {
            Self::Sinc => grid.n() + 1,
            Self::Rrc { .. } | Self::Gauss { .. } => spread_ceil(spread) + 1,
            Self::GaussSinc { .. } => spread_ceil(5.0 * spread),
        }
    }
}

/// `ceil` that ignores floating-point fuzz just above an integer.
fn spread_ceil(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}
