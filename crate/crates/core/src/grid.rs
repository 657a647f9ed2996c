//! Delay-Doppler lattice geometry.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Geometry of an `M x N` delay-Doppler grid with Doppler period `nu_p`.
///
/// The delay period is always derived as `1 / nu_p`, so the product of the
/// two periods is exactly one. Bandwidth is `M * nu_p` and frame duration is
/// `N * tau_p`, giving a time-bandwidth product of `MN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridParams {
    m: usize,
    n: usize,
    nu_p: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    m: usize,
    n: usize,
    nu_p: f64,
}

impl TryFrom<RawGrid> for GridParams {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        GridParams::new(raw.m, raw.n, raw.nu_p)
    }
}

impl From<GridParams> for RawGrid {
    fn from(g: GridParams) -> Self {
        RawGrid { m: g.m, n: g.n, nu_p: g.nu_p }
    }
}

impl GridParams {
    pub fn new(m: usize, n: usize, nu_p: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidGrid(format!("M and N must be positive, got {m}x{n}")));
        }
        if !(nu_p.is_finite() && nu_p > 0.0) {
            return Err(Error::InvalidGrid(format!("Doppler period must be positive, got {nu_p}")));
        }
        Ok(Self { m, n, nu_p })
    }

    /// Number of delay bins.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of Doppler bins.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Doppler period in Hz.
    pub fn nu_p(&self) -> f64 {
        self.nu_p
    }

    /// Delay period in seconds.
    pub fn tau_p(&self) -> f64 {
        1.0 / self.nu_p
    }

    /// Bandwidth `B = M nu_p` in Hz.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.nu_p
    }

    /// Frame duration `T = N tau_p` in seconds.
    pub fn duration(&self) -> f64 {
        self.n as f64 * self.tau_p()
    }

    /// `MN`, the number of DD bins and FD carriers.
    pub fn frame_size(&self) -> usize {
        self.m * self.n
    }

    /// Spacing of the `MN` frequency-domain carriers, `B / MN`.
    pub fn carrier_spacing(&self) -> f64 {
        self.bandwidth() / self.frame_size() as f64
    }

    /// Flattened DD index `k0 + l0 M` (delay index fastest).
    pub fn flat(&self, k0: usize, l0: usize) -> usize {
        k0 + l0 * self.m
    }

    pub fn check_index(&self, k0: usize, l0: usize) -> Result<()> {
        if k0 >= self.m || l0 >= self.n {
            return Err(Error::IndexOutOfRange { k: k0, l: l0, m: self.m, n: self.n });
        }
        Ok(())
    }
}
