//! Zadoff-Chu spread pilot and pilot/data power split.

use num_complex::Complex64;

use crate::grid::GridParams;
use crate::zak::{cis_frac, DdFrame};
use crate::{Error, Result};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Unit-norm Zadoff-Chu sequence of length `len` with root `root`:
/// `e^{-j pi u n (n + 1) / L}` for odd `L`, `e^{-j pi u n^2 / L}` for even `L`.
pub fn zadoff_chu(len: usize, root: u64) -> Result<Vec<Complex64>> {
    if len == 0 {
        return Err(Error::InvalidParameter("Zadoff-Chu length must be positive".into()));
    }
    let l = len as u64;
    if root == 0 || gcd(root % l, l) != 1 && l > 1 {
        return Err(Error::InvalidParameter(format!("root {root} is not coprime with length {len}")));
    }
    let amp = 1.0 / (len as f64).sqrt();
    let two_l = 2 * l as u128;
    Ok((0..l as u128)
        .map(|n| {
            let quad = if l % 2 == 1 { n * (n + 1) } else { n * n };
            // e^{-j pi u q / L} = e^{-j 2 pi (u q mod 2L) / 2L}
            let r = (root as u128 % two_l) * (quad % two_l) % two_l;
            cis_frac(-(r as i64), two_l as i64) * amp
        })
        .collect())
}

/// DD spread pilot: a length-`MN` ZC sequence placed at flat index
/// `i = k0 + l0 M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadPilot {
    frame: DdFrame,
    root: u64,
}

pub fn make_pilot(grid: GridParams, root: u64) -> Result<SpreadPilot> {
    let seq = zadoff_chu(grid.frame_size(), root)?;
    Ok(SpreadPilot { frame: DdFrame::from_vec(grid, seq)?, root })
}

impl SpreadPilot {
    pub fn frame(&self) -> &DdFrame {
        &self.frame
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn grid(&self) -> GridParams {
        self.frame.grid()
    }
}

/// Pilot and data frame energies. `pdr_db = 10 log10(e_p / e_d)`.
///
/// Both are totals over the frame: the pilot has unit norm and is scaled by
/// `sqrt(e_p)`, while each of the `n` data symbols is scaled by
/// `sqrt(e_d / n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub e_p: f64,
    pub e_d: f64,
}

impl PowerSplit {
    pub fn new(e_p: f64, e_d: f64) -> Result<Self> {
        if !(e_p >= 0.0 && e_d >= 0.0) || e_p + e_d == 0.0 || !(e_p + e_d).is_finite() {
            return Err(Error::InvalidParameter(format!("invalid energies e_p={e_p}, e_d={e_d}")));
        }
        Ok(Self { e_p, e_d })
    }

    /// Split with data frame energy `e_d` and pilot energy `e_d 10^{pdr/10}`.
    pub fn from_pdr_db(pdr_db: f64, e_d: f64) -> Result<Self> {
        Self::new(e_d * 10f64.powf(pdr_db / 10.0), e_d)
    }

    pub fn pdr_db(&self) -> f64 {
        10.0 * (self.e_p / self.e_d).log10()
    }

    pub fn pilot_amplitude(&self) -> f64 {
        self.e_p.sqrt()
    }

    /// Per-symbol amplitude for `n_data` data symbols.
    pub fn data_amplitude(&self, n_data: usize) -> f64 {
        if n_data == 0 {
            0.0
        } else {
            (self.e_d / n_data as f64).sqrt()
        }
    }
}
