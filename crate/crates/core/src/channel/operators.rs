//! Channel operators in the TD, DD and FD domains.

use num_complex::Complex64;

use super::effective::PeriodizedChannel;
use crate::linalg::{BandedMatrix, DenseMatrix, LinearOperator};
use crate::zak::{cis_frac, fd_from_td, td_to_dd, twiddle_table, DdFrame, TdSignal, DENSE_CAP};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Carrier basis used to express the channel as a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// DD pulsones; gives `H_DD`.
    Pulsone,
    /// Unitary IDFT tones; gives the FD matrix `H`.
    Dft,
}

fn check_cap(mn: usize) -> Result<()> {
    if mn > DENSE_CAP {
        return Err(Error::DenseCapExceeded { mn, cap: DENSE_CAP });
    }
    Ok(())
}

/// `y[n] = sum h[kb, lb] x[n - kb] e^{j 2 pi lb (n - kb) / MN}` over one
/// period of an `MN`-periodic input.
pub fn apply_td(h: &PeriodizedChannel, x: &[Complex64]) -> Vec<Complex64> {
    let mn = h.grid().frame_size();
    assert_eq!(x.len(), mn);
    let tw = twiddle_table(mn);
    let mut y = vec![ZERO; mn];
    for &(kb, lb, g) in h.taps() {
        for (n, yn) in y.iter_mut().enumerate() {
            let src = (n + mn - kb) % mn;
            *yn += g * x[src] * tw[(lb * src) % mn].conj();
        }
    }
    y
}

/// Dense TD operator `C` with `y = C x`.
pub fn td_channel_operator(h: &PeriodizedChannel) -> Result<DenseMatrix> {
    let mn = h.grid().frame_size();
    check_cap(mn)?;
    let mut c = DenseMatrix::zeros(mn, mn);
    for &(kb, lb, g) in h.taps() {
        for n in 0..mn {
            let src = (n + mn - kb) % mn;
            c[(n, src)] += g * h.tone(lb, src);
        }
    }
    Ok(c)
}

/// `H[f, i] = phi_f^H C phi_i`, computed by pushing every basis signal
/// through the TD channel and projecting the output back onto the basis.
pub fn build_h_basis(h: &PeriodizedChannel, basis: Basis) -> Result<DenseMatrix> {
    let grid = h.grid();
    let mn = grid.frame_size();
    check_cap(mn)?;
    let mut cols = Vec::with_capacity(mn);
    for i in 0..mn {
        let phi = match basis {
            Basis::Pulsone => crate::zak::pulsone(grid, i % grid.m(), i / grid.m())?,
            Basis::Dft => {
                let amp = 1.0 / (mn as f64).sqrt();
                TdSignal::from_vec(grid, (0..mn).map(|n| cis_frac((i * n) as i64, mn as i64) * amp).collect())?
            }
        };
        let y = TdSignal::from_vec(grid, apply_td(h, phi.as_slice()))?;
        cols.push(match basis {
            Basis::Pulsone => td_to_dd(&y).into_vec(),
            Basis::Dft => fd_from_td(&y).into_vec(),
        });
    }
    Ok(DenseMatrix::from_columns(&cols))
}

/// Scatter one DD column: the response to the unit symbol at `(k0, l0)` is
/// `sum h e^{j 2 pi lb k0 / MN} p_{k0 + kb, l0 + lb}`, with the shifted
/// pulsone folded back into the fundamental rectangle.
fn dd_column(h: &PeriodizedChannel, k0: usize, l0: usize, mut emit: impl FnMut(usize, Complex64)) {
    let grid = h.grid();
    let (m, n, mn) = (grid.m(), grid.n(), grid.frame_size());
    for &(kb, lb, g) in h.taps() {
        let big_k = k0 + kb;
        let (d, kr) = (big_k / m, big_k % m);
        let big_l = (l0 + lb) % n;
        // p_{K + dM, L} = e^{-j 2 pi d L / N} p_{K, L}
        let ph = cis_frac(((lb * k0) % mn) as i64, mn as i64) * cis_frac(-((d * big_l) as i64), n as i64);
        emit(kr + big_l * m, g * ph);
    }
}

/// Apply the channel in the DD domain (twisted convolution), `O(|S| MN)`.
pub fn apply_dd(h: &PeriodizedChannel, x: &DdFrame) -> DdFrame {
    let grid = h.grid();
    let mut y = DdFrame::zeros(grid);
    let out = y.as_mut_slice();
    for l0 in 0..grid.n() {
        for k0 in 0..grid.m() {
            let xv = x.get(k0, l0);
            if xv == ZERO {
                continue;
            }
            dd_column(h, k0, l0, |row, v| out[row] += v * xv);
        }
    }
    y
}

/// Adjoint of [`apply_dd`].
pub fn apply_dd_adjoint(h: &PeriodizedChannel, y: &DdFrame) -> DdFrame {
    let grid = h.grid();
    let src = y.as_slice();
    DdFrame::from_fn(grid, |k0, l0| {
        let mut acc = ZERO;
        dd_column(h, k0, l0, |row, v| acc += v.conj() * src[row]);
        acc
    })
}

/// Dense `H_DD` assembled column by column from the twisted convolution.
pub fn build_h_dd(h: &PeriodizedChannel) -> Result<DenseMatrix> {
    let grid = h.grid();
    let mn = grid.frame_size();
    check_cap(mn)?;
    let mut out = DenseMatrix::zeros(mn, mn);
    for l0 in 0..grid.n() {
        for k0 in 0..grid.m() {
            let col = grid.flat(k0, l0);
            dd_column(h, k0, l0, |row, v| out[(row, col)] += v);
        }
    }
    Ok(out)
}

/// Closed-form dense FD matrix `H[f, i] = sum_kb h[kb, (f - i) mod MN] e^{-j 2 pi f kb / MN}`.
pub fn build_h_fd(h: &PeriodizedChannel) -> Result<DenseMatrix> {
    let mn = h.grid().frame_size();
    check_cap(mn)?;
    Ok(FdChannel::new(h).to_dense())
}

/// The modulo-banded FD channel stored by its non-zero wrapped diagonals:
/// `H[f, (f - lb) mod MN] = D_lb[f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdChannel {
    mn: usize,
    diagonals: Vec<(usize, Vec<Complex64>)>,
}

impl FdChannel {
    pub fn new(h: &PeriodizedChannel) -> Self {
        let mn = h.grid().frame_size();
        let tw = twiddle_table(mn);
        let mut diagonals: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for &(kb, lb, g) in h.taps() {
            if diagonals.last().map(|d| d.0) != Some(lb) {
                diagonals.push((lb, vec![ZERO; mn]));
            }
            let diag = &mut diagonals.last_mut().expect("just pushed").1;
            for (f, v) in diag.iter_mut().enumerate() {
                *v += g * tw[(f * kb) % mn];
            }
        }
        Self { mn, diagonals }
    }

    pub fn dim(&self) -> usize {
        self.mn
    }

    /// `(lb, D_lb)` pairs, sorted by `lb`.
    pub fn diagonals(&self) -> &[(usize, Vec<Complex64>)] {
        &self.diagonals
    }

    pub fn get(&self, f: usize, i: usize) -> Complex64 {
        let lb = (f + self.mn - i) % self.mn;
        self.diagonals.iter().find(|d| d.0 == lb).map_or(ZERO, |d| d.1[f])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mn = self.mn;
        let mut out = DenseMatrix::zeros(mn, mn);
        for (lb, diag) in &self.diagonals {
            for (f, v) in diag.iter().enumerate() {
                out[(f, (f + mn - lb) % mn)] += v;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.diagonals.iter().flat_map(|d| d.1.iter()).map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The channel keeping only wrapped diagonals within `b` of the main
    /// one, corners included.
    pub fn modulo_band(&self, b: usize) -> FdChannel {
        let mn = self.mn;
        let diagonals =
            self.diagonals.iter().filter(|(lb, _)| *lb <= b || *lb + b >= mn).cloned().collect();
        FdChannel { mn, diagonals }
    }

    /// Mean power per received sample of the diagonals outside the modulo
    /// band, for unit-power inputs: `sum |D_lb|^2 / MN` over dropped `lb`.
    pub fn off_band_power(&self, b: usize) -> f64 {
        let mn = self.mn;
        let dropped: f64 = self
            .diagonals
            .iter()
            .filter(|(lb, _)| !(*lb <= b || *lb + b >= mn))
            .flat_map(|(_, d)| d.iter())
            .map(|v| v.norm_sqr())
            .sum();
        dropped / mn as f64
    }

    /// Entries with `|f - i| <= b`; the folded corners are dropped.
    pub fn band(&self, b: usize) -> BandedMatrix {
        let mn = self.mn;
        let mut out = BandedMatrix::zeros(mn, b);
        let b = out.half_bandwidth();
        for (lb, diag) in &self.diagonals {
            // offset f - i is lb (lower part) or lb - MN (wrapped upper part)
            for off in [*lb as i64, *lb as i64 - mn as i64] {
                if off.unsigned_abs() as usize > b {
                    continue;
                }
                for (f, v) in diag.iter().enumerate() {
                    let i = f as i64 - off;
                    if (0..mn as i64).contains(&i) {
                        let cur = out.get(f, i as usize);
                        out.set(f, i as usize, cur + v);
                    }
                }
            }
        }
        out
    }

    /// `diag(H^H H)`, the energy each carrier delivers to the receiver.
    pub fn column_energies(&self) -> Vec<f64> {
        let mn = self.mn;
        let mut e = vec![0.0; mn];
        // column i collects D_lb[f] with f = (i + lb) mod MN; entries in one
        // column come from distinct diagonals, so energies simply add
        for (lb, diag) in &self.diagonals {
            for (i, ei) in e.iter_mut().enumerate() {
                *ei += diag[(i + lb) % mn].norm_sqr();
            }
        }
        e
    }
}

impl LinearOperator for FdChannel {
    fn dim(&self) -> usize {
        self.mn
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let mn = self.mn;
        y.iter_mut().for_each(|v| *v = ZERO);
        for (lb, diag) in &self.diagonals {
            for (f, yf) in y.iter_mut().enumerate() {
                *yf += diag[f] * x[(f + mn - lb) % mn];
            }
        }
    }

    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        let mn = self.mn;
        y.iter_mut().for_each(|v| *v = ZERO);
        for (lb, diag) in &self.diagonals {
            for (i, yi) in y.iter_mut().enumerate() {
                let f = (i + lb) % mn;
                *yi += diag[f].conj() * x[f];
            }
        }
    }
}

/// Smallest `b` such that every FD entry with `(f - i) mod MN` outside
/// `[0, b] U [MN - b, MN - 1]` is below `threshold * max |H|`.
pub fn doppler_band_width(h: &PeriodizedChannel, threshold: f64) -> usize {
    let fd = FdChannel::new(h);
    let mn = fd.dim();
    let peak = fd.max_abs();
    fd.diagonals()
        .iter()
        .filter(|(_, d)| d.iter().any(|v| v.norm() >= threshold * peak) && peak > 0.0)
        .map(|(lb, _)| (*lb).min(mn - lb))
        .max()
        .unwrap_or(0)
}
