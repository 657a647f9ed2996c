//! DD, FD and TD representations of a Zak-OTFS frame and the transforms
//! between them.
//!
//! A DD frame is stored as `vec(X)`: column-major with the delay index
//! fastest, so bin `(k0, l0)` lives at flat index `k0 + l0 M`. All DFTs are
//! unitary.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::GridParams;
use crate::linalg::DenseMatrix;
use crate::{Error, Result};

/// Largest frame size for which dense `MN x MN` matrices are materialized.
pub const DENSE_CAP: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{j 2 pi num / den}` with the numerator reduced first to keep the
/// argument small.
pub fn cis_frac(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / den as f64)
}

/// `twiddle[t] = e^{-j 2 pi t / len}`.
pub fn twiddle_table(len: usize) -> Vec<Complex64> {
    (0..len).map(|t| cis_frac(-(t as i64), len as i64)).collect()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// An `M x N` delay-Doppler symbol grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DdFrame {
    grid: GridParams,
    data: Vec<Complex64>,
}

impl DdFrame {
    pub fn zeros(grid: GridParams) -> Self {
        Self { grid, data: vec![ZERO; grid.frame_size()] }
    }

    /// Wrap `vec(X)` (delay index fastest).
    pub fn from_vec(grid: GridParams, data: Vec<Complex64>) -> Result<Self> {
        check_len(grid.frame_size(), data.len())?;
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: GridParams, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(grid.frame_size());
        for l0 in 0..grid.n() {
            for k0 in 0..grid.m() {
                data.push(f(k0, l0));
            }
        }
        Self { grid, data }
    }

    /// Single unit symbol at `(k0, l0)`.
    pub fn delta(grid: GridParams, k0: usize, l0: usize) -> Result<Self> {
        grid.check_index(k0, l0)?;
        let mut f = Self::zeros(grid);
        f.data[grid.flat(k0, l0)] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn grid(&self) -> GridParams {
        self.grid
    }

    pub fn get(&self, k0: usize, l0: usize) -> Complex64 {
        self.data[self.grid.flat(k0, l0)]
    }

    pub fn set(&mut self, k0: usize, l0: usize, v: Complex64) {
        let idx = self.grid.flat(k0, l0);
        self.data[idx] = v;
    }

    /// Value at an arbitrary integer bin under the quasi-periodic extension
    /// `X[k + dM, l + eN] = e^{j 2 pi d l / N} X[k, l]`.
    pub fn get_quasi(&self, k: i64, l: i64) -> Complex64 {
        let (m, n) = (self.grid.m() as i64, self.grid.n() as i64);
        let d = k.div_euclid(m);
        let kr = k.rem_euclid(m) as usize;
        let lr = l.rem_euclid(n) as usize;
        let v = self.get(kr, lr);
        if d == 0 {
            v
        } else {
            v * cis_frac(d * lr as i64, n)
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// A length-`MN` frequency-domain carrier vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FdVector {
    grid: GridParams,
    data: Vec<Complex64>,
}

/// One `MN`-sample period of a periodic time-domain signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TdSignal {
    grid: GridParams,
    data: Vec<Complex64>,
}

macro_rules! vector_type {
    ($t:ident) => {
        impl $t {
            pub fn zeros(grid: GridParams) -> Self {
                Self { grid, data: vec![ZERO; grid.frame_size()] }
            }

            pub fn from_vec(grid: GridParams, data: Vec<Complex64>) -> Result<Self> {
                check_len(grid.frame_size(), data.len())?;
                Ok(Self { grid, data })
            }

            pub fn grid(&self) -> GridParams {
                self.grid
            }

            pub fn as_slice(&self) -> &[Complex64] {
                &self.data
            }

            pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
                &mut self.data
            }

            pub fn into_vec(self) -> Vec<Complex64> {
                self.data
            }

            pub fn energy(&self) -> f64 {
                self.data.iter().map(|v| v.norm_sqr()).sum()
            }
        }
    };
}

vector_type!(FdVector);
vector_type!(TdSignal);

/// The TD pulsone for DD bin `(k0, l0)`: a train of `N` impulses at
/// `k0 + dM`, modulated by the tone `e^{j 2 pi d l0 / N} / sqrt(N)`.
pub fn pulsone(grid: GridParams, k0: usize, l0: usize) -> Result<TdSignal> {
    grid.check_index(k0, l0)?;
    let (m, n) = (grid.m(), grid.n());
    let amp = 1.0 / (n as f64).sqrt();
    let mut x = TdSignal::zeros(grid);
    for d in 0..n {
        x.data[k0 + d * m] = cis_frac((d * l0) as i64, n as i64) * amp;
    }
    Ok(x)
}

/// Superpose pulsones weighted by the frame symbols.
pub fn dd_to_td(frame: &DdFrame) -> TdSignal {
    let grid = frame.grid;
    let (m, n) = (grid.m(), grid.n());
    let tw = twiddle_table(n);
    let amp = 1.0 / (n as f64).sqrt();
    let mut x = TdSignal::zeros(grid);
    for k0 in 0..m {
        for d in 0..n {
            let mut acc = ZERO;
            for l0 in 0..n {
                // e^{+j 2 pi d l0 / N}
                acc += frame.get(k0, l0) * tw[(d * l0) % n].conj();
            }
            x.data[k0 + d * m] = acc * amp;
        }
    }
    x
}

/// Project a TD period onto the pulsone basis (inverse of [`dd_to_td`]).
pub fn td_to_dd(x: &TdSignal) -> DdFrame {
    let grid = x.grid;
    let (m, n) = (grid.m(), grid.n());
    let tw = twiddle_table(n);
    let amp = 1.0 / (n as f64).sqrt();
    DdFrame::from_fn(grid, |k0, l0| {
        let s: Complex64 = (0..n).map(|d| x.data[k0 + d * m] * tw[(d * l0) % n]).sum();
        s * amp
    })
}

/// Inverse discrete frequency Zak transform:
/// `s[i] = M^{-1/2} sum_k0 X[k0, i mod N] e^{-j 2 pi i k0 / MN}`.
pub fn idfzt(frame: &DdFrame) -> FdVector {
    let grid = frame.grid;
    let (m, n, mn) = (grid.m(), grid.n(), grid.frame_size());
    let tw = twiddle_table(mn);
    let amp = 1.0 / (m as f64).sqrt();
    let mut s = FdVector::zeros(grid);
    for (i, out) in s.data.iter_mut().enumerate() {
        let l0 = i % n;
        let col = &frame.data[l0 * m..(l0 + 1) * m];
        let mut acc = ZERO;
        for (k0, x) in col.iter().enumerate() {
            acc += x * tw[(i * k0) % mn];
        }
        *out = acc * amp;
    }
    s
}

/// Discrete frequency Zak transform, the inverse (and adjoint) of [`idfzt`]:
/// `X[k0, l0] = M^{-1/2} sum_q s[l0 + qN] e^{+j 2 pi (l0 + qN) k0 / MN}`.
pub fn dfzt(s: &FdVector) -> DdFrame {
    let grid = s.grid;
    let (m, n, mn) = (grid.m(), grid.n(), grid.frame_size());
    let tw = twiddle_table(mn);
    let amp = 1.0 / (m as f64).sqrt();
    DdFrame::from_fn(grid, |k0, l0| {
        let mut acc = ZERO;
        for q in 0..m {
            let i = l0 + q * n;
            acc += s.data[i] * tw[(i * k0) % mn].conj();
        }
        acc * amp
    })
}

/// Explicit IDFZT matrix `R = K (I_N kron F_M) diag(q)` with the default cap.
pub fn build_r(grid: GridParams) -> Result<DenseMatrix> {
    build_r_with_cap(grid, DENSE_CAP)
}

/// Explicit IDFZT matrix, assembled factor by factor.
///
/// * `diag(q)`: `q[k + lM] = e^{-j 2 pi l k / MN}`
/// * `I_N kron F_M`: unitary `M`-point DFT on each length-`M` block
/// * `K`: stride permutation, `K[jN + i, iM + j] = 1`
pub fn build_r_with_cap(grid: GridParams, cap: usize) -> Result<DenseMatrix> {
    let (m, n, mn) = (grid.m(), grid.n(), grid.frame_size());
    if mn > cap {
        return Err(Error::DenseCapExceeded { mn, cap });
    }
    let amp = 1.0 / (m as f64).sqrt();
    let q = |c: usize| cis_frac(-(((c / m) * (c % m)) as i64), mn as i64);
    // (I_N kron F_M) diag(q): block diagonal, block l maps k -> p
    let inner = |row: usize, col: usize| -> Complex64 {
        let (lb_r, p) = (row / m, row % m);
        let (lb_c, k) = (col / m, col % m);
        if lb_r != lb_c {
            return ZERO;
        }
        cis_frac(-((p * k) as i64), m as i64) * amp * q(col)
    };
    // K as an index map: row jN + i of K selects row iM + j of the product.
    let k_src = |row: usize| {
        let (j, i) = (row / n, row % n);
        i * m + j
    };
    Ok(DenseMatrix::from_fn(mn, mn, |row, col| inner(k_src(row), col)))
}

/// Unitary inverse DFT: `x[n] = (MN)^{-1/2} sum_i s[i] e^{j 2 pi i n / MN}`.
pub fn td_from_fd(s: &FdVector) -> TdSignal {
    let mut buf = s.data.clone();
    unitary_fft(&mut buf, true);
    TdSignal { grid: s.grid, data: buf }
}

/// Unitary forward DFT, the inverse of [`td_from_fd`].
pub fn fd_from_td(x: &TdSignal) -> FdVector {
    let mut buf = x.data.clone();
    unitary_fft(&mut buf, false);
    FdVector { grid: x.grid, data: buf }
}

/// In-place unitary DFT (`inverse` selects the `+j` sign).
pub fn unitary_fft(buf: &mut [Complex64], inverse: bool) {
    let len = buf.len();
    if len == 0 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
    fft.process(buf);
    let scale = 1.0 / (len as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: usize, n: usize) -> GridParams {
        GridParams::new(m, n, 30e3).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pulsone_small_cases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = pulsone(g(2, 2), 0, 0).unwrap();
        let want = [c(h, 0.0), ZERO, c(h, 0.0), ZERO];
        assert!(crate::linalg::max_abs_diff(p.as_slice(), &want) < 1e-15);
        let p = pulsone(g(2, 2), 1, 1).unwrap();
        let want = [ZERO, c(h, 0.0), ZERO, c(-h, 0.0)];
        assert!(crate::linalg::max_abs_diff(p.as_slice(), &want) < 1e-15);
        assert!(pulsone(g(2, 2), 2, 0).is_err());
        assert!(pulsone(g(2, 2), 0, 2).is_err());
    }

    #[test]
    fn idfzt_small_cases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = idfzt(&DdFrame::delta(g(2, 2), 0, 0).unwrap());
        let want = [c(h, 0.0), ZERO, c(h, 0.0), ZERO];
        assert!(crate::linalg::max_abs_diff(s.as_slice(), &want) < 1e-15);
        let x = DdFrame::from_vec(g(1, 1), vec![c(0.3, -2.0)]).unwrap();
        assert_eq!(idfzt(&x).as_slice(), &[c(0.3, -2.0)]);
        assert_eq!(build_r(g(1, 1)).unwrap().data(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn quasi_periodic_extension() {
        let grid = g(3, 5);
        let x = DdFrame::from_fn(grid, |k, l| c(k as f64 + 1.0, l as f64));
        for (k, l) in [(1i64, 2i64), (0, 4), (2, 0)] {
            let base = x.get_quasi(k, l);
            assert_eq!(base, x.get(k as usize, l as usize));
            assert!((x.get_quasi(k, l + 5) - base).norm() < 1e-15);
            let shifted = x.get_quasi(k + 3, l);
            assert!((shifted - base * cis_frac(l, 5)).norm() < 1e-14);
            let back = x.get_quasi(k - 6, l);
            assert!((back - base * cis_frac(-2 * l, 5)).norm() < 1e-14);
        }
    }

    #[test]
    fn dense_cap_enforced() {
        assert!(matches!(build_r_with_cap(g(31, 37), 1000), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn fft_delta_is_flat() {
        let grid = g(3, 5);
        let mut s = FdVector::zeros(grid);
        s.as_mut_slice()[0] = c(1.0, 0.0);
        let x = td_from_fd(&s);
        let v = 1.0 / 15f64.sqrt();
        assert!(x.as_slice().iter().all(|z| (z - c(v, 0.0)).norm() < 1e-15));
    }
}
