//! Mounting symbols on the null space of the edge rows of the IDFZT.
//!
//! `R'` stacks the first `b` and last `b` rows of `R`. Symbols placed on
//! `null(R')` produce FD vectors whose first and last `b` carriers are zero,
//! so the folded corners of the FD channel never touch them.
//!
//! The basis is the trailing `MN - 2b` columns of the unitary factor `Q` of
//! a Householder QR of `R'^H`, kept in factored form. Reflector `j` uses
//! `v = x + e^{j arg x_0} ||x|| e_0` on the trailing part `x` of column `j`,
//! with `arg x_0 = 0` when `|x_0| <= 1e-12 ||x||`.
//! The factorization is deterministic, so the basis is too.

use num_complex::Complex64;

use crate::grid::GridParams;
use crate::linalg::DenseMatrix;
use crate::zak::{cis_frac, idfzt, DdFrame, FdVector, DENSE_CAP};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct NullSpaceMask {
    grid: GridParams,
    b: usize,
    /// Unit reflector vectors; reflector `j` acts on entries `j..MN`.
    reflectors: Vec<Vec<Complex64>>,
}

/// Row `i` of `R`: `R[i, k + lM] = M^{-1/2} e^{-j 2 pi i k / MN}` when `l = i mod N`.
fn r_row(grid: &GridParams, i: usize) -> Vec<Complex64> {
    let (m, n, mn) = (grid.m(), grid.n(), grid.frame_size());
    let mut row = vec![ZERO; mn];
    let l = i % n;
    let amp = 1.0 / (m as f64).sqrt();
    for k in 0..m {
        row[k + l * m] = cis_frac(-(((i * k) % mn) as i64), mn as i64) * amp;
    }
    row
}

fn edge_rows(mn: usize, b: usize) -> impl Iterator<Item = usize> {
    (0..b).chain(mn - b..mn)
}

impl NullSpaceMask {
    /// Mask for half-bandwidth `b`, with the rows of `R` generated directly.
    pub fn new(grid: GridParams, b: usize) -> Result<Self> {
        let mn = grid.frame_size();
        if 2 * b >= mn {
            return Err(Error::InvalidBandwidth { b, mn });
        }
        let cols: Vec<Vec<Complex64>> =
            edge_rows(mn, b).map(|i| r_row(&grid, i).into_iter().map(|v| v.conj()).collect()).collect();
        Ok(Self::factor(grid, b, cols))
    }

    /// Mask built from an explicit `R`.
    pub fn from_r(r: &DenseMatrix, grid: GridParams, b: usize) -> Result<Self> {
        let mn = grid.frame_size();
        if r.rows() != mn || r.cols() != mn {
            return Err(Error::DimensionMismatch { expected: mn, got: r.rows() });
        }
        if 2 * b >= mn {
            return Err(Error::InvalidBandwidth { b, mn });
        }
        let cols = edge_rows(mn, b).map(|i| r.row(i).iter().map(|v| v.conj()).collect()).collect();
        Ok(Self::factor(grid, b, cols))
    }

    /// Householder QR of the `MN x 2b` matrix whose columns are `cols`.
    fn factor(grid: GridParams, b: usize, mut cols: Vec<Vec<Complex64>>) -> Self {
        let mut reflectors = Vec::with_capacity(cols.len());
        for j in 0..cols.len() {
            let x = &cols[j][j..];
            let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let mut v = x.to_vec();
            if norm > 0.0 {
                // pivots at roundoff level count as zero so the basis does not
                // depend on how R' was generated
                let phase =
                    if x[0].norm() > 1e-12 * norm { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
                v[0] += phase * norm;
            }
            let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vn == 0.0 {
                // zero column: nothing to annihilate, use the identity
                reflectors.push(Vec::new());
                continue;
            }
            v.iter_mut().for_each(|z| *z /= vn);
            for col in cols.iter_mut().skip(j) {
                reflect(&v, &mut col[j..]);
            }
            reflectors.push(v);
        }
        Self { grid, b, reflectors }
    }

    pub fn grid(&self) -> GridParams {
        self.grid
    }

    pub fn half_bandwidth(&self) -> usize {
        self.b
    }

    /// Number of data symbols carried, `MN - 2b`.
    pub fn data_len(&self) -> usize {
        self.grid.frame_size() - 2 * self.b
    }

    /// `Nmat x'` as a DD vector, `O(b MN)`.
    pub fn embed(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.data_len() {
            return Err(Error::DimensionMismatch { expected: self.data_len(), got: x.len() });
        }
        let mut y = vec![ZERO; 2 * self.b];
        y.extend_from_slice(x);
        for (j, v) in self.reflectors.iter().enumerate().rev() {
            if !v.is_empty() {
                reflect(v, &mut y[j..]);
            }
        }
        Ok(y)
    }

    /// `Nmat^H y` for a DD vector `y`.
    pub fn project(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let mn = self.grid.frame_size();
        if y.len() != mn {
            return Err(Error::DimensionMismatch { expected: mn, got: y.len() });
        }
        let mut z = y.to_vec();
        for (j, v) in self.reflectors.iter().enumerate() {
            if !v.is_empty() {
                reflect(v, &mut z[j..]);
            }
        }
        Ok(z.split_off(2 * self.b))
    }

    /// Explicit `MN x (MN - 2b)` basis.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let mn = self.grid.frame_size();
        if mn > DENSE_CAP {
            return Err(Error::DenseCapExceeded { mn, cap: DENSE_CAP });
        }
        let d = self.data_len();
        let mut cols = Vec::with_capacity(d);
        let mut e = vec![ZERO; d];
        for q in 0..d {
            e[q] = Complex64::new(1.0, 0.0);
            cols.push(self.embed(&e)?);
            e[q] = ZERO;
        }
        Ok(DenseMatrix::from_columns(&cols))
    }
}

/// `x <- (I - 2 v v^H) x` for unit `v`.
fn reflect(v: &[Complex64], x: &mut [Complex64]) {
    let s: Complex64 = v.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * 2.0;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= vi * s;
    }
}

/// Mask built from an explicit `R` (see [`NullSpaceMask::from_r`]).
pub fn build_mask(r: &DenseMatrix, grid: GridParams, b: usize) -> Result<NullSpaceMask> {
    NullSpaceMask::from_r(r, grid, b)
}

/// `s' = R Nmat x'`, with `R` applied as the operational IDFZT.
pub fn mask_encode(x: &[Complex64], mask: &NullSpaceMask) -> Result<FdVector> {
    let dd = DdFrame::from_vec(mask.grid(), mask.embed(x)?)?;
    Ok(idfzt(&dd))
}
