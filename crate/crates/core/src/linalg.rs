//! Small dense and banded complex linear algebra.
//!
//! Dense matrices exist for oracles and desk-scale frames; the banded type is
//! the storage used by the fast equalizer.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Anything that can apply itself and its adjoint to a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from column vectors of equal length.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&mut self, a: Complex64) {
        for v in &mut self.data {
            *v *= a;
        }
    }

    pub fn add_assign(&mut self, other: &DenseMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn add_diagonal(&mut self, d: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += d;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != ZERO).count()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A^H x`.
    pub fn matvec_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![ZERO; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == ZERO {
                continue;
            }
            for (yc, a) in y.iter_mut().zip(self.row(r)) {
                *yc += a.conj() * xr;
            }
        }
        y
    }

    /// `A B`, skipping zero entries of `A`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let (lhs, acc) = (self.row(r), &mut out.data[r * other.cols..(r + 1) * other.cols]);
            for (k, &a) in lhs.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, b) in acc.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A^H A` by plain dense accumulation over rows (no sparsity exploited).
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut out = DenseMatrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for (i, a) in row.iter().enumerate() {
                let ac = a.conj();
                for (o, b) in out.data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += ac * b;
                }
            }
        }
        out
    }

    /// `A^H A` visiting only the nonzero entries of each row.
    pub fn gram_sparse(&self) -> DenseMatrix {
        let n = self.cols;
        let mut out = DenseMatrix::zeros(n, n);
        let mut nz: Vec<(usize, Complex64)> = Vec::new();
        for r in 0..self.rows {
            nz.clear();
            nz.extend(self.row(r).iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(c, v)| (c, *v)));
            for &(i, a) in &nz {
                let ac = a.conj();
                let orow = &mut out.data[i * n..(i + 1) * n];
                for &(j, b) in &nz {
                    orow[j] += ac * b;
                }
            }
        }
        out
    }

    /// `A A^H`.
    pub fn outer_gram(&self) -> DenseMatrix {
        let n = self.rows;
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v: Complex64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b.conj()).sum();
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.rows, self.cols);
        self.rows
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.copy_from_slice(&self.matvec(x));
    }
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.copy_from_slice(&self.matvec_adjoint(x));
    }
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
///
/// Rows are processed from their first non-zero entry on. The factor keeps
/// the row envelope of `A`, so banded or block-banded matrices factor in
/// time proportional to `n * bandwidth^2`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DenseMatrix,
    first: Vec<usize>,
}

impl Cholesky {
    /// Factor `A = L L^H`; only the lower triangle of `A` is read.
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows;
        if a.cols != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.cols });
        }
        let first: Vec<usize> = (0..n).map(|i| (0..i).find(|&j| a[(i, j)] != ZERO).unwrap_or(i)).collect();
        // Real and imaginary parts of L kept in separate row-major planes so
        // the inner dot products run over contiguous f64 slices.
        let mut re = vec![0.0f64; n * n];
        let mut im = vec![0.0f64; n * n];
        for i in 0..n {
            for j in first[i]..=i {
                let k0 = first[i].max(first[j]);
                let (ri, ii) = (&re[i * n + k0..i * n + j], &im[i * n + k0..i * n + j]);
                let (rj, ij) = (&re[j * n + k0..j * n + j], &im[j * n + k0..j * n + j]);
                // sum_k L[i,k] conj(L[j,k])
                let mut sr = 0.0;
                let mut si = 0.0;
                for k in 0..j - k0 {
                    sr += ri[k] * rj[k] + ii[k] * ij[k];
                    si += ii[k] * rj[k] - ri[k] * ij[k];
                }
                let aij = a[(i, j)];
                if i == j {
                    let d = aij.re - sr;
                    if !(d > 0.0) || !d.is_finite() {
                        return Err(Error::NotPositiveDefinite(i));
                    }
                    re[i * n + i] = d.sqrt();
                    im[i * n + i] = 0.0;
                } else {
                    let d = re[j * n + j];
                    re[i * n + j] = (aij.re - sr) / d;
                    im[i * n + j] = (aij.im - si) / d;
                }
            }
        }
        let l = DenseMatrix::from_fn(n, n, |r, c| Complex64::new(re[r * n + c], im[r * n + c]));
        Ok(Self { l, first })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.rows;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let (f, row) = (self.first[i], self.l.row(i));
            let s: Complex64 = row[f..i].iter().zip(&y[f..i]).map(|(a, v)| a * v).sum();
            y[i] = (y[i] - s) / row[i];
        }
        // back substitution with L^H
        for i in (0..n).rev() {
            let d = self.l[(i, i)];
            y[i] /= d;
            let yi = y[i];
            let (f, row) = (self.first[i], self.l.row(i));
            for (yk, a) in y[f..i].iter_mut().zip(&row[f..i]) {
                *yk -= a.conj() * yi;
            }
        }
        y
    }
}

/// Solve `A x = b` for Hermitian positive definite `A`.
pub fn solve_hpd(a: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(Cholesky::factor(a)?.solve(b))
}

/// Band-limited square matrix with half-bandwidth `b`, stored diagonal-major.
///
/// `bands[d][f]` holds entry `(f, f - (d - b))`, i.e. offset `f - i = d - b`.
/// Storage slots whose column falls outside the matrix are kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    b: usize,
    bands: Vec<Vec<Complex64>>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, b: usize) -> Self {
        let b = b.min(n.saturating_sub(1));
        Self { n, b, bands: vec![vec![ZERO; n]; 2 * b + 1] }
    }

    /// Copy the entries of `a` with `|f - i| <= b`.
    pub fn from_dense(a: &DenseMatrix, b: usize) -> Self {
        let mut m = Self::zeros(a.rows(), b);
        for f in 0..m.n {
            for i in f.saturating_sub(m.b)..(f + m.b + 1).min(m.n) {
                m.set(f, i, a[(f, i)]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.b
    }

    pub fn bands(&self) -> &[Vec<Complex64>] {
        &self.bands
    }

    fn slot(&self, f: usize, i: usize) -> Option<usize> {
        let off = f as isize - i as isize;
        (off.unsigned_abs() <= self.b).then(|| (off + self.b as isize) as usize)
    }

    pub fn get(&self, f: usize, i: usize) -> Complex64 {
        self.slot(f, i).map_or(ZERO, |d| self.bands[d][f])
    }

    /// Panics if `(f, i)` lies outside the band.
    pub fn set(&mut self, f: usize, i: usize, v: Complex64) {
        assert!(f < self.n && i < self.n);
        let d = self.slot(f, i).expect("entry outside band");
        self.bands[d][f] = v;
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |f, i| self.get(f, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.bands.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `y = A x`; at most `(2b + 1) n` complex multiplies.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let (n, b) = (self.n, self.b as isize);
        assert_eq!(x.len(), n);
        y.iter_mut().for_each(|v| *v = ZERO);
        for (d, band) in self.bands.iter().enumerate() {
            let off = d as isize - b;
            // rows f with 0 <= f - off < n
            let lo = off.max(0) as usize;
            let hi = (n as isize + off).min(n as isize) as usize;
            let src = &x[(lo as isize - off) as usize..(hi as isize - off) as usize];
            for ((yf, a), xv) in y[lo..hi].iter_mut().zip(&band[lo..hi]).zip(src) {
                *yf += a * xv;
            }
        }
    }

    /// `y = A^H x`.
    pub fn matvec_adjoint_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let (n, b) = (self.n, self.b as isize);
        assert_eq!(x.len(), n);
        y.iter_mut().for_each(|v| *v = ZERO);
        for (d, band) in self.bands.iter().enumerate() {
            let off = d as isize - b;
            let lo = off.max(0) as usize;
            let hi = (n as isize + off).min(n as isize) as usize;
            let dst = &mut y[(lo as isize - off) as usize..(hi as isize - off) as usize];
            for ((yi, a), xv) in dst.iter_mut().zip(&band[lo..hi]).zip(&x[lo..hi]) {
                *yi += a.conj() * xv;
            }
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        self.matvec_adjoint_into(x, &mut y);
        y
    }
}

impl LinearOperator for BandedMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec_into(x, y);
    }
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec_adjoint_into(x, y);
    }
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `||a - b|| / ||b||`.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (num / norm_sqr(b)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn gram_variants_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut a = random(9, 7, &mut rng);
        a[(2, 3)] = ZERO;
        a[(4, 0)] = ZERO;
        let g = a.adjoint().matmul(&a);
        assert!(g.max_abs_diff(&a.gram()) < 1e-12);
        assert!(g.max_abs_diff(&a.gram_sparse()) < 1e-12);
        assert!(a.matmul(&a.adjoint()).max_abs_diff(&a.outer_gram()) < 1e-12);
    }

    #[test]
    fn cholesky_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(12, 12, &mut rng);
        let mut q = a.gram();
        q.add_diagonal(0.1);
        let x: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let b = q.matvec(&x);
        let got = solve_hpd(&q, &b).unwrap();
        assert!(max_abs_diff(&got, &x) < 1e-9);
    }

    #[test]
    fn cholesky_on_varying_envelope() {
        // Gram of a matrix whose columns touch staggered row blocks, so rows
        // of Q start at different columns
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 30;
        let a = DenseMatrix::from_fn(n, n, |r, c| {
            let near = r / 5 <= c / 5 + 1 && c / 5 <= r / 5 + 1;
            if near {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                ZERO
            }
        });
        let mut q = a.gram();
        q.add_diagonal(0.05);
        assert_eq!(q[(n - 1, 0)], ZERO);
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new((i % 7) as f64, -(i as f64))).collect();
        let got = solve_hpd(&q, &q.matvec(&x)).unwrap();
        assert!(max_abs_diff(&got, &x) < 1e-8);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut m = DenseMatrix::identity(3);
        m[(1, 1)] = Complex64::new(-1.0, 0.0);
        assert!(matches!(Cholesky::factor(&m), Err(Error::NotPositiveDefinite(1))));
    }

    #[test]
    fn banded_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, b) in [(10, 0), (10, 2), (10, 9), (1, 0), (5, 7)] {
            let full = random(n, n, &mut rng);
            let band = BandedMatrix::from_dense(&full, b);
            let dense = band.to_dense();
            let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            assert!(max_abs_diff(&band.matvec(&x), &dense.matvec(&x)) < 1e-12);
            assert!(max_abs_diff(&band.matvec_adjoint(&x), &dense.matvec_adjoint(&x)) < 1e-12);
            for f in 0..n {
                for i in 0..n {
                    let inside = (f as isize - i as isize).unsigned_abs() <= b;
                    assert_eq!(dense[(f, i)], if inside { full[(f, i)] } else { ZERO });
                }
            }
        }
    }
}
