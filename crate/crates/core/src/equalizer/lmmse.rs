//! Dense LMMSE solvers, the `O((MN)^3)` reference for the CG path.

use num_complex::Complex64;

use crate::linalg::{solve_hpd, DenseMatrix};
use crate::{Error, Result};

/// White complex Gaussian noise with variance `variance` per complex sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance must be >= 0, got {variance}")));
        }
        Ok(Self { variance })
    }

    /// Variance giving `snr_db` for symbols of energy `es`.
    pub fn from_snr_db(snr_db: f64, es: f64) -> Self {
        Self { variance: es / 10f64.powf(snr_db / 10.0) }
    }
}

/// `(H^H H + sigma2 I)^{-1} H^H r` with a dense Gram matrix and Cholesky.
pub fn lmmse_direct(h: &DenseMatrix, r: &[Complex64], sigma2: f64) -> Result<Vec<Complex64>> {
    let mut q = h.gram();
    q.add_diagonal(sigma2);
    solve_hpd(&q, &h.matvec_adjoint(r))
}

/// Same estimate in the form `H^H (H H^H + sigma2 I)^{-1} r`.
pub fn lmmse_direct_alt(h: &DenseMatrix, r: &[Complex64], sigma2: f64) -> Result<Vec<Complex64>> {
    let mut q = h.outer_gram();
    q.add_diagonal(sigma2);
    let z = solve_hpd(&q, r)?;
    Ok(h.matvec_adjoint(&z))
}

/// [`lmmse_direct`] with the Gram product restricted to the non-zero
/// entries of `H`; the factorization is still dense.
pub fn lmmse_sparse_gram(h: &DenseMatrix, r: &[Complex64], sigma2: f64) -> Result<Vec<Complex64>> {
    let mut q = h.gram_sparse();
    q.add_diagonal(sigma2);
    solve_hpd(&q, &h.matvec_adjoint(r))
}
