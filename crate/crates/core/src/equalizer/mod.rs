//! Banded FD equalization: null-space masking, CG LMMSE, dense reference
//! solvers and minimum-distance detection.

mod cgm;
mod lmmse;
mod mask;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub use cgm::{cgm_equalize, write_residual_trace, CgmOptions, CgmOutput, CgmProfile};
pub use lmmse::{lmmse_direct, lmmse_direct_alt, lmmse_sparse_gram, NoiseModel};
pub use mask::{build_mask, mask_encode, NullSpaceMask};

use crate::channel::FdChannel;
use crate::constellation::Constellation;
use crate::linalg::{BandedMatrix, DenseMatrix, LinearOperator};
use crate::zak::{dfzt, FdVector};
use crate::Result;

/// Band of the FD channel matrix, `|f - i| <= b`.
pub fn extract_band(h: &DenseMatrix, b: usize) -> BandedMatrix {
    BandedMatrix::from_dense(h, b)
}

/// Band of a modulo-banded FD channel.
pub fn extract_band_fd(h: &FdChannel, b: usize) -> BandedMatrix {
    h.band(b)
}

/// Draw `n` samples of circularly-symmetric complex Gaussian noise with
/// variance `sigma2` (real and imaginary parts each `sigma2 / 2`).
pub fn complex_noise<R: Rng + ?Sized>(n: usize, sigma2: f64, rng: &mut R) -> Vec<Complex64> {
    let sd = (sigma2 / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * sd, im * sd)
        })
        .collect()
}

/// `r = H s + w`. With `sigma2 = 0` no random numbers are drawn.
pub fn apply_channel<H: LinearOperator + ?Sized, R: Rng + ?Sized>(
    h: &H,
    s: &[Complex64],
    sigma2: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let mut r = vec![Complex64::new(0.0, 0.0); h.dim()];
    h.apply(s, &mut r);
    if sigma2 > 0.0 {
        let noise = complex_noise(r.len(), sigma2, rng);
        for (v, w) in r.iter_mut().zip(noise) {
            *v += w;
        }
    }
    r
}

/// `Nmat^H R^H s`, the equalized FD vector taken back to the data symbols.
pub fn back_project(s: &FdVector, mask: &NullSpaceMask) -> Result<Vec<Complex64>> {
    mask.project(dfzt(s).as_slice())
}

/// Minimum-distance decisions on the back-projected symbols; returns
/// constellation indices, ties to the lowest index.
pub fn detect(s: &FdVector, mask: &NullSpaceMask, constellation: &Constellation) -> Result<Vec<usize>> {
    Ok(back_project(s, mask)?.into_iter().map(|z| constellation.nearest(z)).collect())
}
