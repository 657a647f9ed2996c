//! Received energy per carrier and the non-fading test.

use num_complex::Complex64;

use crate::linalg::DenseMatrix;

/// `diag(H^H H)`: energy delivered by each carrier (column).
pub fn energy_per_carrier(h: &DenseMatrix) -> Vec<f64> {
    let mut e = vec![0.0; h.cols()];
    for r in 0..h.rows() {
        for (ei, v) in e.iter_mut().zip(h.row(r)) {
            *ei += v.norm_sqr();
        }
    }
    e
}

/// Energies in dB relative to their mean.
pub fn relative_db(e: &[f64]) -> Vec<f64> {
    let mean = e.iter().sum::<f64>() / e.len().max(1) as f64;
    e.iter().map(|v| 10.0 * (v / mean).log10()).collect()
}

/// `max - min` of the per-carrier energy in dB.
pub fn spread_db(e: &[f64]) -> f64 {
    let (lo, hi) = e.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if e.is_empty() || hi == 0.0 {
        return 0.0;
    }
    10.0 * (hi / lo).log10()
}

/// Whether an orthonormal TD basis delivers equal energy on every carrier
/// for all channels with delays in `0..=max_delay` and Doppler taps in
/// `0..=max_doppler`.
///
/// `diag(H^H H)[i]` depends on the basis only through
/// `S_i(k1, k2, dl) = sum_n phi_i[n - k2] conj(phi_i[n - k1]) e^{j 2 pi dl n / MN}`,
/// so the test checks that `S_i` is the same for every `i`, for all delay
/// pairs in range and Doppler differences `|dl| <= max_doppler`. Indices are
/// taken modulo the signal length.
pub fn is_non_fading(basis: &[Vec<Complex64>], max_delay: usize, max_doppler: usize, tol: f64) -> bool {
    let Some(first) = basis.first() else { return true };
    let len = first.len();
    let s = |phi: &[Complex64], k1: usize, k2: usize, dl: i64| -> Complex64 {
        (0..len)
            .map(|n| {
                let a = phi[(n + len - k2 % len) % len];
                let b = phi[(n + len - k1 % len) % len].conj();
                let ang = 2.0 * std::f64::consts::PI * ((dl * n as i64).rem_euclid(len as i64)) as f64 / len as f64;
                a * b * Complex64::from_polar(1.0, ang)
            })
            .sum()
    };
    let dmax = max_doppler as i64;
    for k1 in 0..=max_delay {
        for k2 in 0..=max_delay {
            for dl in -dmax..=dmax {
                let reference = s(first, k1, k2, dl);
                if basis[1..].iter().any(|phi| (s(phi, k1, k2, dl) - reference).norm() > tol) {
                    return false;
                }
            }
        }
    }
    true
}
