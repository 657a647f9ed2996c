//! Symbols mounted directly on the `MN` FD carriers (IDFT basis) with
//! spacing `B / MN`.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::FdChannel;
use crate::equalizer::{apply_channel, cgm_equalize, CgmOptions, CgmOutput};

/// `r = H x + w` with the full modulo-banded FD channel.
pub fn fd_mount_transmit<R: Rng + ?Sized>(x: &[Complex64], h: &FdChannel, sigma2: f64, rng: &mut R) -> Vec<Complex64> {
    apply_channel(h, x, sigma2, rng)
}

/// Joint LMMSE over all carriers (including ICI), by CG on the full operator.
pub fn fd_mount_genie(r: &[Complex64], h: &FdChannel, sigma2: f64, opts: &CgmOptions) -> CgmOutput {
    cgm_equalize(h, r, sigma2, opts)
}

/// Per-carrier division by the main-diagonal gain, ignoring ICI.
pub fn fd_mount_one_tap(r: &[Complex64], h: &FdChannel) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let diag = h.diagonals().iter().find(|d| d.0 == 0).map(|d| d.1.as_slice());
    r.iter()
        .enumerate()
        .map(|(f, v)| match diag {
            Some(d) if d[f] != zero => v / d[f],
            _ => zero,
        })
        .collect()
}
