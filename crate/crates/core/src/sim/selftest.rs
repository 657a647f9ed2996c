//! Quick oracle-equivalence checks runnable from the command line.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::channel::{
    build_h_basis, build_h_dd, build_h_fd, effective_channel, periodize, veh_a_paths, Basis, FdChannel, PulseShape,
};
use crate::equalizer::{cgm_equalize, lmmse_direct, lmmse_direct_alt, mask_encode, CgmOptions, NullSpaceMask};
use crate::grid::GridParams;
use crate::linalg::{max_abs_diff, relative_error, BandedMatrix, DenseMatrix};
use crate::zak::{build_r, dfzt, idfzt, DdFrame};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value < self.tolerance
    }
}

fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = GridParams::new(3, 5, 30e3)?;
    let full_grid = GridParams::new(31, 37, 30e3)?;
    let mut checks = Vec::new();

    let r = build_r(small)?;
    checks.push(Check {
        name: "R^H R = I (3x5)",
        value: r.adjoint().matmul(&r).max_abs_diff(&DenseMatrix::identity(15)),
        tolerance: 1e-12,
    });

    let x = DdFrame::from_vec(small, random_vec(15, &mut rng))?;
    checks.push(Check {
        name: "fast IDFZT = R x",
        value: max_abs_diff(idfzt(&x).as_slice(), &r.matvec(x.as_slice())),
        tolerance: 1e-12,
    });
    checks.push(Check {
        name: "DFZT inverts IDFZT",
        value: max_abs_diff(dfzt(&idfzt(&x)).as_slice(), x.as_slice()),
        tolerance: 1e-12,
    });

    let paths = veh_a_paths(815.0, &mut rng)?;
    let h = periodize(&effective_channel(&paths, &PulseShape::rrc(), &small)?);
    let h_fd = build_h_fd(&h)?;
    let via_dd = r.matmul(&build_h_dd(&h)?).matmul(&r.adjoint());
    checks.push(Check {
        name: "H_FD = R H_DD R^H (Veh-A, 3x5)",
        value: h_fd.max_abs_diff(&via_dd) / h_fd.max_abs(),
        tolerance: 1e-9,
    });
    checks.push(Check {
        name: "twisted convolution = basis projection",
        value: build_h_dd(&h)?.max_abs_diff(&build_h_basis(&h, Basis::Pulsone)?),
        tolerance: 1e-12,
    });

    let n = 155;
    let b = 3;
    let mut band = BandedMatrix::zeros(n, b);
    for i in 0..n {
        for f in i.saturating_sub(b)..(i + b + 1).min(n) {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            band.set(f, i, if f == i { v + 4.0 } else { v });
        }
    }
    let rhs = random_vec(n, &mut rng);
    let dense = band.to_dense();
    let reference = lmmse_direct(&dense, &rhs, 0.01)?;
    let cg = cgm_equalize(&band, &rhs, 0.01, &CgmOptions::default());
    checks.push(Check {
        name: "CG = dense LMMSE (banded, MN = 155)",
        value: relative_error(&cg.solution, &reference),
        tolerance: 1e-5,
    });
    checks.push(Check {
        name: "LMMSE push-through identity",
        value: relative_error(&lmmse_direct_alt(&dense, &rhs, 0.01)?, &reference),
        tolerance: 1e-9,
    });

    let mask = NullSpaceMask::new(full_grid, b)?;
    let s = mask_encode(&random_vec(mask.data_len(), &mut rng), &mask)?;
    let edge = s.as_slice()[..b].iter().chain(&s.as_slice()[full_grid.frame_size() - b..]).map(|v| v.norm()).fold(0.0, f64::max);
    checks.push(Check { name: "masked FD edges vanish (31x37, b = 3)", value: edge, tolerance: 1e-10 });

    let fd = FdChannel::new(&periodize(&effective_channel(&paths, &PulseShape::rrc(), &full_grid)?));
    let wrapped = fd.modulo_band(b).to_dense().matvec(s.as_slice());
    checks.push(Check {
        name: "banded = modulo-banded channel on masked input",
        value: max_abs_diff(&fd.band(b).matvec(s.as_slice()), &wrapped) / fd.max_abs(),
        tolerance: 1e-9,
    });
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_selftest(3).unwrap() {
            assert!(c.passed(), "{} = {:e} (tol {:e})", c.name, c.value, c.tolerance);
        }
    }
}
