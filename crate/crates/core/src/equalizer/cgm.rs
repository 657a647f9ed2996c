//! Conjugate-gradient LMMSE equalization on a banded channel.

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::linalg::{dot, norm_sqr, LinearOperator};
use crate::Result;

/// Solver settings; the defaults are 250 iterations and `eps = 1e-6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgmOptions {
    pub eps: f64,
    pub max_iter: usize,
    /// Time the `H^H H p` step separately from the vector updates.
    pub profile: bool,
}

impl Default for CgmOptions {
    fn default() -> Self {
        Self { eps: 1e-6, max_iter: 250, profile: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CgmProfile {
    /// Time spent applying `H^H H + R_n` to the search direction.
    pub operator: Duration,
    /// Time spent in all remaining `O(MN)` vector work.
    pub vector: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgmOutput {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    /// `c_norm` before the first iteration and after each one.
    pub residual_trace: Vec<f64>,
    /// False when `max_iter` ran out before `c_norm < eps^2`.
    pub converged: bool,
    pub profile: Option<CgmProfile>,
}

/// Solve `(H^H H + sigma2 I) s = H^H r` by conjugate gradients, applying
/// `H^H H` as two operator products per iteration.
///
/// This is the LMMSE estimate `(I + H^H R_n^{-1} H)^{-1} H^H R_n^{-1} r` for
/// `R_n = sigma2 I`: multiplying that system through by `sigma2` gives the
/// one solved here. With `eps = 0` the loop runs the full `max_iter` unless
/// the residual becomes exactly zero.
pub fn cgm_equalize<H: LinearOperator + ?Sized>(
    h: &H,
    r: &[Complex64],
    sigma2: f64,
    opts: &CgmOptions,
) -> CgmOutput {
    let n = h.dim();
    assert_eq!(r.len(), n);
    let zero = Complex64::new(0.0, 0.0);
    let mut prof = CgmProfile::default();
    let clock = |on: bool| on.then(Instant::now);
    let lap = |t: Option<Instant>, acc: &mut Duration| {
        if let Some(t) = t {
            *acc += t.elapsed();
        }
    };

    let t0 = clock(opts.profile);
    let mut b = vec![zero; n];
    h.apply_adjoint(r, &mut b);
    let mut s = vec![zero; n];
    let mut c = b.clone();
    let mut p = c.clone();
    let mut c_norm = norm_sqr(&c);
    let mut tmp = vec![zero; n];
    let mut a_p = vec![zero; n];
    let mut trace = vec![c_norm];
    let mut iterations = 0;
    let mut converged = c_norm < opts.eps * opts.eps || c_norm == 0.0;
    lap(t0, &mut prof.vector);

    if !converged {
        for _ in 0..opts.max_iter {
            let t = clock(opts.profile);
            h.apply(&p, &mut tmp);
            h.apply_adjoint(&tmp, &mut a_p);
            for (a, pv) in a_p.iter_mut().zip(&p) {
                *a += pv * sigma2;
            }
            lap(t, &mut prof.operator);

            let t = clock(opts.profile);
            let curv = dot(&p, &a_p).re;
            if !(curv > 0.0) {
                lap(t, &mut prof.vector);
                break;
            }
            let alpha = c_norm / curv;
            for ((sv, cv), (pv, av)) in s.iter_mut().zip(c.iter_mut()).zip(p.iter().zip(&a_p)) {
                *sv += pv * alpha;
                *cv -= av * alpha;
            }
            let c_next = norm_sqr(&c);
            iterations += 1;
            trace.push(c_next);
            if c_next < opts.eps * opts.eps || c_next == 0.0 {
                converged = true;
                lap(t, &mut prof.vector);
                break;
            }
            let beta = c_next / c_norm;
            for (pv, cv) in p.iter_mut().zip(&c) {
                *pv = cv + *pv * beta;
            }
            c_norm = c_next;
            lap(t, &mut prof.vector);
        }
    }

    CgmOutput {
        solution: s,
        iterations,
        residual_trace: trace,
        converged,
        profile: opts.profile.then_some(prof),
    }
}

/// Residual trace as CSV with header `iteration,c_norm`.
pub fn write_residual_trace<W: Write>(trace: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "iteration,c_norm")?;
    for (i, v) in trace.iter().enumerate() {
        writeln!(out, "{i},{v:e}")?;
    }
    Ok(())
}
