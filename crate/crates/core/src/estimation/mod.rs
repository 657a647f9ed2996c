//! Spread-pilot channel estimation with turbo refinement.

mod pilot;

use num_complex::Complex64;

pub use pilot::{make_pilot, zadoff_chu, PowerSplit, SpreadPilot};

use crate::channel::{apply_dd, build_h_dd, periodize, EffectiveChannel, FdChannel, PeriodizedChannel, TapWindow};
use crate::constellation::Constellation;
use crate::equalizer::{back_project, cgm_equalize, CgmOptions, NullSpaceMask};
use crate::grid::GridParams;
use crate::linalg::DenseMatrix;
use crate::zak::{build_r, cis_frac, idfzt, DdFrame, FdVector};
use crate::{Error, Result};

/// Estimation crop: every tap within `margin` bins of the path support
/// rectangle `[0, tau_max B] x [-nu_max T, nu_max T]`, clipped to one
/// fundamental period.
///
/// Larger windows pick up more of the pilot's own ambiguity sidelobes, so
/// the margin trades truncation error against self-interference.
pub fn default_crop(grid: &GridParams, max_delay: f64, max_doppler: f64, margin: usize) -> TapWindow {
    let (m, n) = (grid.m() as i64, grid.n() as i64);
    let margin = margin as f64;
    let k_min = -(margin as i64).min((m - 1) / 2);
    let k_max = ((max_delay * grid.bandwidth() + margin + 1e-9).floor() as i64).min(k_min + m - 1);
    let l = ((max_doppler * grid.duration() + margin + 1e-9).floor() as i64).min((n - 1) / 2);
    TapWindow { k_min, k_max, l_min: -l, l_max: l }
}

/// Transmit frame `sqrt(e_p) x_s + sqrt(e_d / n_data) d`, where `d` is the
/// embedded data frame carrying `n_data` unit-energy symbols.
pub fn superimpose(data: &DdFrame, pilot: &SpreadPilot, split: PowerSplit, n_data: usize) -> Result<DdFrame> {
    if data.grid() != pilot.grid() {
        return Err(Error::InvalidParameter("data and pilot grids differ".into()));
    }
    let (a_p, a_d) = (split.pilot_amplitude(), split.data_amplitude(n_data));
    let tx = pilot.frame().as_slice().iter().zip(data.as_slice()).map(|(p, d)| p * a_p + d * a_d).collect();
    DdFrame::from_vec(data.grid(), tx)
}

/// Cross-ambiguity estimate on `window`, scaled by `1 / pilot_amplitude`:
/// `h[k, l] = sum_{k', l'} y[k', l'] conj(x_s[k' - k, l' - l]) e^{-j 2 pi l (k' - k) / MN}`,
/// with `x_s` extended quasi-periodically.
///
/// The phase uses the tap Doppler `l`, which is what inverts the twisted
/// convolution `y[k', l'] = sum h[k, l] e^{j 2 pi l (k' - k) / MN} x[k' - k, l' - l]`.
pub fn cross_ambiguity(y: &DdFrame, pilot: &SpreadPilot, window: TapWindow, pilot_amplitude: f64) -> EffectiveChannel {
    let grid = y.grid();
    let (m, n, mn) = (grid.m() as i64, grid.n() as i64, grid.frame_size() as i64);
    let xs = pilot.frame();
    let mut est = EffectiveChannel::zeros(grid, window);
    let scale = if pilot_amplitude > 0.0 { 1.0 / pilot_amplitude } else { 0.0 };
    let taps = est.as_mut_slice();
    for (idx, tap) in taps.iter_mut().enumerate() {
        let (k, l) = window.coords(idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for kp in 0..m {
            let dk = kp - k;
            let ph = cis_frac(-(l * dk).rem_euclid(mn), mn);
            let mut inner = Complex64::new(0.0, 0.0);
            for lp in 0..n {
                inner += y.get(kp as usize, lp as usize) * xs.get_quasi(dk, lp - l).conj();
            }
            acc += inner * ph;
        }
        *tap = acc * scale;
    }
    est
}

/// Estimated channel in the forms used by the receiver.
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    pub taps: EffectiveChannel,
    pub periodized: PeriodizedChannel,
    pub fd: FdChannel,
}

/// Build the receiver-side channel from estimated taps, through the same
/// periodization and FD construction as the true channel.
pub fn reconstruct(h_hat: &EffectiveChannel) -> ChannelEstimate {
    let periodized = periodize(h_hat);
    let fd = FdChannel::new(&periodized);
    ChannelEstimate { taps: h_hat.clone(), periodized, fd }
}

/// Dense `(H_DD_hat, H_hat = R H_DD_hat R^H)` for desk-scale grids.
pub fn reconstruct_dense(h_hat: &EffectiveChannel) -> Result<(DenseMatrix, DenseMatrix)> {
    let h_dd = build_h_dd(&periodize(h_hat))?;
    let r = build_r(h_hat.grid())?;
    let h_fd = r.matmul(&h_dd).matmul(&r.adjoint());
    Ok((h_dd, h_fd))
}

fn sub_scaled(y: &DdFrame, z: &DdFrame, a: f64) -> DdFrame {
    let mut out = y.clone();
    for (o, v) in out.as_mut_slice().iter_mut().zip(z.as_slice()) {
        *o -= v * a;
    }
    out
}

/// `y - a_p H_DD_hat x_s`.
pub fn pilot_cancel(y: &DdFrame, h_hat: &PeriodizedChannel, pilot: &SpreadPilot, pilot_amplitude: f64) -> DdFrame {
    sub_scaled(y, &apply_dd(h_hat, pilot.frame()), pilot_amplitude)
}

/// `y - a_d H_DD_hat (Nmat x_hat)`.
pub fn data_cancel(
    y: &DdFrame,
    h_hat: &PeriodizedChannel,
    mask: &NullSpaceMask,
    x_hat: &[Complex64],
    data_amplitude: f64,
) -> Result<DdFrame> {
    let data = DdFrame::from_vec(y.grid(), mask.embed(x_hat)?)?;
    Ok(sub_scaled(y, &apply_dd(h_hat, &data), data_amplitude))
}

/// `||h_hat - h||^2 / ||h||^2`, with either channel read as zero outside
/// its own window.
pub fn nmse(h_hat: &EffectiveChannel, h: &EffectiveChannel) -> Result<f64> {
    let den = h.energy();
    if den == 0.0 {
        return Err(Error::InvalidParameter("NMSE reference channel is zero".into()));
    }
    let mut num = 0.0;
    for (i, v) in h.as_slice().iter().enumerate() {
        let (k, l) = h.window().coords(i);
        num += (h_hat.get(k, l) - v).norm_sqr();
    }
    for (k, l, v) in h_hat.taps() {
        if !h.window().contains(k, l) {
            num += v.norm_sqr();
        }
    }
    Ok(num / den)
}

/// Receiver configuration shared by every turbo round.
#[derive(Debug, Clone)]
pub struct TurboConfig<'a> {
    pub pilot: &'a SpreadPilot,
    pub split: PowerSplit,
    pub mask: &'a NullSpaceMask,
    pub constellation: &'a Constellation,
    pub crop: TapWindow,
    pub b: usize,
    pub sigma2: f64,
    pub cgm: CgmOptions,
}

/// One estimate/equalize/detect pass.
#[derive(Debug, Clone)]
pub struct TurboRound {
    pub estimate: EffectiveChannel,
    /// Constellation index decided for each data symbol.
    pub decisions: Vec<usize>,
    pub cgm_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct TurboOutput {
    /// Round 0 is single-shot estimation; rounds `1..=n_turbo` refine it.
    pub rounds: Vec<TurboRound>,
}

impl TurboOutput {
    pub fn last(&self) -> &TurboRound {
        self.rounds.last().expect("at least one round")
    }
}

fn equalize_detect(
    y: &DdFrame,
    est: &ChannelEstimate,
    cfg: &TurboConfig<'_>,
) -> Result<(Vec<usize>, usize, bool)> {
    let data_only = pilot_cancel(y, &est.periodized, cfg.pilot, cfg.split.pilot_amplitude());
    let amp = cfg.split.data_amplitude(cfg.mask.data_len());
    if amp == 0.0 {
        return Ok((vec![0; cfg.mask.data_len()], 0, true));
    }
    let r: Vec<Complex64> = idfzt(&data_only).into_vec().into_iter().map(|v| v / amp).collect();
    let band = est.fd.band(cfg.b);
    let reg = cfg.sigma2 / (amp * amp) + est.fd.off_band_power(cfg.b);
    let out = cgm_equalize(&band, &r, reg, &cfg.cgm);
    let s = FdVector::from_vec(y.grid(), out.solution)?;
    let soft = back_project(&s, cfg.mask)?;
    let decisions = soft.into_iter().map(|z| cfg.constellation.nearest(z)).collect();
    Ok((decisions, out.iterations, out.converged))
}

/// Estimate, cancel the pilot, equalize with banded CG and detect; then
/// `n_turbo` times cancel the detected data, re-estimate from the
/// pilot-dominated frame and repeat.
pub fn turbo_estimate(y: &DdFrame, cfg: &TurboConfig<'_>, n_turbo: usize) -> Result<TurboOutput> {
    let a_p = cfg.split.pilot_amplitude();
    let a_d = cfg.split.data_amplitude(cfg.mask.data_len());
    let mut rounds = Vec::with_capacity(n_turbo + 1);
    let mut h_hat = cross_ambiguity(y, cfg.pilot, cfg.crop, a_p);
    for round in 0..=n_turbo {
        if round > 0 {
            let prev = rounds.last().map(|r: &TurboRound| r).expect("previous round");
            let est = reconstruct(&prev.estimate);
            let x_hat: Vec<Complex64> =
                prev.decisions.iter().map(|&i| cfg.constellation.points()[i]).collect();
            let pil = data_cancel(y, &est.periodized, cfg.mask, &x_hat, a_d)?;
            h_hat = cross_ambiguity(&pil, cfg.pilot, cfg.crop, a_p);
        }
        let est = reconstruct(&h_hat);
        let (decisions, cgm_iterations, converged) = equalize_detect(y, &est, cfg)?;
        rounds.push(TurboRound { estimate: h_hat.clone(), decisions, cgm_iterations, converged });
    }
    Ok(TurboOutput { rounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmse_reference_values() {
        let grid = GridParams::new(3, 5, 1.0).unwrap();
        let w = TapWindow::new(0, 1, -1, 1).unwrap();
        let h = EffectiveChannel::from_taps(grid, w, [(0, 0, Complex64::new(1.0, 2.0)), (1, -1, Complex64::new(0.5, 0.0))])
            .unwrap();
        assert_eq!(nmse(&h, &h).unwrap(), 0.0);
        assert!((nmse(&EffectiveChannel::zeros(grid, w), &h).unwrap() - 1.0).abs() < 1e-15);
        let two = h.axpby(Complex64::new(2.0, 0.0), &h, Complex64::new(0.0, 0.0));
        assert!((nmse(&two, &h).unwrap() - 1.0).abs() < 1e-15);
        assert!(nmse(&h, &EffectiveChannel::zeros(grid, w)).is_err());
        // an estimate tap outside the reference window counts as error
        let wide = TapWindow::new(0, 2, -1, 1).unwrap();
        let mut extra = h.restrict(wide);
        extra.as_mut_slice()[2] = Complex64::new(1.0, 0.0);
        let e = nmse(&extra, &h).unwrap();
        assert!((e - 1.0 / h.energy()).abs() < 1e-15);
    }

    #[test]
    fn crop_window() {
        let grid = GridParams::new(31, 37, 30e3).unwrap();
        // tau_max B = 2.33, nu_max T = 1.005
        let w = default_crop(&grid, 2.51e-6, 815.0, 2);
        assert_eq!((w.k_min, w.k_max, w.l_min, w.l_max), (-2, 4, -3, 3));
        let w = default_crop(&grid, 2.51e-6, 815.0, 0);
        assert_eq!((w.k_min, w.k_max, w.l_min, w.l_max), (0, 2, -1, 1));
        let w = default_crop(&grid, 2.51e-6, 815.0, 40);
        assert_eq!((w.k_min, w.k_max, w.l_min, w.l_max), (-15, 15, -18, 18));
    }
}
