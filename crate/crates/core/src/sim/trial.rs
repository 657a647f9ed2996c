//! One Monte-Carlo trial of each scheme.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use super::config::{CsiMode, Scheme, SeedPolicy, SimConfig};
use super::streams::{stream, trial_seed, Purpose};
use crate::baselines::{fd_mount_genie, fd_mount_one_tap, ofdm_transceive, OfdmConfig, OfdmReceiver};
use crate::channel::{
    apply_dd, build_h_dd, effective_channel, periodize, veh_a_paths, EffectiveChannel, FdChannel,
    VEH_A_DELAYS_US,
};
use crate::constellation::Constellation;
use crate::equalizer::{
    apply_channel, back_project, cgm_equalize, complex_noise, lmmse_sparse_gram, CgmOptions, NullSpaceMask,
};
use crate::estimation::{
    default_crop, make_pilot, nmse, superimpose, turbo_estimate, PowerSplit, SpreadPilot, TurboConfig,
};
use crate::zak::{idfzt, DdFrame, FdVector};
use crate::Result;

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub index: usize,
    pub snr_db: f64,
    /// Present only with spread-pilot estimation.
    pub pdr_db: Option<f64>,
}

impl Point {
    pub fn sigma2(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }
}

/// Outcome of one trial at one point and turbo round.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub fingerprint: String,
    pub point: usize,
    pub trial: usize,
    pub seed: u64,
    pub snr_db: f64,
    pub pdr_db: Option<f64>,
    pub turbo: usize,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub nmse: Option<f64>,
    pub cgm_iterations: Option<usize>,
    /// Seconds; recorded only when requested.
    pub wall_time: Option<f64>,
}

/// Effective channel of `trial`. It depends only on the grid, channel,
/// pulse and master seed, so every scheme and point sees the same draw.
pub fn trial_channel(cfg: &SimConfig, trial: usize) -> Result<EffectiveChannel> {
    let t = match cfg.channel.seed_policy {
        SeedPolicy::PerTrial => trial,
        SeedPolicy::Fixed => 0,
    };
    let mut rng = stream(trial_seed(cfg.sweep.seed, t), Purpose::Channel);
    let paths = veh_a_paths(cfg.channel.nu_max, &mut rng)?;
    effective_channel(&paths, &cfg.pulse, &cfg.grid)
}

/// Per-run state shared by all trials.
pub(crate) struct TrialContext {
    pub cfg: SimConfig,
    pub fingerprint: String,
    constellation: Constellation,
    b: usize,
    mask: Option<NullSpaceMask>,
    pilot: Option<SpreadPilot>,
    ofdm: Option<OfdmConfig>,
}

impl TrialContext {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let b = cfg.half_bandwidth();
        let kind = cfg.scheme.kind;
        let mask = if kind == Scheme::ZakFdCgm { Some(NullSpaceMask::new(cfg.grid, b)?) } else { None };
        let pilot = match cfg.estimation.mode {
            CsiMode::SpreadPilot => Some(make_pilot(cfg.grid, cfg.estimation.root)?),
            CsiMode::Perfect => None,
        };
        let ofdm = match kind {
            Scheme::CpOfdmGenie | Scheme::CpOfdmOneTap => {
                Some(OfdmConfig::new(cfg.grid.m(), cfg.scheme.cp_len, cfg.grid.n())?)
            }
            _ => None,
        };
        Ok(Self {
            cfg: cfg.clone(),
            fingerprint: cfg.fingerprint(),
            constellation: cfg.scheme.modulation.constellation(),
            b,
            mask,
            pilot,
            ofdm,
        })
    }

    pub fn points(&self) -> Vec<Point> {
        let pdrs: Vec<Option<f64>> = match self.cfg.estimation.mode {
            CsiMode::SpreadPilot => self.cfg.estimation.pdr_db.iter().map(|&p| Some(p)).collect(),
            CsiMode::Perfect => vec![None],
        };
        let mut out = Vec::new();
        for &snr_db in &self.cfg.sweep.snr_db {
            for &pdr_db in &pdrs {
                out.push(Point { index: out.len(), snr_db, pdr_db });
            }
        }
        out
    }

    fn n_data(&self) -> usize {
        match &self.mask {
            Some(m) => m.data_len(),
            None => self.cfg.grid.frame_size(),
        }
    }

    fn cgm_options(&self) -> CgmOptions {
        CgmOptions { eps: self.cfg.equalizer.eps, max_iter: self.cfg.equalizer.max_iter, profile: false }
    }

    pub fn channel(&self, trial: usize) -> Result<EffectiveChannel> {
        trial_channel(&self.cfg, trial)
    }

    /// Run `trial` at `point`; spread-pilot runs give one result per turbo round.
    pub fn run(&self, point: &Point, trial: usize) -> Result<Vec<TrialResult>> {
        let start = self.cfg.output.wall_time.then(Instant::now);
        let seed = trial_seed(self.cfg.sweep.seed, trial);
        let h = self.channel(trial)?;
        let mut data_rng = stream(seed, Purpose::Data);
        let mut noise_rng = stream(seed, Purpose::Noise);
        let bps = self.constellation.bits_per_symbol();
        let bits: Vec<u8> = (0..self.n_data() * bps).map(|_| data_rng.gen_range(0..=1u8)).collect();
        let x = self.constellation.map(&bits)?;
        let sigma2 = point.sigma2();

        let rounds: Vec<(Vec<usize>, Option<f64>, Option<usize>)> = match self.cfg.estimation.mode {
            CsiMode::SpreadPilot => self.spread_pilot(&h, &x, point, sigma2, &mut noise_rng)?,
            CsiMode::Perfect => {
                let (soft, iters) = self.perfect_csi(&h, &x, sigma2, &mut noise_rng)?;
                vec![(soft.into_iter().map(|z| self.constellation.nearest(z)).collect(), None, iters)]
            }
        };
        let wall_time = start.map(|s| s.elapsed().as_secs_f64());
        let mut labels = Vec::with_capacity(bits.len());
        Ok(rounds
            .into_iter()
            .enumerate()
            .map(|(turbo, (decisions, nmse, cgm_iterations))| {
                labels.clear();
                for &d in &decisions {
                    self.constellation.label_bits(d, &mut labels);
                }
                let bit_errors = labels.iter().zip(&bits).filter(|(a, b)| a != b).count() as u64;
                TrialResult {
                    fingerprint: self.fingerprint.clone(),
                    point: point.index,
                    trial,
                    seed,
                    snr_db: point.snr_db,
                    pdr_db: point.pdr_db,
                    turbo,
                    bit_errors,
                    bits_total: bits.len() as u64,
                    nmse,
                    cgm_iterations,
                    wall_time,
                }
            })
            .collect())
    }

    /// Soft symbol estimates under perfect CSI, plus CG iterations if CG ran.
    fn perfect_csi<R: Rng>(
        &self,
        h: &EffectiveChannel,
        x: &[Complex64],
        sigma2: f64,
        noise: &mut R,
    ) -> Result<(Vec<Complex64>, Option<usize>)> {
        let grid = self.cfg.grid;
        let per = periodize(h);
        match self.cfg.scheme.kind {
            Scheme::ZakFdCgm => {
                let mask = self.mask.as_ref().expect("mask built for zak-fd-cgm");
                let s = idfzt(&DdFrame::from_vec(grid, mask.embed(x)?)?);
                let fd = FdChannel::new(&per);
                let r = apply_channel(&fd, s.as_slice(), sigma2, noise);
                // the dropped Doppler tails act as extra white noise
                let reg = sigma2 + fd.off_band_power(self.b);
                let out = cgm_equalize(&fd.band(self.b), &r, reg, &self.cgm_options());
                let soft = back_project(&FdVector::from_vec(grid, out.solution)?, mask)?;
                Ok((soft, Some(out.iterations)))
            }
            Scheme::ZakDd => {
                let frame = DdFrame::from_vec(grid, x.to_vec())?;
                let mut y = apply_dd(&per, &frame).into_vec();
                add_noise(&mut y, sigma2, noise);
                Ok((lmmse_sparse_gram(&build_h_dd(&per)?, &y, sigma2)?, None))
            }
            Scheme::FdMount | Scheme::FdMountOneTap => {
                let fd = FdChannel::new(&per);
                let r = apply_channel(&fd, x, sigma2, noise);
                if self.cfg.scheme.kind == Scheme::FdMount {
                    let out = fd_mount_genie(&r, &fd, sigma2, &self.cgm_options());
                    Ok((out.solution, Some(out.iterations)))
                } else {
                    Ok((fd_mount_one_tap(&r, &fd), None))
                }
            }
            Scheme::CpOfdmGenie | Scheme::CpOfdmOneTap => {
                let receiver = if self.cfg.scheme.kind == Scheme::CpOfdmGenie {
                    OfdmReceiver::Genie
                } else {
                    OfdmReceiver::OneTap
                };
                let ofdm = self.ofdm.as_ref().expect("OFDM config built");
                Ok((ofdm_transceive(ofdm, h, x, receiver, sigma2, noise)?, None))
            }
        }
    }

    fn spread_pilot<R: Rng>(
        &self,
        h: &EffectiveChannel,
        x: &[Complex64],
        point: &Point,
        sigma2: f64,
        noise: &mut R,
    ) -> Result<Vec<(Vec<usize>, Option<f64>, Option<usize>)>> {
        let mask = self.mask.as_ref().expect("mask built for zak-fd-cgm");
        let pilot = self.pilot.as_ref().expect("pilot built for spread-pilot");
        let n_data = mask.data_len();
        let split = PowerSplit::from_pdr_db(point.pdr_db.expect("pdr point"), n_data as f64)?;
        let grid = self.cfg.grid;
        let tx = superimpose(&DdFrame::from_vec(grid, mask.embed(x)?)?, pilot, split, n_data)?;
        let mut y = apply_dd(&periodize(h), &tx).into_vec();
        add_noise(&mut y, sigma2, noise);
        let y = DdFrame::from_vec(grid, y)?;
        // the receiver knows the profile's delay spread, not the realized paths
        let max_delay = VEH_A_DELAYS_US[VEH_A_DELAYS_US.len() - 1] * 1e-6;
        let cfg = TurboConfig {
            pilot,
            split,
            mask,
            constellation: &self.constellation,
            crop: default_crop(&grid, max_delay, self.cfg.channel.nu_max, self.cfg.estimation.crop_margin),
            b: self.b,
            sigma2,
            cgm: self.cgm_options(),
        };
        let out = turbo_estimate(&y, &cfg, self.cfg.estimation.n_turbo)?;
        out.rounds
            .into_iter()
            .map(|r| Ok((r.decisions, Some(nmse(&r.estimate, h)?), Some(r.cgm_iterations))))
            .collect()
    }
}

fn add_noise<R: Rng>(y: &mut [Complex64], sigma2: f64, rng: &mut R) {
    if sigma2 > 0.0 {
        let noise = complex_noise(y.len(), sigma2, rng);
        for (v, w) in y.iter_mut().zip(noise) {
            *v += w;
        }
    }
}
