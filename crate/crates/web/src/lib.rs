//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain Rust counterpart returning
//! `zakotfs::Result`, so the numerics can be tested natively.

use rand::Rng;
use wasm_bindgen::prelude::*;
use zakotfs::channel::{periodize, FdChannel, PulseShape};
use zakotfs::constellation::Constellation;
use zakotfs::equalizer::{apply_channel, cgm_equalize, mask_encode, CgmOptions, NullSpaceMask};
use zakotfs::sim::{carrier_energies, stream, trial_channel, trial_seed, Purpose, SimConfig};
use zakotfs::{Complex64, Error, GridParams, Result};

/// Floor of the heatmap scale, dB below the peak entry.
pub const HEATMAP_FLOOR_DB: f32 = -60.0;

pub fn parse_pulse(name: &str) -> Result<PulseShape> {
    match name {
        "sinc" => Ok(PulseShape::Sinc),
        "rrc" => Ok(PulseShape::rrc()),
        "gauss" => Ok(PulseShape::gauss()),
        "gauss-sinc" => Ok(PulseShape::gauss_sinc()),
        other => Err(Error::InvalidParameter(format!("unknown pulse '{other}'"))),
    }
}

fn config(m: usize, n: usize, pulse: &str, nu_max: f64, seed: u32) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    cfg.grid = GridParams::new(m, n, 30e3)?;
    cfg.pulse = parse_pulse(pulse)?;
    cfg.channel.nu_max = nu_max;
    cfg.sweep.seed = seed.into();
    Ok(cfg)
}

fn fd_channel(cfg: &SimConfig) -> Result<FdChannel> {
    Ok(FdChannel::new(&periodize(&trial_channel(cfg, 0)?)))
}

/// `|H_fd|` in dB relative to its peak, row-major `MN x MN`, clipped at
/// [`HEATMAP_FLOOR_DB`].
pub fn heatmap_db(m: usize, n: usize, pulse: &str, nu_max: f64, seed: u32) -> Result<Vec<f32>> {
    let fd = fd_channel(&config(m, n, pulse, nu_max, seed)?)?;
    let peak = fd.max_abs();
    let mn = fd.dim();
    let mut out = Vec::with_capacity(mn * mn);
    for f in 0..mn {
        for i in 0..mn {
            let db = 20.0 * (fd.get(f, i).norm() / peak).log10();
            out.push((db as f32).max(HEATMAP_FLOOR_DB));
        }
    }
    Ok(out)
}

/// Received energy per carrier for pulsones, FD (DFT) carriers and CP-OFDM
/// subcarriers under one Veh-A draw.
#[wasm_bindgen]
pub struct Energies {
    pulsone: Vec<f64>,
    dft: Vec<f64>,
    cp_ofdm: Vec<f64>,
    spreads: Vec<f64>,
}

#[wasm_bindgen]
impl Energies {
    #[wasm_bindgen(getter)]
    pub fn pulsone(&self) -> Vec<f64> {
        self.pulsone.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn dft(&self) -> Vec<f64> {
        self.dft.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn cp_ofdm(&self) -> Vec<f64> {
        self.cp_ofdm.clone()
    }

    /// Max/min spread in dB, in the order pulsone, DFT, CP-OFDM.
    #[wasm_bindgen(getter)]
    pub fn spreads(&self) -> Vec<f64> {
        self.spreads.clone()
    }
}

pub fn energies(pulse: &str, nu_max: f64, seed: u32) -> Result<Energies> {
    let cfg = config(31, 37, pulse, nu_max, seed)?;
    let e = carrier_energies(&cfg, 0)?;
    let spreads = e.spreads().to_vec();
    Ok(Energies { pulsone: e.pulsone, dft: e.dft, cp_ofdm: e.cp_ofdm, spreads })
}

/// CG residual `c_norm` per iteration for one masked 4-QAM frame.
/// `b = 0` picks the pulse's preset half-bandwidth.
pub fn residual_trace(pulse: &str, nu_max: f64, snr_db: f64, b: usize, seed: u32) -> Result<Vec<f64>> {
    let cfg = config(31, 37, pulse, nu_max, seed)?;
    let b = if b == 0 { cfg.pulse.preset_band(nu_max, &cfg.grid) } else { b };
    let fd = fd_channel(&cfg)?;
    let mask = NullSpaceMask::new(cfg.grid, b)?;
    let qam = Constellation::qam4();
    let ts = trial_seed(cfg.sweep.seed, 0);
    let mut data_rng = stream(ts, Purpose::Data);
    let x: Vec<Complex64> = (0..mask.data_len()).map(|_| qam.points()[data_rng.gen_range(0..qam.len())]).collect();
    let s = mask_encode(&x, &mask)?;
    let sigma2 = 10f64.powf(-snr_db / 10.0);
    let r = apply_channel(&fd, s.as_slice(), sigma2, &mut stream(ts, Purpose::Noise));
    let out = cgm_equalize(&fd.band(b), &r, sigma2 + fd.off_band_power(b), &CgmOptions::default());
    Ok(out.residual_trace)
}

#[wasm_bindgen]
pub fn fd_heatmap(m: usize, n: usize, pulse: &str, nu_max: f64, seed: u32) -> std::result::Result<Vec<f32>, JsError> {
    heatmap_db(m, n, pulse, nu_max, seed).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn carrier_energy(pulse: &str, nu_max: f64, seed: u32) -> std::result::Result<Energies, JsError> {
    energies(pulse, nu_max, seed).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn cg_residuals(pulse: &str, nu_max: f64, snr_db: f64, b: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    residual_trace(pulse, nu_max, snr_db, b, seed).map_err(|e| JsError::new(&e.to_string()))
}
