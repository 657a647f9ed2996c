//! Energy-per-carrier comparison across carrier bases.

use super::config::SimConfig;
use super::trial::trial_channel;
use crate::baselines::{energy_per_carrier, ofdm_frame_matrix, relative_db, spread_db, OfdmConfig};
use crate::channel::{build_h_dd, periodize, FdChannel};
use crate::Result;

/// Per-carrier energies of one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierEnergies {
    pub pulsone: Vec<f64>,
    /// Symbols mounted on the `MN` FD carriers.
    pub dft: Vec<f64>,
    pub cp_ofdm: Vec<f64>,
}

impl CarrierEnergies {
    /// `[pulsone, dft, cp_ofdm]` spreads in dB.
    pub fn spreads(&self) -> [f64; 3] {
        [spread_db(&self.pulsone), spread_db(&self.dft), spread_db(&self.cp_ofdm)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadingReport {
    pub spreads: Vec<[f64; 3]>,
    pub median_spread: [f64; 3],
    /// Energies of the first realization.
    pub first: CarrierEnergies,
}

/// Energies for trial `trial` of `cfg` (same draw as the sweep uses).
pub fn carrier_energies(cfg: &SimConfig, trial: usize) -> Result<CarrierEnergies> {
    cfg.validate()?;
    let h = trial_channel(cfg, trial)?;
    let per = periodize(&h);
    let ofdm = OfdmConfig::new(cfg.grid.m(), cfg.scheme.cp_len, cfg.grid.n())?;
    Ok(CarrierEnergies {
        pulsone: energy_per_carrier(&build_h_dd(&per)?),
        dft: FdChannel::new(&per).column_energies(),
        cp_ofdm: energy_per_carrier(&ofdm_frame_matrix(&ofdm, &h)?),
    })
}

pub fn fading_experiment(cfg: &SimConfig, seeds: usize) -> Result<FadingReport> {
    let mut spreads = Vec::with_capacity(seeds);
    let mut first = None;
    for t in 0..seeds.max(1) {
        let e = carrier_energies(cfg, t)?;
        spreads.push(e.spreads());
        first.get_or_insert(e);
    }
    let median_spread = std::array::from_fn(|j| {
        let mut v: Vec<f64> = spreads.iter().map(|s| s[j]).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
    });
    Ok(FadingReport { spreads, median_spread, first: first.expect("at least one seed") })
}

impl FadingReport {
    /// `carrier,pulsone_db,dft_db,cp_ofdm_db`, in dB relative to each mean.
    pub fn profile_csv(&self) -> String {
        let [a, b, c] = [&self.first.pulsone, &self.first.dft, &self.first.cp_ofdm].map(|e| relative_db(e));
        let mut s = String::from("carrier,pulsone_db,dft_db,cp_ofdm_db\n");
        for i in 0..a.len() {
            s += &format!("{i},{},{},{}\n", a[i], b[i], c[i]);
        }
        s
    }

    /// `trial,pulsone_spread_db,dft_spread_db,cp_ofdm_spread_db`.
    pub fn spreads_csv(&self) -> String {
        let mut s = String::from("trial,pulsone_spread_db,dft_spread_db,cp_ofdm_spread_db\n");
        for (t, [a, b, c]) in self.spreads.iter().enumerate() {
            s += &format!("{t},{a},{b},{c}\n");
        }
        s
    }
}
