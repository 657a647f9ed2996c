//! Experiment description, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::PulseShape;
use crate::constellation::Modulation;
use crate::grid::GridParams;
use crate::zak::DENSE_CAP;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_grid")]
    pub grid: GridParams,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub pulse: PulseShape,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub equalizer: EqualizerConfig,
    #[serde(default)]
    pub estimation: EstimationConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_grid() -> GridParams {
    GridParams::new(31, 37, 30e3).expect("valid default grid")
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            channel: ChannelConfig::default(),
            pulse: PulseShape::default(),
            scheme: SchemeConfig::default(),
            equalizer: EqualizerConfig::default(),
            estimation: EstimationConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ChannelModel {
    #[default]
    #[serde(rename = "veh-a")]
    VehA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SeedPolicy {
    /// A fresh channel for every trial index (shared across sweep points).
    #[default]
    PerTrial,
    /// One channel realization for the whole run.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub model: ChannelModel,
    /// Maximum Doppler shift in Hz.
    #[serde(default = "default_nu_max")]
    pub nu_max: f64,
    #[serde(default)]
    pub seed_policy: SeedPolicy,
}

fn default_nu_max() -> f64 {
    815.0
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self { model: ChannelModel::VehA, nu_max: default_nu_max(), seed_policy: SeedPolicy::PerTrial }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Scheme {
    /// DD-domain dense LMMSE on all `MN` symbols.
    #[serde(rename = "zak-dd")]
    ZakDd,
    /// Masked symbols, banded FD channel, CG LMMSE.
    #[default]
    #[serde(rename = "zak-fd-cgm")]
    ZakFdCgm,
    /// Symbols mounted directly on FD carriers, CG LMMSE on the full channel.
    #[serde(rename = "fd-mount")]
    FdMount,
    /// Symbols mounted directly on FD carriers, per-carrier division.
    #[serde(rename = "fd-mount-1tap")]
    FdMountOneTap,
    #[serde(rename = "cp-ofdm-genie")]
    CpOfdmGenie,
    #[serde(rename = "cp-ofdm-1tap")]
    CpOfdmOneTap,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::ZakDd,
        Scheme::ZakFdCgm,
        Scheme::FdMount,
        Scheme::FdMountOneTap,
        Scheme::CpOfdmGenie,
        Scheme::CpOfdmOneTap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ZakDd => "zak-dd",
            Scheme::ZakFdCgm => "zak-fd-cgm",
            Scheme::FdMount => "fd-mount",
            Scheme::FdMountOneTap => "fd-mount-1tap",
            Scheme::CpOfdmGenie => "cp-ofdm-genie",
            Scheme::CpOfdmOneTap => "cp-ofdm-1tap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default)]
    pub kind: Scheme,
    #[serde(default)]
    pub modulation: Modulation,
    /// Cyclic prefix length in samples (CP-OFDM only).
    #[serde(default = "default_cp_len")]
    pub cp_len: usize,
}

fn default_cp_len() -> usize {
    4
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self { kind: Scheme::default(), modulation: Modulation::default(), cp_len: default_cp_len() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualizerConfig {
    /// Half-bandwidth; omitted means the pulse-shape preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_eps() -> f64 {
    1e-6
}

fn default_max_iter() -> usize {
    250
}

impl Default for EqualizerConfig {
    fn default() -> Self {
        Self { b: None, eps: default_eps(), max_iter: default_max_iter() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CsiMode {
    #[default]
    Perfect,
    SpreadPilot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationConfig {
    #[serde(default)]
    pub mode: CsiMode,
    /// Zadoff-Chu root of the spread pilot.
    #[serde(default = "default_root")]
    pub root: u64,
    /// Pilot-to-data frame energy ratios to sweep.
    #[serde(default = "default_pdr")]
    pub pdr_db: Vec<f64>,
    #[serde(default)]
    pub n_turbo: usize,
    /// Bins added around the path support rectangle to form the estimation
    /// window.
    #[serde(default = "default_crop_margin")]
    pub crop_margin: usize,
}

fn default_crop_margin() -> usize {
    2
}

fn default_root() -> u64 {
    101
}

fn default_pdr() -> Vec<f64> {
    vec![0.0]
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            mode: CsiMode::Perfect,
            root: default_root(),
            pdr_db: default_pdr(),
            n_turbo: 0,
            crop_margin: default_crop_margin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Data SNR points: unit-energy data symbols against noise variance
    /// `10^(-snr/10)` per sample.
    #[serde(default = "default_snr")]
    pub snr_db: Vec<f64>,
    /// Trials per point (an upper bound when `min_errors` is set).
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Stop a point early once this many bit errors are collected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_errors: Option<u64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_snr() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0]
}

fn default_trials() -> usize {
    100
}

fn default_seed() -> u64 {
    1
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { snr_db: default_snr(), trials: default_trials(), min_errors: None, seed: default_seed() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    /// Record per-trial wall time. Off by default so files are byte-stable.
    #[serde(default)]
    pub wall_time: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), formats: default_formats(), wall_time: false }
    }
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Short hash of the canonical TOML form, ignoring the output section.
    pub fn fingerprint(&self) -> String {
        let canonical = SimConfig { output: OutputConfig::default(), ..self.clone() };
        let digest = Sha256::digest(canonical.to_toml_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Half-bandwidth used by the banded equalizer and estimator.
    pub fn half_bandwidth(&self) -> usize {
        self.equalizer.b.unwrap_or_else(|| self.pulse.preset_band(self.channel.nu_max, &self.grid))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let mn = self.grid.frame_size();
        if !(self.channel.nu_max.is_finite() && self.channel.nu_max >= 0.0) {
            return bad(format!("channel.nu_max must be finite and >= 0, got {}", self.channel.nu_max));
        }
        self.pulse.validate()?;
        let b = self.half_bandwidth();
        if 2 * b >= mn {
            return bad(format!("half-bandwidth {b} leaves no data carriers for MN = {mn}"));
        }
        if !(self.equalizer.eps.is_finite() && self.equalizer.eps >= 0.0) {
            return bad(format!("equalizer.eps must be >= 0, got {}", self.equalizer.eps));
        }
        if self.equalizer.max_iter == 0 {
            return bad("equalizer.max_iter must be positive".into());
        }
        let kind = self.scheme.kind;
        if matches!(kind, Scheme::CpOfdmGenie | Scheme::CpOfdmOneTap) && self.scheme.cp_len >= self.grid.m() {
            return bad(format!("scheme.cp_len {} must be below M = {}", self.scheme.cp_len, self.grid.m()));
        }
        if matches!(kind, Scheme::ZakDd | Scheme::CpOfdmGenie) && mn > DENSE_CAP {
            return bad(format!("{} uses dense matrices and needs MN <= {DENSE_CAP}, got {mn}", kind.name()));
        }
        if self.estimation.mode == CsiMode::SpreadPilot {
            if kind != Scheme::ZakFdCgm {
                return bad(format!("spread-pilot estimation is only wired to zak-fd-cgm, not {}", kind.name()));
            }
            if self.estimation.pdr_db.is_empty() || self.estimation.pdr_db.iter().any(|p| !p.is_finite()) {
                return bad("estimation.pdr_db needs at least one finite value".into());
            }
            crate::estimation::zadoff_chu(mn, self.estimation.root)?;
        }
        if self.sweep.snr_db.is_empty() || self.sweep.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return bad("sweep.snr_db needs at least one value (inf means noiseless)".into());
        }
        if self.sweep.trials == 0 {
            return bad("sweep.trials must be positive".into());
        }
        if self.output.formats.is_empty() {
            return bad("output.formats is empty".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        let back = SimConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.fingerprint(), cfg.fingerprint());
        assert_eq!(cfg.half_bandwidth(), 3);
        let mut moved = cfg.clone();
        moved.output.dir = "elsewhere".into();
        assert_eq!(moved.fingerprint(), cfg.fingerprint());
        moved.sweep.seed += 1;
        assert_ne!(moved.fingerprint(), cfg.fingerprint());
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(SimConfig::from_toml_str("").unwrap(), SimConfig::default());
    }

    #[test]
    fn parses_full_example() {
        let cfg = SimConfig::from_toml_str(
            r#"
            [grid]
            m = 31
            n = 37
            nu_p = 30000.0
            [channel]
            model = "veh-a"
            nu_max = 81.5
            seed_policy = "fixed"
            [pulse]
            kind = "gauss"
            alpha_tau = 1.584
            alpha_nu = 1.584
            [scheme]
            kind = "zak-fd-cgm"
            modulation = "16-qam"
            [equalizer]
            b = 5
            [estimation]
            mode = "spread-pilot"
            pdr_db = [-5.0, 0.0, 5.0]
            n_turbo = 2
            [sweep]
            snr_db = [20.0]
            trials = 4
            min_errors = 100
            "#,
        )
        .unwrap();
        assert_eq!(cfg.half_bandwidth(), 5);
        assert_eq!(cfg.channel.seed_policy, SeedPolicy::Fixed);
        assert_eq!(cfg.estimation.pdr_db.len(), 3);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "[scheme]\nkind = \"qam-ofdm\"",
            "[grid]\nm = 0\nn = 3\nnu_p = 1.0",
            "[equalizer]\nb = 600",
            "[scheme]\nkind = \"zak-dd\"\n[estimation]\nmode = \"spread-pilot\"",
            "[estimation]\nmode = \"spread-pilot\"\nroot = 31",
            "[sweep]\ntrials = 0",
            "[sweep]\nsnr_db = []",
            "[pulse]\nkind = \"rrc\"\nbeta_tau = 2.0\nbeta_nu = 0.5",
            "unknown = 1",
        ] {
            assert!(SimConfig::from_toml_str(text).is_err(), "accepted: {text}");
        }
    }
}
