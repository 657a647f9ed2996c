//! CSV and manifest files for a finished sweep.
//!
//! Per-trial columns:
//! `fingerprint,point,trial,seed,snr_db,pdr_db,turbo,bit_errors,bits_total,nmse,cgm_iterations,wall_time_s`.
//! Aggregated columns:
//! `point,snr_db,pdr_db,turbo,trials,bit_errors,bits_total,ber,ber_ci_low,ber_ci_high,median_nmse,median_nmse_db,mean_cgm_iterations`.
//! Absent values are empty fields. Floats use the shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::sweep::{PointSummary, SweepResults};
use super::trial::TrialResult;
use crate::Result;

pub const TRIALS_HEADER: &str =
    "fingerprint,point,trial,seed,snr_db,pdr_db,turbo,bit_errors,bits_total,nmse,cgm_iterations,wall_time_s";
pub const SUMMARY_HEADER: &str = "point,snr_db,pdr_db,turbo,trials,bit_errors,bits_total,ber,ber_ci_low,ber_ci_high,median_nmse,median_nmse_db,mean_cgm_iterations";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trials_csv(trials: &[TrialResult]) -> String {
    let mut s = format!("{TRIALS_HEADER}\n");
    for t in trials {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            t.fingerprint,
            t.point,
            t.trial,
            t.seed,
            t.snr_db,
            opt(t.pdr_db),
            t.turbo,
            t.bit_errors,
            t.bits_total,
            opt(t.nmse),
            opt(t.cgm_iterations),
            opt(t.wall_time)
        )
        .expect("write to string");
    }
    s
}

pub fn summary_csv(summary: &[PointSummary]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for p in summary {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.point,
            p.snr_db,
            opt(p.pdr_db),
            p.turbo,
            p.trials,
            p.bit_errors,
            p.bits_total,
            p.ber,
            p.ber_ci.0,
            p.ber_ci.1,
            opt(p.median_nmse),
            opt(p.median_nmse.map(|v| 10.0 * v.log10())),
            opt(p.mean_cgm_iterations)
        )
        .expect("write to string");
    }
    s
}

pub fn manifest(results: &SweepResults) -> String {
    let mut s = String::from("# zakotfs run manifest\n");
    writeln!(s, "# fingerprint {}", results.fingerprint).expect("write to string");
    writeln!(s, "# master_seed {}", results.config.sweep.seed).expect("write to string");
    for p in results.summary().iter().filter(|p| p.turbo == 0) {
        writeln!(s, "# point {} trials {}", p.point, p.trials).expect("write to string");
    }
    s.push('\n');
    s.push_str(&results.config.to_toml_string());
    s
}

/// Write `trials.csv`, `summary.csv` and `manifest.toml` into `dir`.
pub fn emit_results(results: &SweepResults, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [
        ("trials.csv", trials_csv(&results.trials)),
        ("summary.csv", summary_csv(&results.summary())),
        ("manifest.toml", manifest(results)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
