//! Seeded Monte-Carlo experiments, benchmarks and result files.

mod bench;
mod config;
mod fading;
mod output;
mod selftest;
mod streams;
mod sweep;
mod trial;

pub use bench::{bench_complexity, loglog_slope, BenchOptions, BenchReport, BenchRow};
pub use config::{
    ChannelConfig, ChannelModel, CsiMode, EqualizerConfig, EstimationConfig, OutputConfig, OutputFormat, Scheme,
    SchemeConfig, SeedPolicy, SimConfig, SweepConfig,
};
pub use fading::{carrier_energies, fading_experiment, CarrierEnergies, FadingReport};
pub use output::{emit_results, manifest, summary_csv, trials_csv, SUMMARY_HEADER, TRIALS_HEADER};
pub use selftest::{run_selftest, Check};
pub use streams::{stream, trial_seed, Purpose};
pub use sweep::{aggregate, run_sweep, wilson_interval, PointSummary, RunOptions, SweepResults};
pub use trial::{trial_channel, Point, TrialResult};
