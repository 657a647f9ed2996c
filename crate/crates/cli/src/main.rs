use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zakotfs::sim::{
    bench_complexity, emit_results, fading_experiment, run_selftest, run_sweep, BenchOptions, RunOptions, SimConfig,
};
use zakotfs::GridParams;

#[derive(Parser)]
#[command(name = "zakotfs", version, about = "Zak-OTFS link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo BER/NMSE sweep described by a TOML config.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Override sweep.trials.
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Time CG against dense LMMSE across frame sizes.
    Bench {
        /// Grids as MxN, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "31x5,31x11,31x37,62x74")]
        grids: Vec<String>,
        #[arg(long, default_value_t = 3)]
        b: usize,
        /// CG iterations per solve.
        #[arg(long, default_value_t = 250)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Largest MN for the dense LMMSE timing.
        #[arg(long, default_value_t = 1200)]
        dense_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Energy per carrier for pulsone, DFT and CP-OFDM carriers.
    Fading {
        #[command(flatten)]
        common: Common,
        /// Channel realizations to average over.
        #[arg(long, default_value_t = 20)]
        realizations: usize,
    },
    /// Run the oracle-equivalence checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override output.dir.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override sweep.seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> zakotfs::Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(p) => SimConfig::from_file(p)?,
            None => SimConfig::default(),
        };
        if let Some(dir) = &self.output {
            cfg.output.dir = dir.clone();
        }
        if let Some(seed) = self.seed {
            cfg.sweep.seed = seed;
        }
        Ok(cfg)
    }
}

fn parse_grid(s: &str) -> zakotfs::Result<GridParams> {
    let bad = || zakotfs::Error::InvalidParameter(format!("grid '{s}' is not MxN"));
    let (m, n) = s.trim().split_once('x').ok_or_else(bad)?;
    GridParams::new(m.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?, 30e3)
}

fn opt_fmt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$e}")).unwrap_or_else(|| "-".into())
}

fn run(cli: Cli) -> zakotfs::Result<bool> {
    match cli.command {
        Command::Sweep { common, trials, threads } => {
            let mut cfg = common.load()?;
            if let Some(t) = trials {
                cfg.sweep.trials = t;
            }
            cfg.validate()?;
            let mut opts = RunOptions::default();
            if let Some(t) = threads {
                opts.threads = t;
            }
            let results = run_sweep(&cfg, &opts)?;
            println!("{:>6} {:>8} {:>8} {:>5} {:>7} {:>12} {:>11}", "point", "snr_db", "pdr_db", "turbo", "trials", "ber", "nmse");
            for p in results.summary() {
                println!(
                    "{:>6} {:>8} {:>8} {:>5} {:>7} {:>12.4e} {:>11}",
                    p.point,
                    p.snr_db,
                    p.pdr_db.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                    p.turbo,
                    p.trials,
                    p.ber,
                    opt_fmt(p.median_nmse, 3)
                );
            }
            for path in emit_results(&results, &cfg.output.dir)? {
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Bench { grids, b, k, reps, dense_max, seed, output } => {
            let grids = grids.iter().map(|g| parse_grid(g)).collect::<zakotfs::Result<Vec<_>>>()?;
            let opts = BenchOptions { b, k, reps, dense_max_mn: dense_max, seed, ..BenchOptions::default() };
            let report = bench_complexity(&grids, &opts)?;
            println!("{:>6} {:>12} {:>6} {:>9} {:>12}", "MN", "cgm_s", "iters", "op_share", "dense_s");
            for r in &report.rows {
                println!(
                    "{:>6} {:>12.4e} {:>6} {:>9.3} {:>12}",
                    r.grid.frame_size(),
                    r.cgm_seconds,
                    r.cgm_iterations,
                    r.operator_share,
                    opt_fmt(r.dense_seconds, 4)
                );
            }
            println!("cgm log-log slope {:.3}", report.cgm_slope);
            if let Some(s) = report.dense_slope {
                println!("dense log-log slope {s:.3}");
            }
            if let Some(dir) = output {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("bench.csv"), report.to_csv())?;
                println!("wrote {}", dir.join("bench.csv").display());
            }
            Ok(true)
        }
        Command::Fading { common, realizations } => {
            let cfg = common.load()?;
            let report = fading_experiment(&cfg, realizations)?;
            let [p, d, o] = report.median_spread;
            println!("median energy spread (dB): pulsone {p:.3e}  dft {d:.3}  cp-ofdm {o:.3}");
            std::fs::create_dir_all(&cfg.output.dir)?;
            for (name, body) in [("fading_profile.csv", report.profile_csv()), ("fading_spread.csv", report.spreads_csv())] {
                let path = cfg.output.dir.join(name);
                std::fs::write(&path, body)?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Selftest { seed } => {
            let checks = run_selftest(seed)?;
            for c in &checks {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                println!("{status} {:<48} {:.2e} (tol {:.0e})", c.name, c.value, c.tolerance);
            }
            Ok(checks.iter().all(|c| c.passed()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
