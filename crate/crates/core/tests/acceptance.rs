//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zakotfs::channel::*;
use zakotfs::constellation::Constellation;
use zakotfs::equalizer::*;
use zakotfs::linalg::{max_abs_diff, relative_error, BandedMatrix, DenseMatrix};
use zakotfs::sim::*;
use zakotfs::zak::build_r;
use zakotfs::GridParams;

type Outcome = Result<String, String>;

fn grid(m: usize, n: usize) -> GridParams {
    GridParams::new(m, n, 30e3).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unitarity() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in [grid(3, 5), grid(31, 37)] {
        let r = build_r(g).unwrap();
        worst = worst.max(r.gram().max_abs_diff(&DenseMatrix::identity(g.frame_size())));
    }
    check(worst < 1e-12, format!("max |R^H R - I| = {worst:.2e} (< 1e-12) at 3x5 and 31x37"))
}

fn unitary_equivalence() -> Outcome {
    let g = grid(3, 5);
    let r = build_r(g).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let paths = veh_a_paths(815.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let h = periodize(&effective_channel(&paths, &PulseShape::rrc(), &g).unwrap());
        let via_dd = r.matmul(&build_h_dd(&h).unwrap()).matmul(&r.adjoint());
        for h_fd in [build_h_fd(&h).unwrap(), build_h_basis(&h, Basis::Dft).unwrap()] {
            worst = worst.max(h_fd.max_abs_diff(&via_dd) / h_fd.max_abs());
        }
    }
    check(worst < 1e-9, format!("max |H - R H_DD R^H| / max |H| = {worst:.2e} (< 1e-9), 10 Veh-A seeds at 3x5"))
}

fn modulo_banded_structure() -> Outcome {
    // Doppler taps in [-1, 1] only: the FD support is the wrapped diagonals
    // {MN - 1, 0, 1}, a band of half-width 1 plus two folded corners
    let g = grid(3, 5);
    let mn = g.frame_size();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let taps: Vec<(i64, i64, Complex64)> = (0..3)
        .flat_map(|k| (-1..=1).map(move |l| (k, l)))
        .map(|(k, l)| (k, l, Complex64::new(rng.gen_range(0.5..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let h = PeriodizedChannel::from_taps(g, taps);
    let fd = build_h_basis(&h, Basis::Dft).unwrap();
    let peak = fd.max_abs();
    let mut outside: f64 = 0.0;
    let mut inside = f64::INFINITY;
    for f in 0..mn {
        for i in 0..mn {
            let d = (f + mn - i) % mn;
            let v = fd[(f, i)].norm();
            if d <= 1 || d == mn - 1 {
                inside = inside.min(v);
            } else {
                outside = outside.max(v);
            }
        }
    }
    let corners = fd[(0, mn - 1)].norm() > 1e-3 * peak && fd[(mn - 1, 0)].norm() > 1e-3 * peak;
    check(
        outside < 1e-10 * peak && inside > 1e-6 * peak && corners,
        format!("out-of-support max {:.2e} of peak, smallest in-support {:.2e} of peak, corners populated {corners}", outside / peak, inside / peak),
    )
}

fn non_fading() -> Outcome {
    let cfg = SimConfig::default();
    let report = fading_experiment(&cfg, 20).unwrap();
    let mut pulsone_rel: f64 = 0.0;
    let mut dft_min = f64::INFINITY;
    for t in 0..20 {
        let e = carrier_energies(&cfg, t).unwrap();
        let mean = e.pulsone.iter().sum::<f64>() / e.pulsone.len() as f64;
        let (lo, hi) = e.pulsone.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        pulsone_rel = pulsone_rel.max((hi - lo) / mean);
        dft_min = dft_min.min(report.spreads[t][1]);
    }
    let [_, dft, ofdm] = report.median_spread;
    check(
        pulsone_rel < 1e-6 && dft_min > 0.0 && ofdm > dft,
        format!(
            "pulsone relative spread {pulsone_rel:.1e} (< 1e-6), min DFT spread {dft_min:.2} dB (> 0), median CP-OFDM {ofdm:.2} dB > median FD {dft:.2} dB over 20 seeds"
        ),
    )
}

fn random_banded(n: usize, b: usize, rng: &mut impl Rng) -> BandedMatrix {
    let mut h = BandedMatrix::zeros(n, b);
    for f in 0..n {
        for i in f.saturating_sub(b)..(f + b + 1).min(n) {
            h.set(f, i, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    h
}

struct Ensemble {
    worst: f64,
    max_iter: usize,
    unconverged: usize,
}

fn cg_vs_dense(seed: u64, bands: std::ops::RangeInclusive<usize>) -> Ensemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = Ensemble { worst: 0.0, max_iter: 0, unconverged: 0 };
    for case in 0..50 {
        let n = [155, 256, 64, 200, 99][case % 5];
        let b = rng.gen_range(bands.clone());
        let sigma2 = 10f64.powf(rng.gen_range(-2.0..0.0));
        let h = random_banded(n, b, &mut rng);
        let r: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let out = cgm_equalize(&h, &r, sigma2, &CgmOptions::default());
        let direct = lmmse_direct(&h.to_dense(), &r, sigma2).unwrap();
        e.worst = e.worst.max(relative_error(&out.solution, &direct));
        e.max_iter = e.max_iter.max(out.iterations);
        e.unconverged += usize::from(!out.converged);
    }
    e
}

fn oracle_equivalence() -> Outcome {
    // b = 3 as in the equalizer; sigma^2 spans 0..20 dB SNR
    let e = cg_vs_dense(5, 3..=3);
    // wider bands are ill-conditioned enough at low sigma^2 that k = 250
    // does not always reach eps; reported, not gated
    let wide = cg_vs_dense(5, 1..=6);
    check(
        e.worst < 1e-5 && e.max_iter <= 250 && e.unconverged == 0,
        format!(
            "50 random b=3 systems (MN <= 256, sigma^2 in [0.01, 1]): max relative error {:.2e} (< 1e-5), max iterations {}; b in 1..=6: max error {:.2e}, {} of 50 hit k = 250",
            e.worst, e.max_iter, wide.worst, wide.unconverged
        ),
    )
}

fn masking() -> Outcome {
    let g = grid(31, 37);
    let b = 3;
    let mask = NullSpaceMask::new(g, b).unwrap();
    let qam = Constellation::qam4();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut edge: f64 = 0.0;
    let mut product: f64 = 0.0;
    let mut full: f64 = 0.0;
    for seed in 0..10 {
        let x: Vec<Complex64> = (0..mask.data_len()).map(|_| qam.points()[rng.gen_range(0..4)]).collect();
        let s = mask_encode(&x, &mask).unwrap();
        let s = s.as_slice();
        let mn = s.len();
        let e = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        edge = edge.max(e(&s[..b])).max(e(&s[mn - b..]));
        let paths = veh_a_paths(815.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let fd = FdChannel::new(&periodize(&effective_channel(&paths, &PulseShape::rrc(), &g).unwrap()));
        let banded = fd.band(b).matvec(s);
        product = product.max(max_abs_diff(&fd.modulo_band(b).to_dense().matvec(s), &banded));
        full = full.max(max_abs_diff(&fd.to_dense().matvec(s), &banded));
    }
    check(
        edge < 1e-10 && product < 1e-9,
        format!(
            "edge carrier norm {edge:.1e} (< 1e-10), dense modulo-banded vs banded on masked inputs {product:.1e} (< 1e-9); Doppler tails beyond b add {full:.1e}"
        ),
    )
}

fn sweep(cfg: &SimConfig) -> Vec<PointSummary> {
    run_sweep(cfg, &RunOptions::default()).unwrap().summary()
}

fn perfect_config(kind: Scheme, snr: &[f64], trials: usize, min_errors: Option<u64>) -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.scheme.kind = kind;
    cfg.sweep.snr_db = snr.to_vec();
    cfg.sweep.trials = trials;
    cfg.sweep.min_errors = min_errors;
    cfg.sweep.seed = 7;
    cfg
}

fn ber_parity() -> Outcome {
    let snr = [0.0, 5.0, 10.0, 15.0, 20.0];
    let cgm = sweep(&perfect_config(Scheme::ZakFdCgm, &snr, 300, Some(100)));
    let dd = sweep(&perfect_config(Scheme::ZakDd, &snr, 300, Some(100)));
    let one_tap = sweep(&perfect_config(Scheme::CpOfdmOneTap, &[20.0], 300, Some(100)));
    let mut worst_ratio: f64 = 1.0;
    let mut compared = 0;
    let mut enough = true;
    for (a, b) in cgm.iter().zip(&dd) {
        if a.ber >= 1e-4 && b.ber >= 1e-4 {
            compared += 1;
            worst_ratio = worst_ratio.max(a.ber.max(b.ber) / a.ber.min(b.ber));
            enough &= a.bit_errors >= 100 && b.bit_errors >= 100;
        }
    }
    let (top_cgm, top_dd, top_ofdm) = (cgm[4].ber, dd[4].ber, one_tap[0].ber);
    let margin = top_ofdm / top_cgm.max(top_dd);
    let curve = |s: &[PointSummary]| s.iter().map(|p| format!("{:.2e}", p.ber)).collect::<Vec<_>>().join(" ");
    check(
        worst_ratio <= 2.0 && compared == snr.len() && enough && margin >= 10.0,
        format!(
            "FD-CGM [{}] vs DD [{}] at 0..20 dB: worst ratio {worst_ratio:.2} (<= 2, {compared} points, >= 100 errors each); CP-OFDM 1-tap {top_ofdm:.2e} at 20 dB is {margin:.1}x worse (>= 10x)",
            curve(&cgm),
            curve(&dd)
        ),
    )
}

fn pilot_config(pdr: &[f64], trials: usize, n_turbo: usize) -> SimConfig {
    let mut cfg = perfect_config(Scheme::ZakFdCgm, &[20.0], trials, None);
    cfg.estimation.mode = CsiMode::SpreadPilot;
    cfg.estimation.pdr_db = pdr.to_vec();
    cfg.estimation.n_turbo = n_turbo;
    cfg
}

fn estimation_trends() -> Outcome {
    let pdr = [-5.0, 2.5, 10.0, 17.5, 25.0];
    let rows = sweep(&pilot_config(&pdr, 20, 5));
    let at = |turbo: usize| -> Vec<&PointSummary> { rows.iter().filter(|r| r.turbo == turbo).collect() };
    let (r0, r5) = (at(0), at(5));
    let nmse = |r: &[&PointSummary]| r.iter().map(|p| p.median_nmse.unwrap()).collect::<Vec<_>>();
    let (n0, n5) = (nmse(&r0), nmse(&r5));
    let ber0: Vec<f64> = r0.iter().map(|p| p.ber).collect();
    let monotone = n0.windows(2).all(|w| w[1] < w[0]);
    let turbo_helps = n5.iter().zip(&n0).all(|(a, b)| a <= b);
    let (imin, bmin) = ber0.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let interior = imin > 0 && imin < ber0.len() - 1 && bmin < ber0[0] && bmin < ber0[ber0.len() - 1];

    // mid PDR against perfect CSI on the same channels, data and noise
    let mid = sweep(&pilot_config(&[10.0], 60, 5));
    let turbo_mid = mid.iter().find(|r| r.turbo == 5).unwrap();
    let perfect = &sweep(&perfect_config(Scheme::ZakFdCgm, &[20.0], 60, None))[0];
    let ratio = turbo_mid.ber / perfect.ber;
    let db = |v: &[f64]| v.iter().map(|x| format!("{:.1}", 10.0 * x.log10())).collect::<Vec<_>>().join(" ");
    let e = |v: &[f64]| v.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" ");
    check(
        monotone && turbo_helps && interior && ratio <= 2.0,
        format!(
            "PDR -5..25 dB at 20 dB SNR: NMSE no-turbo [{}] dB (decreasing {monotone}), turbo-5 [{}] dB (<= no-turbo {turbo_helps}); BER no-turbo [{}] interior minimum {interior}; turbo-5 BER at 10 dB {:.2e} = {ratio:.2}x perfect CSI {:.2e} (<= 2x)",
            db(&n0),
            db(&n5),
            e(&ber0),
            turbo_mid.ber,
            perfect.ber
        ),
    )
}

fn pulse_shapes() -> Outcome {
    let pulses = [PulseShape::Sinc, PulseShape::rrc(), PulseShape::gauss(), PulseShape::gauss_sinc()];
    let pdr = [-10.0, 0.0, 10.0, 20.0, 30.0];
    let nmse_curve = |pulse: PulseShape| -> Vec<f64> {
        let mut cfg = pilot_config(&pdr, 20, 0);
        cfg.pulse = pulse;
        sweep(&cfg).iter().map(|p| p.median_nmse.unwrap()).collect()
    };
    let sinc = nmse_curve(PulseShape::Sinc);
    let gauss = nmse_curve(PulseShape::gauss());
    // floor: less than 1 dB gained over the last 20 dB of PDR
    let floor = sinc[4] >= 10f64.powf(-0.1) * sinc[2];
    let decreasing = gauss.windows(2).all(|w| w[1] < w[0]) && gauss[4] <= 0.5 * gauss[3];

    let ber: Vec<f64> = pulses
        .iter()
        .map(|&pulse| {
            let mut cfg = perfect_config(Scheme::ZakFdCgm, &[20.0], 40, None);
            cfg.pulse = pulse;
            sweep(&cfg)[0].ber
        })
        .collect();
    let gauss_worst = ber[2] > ber[0] && ber[2] > ber[1] && ber[2] > ber[3];
    let db = |v: &[f64]| v.iter().map(|x| format!("{:.1}", 10.0 * x.log10())).collect::<Vec<_>>().join(" ");
    check(
        floor && decreasing && gauss_worst,
        format!(
            "NMSE over PDR -10..30 dB: sinc [{}] dB (floor {floor}), gauss [{}] dB (decreasing {decreasing}); perfect-CSI BER at 20 dB sinc {:.1e} rrc {:.1e} gauss {:.1e} gauss-sinc {:.1e} (gauss worst {gauss_worst})",
            db(&sinc),
            db(&gauss),
            ber[0],
            ber[1],
            ber[2],
            ber[3]
        ),
    )
}

fn complexity() -> Outcome {
    let grids = [grid(31, 5), grid(31, 11), grid(31, 37), grid(62, 74)];
    let report = bench_complexity(&grids, &BenchOptions { reps: 3, ..Default::default() }).unwrap();
    let dense = report.dense_slope.unwrap_or(f64::NAN);
    let share = report.rows.iter().map(|r| r.operator_share).fold(f64::INFINITY, f64::min);
    let times = report.rows.iter().map(|r| format!("{:.1e}", r.cgm_seconds)).collect::<Vec<_>>().join(" ");
    check(
        (0.8..=1.3).contains(&report.cgm_slope) && dense >= 2.5,
        format!(
            "CG (b=3, k=250) times [{times}] s at MN 155/341/1147/4588: slope {:.2} (in [0.8, 1.3]); dense slope {dense:.2} (>= 2.5); banded products take >= {:.0}% of CG time",
            report.cgm_slope,
            100.0 * share
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("unitarity of R", unitarity),
        ("FD/DD unitary equivalence", unitary_equivalence),
        ("modulo-banded FD structure", modulo_banded_structure),
        ("non-fading carriers", non_fading),
        ("CG vs dense LMMSE", oracle_equivalence),
        ("null-space masking", masking),
        ("BER parity", ber_parity),
        ("estimation trends", estimation_trends),
        ("pulse-shape behaviour", pulse_shapes),
        ("complexity scaling", complexity),
    ];
    // optional criterion numbers select a subset; cargo's own flags are skipped
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}, {secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}, {secs:.1} s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
