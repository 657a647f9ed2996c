use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zakotfs::baselines::*;
use zakotfs::channel::*;
use zakotfs::constellation::Constellation;
use zakotfs::linalg::{max_abs_diff, norm_sqr, DenseMatrix};
use zakotfs::sim::{carrier_energies, SimConfig};
use zakotfs::zak::{cis_frac, pulsone};
use zakotfs::GridParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn cplx(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn qam_symbols(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let qam = Constellation::qam4();
    (0..n).map(|_| qam.points()[rng.gen_range(0..4)]).collect()
}

fn random_channel(grid: GridParams, window: TapWindow, rng: &mut impl Rng) -> EffectiveChannel {
    let mut h = EffectiveChannel::zeros(grid, window);
    h.as_mut_slice().iter_mut().for_each(|v| *v = cplx(rng));
    h
}

/// `y[n] = sum_{k,l} h[k, l] e^{j 2 pi l (n - k) / MN} x[n - k]`, zero outside
/// the input span, with float angles.
fn ltv_brute(h: &EffectiveChannel, x: &[Complex64]) -> Vec<Complex64> {
    let mn = h.grid().frame_size() as f64;
    (0..x.len() as i64)
        .map(|n| {
            h.taps()
                .filter(|&(k, _, _)| n - k >= 0 && n - k < x.len() as i64)
                .map(|(k, l, g)| g * Complex64::from_polar(1.0, 2.0 * PI * (l * (n - k)) as f64 / mn) * x[(n - k) as usize])
                .sum()
        })
        .collect()
}

fn frame_matrix_brute(cfg: &OfdmConfig, h: &EffectiveChannel) -> DenseMatrix {
    let nc = cfg.n_carriers();
    let cols: Vec<Vec<Complex64>> = (0..nc)
        .map(|c| {
            let mut e = vec![ZERO; nc];
            e[c] = Complex64::new(1.0, 0.0);
            let tx = ofdm_modulate(cfg, &e).unwrap();
            ofdm_demodulate(cfg, &ltv_brute(h, &tx)).unwrap()
        })
        .collect();
    DenseMatrix::from_columns(&cols)
}

#[test]
fn fd_carrier_spacing() {
    let g = GridParams::new(31, 37, 30e3).unwrap();
    assert!((g.carrier_spacing() - 930_000.0 / 1147.0).abs() < 1e-9);
    assert!((g.carrier_spacing() - 810.81).abs() < 0.005);
}

#[test]
fn fd_mount_identity_channel() {
    let g = GridParams::new(5, 7, 30e3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = qam_symbols(35, &mut rng);
    let h = FdChannel::new(&PeriodizedChannel::identity(g));
    assert_eq!(fd_mount_transmit(&x, &h, 0.0, &mut rng), x);
    assert!(max_abs_diff(&fd_mount_one_tap(&x, &h), &x) < 1e-15);
}

#[test]
fn fd_mount_received_energy() {
    let g = GridParams::new(5, 7, 30e3).unwrap();
    let mn = g.frame_size();
    let paths = veh_a_paths(815.0, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let h = FdChannel::new(&periodize(&effective_channel(&paths, &PulseShape::rrc(), &g).unwrap()));
    let trace = h.to_dense().frobenius_sqr();
    let sigma2 = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 4000;
    let mut total = 0.0;
    for _ in 0..draws {
        let x = qam_symbols(mn, &mut rng);
        total += norm_sqr(&fd_mount_transmit(&x, &h, sigma2, &mut rng));
    }
    let expected = trace / mn as f64 * mn as f64 + mn as f64 * sigma2;
    assert!((total / draws as f64 / expected - 1.0).abs() < 0.03);
}

#[test]
fn ltv_channel_matches_direct_sum() {
    let g = GridParams::new(5, 7, 30e3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = random_channel(g, TapWindow::new(-2, 4, -3, 3).unwrap(), &mut rng);
    let x: Vec<Complex64> = (0..60).map(|_| cplx(&mut rng)).collect();
    assert!(max_abs_diff(&apply_ltv(&h, &x), &ltv_brute(&h, &x)) < 1e-12);
}

#[test]
fn frame_matrix_matches_column_probes() {
    let g = GridParams::new(5, 7, 30e3).unwrap();
    let cfg = OfdmConfig::new(5, 2, 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = random_channel(g, TapWindow::new(-2, 4, -2, 2).unwrap(), &mut rng);
    let g_fast = ofdm_frame_matrix(&cfg, &h).unwrap();
    assert!(g_fast.max_abs_diff(&frame_matrix_brute(&cfg, &h)) < 1e-12);

    // the noiseless link applies exactly G
    let x = qam_symbols(35, &mut rng);
    let y = ofdm_demodulate(&cfg, &apply_ltv(&h, &ofdm_modulate(&cfg, &x).unwrap())).unwrap();
    assert!(max_abs_diff(&y, &g_fast.matvec(&x)) < 1e-12);
}

#[test]
fn modulation_round_trip() {
    let cfg = OfdmConfig::new(31, 4, 37).unwrap();
    assert_eq!(cfg.frame_len(), 37 * 35);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = qam_symbols(cfg.n_carriers(), &mut rng);
    let tx = ofdm_modulate(&cfg, &x).unwrap();
    assert!(max_abs_diff(&ofdm_demodulate(&cfg, &tx).unwrap(), &x) < 1e-12);
    // the prefix repeats the symbol tail
    assert!(max_abs_diff(&tx[0..4], &tx[31..35]) < 1e-15);
    assert!(OfdmConfig::new(4, 4, 2).is_err());
}

#[test]
fn static_flat_channel_receivers_coincide() {
    let g = GridParams::new(31, 37, 30e3).unwrap();
    let cfg = OfdmConfig::new(31, 4, 37).unwrap();
    let gain = Complex64::new(0.6, -0.3);
    let h = EffectiveChannel::from_taps(g, TapWindow::new(0, 0, 0, 0).unwrap(), [(0, 0, gain)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = qam_symbols(cfg.n_carriers(), &mut rng);
    let sigma2 = 1e-4;
    let genie = ofdm_transceive(&cfg, &h, &x, OfdmReceiver::Genie, sigma2, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let one = ofdm_transceive(&cfg, &h, &x, OfdmReceiver::OneTap, sigma2, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    // genie = conj(g) / (|g|^2 + s2) times the 1-tap output divided by 1 / g
    let shrink = gain.norm_sqr() / (gain.norm_sqr() + sigma2);
    let scaled: Vec<Complex64> = one.iter().map(|v| v * shrink).collect();
    assert!(max_abs_diff(&genie, &scaled) < 1e-10);
    let qam = Constellation::qam4();
    let sent: Vec<usize> = x.iter().map(|&v| qam.nearest(v)).collect();
    assert_eq!(genie.iter().map(|&v| qam.nearest(v)).collect::<Vec<_>>(), sent);
    assert_eq!(one.iter().map(|&v| qam.nearest(v)).collect::<Vec<_>>(), sent);
}

#[test]
fn prefix_absorbs_short_static_delays() {
    let g = GridParams::new(31, 37, 30e3).unwrap();
    let cfg = OfdmConfig::new(31, 4, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let off_block = |gm: &DenseMatrix| {
        let mut worst: f64 = 0.0;
        for r in 0..gm.rows() {
            for c in 0..gm.cols() {
                if r / 31 != c / 31 {
                    worst = worst.max(gm[(r, c)].norm());
                }
            }
        }
        worst
    };
    let short = random_channel(g, TapWindow::new(0, 4, 0, 0).unwrap(), &mut rng);
    let gm = ofdm_frame_matrix(&cfg, &short).unwrap();
    assert!(off_block(&gm) < 1e-14);
    // within a block the static channel is diagonal
    let diag_only = (0..gm.rows()).all(|r| (0..gm.cols()).all(|c| r == c || gm[(r, c)].norm() < 1e-13));
    assert!(diag_only);

    let long = random_channel(g, TapWindow::new(0, 7, 0, 0).unwrap(), &mut rng);
    assert!(off_block(&ofdm_frame_matrix(&cfg, &long).unwrap()) > 1e-3);
}

#[test]
fn genie_beats_one_tap_under_doppler() {
    let g = GridParams::new(31, 37, 30e3).unwrap();
    let cfg = OfdmConfig::new(31, 4, 37).unwrap();
    let paths = veh_a_paths(815.0, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
    let h = effective_channel(&paths, &PulseShape::rrc(), &g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = qam_symbols(cfg.n_carriers(), &mut rng);
    let sigma2 = 0.01;
    let mse = |rx: OfdmReceiver| {
        let est = ofdm_transceive(&cfg, &h, &x, rx, sigma2, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        est.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / x.len() as f64
    };
    let (genie, one) = (mse(OfdmReceiver::Genie), mse(OfdmReceiver::OneTap));
    assert!(genie < one, "{genie} vs {one}");
}

#[test]
fn identity_has_flat_energy() {
    let e = energy_per_carrier(&DenseMatrix::identity(12));
    assert!(e.iter().all(|&v| v == 1.0));
    assert_eq!(spread_db(&e), 0.0);
    assert!(relative_db(&e).iter().all(|&v| v == 0.0));
}

#[test]
fn non_fading_predicate_separates_bases() {
    let g = GridParams::new(5, 3, 30e3).unwrap();
    let mn = g.frame_size();
    let pulsones: Vec<Vec<Complex64>> =
        (0..mn).map(|i| pulsone(g, i % 5, i / 5).unwrap().into_vec()).collect();
    let amp = 1.0 / (mn as f64).sqrt();
    let tones: Vec<Vec<Complex64>> =
        (0..mn).map(|i| (0..mn).map(|n| cis_frac((i * n) as i64, mn as i64) * amp).collect()).collect();
    assert!(is_non_fading(&pulsones, 2, 1, 1e-12));
    assert!(!is_non_fading(&tones, 2, 1, 1e-12));
    // static multipath is frequency selective, so tones fade without Doppler
    assert!(!is_non_fading(&tones, 2, 0, 1e-12));
    // a single static tap scales every carrier alike
    assert!(is_non_fading(&tones, 0, 0, 1e-12));
}

#[test]
fn pulsone_energy_is_flat_for_veh_a() {
    let g = GridParams::new(31, 37, 30e3).unwrap();
    let paths = veh_a_paths(815.0, &mut ChaCha8Rng::seed_from_u64(13)).unwrap();
    let h = periodize(&effective_channel(&paths, &PulseShape::rrc(), &g).unwrap());
    let e = energy_per_carrier(&build_h_basis(&h, Basis::Pulsone).unwrap());
    assert!(spread_db(&e) < 1e-6);
    let e_dft = FdChannel::new(&h).column_energies();
    assert!(spread_db(&e_dft) > 0.1);
}

#[test]
fn carrier_energy_ordering_median() {
    let cfg = SimConfig::default();
    let mut spreads: Vec<[f64; 3]> = (0..5).map(|t| carrier_energies(&cfg, t).unwrap().spreads()).collect();
    let mut median = |i: usize| {
        spreads.sort_by(|a, b| a[i].total_cmp(&b[i]));
        spreads[2][i]
    };
    let (p, d, o) = (median(0), median(1), median(2));
    assert!(p < 1e-6 && p < d && d < o, "{p} {d} {o}");
}
