//! CP-OFDM over the same doubly-spread channel.
//!
//! A frame is `N` OFDM symbols of `M` subcarriers (spacing `B / M`), each
//! preceded by a cyclic prefix of `cp_len` samples, so the frame spans
//! `N (M + cp_len)` samples at rate `B`. Symbol `m`, subcarrier `q` sits at
//! flat index `q + m M`. The channel acts as the aperiodic version of the
//! TD operator: `y[n] = sum h[k, l] x[n - k] e^{j 2 pi l (n - k) / MN}`,
//! with `x` zero outside the frame. FFTs are unitary, so a unit-energy
//! subcarrier symbol and per-sample noise `sigma2` give SNR `1 / sigma2`
//! per subcarrier, as for the Zak-OTFS schemes (the prefix energy is extra).

use num_complex::Complex64;
use rand::Rng;

use crate::channel::EffectiveChannel;
use crate::equalizer::complex_noise;
use crate::linalg::DenseMatrix;
use crate::zak::{twiddle_table, unitary_fft};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub cp_len: usize,
    pub n_symbols: usize,
}

impl OfdmConfig {
    pub fn new(n_subcarriers: usize, cp_len: usize, n_symbols: usize) -> Result<Self> {
        if n_subcarriers == 0 || n_symbols == 0 || cp_len >= n_subcarriers {
            return Err(Error::InvalidParameter(format!(
                "OFDM needs M > cp_len >= 0 and N > 0, got M={n_subcarriers}, cp={cp_len}, N={n_symbols}"
            )));
        }
        Ok(Self { n_subcarriers, cp_len, n_symbols })
    }

    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    pub fn frame_len(&self) -> usize {
        self.n_symbols * self.symbol_len()
    }

    pub fn n_carriers(&self) -> usize {
        self.n_subcarriers * self.n_symbols
    }
}

/// Which OFDM receiver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfdmReceiver {
    /// Joint LMMSE over the whole frame with the exact frame matrix.
    Genie,
    /// Divide each subcarrier by its own channel gain.
    OneTap,
}

pub fn ofdm_modulate(cfg: &OfdmConfig, symbols: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = cfg.n_subcarriers;
    if symbols.len() != cfg.n_carriers() {
        return Err(Error::DimensionMismatch { expected: cfg.n_carriers(), got: symbols.len() });
    }
    let mut out = Vec::with_capacity(cfg.frame_len());
    for sym in symbols.chunks(m) {
        let mut buf = sym.to_vec();
        unitary_fft(&mut buf, true);
        out.extend_from_slice(&buf[m - cfg.cp_len..]);
        out.extend_from_slice(&buf);
    }
    Ok(out)
}

pub fn ofdm_demodulate(cfg: &OfdmConfig, rx: &[Complex64]) -> Result<Vec<Complex64>> {
    if rx.len() != cfg.frame_len() {
        return Err(Error::DimensionMismatch { expected: cfg.frame_len(), got: rx.len() });
    }
    let mut out = Vec::with_capacity(cfg.n_carriers());
    for block in rx.chunks(cfg.symbol_len()) {
        let mut buf = block[cfg.cp_len..].to_vec();
        unitary_fft(&mut buf, false);
        out.extend(buf);
    }
    Ok(out)
}

/// The aperiodic channel as one time-varying coefficient per delay:
/// `y[n] = sum_k c_k[n - k] x[n - k]` with
/// `c_k[s] = sum_l h[k, l] e^{j 2 pi l s / MN}`.
struct LtvChannel {
    k_min: i64,
    coeffs: Vec<Vec<Complex64>>,
}

impl LtvChannel {
    fn new(h: &EffectiveChannel, len: usize) -> Self {
        let w = h.window();
        let mn = h.grid().frame_size();
        let tw = twiddle_table(mn);
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); len]; w.delay_len()];
        for (k, l, g) in h.taps() {
            let c = &mut coeffs[(k - w.k_min) as usize];
            let step = (mn as i64 - l.rem_euclid(mn as i64)) as usize % mn;
            let mut idx = 0;
            for v in c.iter_mut() {
                *v += g * tw[idx];
                idx = (idx + step) % mn;
            }
        }
        Self { k_min: w.k_min, coeffs }
    }

    /// Output samples `lo..hi` for an input that is non-zero only on
    /// `x_lo..x_lo + x.len()`.
    fn apply(&self, x: &[Complex64], x_lo: usize, lo: usize, hi: usize) -> Vec<Complex64> {
        let len = self.coeffs.first().map_or(0, |c| c.len()) as i64;
        let x_hi = (x_lo + x.len()) as i64;
        (lo as i64..hi as i64)
            .map(|n| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (d, c) in self.coeffs.iter().enumerate() {
                    let src = n - self.k_min - d as i64;
                    if src >= x_lo as i64 && src < x_hi && src < len {
                        acc += c[src as usize] * x[(src - x_lo as i64) as usize];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Aperiodic time-varying channel over `[0, x.len())`; the Doppler phase
/// resolution is `1 / MN` of the sample rate. Output is truncated to the
/// input span.
pub fn apply_ltv(h: &EffectiveChannel, x: &[Complex64]) -> Vec<Complex64> {
    LtvChannel::new(h, x.len()).apply(x, 0, 0, x.len())
}

/// The exact frame matrix `G` from transmitted to demodulated subcarrier
/// symbols, including ICI and inter-symbol leakage.
pub fn ofdm_frame_matrix(cfg: &OfdmConfig, h: &EffectiveChannel) -> Result<DenseMatrix> {
    let (m, sl, nc) = (cfg.n_subcarriers, cfg.symbol_len(), cfg.n_carriers());
    let w = h.window();
    let ltv = LtvChannel::new(h, cfg.frame_len());
    let mut g = DenseMatrix::zeros(nc, nc);
    let mut sym = vec![Complex64::new(0.0, 0.0); m];
    for c in 0..nc {
        let (ms, q) = (c / m, c % m);
        sym[q] = Complex64::new(1.0, 0.0);
        let mut body = sym.clone();
        sym[q] = Complex64::new(0.0, 0.0);
        unitary_fft(&mut body, true);
        let tx: Vec<Complex64> = body[m - cfg.cp_len..].iter().chain(&body).copied().collect();
        // the response reaches samples [ms sl + k_min, (ms + 1) sl + k_max)
        let first = ((ms * sl) as i64 + w.k_min).max(0) as usize / sl;
        let last = ((((ms + 1) * sl) as i64 + w.k_max - 1).max(0) as usize / sl).min(cfg.n_symbols - 1);
        for rs in first..=last {
            let mut buf = ltv.apply(&tx, ms * sl, rs * sl + cfg.cp_len, (rs + 1) * sl);
            unitary_fft(&mut buf, false);
            for (qr, v) in buf.into_iter().enumerate() {
                g[(qr + rs * m, c)] = v;
            }
        }
    }
    Ok(g)
}

/// Send one frame of subcarrier symbols and return the receiver's soft
/// estimates of them.
pub fn ofdm_transceive<R: Rng + ?Sized>(
    cfg: &OfdmConfig,
    h: &EffectiveChannel,
    symbols: &[Complex64],
    receiver: OfdmReceiver,
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let tx = ofdm_modulate(cfg, symbols)?;
    let mut rx = apply_ltv(h, &tx);
    if sigma2 > 0.0 {
        for (v, w) in rx.iter_mut().zip(complex_noise(tx.len(), sigma2, rng)) {
            *v += w;
        }
    }
    let y = ofdm_demodulate(cfg, &rx)?;
    let g = ofdm_frame_matrix(cfg, h)?;
    Ok(match receiver {
        OfdmReceiver::Genie => crate::equalizer::lmmse_sparse_gram(&g, &y, sigma2)?,
        OfdmReceiver::OneTap => y
            .iter()
            .enumerate()
            .map(|(i, v)| if g[(i, i)].norm() > 0.0 { v / g[(i, i)] } else { Complex64::new(0.0, 0.0) })
            .collect(),
    })
}
