//! Gray-mapped square QAM constellations.
//!
//! Bit-to-symbol table: a `2m`-bit label is split into `m` in-phase bits
//! (most significant first) and `m` quadrature bits. Each half is a Gray
//! code selecting one of `2^m` PAM levels, level `(L-1) - 2v` where `v` is
//! the Gray-decoded value, so an all-zero half maps to the most positive
//! level. Points are stored in label order and scaled to unit mean energy.
//!
//! For 4-QAM this gives `b0 b1 -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`:
//!
//! | bits | symbol          |
//! |------|-----------------|
//! | 00   | ( 1 + j) / sqrt2 |
//! | 01   | ( 1 - j) / sqrt2 |
//! | 10   | (-1 + j) / sqrt2 |
//! | 11   | (-1 - j) / sqrt2 |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits_per_symbol: usize,
}

/// Square QAM orders supported by [`Constellation::qam`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Modulation {
    #[default]
    #[serde(rename = "4-qam", alias = "qpsk")]
    Qam4,
    #[serde(rename = "16-qam")]
    Qam16,
    #[serde(rename = "64-qam")]
    Qam64,
}

impl Modulation {
    pub fn constellation(self) -> Constellation {
        match self {
            Modulation::Qam4 => Constellation::qam(2),
            Modulation::Qam16 => Constellation::qam(4),
            Modulation::Qam64 => Constellation::qam(6),
        }
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut v = g;
    while g > 0 {
        g >>= 1;
        v ^= g;
    }
    v
}

impl Constellation {
    /// Square Gray QAM with `bits_per_symbol` (even, >= 2) bits per point.
    pub fn qam(bits_per_symbol: usize) -> Self {
        assert!(bits_per_symbol >= 2 && bits_per_symbol % 2 == 0, "square QAM needs an even bit count");
        let half = bits_per_symbol / 2;
        let levels = 1usize << half;
        let mask = levels - 1;
        let level = |g: usize| (levels as f64 - 1.0) - 2.0 * gray_decode(g) as f64;
        let scale = (2.0 * ((levels * levels) as f64 - 1.0) / 3.0).sqrt();
        let points = (0..1usize << bits_per_symbol)
            .map(|label| {
                let i_bits = label >> half;
                let q_bits = label & mask;
                Complex64::new(level(i_bits), level(q_bits)) / scale
            })
            .collect();
        Self { name: format!("{}-QAM", 1usize << bits_per_symbol), points, bits_per_symbol }
    }

    pub fn qam4() -> Self {
        Self::qam(2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the closest point; ties go to the lowest index.
    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (idx, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        best
    }

    /// Map a bit slice (values 0/1) to symbols, `bits_per_symbol` bits each, MSB first.
    pub fn map(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let bps = self.bits_per_symbol;
        if bits.len() % bps != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} bits is not a multiple of {bps} bits per symbol",
                bits.len()
            )));
        }
        Ok(bits
            .chunks(bps)
            .map(|c| self.points[c.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)])
            .collect())
    }

    /// Label bits of point `idx`, MSB first.
    pub fn label_bits(&self, idx: usize, out: &mut Vec<u8>) {
        for shift in (0..self.bits_per_symbol).rev() {
            out.push(((idx >> shift) & 1) as u8);
        }
    }

    /// Nearest-point hard decision back to bits.
    pub fn demap(&self, symbols: &[Complex64]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol);
        for &z in symbols {
            self.label_bits(self.nearest(z), &mut bits);
        }
        bits
    }

    /// Hard decision to the nearest constellation point.
    pub fn slice(&self, z: Complex64) -> Complex64 {
        self.points[self.nearest(z)]
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.min((a - b).norm());
            }
        }
        d
    }
}
