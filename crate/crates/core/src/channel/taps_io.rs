//! Plain-text tap lists.
//!
//! ```text
//! # zakotfs taps
//! # grid <M> <N> <nu_p>
//! # window <k_min> <k_max> <l_min> <l_max>
//! <k> <l> <re> <im>
//! ...
//! ```
//!
//! One non-zero tap per line, whitespace separated. Floats are written in
//! shortest round-trip form, so a write/read cycle is exact.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::effective::{EffectiveChannel, TapWindow};
use crate::grid::GridParams;
use crate::{Error, Result};

pub fn write_taps<W: Write>(h: &EffectiveChannel, mut out: W) -> Result<()> {
    let (g, w) = (h.grid(), h.window());
    writeln!(out, "# zakotfs taps")?;
    writeln!(out, "# grid {} {} {}", g.m(), g.n(), g.nu_p())?;
    writeln!(out, "# window {} {} {} {}", w.k_min, w.k_max, w.l_min, w.l_max)?;
    for (k, l, v) in h.taps() {
        writeln!(out, "{k} {l} {} {}", v.re, v.im)?;
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("bad {what}") })
}

pub fn read_taps<R: BufRead>(input: R) -> Result<EffectiveChannel> {
    let mut grid = None;
    let mut window = None;
    let mut taps = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            match it.next() {
                Some("grid") => {
                    let m = parse(it.next(), line_no, "M")?;
                    let n = parse(it.next(), line_no, "N")?;
                    let nu_p = parse(it.next(), line_no, "nu_p")?;
                    grid = Some(GridParams::new(m, n, nu_p)?);
                }
                Some("window") => {
                    window = Some(TapWindow::new(
                        parse(it.next(), line_no, "k_min")?,
                        parse(it.next(), line_no, "k_max")?,
                        parse(it.next(), line_no, "l_min")?,
                        parse(it.next(), line_no, "l_max")?,
                    )?);
                }
                _ => {}
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let k: i64 = parse(it.next(), line_no, "delay index")?;
        let l: i64 = parse(it.next(), line_no, "Doppler index")?;
        let re: f64 = parse(it.next(), line_no, "real part")?;
        let im: f64 = parse(it.next(), line_no, "imaginary part")?;
        if it.next().is_some() {
            return Err(Error::Parse { line: line_no, msg: "trailing fields".into() });
        }
        taps.push((k, l, Complex64::new(re, im)));
    }
    let grid = grid.ok_or_else(|| Error::Parse { line: 0, msg: "missing '# grid' header".into() })?;
    let window = match window {
        Some(w) => w,
        None => {
            let (k_min, k_max) = bounds(taps.iter().map(|t| t.0));
            let (l_min, l_max) = bounds(taps.iter().map(|t| t.1));
            TapWindow::new(k_min, k_max, l_min, l_max)?
        }
    };
    EffectiveChannel::from_taps(grid, window, taps)
}

fn bounds(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold(None, |acc: Option<(i64, i64)>, v| Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v)))))
        .unwrap_or((0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_exact() {
        let grid = GridParams::new(3, 5, 30e3).unwrap();
        let w = TapWindow::new(-1, 1, -2, 2).unwrap();
        let h = EffectiveChannel::from_taps(
            grid,
            w,
            [(0, 0, Complex64::new(0.1, -1.0 / 3.0)), (-1, 2, Complex64::new(1e-300, 7.25))],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_taps(&h, &mut buf).unwrap();
        let back = read_taps(buf.as_slice()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn window_inferred_when_absent() {
        let text = "# grid 3 5 1\n0 0 1 0\n2 -1 0 1\n";
        let h = read_taps(text.as_bytes()).unwrap();
        assert_eq!(h.window(), TapWindow::new(0, 2, -1, 0).unwrap());
        assert_eq!(h.get(2, -1), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn malformed_lines_report_position() {
        let err = read_taps("# grid 3 5 1\n0 0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(read_taps("0 0 1 0\n".as_bytes()).is_err());
    }
}
