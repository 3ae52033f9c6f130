//! `ORD1` run-length raster files.
//!
//! ```text
//! ORD1 2 0.25 4 2
//! origin 0 0
//! 1e 3o
//! 4o
//! ```
//!
//! One line per row (x fastest; rows ordered by z then y). The `origin`
//! line is optional and defaults to zero; `#` starts a comment, and a
//! `# domain <kind>` comment restores the domain label.

use std::fmt::Write as _;

use bitvec::prelude::*;

use super::{DomainMeta, RasterDomain};
use crate::{Error, Result};

pub fn write_ord1(d: &RasterDomain) -> String {
    let n = d.dim();
    let [nx, ny, nz] = d.dims();
    let mut out = String::new();
    let _ = write!(out, "ORD1 {n} {} {nx} {ny}", d.h());
    if n == 3 {
        let _ = write!(out, " {nz}");
    }
    out.push('\n');
    let _ = writeln!(out, "# domain {}", d.meta().kind);
    let o = d.origin();
    out.push_str("origin");
    for v in &o[..n] {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    let bits = d.bits();
    for row in bits.chunks(nx) {
        let mut first = true;
        let mut i = 0;
        while i < nx {
            let v = row[i];
            let run = row[i..].iter().take_while(|b| **b == v).count();
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{run}{}", if v { 'o' } else { 'e' });
            first = false;
            i += run;
        }
        out.push('\n');
    }
    out
}

pub fn read_ord1(text: &str) -> Result<RasterDomain> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut kind = "file".to_string();
    let (hline, header) = loop {
        match lines.next() {
            None => return Err(perr(0, "empty file".into())),
            Some((i, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => {
                let _ = i;
            }
            Some(x) => break x,
        }
    };
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.first() != Some(&"ORD1") {
        return Err(perr(hline, "missing ORD1 header".into()));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| perr(hline, format!("bad integer {s:?}")));
    let n = num(tok.get(1).ok_or_else(|| perr(hline, "missing dimension".into()))?)?;
    if !(n == 2 || n == 3) || tok.len() != 3 + n {
        return Err(perr(hline, format!("header needs n h and {n} extents")));
    }
    let h: f64 = tok[2].parse().map_err(|_| perr(hline, format!("bad spacing {:?}", tok[2])))?;
    let mut dims = [1usize; 3];
    for d in 0..n {
        dims[d] = num(tok[3 + d])?;
    }
    let rows = dims[1] * dims[2];
    let nx = dims[0];
    let mut origin = [0.0; 3];
    let mut bits: BitVec = BitVec::with_capacity(nx * rows);
    let mut seen = 0usize;
    for (ln, raw) in lines {
        let l = raw.trim();
        if let Some(c) = l.strip_prefix('#') {
            if let Some(k) = c.trim().strip_prefix("domain ") {
                kind = k.trim().to_string();
            }
            continue;
        }
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix("origin") {
            let v: Vec<f64> = rest
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| perr(ln, format!("bad origin {t:?}"))))
                .collect::<Result<_>>()?;
            if v.len() != n || seen > 0 {
                return Err(perr(ln, "origin must precede rows and give n coordinates".into()));
            }
            origin[..n].copy_from_slice(&v);
            continue;
        }
        if seen == rows {
            return Err(perr(ln, format!("more than {rows} rows")));
        }
        let mut width = 0usize;
        for t in l.split_whitespace() {
            let (cnt, tag) = t.split_at(t.len() - 1);
            let cnt: usize = cnt.parse().map_err(|_| perr(ln, format!("bad run {t:?}")))?;
            let v = match tag {
                "o" => true,
                "e" => false,
                _ => return Err(perr(ln, format!("bad run tag in {t:?}"))),
            };
            width += cnt;
            if width > nx {
                return Err(perr(ln, format!("row longer than {nx}")));
            }
            bits.extend(std::iter::repeat_n(v, cnt));
        }
        if width != nx {
            return Err(perr(ln, format!("row has {width} cells, expected {nx}")));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(perr(0, format!("{seen} rows, expected {rows}")));
    }
    RasterDomain::from_bits(n, h, origin, dims, bits, DomainMeta { kind, ..Default::default() })
}

#[cfg(test)]
mod tests {
    use super::super::{generate, Shape};
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        for (shape, n, h) in [
            (Shape::InwardCusp { gamma: 2.0 }, 2, 1.0 / 64.0),
            (Shape::FatCarpet { stages: 2 }, 3, 1.0 / 16.0),
            (Shape::Ball { radius: 0.7 }, 2, 0.1),
        ] {
            let d = generate(&shape, n, h).unwrap();
            let text = write_ord1(&d);
            let back = read_ord1(&text).unwrap();
            assert_eq!(back, d);
            assert_eq!(write_ord1(&back), text);
        }
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(read_ord1("ORD1 2 0.5 2 1\n3o\n").is_err());
        assert!(read_ord1("ORD1 2 0.5 2 2\n2o\n").is_err());
        assert!(read_ord1("ORD1 2 0.5 2 1\n2x\n").is_err());
        assert!(read_ord1("ORD1 2 0.5 2 1\n2e\n").is_err());
        let d = read_ord1("ORD1 2 0.5 2 1\n1e 1o\n").unwrap();
        assert_eq!(d.occupied_count(), 1);
    }
}
