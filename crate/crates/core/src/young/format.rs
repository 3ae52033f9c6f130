//! `YF1` text format.
//!
//! ```text
//! YF1 power 2            | YF1 table
//! head <exponent> <coeff>     (optional)
//! plateau <s0>                (optional)
//! bound <s_inf>               (optional)
//! <s> <value>                 (one pair per line)
//! tail <exponent> <coeff>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. For closed-form
//! headers the samples are informational and the family is rebuilt.

use std::fmt::Write as _;

use super::table::{fit_head, fit_tail, Grid, PowerLaw, SampleTable, Tail};
use super::{build_young, Family, Repr, YoungFunction};
use crate::{Error, Result};

pub fn write_yf1(a: &YoungFunction) -> String {
    let mut out = String::new();
    match &a.repr {
        Repr::Closed(f) if !matches!(f, Family::Density { .. }) => {
            let ps: Vec<String> = f.params().iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "YF1 {}{}{}", f.tag(), if ps.is_empty() { "" } else { " " }, ps.join(" "));
        }
        _ => {
            out.push_str("YF1 table\n");
            let h = a.table.head;
            let _ = writeln!(out, "head {} {}", h.exponent, h.coeff);
        }
    }
    if let Some(z) = a.table.plateau {
        let _ = writeln!(out, "plateau {z}");
    }
    if let Some(b) = a.table.bound {
        let _ = writeln!(out, "bound {b}");
    }
    for (s, v) in a.table.s.iter().zip(&a.table.v) {
        let _ = writeln!(out, "{s} {v}");
    }
    let (e, c) = match a.table.tail {
        Tail::Power(p) => (p.exponent, p.coeff),
        Tail::Bounded { .. } => (0.0, 0.0),
    };
    let _ = writeln!(out, "tail {e} {c}");
    out
}

fn nums(line: usize, toks: &[&str]) -> Result<Vec<f64>> {
    toks.iter()
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("not a number: `{t}`") }))
        .collect()
}

pub fn read_yf1(text: &str) -> Result<YoungFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty YF1 input".into() })?;
    let htoks: Vec<&str> = header.split_whitespace().collect();
    if htoks.first() != Some(&"YF1") || htoks.len() < 2 {
        return Err(Error::Parse { line: hline, msg: "expected `YF1 <family> <params...>` or `YF1 table`".into() });
    }
    let family = if htoks[1] == "table" {
        if htoks.len() > 2 {
            return Err(Error::Parse { line: hline, msg: "`YF1 table` takes no parameters".into() });
        }
        None
    } else {
        let params = nums(hline, &htoks[2..])?;
        Some(Family::from_tag(htoks[1], &params).map_err(|e| Error::Parse { line: hline, msg: e.to_string() })?)
    };

    let (mut s, mut v) = (Vec::new(), Vec::new());
    let (mut head, mut tail, mut plateau, mut bound) = (None, None, None, None);
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let want = |k: usize| -> Result<Vec<f64>> {
            if toks.len() != k + 1 {
                return Err(Error::Parse { line: ln, msg: format!("`{}` takes {k} value(s)", toks[0]) });
            }
            nums(ln, &toks[1..])
        };
        match toks[0] {
            "tail" => {
                let x = want(2)?;
                tail = Some(PowerLaw { exponent: x[0], coeff: x[1] });
            }
            "head" => {
                let x = want(2)?;
                head = Some(PowerLaw { exponent: x[0], coeff: x[1] });
            }
            "plateau" => plateau = Some(want(1)?[0]),
            "bound" => bound = Some(want(1)?[0]),
            _ => {
                if toks.len() != 2 {
                    return Err(Error::Parse { line: ln, msg: "expected `s value`".into() });
                }
                let x = nums(ln, &toks)?;
                s.push(x[0]);
                v.push(x[1]);
            }
        }
    }
    if let Some(f) = family {
        return build_young(&f, &Grid::default());
    }
    if s.is_empty() {
        return Err(Error::Parse { line: hline, msg: "table has no samples".into() });
    }
    let head = head.unwrap_or_else(|| fit_head(&s, &v));
    let tail = Tail::Power(tail.unwrap_or_else(|| fit_tail(&s, &v)));
    YoungFunction::from_parts("table", SampleTable { s, v, head, tail, plateau, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{conjugate, Ext};

    #[test]
    fn closed_family_round_trip() {
        let a = YoungFunction::power_log(2.0, 1.0).unwrap();
        let text = write_yf1(&a);
        assert!(text.starts_with("YF1 powerlog 2 1\n"));
        let b = read_yf1(&text).unwrap();
        assert_eq!(b.family(), a.family());
    }

    #[test]
    fn table_round_trip_is_exact() {
        let c = conjugate(&YoungFunction::power(3.0).unwrap()).unwrap();
        let back = read_yf1(&write_yf1(&c)).unwrap();
        assert_eq!(back.table(), c.table());
        let lin = conjugate(&YoungFunction::linear()).unwrap();
        let back = read_yf1(&write_yf1(&lin)).unwrap();
        assert_eq!(back.eval(3.0).unwrap(), Ext::Infinite);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_yf1("YF2 power 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_yf1("YF1 table\n1 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(read_yf1("YF1 table\n1 1\n2 1.5\n3 1.6\ntail 1 1\n").is_err(), "concave samples");
    }
}
