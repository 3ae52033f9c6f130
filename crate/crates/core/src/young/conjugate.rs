//! Young conjugate `Ã(s) = sup{sr − A(r) : r > 0}`.
//!
//! The maximizer is nondecreasing in `s`, so one sweep over the samples of
//! `A` locates it to within a cell; a golden-section search on the exact
//! evaluator then polishes it. Beyond the samples the head/tail laws of `A`
//! give an analytic first guess.

use super::table::{Grid, PowerLaw, SampleTable, Tail};
use super::{clamp_young_extrapolation, Ext, Monotone, YoungFunction};
use crate::Result;

const GOLDEN_ITERS: usize = 160;

/// Conjugate on the default grid.
pub fn conjugate(a: &YoungFunction) -> Result<YoungFunction> {
    conjugate_on(a, &Grid::default())
}

pub(crate) fn conjugate_on(a: &YoungFunction, grid: &Grid) -> Result<YoungFunction> {
    let plateau = a.linear_head_slope();
    let bound = a.linear_tail_slope();
    let mut xs: Vec<f64> = grid.points();
    if let Some(b) = bound {
        xs.retain(|&s| s < b);
        xs.push(b);
    }
    let rs = a.table.s.clone();
    let vs = a.table.v.clone();
    let mut s_out = Vec::with_capacity(xs.len());
    let mut v_out = Vec::with_capacity(xs.len());
    let mut j = 0usize;
    for &s in &xs {
        if matches!(plateau, Some(c) if s <= c) {
            s_out.push(s);
            v_out.push(0.0);
            continue;
        }
        let g = |k: usize| s * rs[k] - vs[k];
        while j + 1 < rs.len() && g(j + 1) >= g(j) {
            j += 1;
        }
        let val = sup_near(a, s, &rs, j).max(0.0);
        if !val.is_finite() {
            break;
        }
        s_out.push(s);
        v_out.push(val);
    }
    let mut t = SampleTable::fitted(s_out, v_out, plateau, bound);
    if let Some(b) = a.table.bound {
        t.tail = Tail::Power(PowerLaw { exponent: 1.0, coeff: b });
    }
    clamp_young_extrapolation(&mut t);
    YoungFunction::from_parts(format!("conj({})", a.label), t)
}

fn objective(a: &YoungFunction, s: f64, r: f64) -> f64 {
    match a.value(r) {
        Ext::Finite(v) => s * r - v,
        Ext::Infinite => f64::NEG_INFINITY,
    }
}

/// `sup_r (sr − A(r))` given that sample `j` is the discrete maximizer.
fn sup_near(a: &YoungFunction, s: f64, rs: &[f64], j: usize) -> f64 {
    let n = rs.len();
    let f = |r: f64| objective(a, s, r);
    let mut best = f(rs[j]);
    let lo = if j > 0 {
        rs[j - 1]
    } else {
        let h = a.table.head;
        let guess = if h.exponent > 1.0 + 1e-9 && h.coeff > 0.0 {
            (s / (h.coeff * h.exponent)).powf(1.0 / (h.exponent - 1.0))
        } else {
            rs[0]
        };
        guess.min(rs[0]) * 0.25
    };
    let hi = if j + 1 < n {
        rs[j + 1]
    } else if let Some(b) = a.table.bound {
        best = best.max(f(b));
        b
    } else {
        let guess = match a.table.tail {
            Tail::Power(t) if t.exponent > 1.0 + 1e-9 && t.coeff > 0.0 => {
                (s / (t.coeff * t.exponent)).powf(1.0 / (t.exponent - 1.0))
            }
            _ => rs[n - 1],
        };
        let mut hi = 2.0 * guess.max(rs[n - 1]);
        let mut k = 0;
        while k < 40 && hi < 1e300 && f(hi) > f(0.5 * hi) {
            hi *= 4.0;
            k += 1;
        }
        hi
    };
    if lo > 0.0 && hi > lo {
        best = best.max(golden_max(&f, lo.ln(), hi.ln()));
    }
    best
}

/// Maximum of a unimodal `r ↦ f(r)` searched in `u = ln r`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    let mut best = fc.max(fd);
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp());
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp());
            best = best.max(fd);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{Family, Side};

    fn val(f: &YoungFunction, s: f64) -> f64 {
        f.eval(s).unwrap().finite().unwrap()
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let s: Vec<f64> = Grid::default().points();
        let v: Vec<f64> = s.iter().map(|x| 0.5 * x * x).collect();
        let half = YoungFunction::from_table(s, v, None, None).unwrap();
        let c = conjugate(&half).unwrap();
        for &x in &[1e-3, 0.7, 3.0, 1e4] {
            assert!((val(&c, x) / (0.5 * x * x) - 1.0).abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn conjugate_of_linear_is_plateau_then_infinite() {
        let c = conjugate(&YoungFunction::linear()).unwrap();
        assert_eq!(c.eval(0.5).unwrap(), Ext::Finite(0.0));
        assert_eq!(c.eval(2.0).unwrap(), Ext::Infinite);
        assert_eq!(c.finite_domain_bound(), Some(1.0));
        assert_eq!(c.inverse(0.5, Side::Right).value, 1.0);
    }

    #[test]
    fn cube_over_three_matches_brute_force() {
        let a = YoungFunction::power(3.0).unwrap();
        // A(s)=s³/3 is s³ rescaled: conj of s³ at s is 2·(s/3)^{3/2}
        let c = conjugate(&a).unwrap();
        let brute = |s: f64| {
            (1..=200_000).map(|k| k as f64 * 1e-4).map(|r| s * r - r * r * r).fold(0.0, f64::max)
        };
        for &s in &[0.5, 4.0, 12.0] {
            assert!((val(&c, s) / brute(s) - 1.0).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn involution_on_builtins() {
        for fam in [Family::Power { p: 1.5 }, Family::Power { p: 3.0 }, Family::PowerLog { p: 2.0, lambda: 1.0 }] {
            let a = super::super::build_young(&fam, &Grid::default()).unwrap();
            let cc = conjugate(&conjugate(&a).unwrap()).unwrap();
            for &s in a.table().abscissae().iter().filter(|s| (1e-4..=1e4).contains(*s)) {
                let rel = (val(&cc, s) / val(&a, s) - 1.0).abs();
                assert!(rel < 1e-3, "{fam}: s = {s}, rel = {rel}");
            }
        }
    }

    #[test]
    fn density_conjugate_has_plateau_and_bound() {
        let a = YoungFunction::from_density(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let c = conjugate(&a).unwrap();
        assert_eq!(c.zero_plateau_bound(), Some(1.0));
        assert_eq!(c.finite_domain_bound(), Some(3.0));
        assert_eq!(c.eval(3.5).unwrap(), Ext::Infinite);
        // a(r) = 2r − 1 on [1,2] gives Ã(s) = (s − 1)(s + 3)/4 on [1,3]
        for (&s, &v) in c.table().abscissae().iter().zip(c.table().values()) {
            if s > 1.0 && s < 3.0 {
                assert!((v - (s - 1.0) * (s + 3.0) / 4.0).abs() < 1e-12 * (1.0 + v), "{s}");
            }
        }
        assert!((val(&c, 2.0) / 1.25 - 1.0).abs() < 1e-2);
    }
}
