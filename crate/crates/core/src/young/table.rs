//! Monotone sample tables with power-law head and tail extrapolation.

use serde::{Deserialize, Serialize};

/// Extended nonnegative value: a Young function may be `+∞` beyond its
/// finite domain bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ext {
    Finite(f64),
    Infinite,
}

impl Ext {
    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ext::Infinite)
    }

    /// `self ≤ other` in the extended order.
    pub fn le(self, other: Ext) -> bool {
        match (self, other) {
            (_, Ext::Infinite) => true,
            (Ext::Infinite, Ext::Finite(_)) => false,
            (Ext::Finite(a), Ext::Finite(b)) => a <= b,
        }
    }
}

/// Which generalized inverse to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `inf{s : F(s) ≥ r}` (left-continuous).
    Left,
    /// `sup{s : F(s) ≤ r}` (right-continuous).
    Right,
}

/// Result of a generalized inverse. When `saturated` is set the requested
/// level exceeds the supremum of a bounded function and `value` is the
/// largest abscissa the function is known on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inverse {
    pub value: f64,
    pub saturated: bool,
}

impl Inverse {
    pub(crate) fn finite(value: f64) -> Self {
        Inverse { value, saturated: false }
    }

    /// The inverse as an extended value (`Infinite` when saturated).
    pub fn ext(self) -> Ext {
        if self.saturated {
            Ext::Infinite
        } else {
            Ext::Finite(self.value)
        }
    }
}

/// Log-spaced abscissa grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub len: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { lo: 1e-8, hi: 1e8, len: 512 }
    }
}

impl Grid {
    pub fn new(lo: f64, hi: f64, len: usize) -> Self {
        assert!(lo > 0.0 && hi > lo && len >= 2, "grid must satisfy 0 < lo < hi, len ≥ 2");
        Grid { lo, hi, len }
    }

    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (self.len - 1) as f64;
        (0..self.len)
            .map(|k| {
                if k == 0 {
                    self.lo
                } else if k == self.len - 1 {
                    self.hi
                } else {
                    (a + step * k as f64).exp()
                }
            })
            .collect()
    }

    /// Natural-log spacing between consecutive points.
    pub fn log_step(&self) -> f64 {
        (self.hi / self.lo).ln() / (self.len - 1) as f64
    }
}

/// `coeff · s^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub coeff: f64,
}

impl PowerLaw {
    pub fn eval(&self, s: f64) -> f64 {
        if self.coeff == 0.0 {
            0.0
        } else {
            self.coeff * s.powf(self.exponent)
        }
    }

    /// Least squares in log-log coordinates over the strictly positive pairs.
    pub fn fit(s: &[f64], v: &[f64]) -> Option<PowerLaw> {
        let pts: Vec<(f64, f64)> = s
            .iter()
            .zip(v)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx <= 0.0 {
            return None;
        }
        let exponent = sxy / sxx;
        let coeff = (my - exponent * mx).exp();
        Some(PowerLaw { exponent, coeff })
    }
}

/// Behaviour beyond the last sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    /// `coeff · s^exponent`.
    Power(PowerLaw),
    /// `sup − coeff · s^(−decay)`: a bounded increasing function.
    Bounded { sup: f64, coeff: f64, decay: f64 },
}

impl Tail {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Tail::Power(p) => p.eval(s),
            Tail::Bounded { sup, coeff, decay } => sup - coeff * s.powf(-decay),
        }
    }

    /// Smallest `s` with `tail(s) = y`, or `None` when `y` is never reached.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        match *self {
            Tail::Power(p) => {
                if p.coeff <= 0.0 || p.exponent <= 0.0 {
                    None
                } else {
                    Some((y / p.coeff).powf(1.0 / p.exponent))
                }
            }
            Tail::Bounded { sup, coeff, decay } => {
                if y >= sup {
                    None
                } else {
                    Some((coeff / (sup - y)).powf(1.0 / decay))
                }
            }
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Tail::Power(p) => p.exponent,
            Tail::Bounded { .. } => 0.0,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Tail::Bounded { .. })
    }
}

/// Nondecreasing samples `v_k = F(s_k)` on strictly increasing abscissae.
///
/// Between samples the value is log-log linear (linear when one endpoint
/// is zero). Below the first sample the head power law applies, above the
/// last one the tail. `F ≡ 0` on `[0, plateau]` and `F = +∞` on
/// `(bound, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTable {
    pub(crate) s: Vec<f64>,
    pub(crate) v: Vec<f64>,
    pub(crate) head: PowerLaw,
    pub(crate) tail: Tail,
    pub(crate) plateau: Option<f64>,
    pub(crate) bound: Option<f64>,
}

impl SampleTable {
    /// Builds a table and fits head and tail on the first and last decade.
    pub(crate) fn fitted(s: Vec<f64>, v: Vec<f64>, plateau: Option<f64>, bound: Option<f64>) -> Self {
        let head = fit_head(&s, &v);
        let tail = Tail::Power(fit_tail(&s, &v));
        SampleTable { s, v, head, tail, plateau, bound }
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn head(&self) -> PowerLaw {
        self.head
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn plateau(&self) -> Option<f64> {
        self.plateau
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn last_abscissa(&self) -> Option<f64> {
        self.s.last().copied()
    }

    /// Value at `s ≥ 0`.
    pub fn eval(&self, s: f64) -> Ext {
        if s == 0.0 {
            return Ext::Finite(0.0);
        }
        if matches!(self.bound, Some(b) if s > b) {
            return Ext::Infinite;
        }
        if matches!(self.plateau, Some(z) if s <= z) {
            return Ext::Finite(0.0);
        }
        let n = self.s.len();
        if n == 0 {
            return Ext::Finite(self.tail.eval(s).max(0.0));
        }
        if s < self.s[0] {
            let v = match self.plateau {
                Some(z) if z < self.s[0] => self.v[0] * (s - z) / (self.s[0] - z),
                _ => self.head.eval(s).min(self.v[0]),
            };
            return Ext::Finite(v);
        }
        if s >= self.s[n - 1] {
            if s == self.s[n - 1] {
                return Ext::Finite(self.v[n - 1]);
            }
            return Ext::Finite(self.tail.eval(s).max(self.v[n - 1]));
        }
        let k = self.s.partition_point(|&x| x <= s);
        Ext::Finite(interp(self.s[k - 1], self.v[k - 1], self.s[k], self.v[k], s))
    }

    /// Generalized inverse read off the table. The returned bracket is the
    /// segment the answer lies in (`hi = ∞` past the table).
    pub fn inverse(&self, y: f64, side: Side) -> Inverse {
        self.inverse_bracket(y, side).0
    }

    pub(crate) fn inverse_bracket(&self, y: f64, side: Side) -> (Inverse, (f64, f64)) {
        let n = self.s.len();
        if y <= 0.0 {
            let z = match side {
                Side::Right => self.plateau.unwrap_or(0.0),
                Side::Left => 0.0,
            };
            return (Inverse::finite(z), (z, z));
        }
        let idx = match side {
            Side::Right => self.v.partition_point(|&v| v <= y),
            Side::Left => self.v.partition_point(|&v| v < y),
        };
        if n == 0 || idx == n {
            let start = self.s.last().copied().unwrap_or(0.0);
            return match self.tail.inverse(y) {
                Some(x) => {
                    let mut x = x.max(start);
                    if let Some(b) = self.bound {
                        x = x.min(b);
                    }
                    (Inverse::finite(x), (start, self.bound.unwrap_or(f64::INFINITY)))
                }
                None => match self.bound {
                    Some(b) => (Inverse::finite(b), (start, b)),
                    None => (Inverse { value: start, saturated: true }, (start, f64::INFINITY)),
                },
            };
        }
        if idx == 0 {
            let s0 = self.s[0];
            let x = match self.plateau {
                Some(z) if z < s0 => z + (s0 - z) * y / self.v[0],
                _ => {
                    if self.head.coeff > 0.0 && self.head.exponent > 0.0 {
                        (y / self.head.coeff).powf(1.0 / self.head.exponent).min(s0)
                    } else {
                        s0
                    }
                }
            };
            return (Inverse::finite(x), (0.0, s0));
        }
        let (sa, va, sb, vb) = (self.s[idx - 1], self.v[idx - 1], self.s[idx], self.v[idx]);
        (Inverse::finite(interp_inverse(sa, va, sb, vb, y)), (sa, sb))
    }
}

fn interp(sa: f64, va: f64, sb: f64, vb: f64, s: f64) -> f64 {
    if va > 0.0 && vb > 0.0 {
        let t = (s / sa).ln() / (sb / sa).ln();
        (va.ln() + t * (vb / va).ln()).exp().clamp(va, vb)
    } else {
        va + (vb - va) * (s - sa) / (sb - sa)
    }
}

fn interp_inverse(sa: f64, va: f64, sb: f64, vb: f64, y: f64) -> f64 {
    if vb <= va {
        return sa;
    }
    if va > 0.0 {
        let t = (y / va).ln() / (vb / va).ln();
        (sa.ln() + t * (sb / sa).ln()).exp().clamp(sa, sb)
    } else {
        sa + (sb - sa) * (y - va) / (vb - va)
    }
}

fn decade_window(s: &[f64], v: &[f64], from_top: bool) -> (Vec<f64>, Vec<f64>) {
    let pos: Vec<usize> = (0..s.len()).filter(|&k| v[k] > 0.0 && v[k].is_finite()).collect();
    if pos.is_empty() {
        return (vec![], vec![]);
    }
    let idx: Vec<usize> = if from_top {
        let top = s[*pos.last().unwrap()];
        pos.into_iter().filter(|&k| s[k] >= top / 10.0).collect()
    } else {
        let bottom = s[pos[0]];
        pos.into_iter().filter(|&k| s[k] <= bottom * 10.0).collect()
    };
    (idx.iter().map(|&k| s[k]).collect(), idx.iter().map(|&k| v[k]).collect())
}

pub(crate) fn fit_head(s: &[f64], v: &[f64]) -> PowerLaw {
    let (xs, ys) = decade_window(s, v, false);
    PowerLaw::fit(&xs, &ys).unwrap_or_else(|| match (xs.first(), ys.first()) {
        (Some(&x), Some(&y)) => PowerLaw { exponent: 1.0, coeff: y / x },
        _ => PowerLaw { exponent: 1.0, coeff: 0.0 },
    })
}

pub(crate) fn fit_tail(s: &[f64], v: &[f64]) -> PowerLaw {
    let (xs, ys) = decade_window(s, v, true);
    PowerLaw::fit(&xs, &ys).unwrap_or_else(|| match (xs.last(), ys.last()) {
        (Some(&x), Some(&y)) => PowerLaw { exponent: 1.0, coeff: y / x },
        _ => PowerLaw { exponent: 1.0, coeff: 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_table() -> SampleTable {
        let s = Grid::new(1e-2, 1e2, 41).points();
        let v = s.iter().map(|x| x * x).collect();
        SampleTable::fitted(s, v, None, None)
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let s: Vec<f64> = (1..20).map(|k| k as f64).collect();
        let v: Vec<f64> = s.iter().map(|x| 3.0 * x.powf(2.5)).collect();
        let p = PowerLaw::fit(&s, &v).unwrap();
        assert!((p.exponent - 2.5).abs() < 1e-12);
        assert!((p.coeff - 3.0).abs() < 1e-10);
    }

    #[test]
    fn loglog_interpolation_is_exact_for_powers() {
        let t = square_table();
        for &x in &[0.005, 0.0123, 1.7, 33.3, 250.0] {
            let v = t.eval(x).finite().unwrap();
            assert!((v / (x * x) - 1.0).abs() < 1e-12, "{x}: {v}");
        }
    }

    #[test]
    fn inverse_sides_agree_where_strict() {
        let t = square_table();
        for &y in &[1e-5, 0.3, 4.0, 1e5] {
            let l = t.inverse(y, Side::Left).value;
            let r = t.inverse(y, Side::Right).value;
            assert!((l - y.sqrt()).abs() < 1e-10 * y.sqrt());
            assert!((l - r).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn plateau_and_bound() {
        // zero on [0, 1], +∞ beyond 1: conjugate of s ↦ s
        let s = Grid::new(1e-3, 1.0, 10).points();
        let v = vec![0.0; s.len()];
        let mut t = SampleTable::fitted(s, v, Some(1.0), Some(1.0));
        t.tail = Tail::Power(PowerLaw { exponent: 1.0, coeff: 0.0 });
        assert_eq!(t.eval(0.5), Ext::Finite(0.0));
        assert_eq!(t.eval(2.0), Ext::Infinite);
        assert_eq!(t.inverse(0.5, Side::Right).value, 1.0);
        assert_eq!(t.inverse(0.0, Side::Right).value, 1.0);
        assert_eq!(t.inverse(0.0, Side::Left).value, 0.0);
    }

    #[test]
    fn bounded_tail_saturates() {
        let s = vec![1.0, 2.0, 4.0];
        let v = vec![0.5, 0.75, 0.875];
        let mut t = SampleTable::fitted(s, v, None, None);
        t.tail = Tail::Bounded { sup: 1.0, coeff: 0.5, decay: 1.0 };
        assert!((t.eval(8.0).finite().unwrap() - 0.9375).abs() < 1e-15);
        let inv = t.inverse(0.9375, Side::Right);
        assert!(!inv.saturated && (inv.value - 8.0).abs() < 1e-12);
        let sat = t.inverse(1.5, Side::Right);
        assert!(sat.saturated);
        assert_eq!(sat.ext(), Ext::Infinite);
    }
}
