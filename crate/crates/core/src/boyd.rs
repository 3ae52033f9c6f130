//! Local upper Boyd index and the growth conditions equivalent to
//! `I_A < 1/α`.
//!
//! `h_A(t) = limsup_{s→∞} A⁻¹(st)/A⁻¹(s)` cannot be read off finitely many
//! samples. It is estimated as the largest ratio over the last three
//! decades of a probe window, with each decade's maximum kept for a
//! stability check. Closed-form functions are probed far out (values up to
//! `10^D`, `D = min(100, ⌊250/q⌋)` for tail exponent `q`) where slowly
//! varying factors have settled; tables are probed on their own last three
//! decades.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::quad;
use crate::young::{conjugate, Ext, Grid, Monotone, Side, YoungFunction};
use crate::{Error, Result};

/// Decade maxima may differ by this much before an estimate is unstable.
pub const STABILITY_TOL: f64 = 0.05;
/// `|I_A − threshold|` below this is reported as a boundary case.
pub const BOUNDARY_TOL: f64 = 0.05;

const T_COUNT: usize = 64;
const PER_DECADE: usize = 16;

/// Verdict for a query `I_A < threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexVerdict {
    Below,
    NotBelow,
    Boundary,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct HEstimate {
    pub t: f64,
    pub h: f64,
    pub decade_max: [f64; 3],
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoydEstimate {
    pub index: f64,
    /// Every `h(t)` estimate passed the decade check.
    pub stable: bool,
    /// `[t, h(t)]`.
    pub table: Vec<[f64; 2]>,
    pub unstable_count: usize,
    /// Threshold (as written) → verdict.
    pub verdicts: BTreeMap<String, IndexVerdict>,
    /// Values `[lo, hi]` of `A` spanned by the probe window.
    pub window: [f64; 2],
}

impl BoydEstimate {
    pub fn verdict(&self, threshold: f64) -> IndexVerdict {
        if self.unstable_count == self.table.len() {
            IndexVerdict::Indeterminate
        } else if (self.index - threshold).abs() < BOUNDARY_TOL {
            IndexVerdict::Boundary
        } else if self.index < threshold {
            IndexVerdict::Below
        } else {
            IndexVerdict::NotBelow
        }
    }

    /// Records verdicts for the given thresholds.
    pub fn with_verdicts(mut self, thresholds: &[f64]) -> Self {
        for &th in thresholds {
            let v = self.verdict(th);
            self.verdicts.insert(th.to_string(), v);
        }
        self
    }
}

/// Value window `[10^{D−3}, 10^D]` used for the limsup.
fn value_window(a: &YoungFunction) -> Result<(f64, f64)> {
    if a.is_exact() && a.finite_domain_bound().is_none() {
        let q = a.tail_exponent().max(1.0);
        let d = (250.0 / q).floor().min(100.0);
        return Ok((10f64.powf(d - 3.0), 10f64.powf(d)));
    }
    let v = a.table().values();
    let hi = v.iter().copied().rev().find(|x| x.is_finite() && *x > 0.0);
    match hi {
        Some(hi) => Ok((hi / 1e3, hi)),
        None => Err(Error::InvalidArgument(format!("{}: no positive samples to probe", a.label()))),
    }
}

fn inv(a: &YoungFunction, y: f64) -> f64 {
    a.inverse(y, Side::Right).value
}

/// `h_A(t)` with its per-decade maxima.
pub fn h_upper(a: &YoungFunction, t: f64) -> Result<HEstimate> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("t must lie in (0,1), got {t}")));
    }
    let (lo, _) = value_window(a)?;
    Ok(h_in_window(a, t, lo))
}

fn h_in_window(a: &YoungFunction, t: f64, lo: f64) -> HEstimate {
    let mut decade_max = [0.0f64; 3];
    for (d, slot) in decade_max.iter_mut().enumerate() {
        let start = lo * 10f64.powi(d as i32);
        for k in 0..=PER_DECADE {
            let s = start * 10f64.powf(k as f64 / PER_DECADE as f64);
            let den = inv(a, s);
            if den > 0.0 {
                *slot = slot.max(inv(a, s * t) / den);
            }
        }
    }
    let h = decade_max.iter().copied().fold(0.0, f64::max);
    let mn = decade_max.iter().copied().fold(f64::INFINITY, f64::min);
    let stable = mn > 0.0 && h / mn - 1.0 <= STABILITY_TOL;
    HEstimate { t, h, decade_max, stable }
}

/// `I_A = inf_{0<t<1} log t / log h_A(t)` over 64 geometric `t ∈ (10⁻³, 1)`.
pub fn boyd_upper_index(a: &YoungFunction) -> Result<BoydEstimate> {
    let (lo, hi) = value_window(a)?;
    let ts: Vec<f64> = (0..T_COUNT).map(|k| 10f64.powf(-3.0 + 3.0 * (k as f64 + 0.5) / T_COUNT as f64)).collect();
    let est: Vec<HEstimate> = ts.iter().map(|&t| h_in_window(a, t, lo)).collect();
    let index = est
        .iter()
        .filter(|e| e.h > 0.0 && e.h < 1.0)
        .map(|e| e.t.ln() / e.h.ln())
        .fold(f64::INFINITY, f64::min);
    let unstable_count = est.iter().filter(|e| !e.stable).count();
    Ok(BoydEstimate {
        index,
        stable: unstable_count == 0,
        table: est.iter().map(|e| [e.t, e.h]).collect(),
        unstable_count,
        verdicts: BTreeMap::new(),
        window: [lo, hi],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Integral form with `k ∈ {2, 4, …, 2¹⁰}`.
    Ii,
    /// `A(σt) ≤ cσ^{1/α}A(t)`, `σ ∈ {2,4,8,16}`, `c ∈ (0,1)`.
    Iii,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthCondition {
    pub variant: Variant,
    pub alpha: f64,
    pub pass: bool,
    pub sigma: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<f64>,
    /// Arguments `[lo, hi]` where the inequality was required.
    pub range: [f64; 2],
}

/// Checks condition (ii) or (iii) near infinity.
pub fn growth_condition(a: &YoungFunction, alpha: f64, variant: Variant) -> Result<GrowthCondition> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("α must lie in (0,1), got {alpha}")));
    }
    match variant {
        Variant::Iii => Ok(condition_iii(a, alpha)?),
        Variant::Ii => condition_ii(a, alpha),
    }
}

fn tail_arguments(a: &YoungFunction) -> Result<Vec<f64>> {
    let (lo, hi) = if a.is_exact() && a.finite_domain_bound().is_none() {
        let (vlo, vhi) = value_window(a)?;
        (inv(a, vlo), inv(a, vhi))
    } else {
        let hi = a.table().last_abscissa().unwrap_or(1.0);
        (hi / 1e3, hi)
    };
    Ok(Grid::new(lo, hi, 3 * PER_DECADE + 1).points())
}

fn condition_iii(a: &YoungFunction, alpha: f64) -> Result<GrowthCondition> {
    let xs = tail_arguments(a)?;
    let range = [xs[0], *xs.last().unwrap()];
    let e = 1.0 / alpha;
    for sigma in [2.0, 4.0, 8.0, 16.0f64] {
        let mut worst = 0.0f64;
        for &x in &xs {
            let (Ext::Finite(num), Ext::Finite(den)) = (a.value(sigma * x), a.value(x)) else {
                worst = f64::INFINITY;
                break;
            };
            worst = worst.max(num / (sigma.powf(e) * den));
        }
        if let Some(c) = (1..=256).rev().map(|j| 2f64.powf(-(j as f64) / 8.0)).find(|&c| worst <= c * (1.0 + 1e-9)) {
            return Ok(GrowthCondition {
                variant: Variant::Iii,
                alpha,
                pass: true,
                sigma: Some(sigma),
                c: Some(c),
                k: None,
                range,
            });
        }
    }
    Ok(GrowthCondition { variant: Variant::Iii, alpha, pass: false, sigma: None, c: None, k: None, range })
}

fn condition_ii(a: &YoungFunction, alpha: f64) -> Result<GrowthCondition> {
    let conj = conjugate(a)?;
    let beta = 1.0 / (1.0 - alpha);
    let hi = match conj.finite_domain_bound() {
        Some(b) => b,
        None => conj.table().last_abscissa().unwrap_or(1.0),
    };
    let lo = (hi / 1e3).max(2.0);
    if hi <= lo {
        return Err(Error::InvalidArgument("conjugate table too short for a tail window".into()));
    }
    let ts = Grid::new(lo, hi, 3 * PER_DECADE + 1).points();
    let g = |u: f64| conj.value(u.exp()).finite().unwrap_or(f64::INFINITY) * (-beta * u).exp();
    let head = quad::integrate(g, 0.0, ts[0].ln(), 1e-10, 0.0);
    let mut lhs = Vec::with_capacity(ts.len());
    let mut acc = head;
    lhs.push(acc);
    for w in ts.windows(2) {
        acc += quad::integrate(g, w[0].ln(), w[1].ln(), 1e-10, 0.0);
        lhs.push(acc);
    }
    let range = [ts[0], *ts.last().unwrap()];
    for j in 1..=10 {
        let k = 2f64.powi(j);
        let ok = ts.iter().zip(&lhs).all(|(&t, &l)| match conj.value(k * t) {
            Ext::Finite(v) => l <= v / t.powf(beta) * (1.0 + 1e-9),
            Ext::Infinite => true,
        });
        if ok {
            return Ok(GrowthCondition { variant: Variant::Ii, alpha, pass: true, sigma: None, c: None, k: Some(k), range });
        }
    }
    Ok(GrowthCondition { variant: Variant::Ii, alpha, pass: false, sigma: None, c: None, k: None, range })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(p: f64) -> YoungFunction {
        YoungFunction::power(p).unwrap()
    }

    #[test]
    fn h_of_square() {
        let e = h_upper(&power(2.0), 0.25).unwrap();
        assert!((e.h - 0.5).abs() < 1e-9 && e.stable);
        let near_one = h_upper(&power(2.0), 0.999).unwrap();
        assert!((near_one.h - 1.0).abs() < 1e-3);
        assert!(h_upper(&power(2.0), 1.5).is_err());
    }

    #[test]
    fn h_of_square_log() {
        let e = h_upper(&YoungFunction::power_log(2.0, 1.0).unwrap(), 0.25).unwrap();
        assert!((e.h - 0.5).abs() < 0.02, "{}", e.h);
    }

    #[test]
    fn index_of_powers_and_linear() {
        for p in [1.5, 2.0, 3.0] {
            let b = boyd_upper_index(&power(p)).unwrap();
            assert!((b.index / p - 1.0).abs() < 0.02, "{p}: {}", b.index);
            assert!(b.stable);
        }
        let lin = boyd_upper_index(&YoungFunction::linear()).unwrap();
        assert!((lin.index - 1.0).abs() < 1e-6);
        let pl = boyd_upper_index(&YoungFunction::power_log(2.0, 1.0).unwrap()).unwrap();
        assert!((pl.index / 2.0 - 1.0).abs() < 0.02, "{}", pl.index);
    }

    #[test]
    fn index_table_respects_bounds() {
        let b = boyd_upper_index(&YoungFunction::power_log(1.5, 2.0).unwrap()).unwrap();
        assert!(b.index >= 1.0);
        assert!(b.table.iter().all(|p| p[1] <= 1.0));
    }

    #[test]
    fn verdicts() {
        let b = boyd_upper_index(&power(2.0)).unwrap().with_verdicts(&[3.0, 2.0, 1.5]);
        assert_eq!(b.verdicts["3"], IndexVerdict::Below);
        assert_eq!(b.verdicts["2"], IndexVerdict::Boundary);
        assert_eq!(b.verdicts["1.5"], IndexVerdict::NotBelow);
    }

    #[test]
    fn condition_iii_examples() {
        let g = growth_condition(&power(2.0), 1.0 / 3.0, Variant::Iii).unwrap();
        assert!(g.pass);
        assert_eq!(g.sigma, Some(2.0));
        assert_eq!(g.c, Some(0.5));
        assert!(!growth_condition(&power(3.0), 1.0 / 3.0, Variant::Iii).unwrap().pass);
        assert!(growth_condition(&power(2.0), 1.0, Variant::Iii).is_err());
    }

    #[test]
    fn condition_ii_matches_index() {
        assert!(growth_condition(&power(2.0), 0.2, Variant::Ii).unwrap().pass);
        assert!(!growth_condition(&power(3.0), 0.6, Variant::Ii).unwrap().pass);
    }
}
