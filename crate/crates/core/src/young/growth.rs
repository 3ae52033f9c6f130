//! The averaged function `Ā` and growth comparison.

use serde::Serialize;

use super::table::{SampleTable, Tail};
use super::{clamp_young_extrapolation, Ext, Monotone, YoungFunction};
use crate::quad;
use crate::{Error, Result};

/// `Ā(s) = ∫₀ˢ A(r)/r dr`, tabulated on the abscissae of `A`.
pub fn integral_mean(a: &YoungFunction) -> Result<YoungFunction> {
    let xs = a.table.s.clone();
    let g = |u: f64| a.value(u.exp()).finite().unwrap_or(f64::INFINITY);
    let vs = quad::cumulative_log(g, &xs, 1e-11)
        .ok_or_else(|| Error::InvalidYoung(format!("{}: A(s)/s is not integrable at 0", a.label)))?;
    let mut t = SampleTable::fitted(xs, vs, a.table.plateau, a.table.bound);
    clamp_young_extrapolation(&mut t);
    YoungFunction::from_parts(format!("mean({})", a.label), t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum GrowthMode {
    Global,
    /// Only `s ≥ threshold` is examined.
    NearInfinity { threshold: f64 },
}

impl GrowthMode {
    pub fn near_infinity() -> Self {
        GrowthMode::NearInfinity { threshold: 1.0 }
    }
}

/// Whether `A(s) ≤ B(cs)` over the required range.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Dominance {
    /// Smallest passing constant on the `2^{k/4}` lattice.
    Holds { c: f64 },
    /// An `s` where `A(s) > B(2²⁰ s)`; `diverging` when the witness comes
    /// from the tails rather than the samples.
    Fails { witness: f64, diverging: bool },
    Inconclusive { reason: String },
}

impl Dominance {
    pub fn holds(&self) -> bool {
        matches!(self, Dominance::Holds { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthComparison {
    pub mode: GrowthMode,
    /// `A(s) ≤ B(cs)`.
    pub b_dominates_a: Dominance,
    /// `B(s) ≤ A(cs)`.
    pub a_dominates_b: Dominance,
    pub equivalent: bool,
}

const C_STEPS: std::ops::RangeInclusive<i32> = -80..=80;
const EXP_TOL: f64 = 1e-3;

/// Compares growth in both directions.
pub fn compare_growth(a: &YoungFunction, b: &YoungFunction, mode: GrowthMode) -> GrowthComparison {
    let b_dom = dominates(b, a, mode);
    let a_dom = dominates(a, b, mode);
    let equivalent = b_dom.holds() && a_dom.holds();
    GrowthComparison { mode, b_dominates_a: b_dom, a_dominates_b: a_dom, equivalent }
}

fn in_range(mode: GrowthMode, s: f64) -> bool {
    match mode {
        GrowthMode::Global => true,
        GrowthMode::NearInfinity { threshold } => s >= threshold,
    }
}

/// Does `big` dominate `small`: `small(s) ≤ big(cs)`?
fn dominates(big: &YoungFunction, small: &YoungFunction, mode: GrowthMode) -> Dominance {
    let samples: Vec<(f64, f64)> = small
        .table
        .s
        .iter()
        .zip(&small.table.v)
        .filter(|(s, _)| in_range(mode, **s))
        .map(|(s, v)| (*s, *v))
        .collect();
    if samples.is_empty() {
        return Dominance::Inconclusive { reason: "no samples in range".into() };
    }
    let c_max = 2f64.powi(20);
    let (ps, pb) = (small.tail_exponent(), big.tail_exponent());
    let bounded = big.table.bound.is_some() || small.table.bound.is_some();
    if !bounded && ps > pb + EXP_TOL {
        return Dominance::Fails { witness: tail_crossing(small.tail(), big.tail(), c_max, &samples), diverging: true };
    }
    if mode == GrowthMode::Global {
        let (hs, hb) = (small.head(), big.head());
        if hs.exponent < hb.exponent - EXP_TOL && hs.coeff > 0.0 && hb.coeff > 0.0 {
            let x = (hb.coeff * c_max.powf(hb.exponent) / hs.coeff).powf(1.0 / (hs.exponent - hb.exponent));
            return Dominance::Fails { witness: x.min(samples[0].0), diverging: true };
        }
    }
    let passes = |c: f64| {
        samples.iter().all(|&(s, v)| match big.value(c * s) {
            Ext::Finite(w) => v <= w * (1.0 + 1e-12),
            Ext::Infinite => true,
        })
    };
    if let Some(k) = C_STEPS.clone().find(|&k| passes(2f64.powf(k as f64 / 4.0))) {
        if !bounded && (ps - pb).abs() <= EXP_TOL && oscillates(big, &samples) {
            return Dominance::Inconclusive { reason: "equal tail exponents with oscillating ratio".into() };
        }
        return Dominance::Holds { c: 2f64.powf(k as f64 / 4.0) };
    }
    let witness = samples
        .iter()
        .find(|&&(s, v)| matches!(big.value(c_max * s), Ext::Finite(w) if v > w))
        .map(|p| p.0)
        .unwrap_or(samples[0].0);
    Dominance::Fails { witness, diverging: false }
}

/// First `s` beyond which the tail laws give `small(s) > big(c s)`.
fn tail_crossing(small: Tail, big: Tail, c: f64, samples: &[(f64, f64)]) -> f64 {
    let last = samples.last().unwrap().0;
    match (small, big) {
        (Tail::Power(a), Tail::Power(b)) if a.coeff > 0.0 && b.coeff > 0.0 => {
            let x = (b.coeff * c.powf(b.exponent) / a.coeff).powf(1.0 / (a.exponent - b.exponent));
            if x.is_finite() {
                x.max(last)
            } else {
                f64::MAX
            }
        }
        _ => last,
    }
}

/// True when `small(s)/big(s)` changes direction more than once over the
/// last decade of samples.
fn oscillates(big: &YoungFunction, samples: &[(f64, f64)]) -> bool {
    let top = samples.last().unwrap().0;
    let ratios: Vec<f64> = samples
        .iter()
        .filter(|p| p.0 >= top / 10.0)
        .filter_map(|&(s, v)| big.value(s).finite().filter(|w| *w > 0.0).map(|w| v / w))
        .collect();
    let mut turns = 0;
    let mut dir = 0i8;
    for w in ratios.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= 1e-9 * w[0].abs() {
            continue;
        }
        let nd = if d > 0.0 { 1 } else { -1 };
        if dir != 0 && nd != dir {
            turns += 1;
        }
        dir = nd;
    }
    turns >= 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(f: &YoungFunction, s: f64) -> f64 {
        f.eval(s).unwrap().finite().unwrap()
    }

    #[test]
    fn mean_of_square_and_cube() {
        let m2 = integral_mean(&YoungFunction::power(2.0).unwrap()).unwrap();
        assert!((val(&m2, 2.0) - 2.0).abs() < 1e-9);
        let m3 = integral_mean(&YoungFunction::power(3.0).unwrap()).unwrap();
        assert!((val(&m3, 2.0) - 8.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn comparison_sandwich_at_one() {
        let a = YoungFunction::power(2.0).unwrap();
        let m = integral_mean(&a).unwrap();
        assert!((val(&m, 1.0) - 0.5).abs() < 1e-9);
        assert!(val(&m, 1.0) <= val(&a, 1.0) && val(&a, 1.0) <= val(&m, 2.0) + 1e-9);
    }

    #[test]
    fn cube_dominates_square_near_infinity() {
        let a = YoungFunction::power(2.0).unwrap();
        let b = YoungFunction::power(3.0).unwrap();
        let cmp = compare_growth(&a, &b, GrowthMode::near_infinity());
        assert_eq!(cmp.b_dominates_a, Dominance::Holds { c: 1.0 });
        assert!(!cmp.equivalent);
        assert!(!compare_growth(&a, &b, GrowthMode::Global).b_dominates_a.holds());
    }

    #[test]
    fn reflexive() {
        let a = YoungFunction::power(2.0).unwrap();
        for mode in [GrowthMode::Global, GrowthMode::near_infinity()] {
            let cmp = compare_growth(&a, &a, mode);
            assert!(cmp.equivalent);
            assert_eq!(cmp.b_dominates_a, Dominance::Holds { c: 1.0 });
        }
    }

    #[test]
    fn log_factor_defeats_square() {
        let a = YoungFunction::power_log(2.0, 1.0).unwrap();
        let b = YoungFunction::power(2.0).unwrap();
        let cmp = compare_growth(&a, &b, GrowthMode::near_infinity());
        match cmp.b_dominates_a {
            Dominance::Fails { witness, diverging } => {
                assert!(diverging);
                // beyond the witness, A(s) > B(2²⁰ s) by the tail laws
                assert!(witness > 1e8);
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(cmp.a_dominates_b.holds());
    }
}
