//! Optimal Orlicz–Sobolev targets and the auxiliary scales of the
//! necessity argument.
//!
//! With `ν = n/(n−m)` (so `ν = n'` for first order):
//!
//! ```text
//! Φ_ν(s) = ∫₀ˢ Ã(t) t^{−1−ν} dt        C_ν(s) = s^ν (Φ_ν⁻¹(s^ν))^ν
//! A_n(s) = ∫₀ˢ C_{n'}(t)/t dt          D_n(s) = s^{n'} Φ_n(s)
//! H(r)   = (∫₀ʳ (t/A(t))^{m/(n−m)} dt)^{(n−m)/n}     A_{n/m} = A ∘ H⁻¹
//! ```

use serde::Serialize;

use crate::quad::{self, GateOutcome};
use crate::young::{
    clamp_young_extrapolation, compare_growth, conjugate, Ext, Grid, GrowthMode, Monotone, MonotoneFunction,
    PowerLaw, SampleTable, Side, Tail, YoungFunction,
};
use crate::{Error, Result};

/// Dimension and order of the embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingContext {
    pub n: u32,
    pub m: u32,
}

impl EmbeddingContext {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n < 2 || m < 1 || m >= n {
            return Err(Error::InvalidArgument(format!("need n ≥ 2 and 1 ≤ m < n, got n = {n}, m = {m}")));
        }
        Ok(EmbeddingContext { n, m })
    }

    pub fn first_order(n: u32) -> Result<Self> {
        Self::new(n, 1)
    }

    /// `n' = n/(n−1)`.
    pub fn n_prime(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 1.0)
    }

    /// `ν = n/(n−m)`.
    pub fn nu(&self) -> f64 {
        self.n as f64 / (self.n - self.m) as f64
    }

    /// `n/m`, the Boyd threshold.
    pub fn critical_index(&self) -> f64 {
        self.n as f64 / self.m as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GateReport {
    /// `∫₀ (s/A(s))^{m/(n−m)} ds < ∞`.
    pub primal: GateOutcome,
    /// `∫₀ Ã(t)/t^{1+ν} dt < ∞`.
    pub dual: GateOutcome,
    pub pass: bool,
    pub agree: bool,
}

/// Convergence near zero of both equivalent integrability conditions.
pub fn integrability_gate(a: &YoungFunction, ctx: EmbeddingContext) -> Result<GateReport> {
    let conj = conjugate(a)?;
    Ok(gate_with_conjugate(a, &conj, ctx))
}

pub(crate) fn gate_with_conjugate(a: &YoungFunction, conj: &YoungFunction, ctx: EmbeddingContext) -> GateReport {
    let k = ctx.m as f64 / (ctx.n - ctx.m) as f64;
    let primal = quad::gate(|u: f64| primal_integrand(a, k, u));
    let nu = ctx.nu();
    let dual = quad::gate(|u: f64| conj.value(u.exp()).finite().unwrap_or(f64::INFINITY) * (-nu * u).exp());
    GateReport { pass: primal.converged && dual.converged, agree: primal.converged == dual.converged, primal, dual }
}

/// `(t/A(t))^k · t` at `t = eᵘ`.
fn primal_integrand(a: &YoungFunction, k: f64, u: f64) -> f64 {
    let t = u.exp();
    match a.value(t) {
        Ext::Finite(v) if v > 0.0 => (t / v).powf(k) * t,
        Ext::Finite(_) => f64::INFINITY,
        Ext::Infinite => 0.0,
    }
}

fn require_gate(g: &GateReport) -> Result<()> {
    if g.pass {
        return Ok(());
    }
    let side = if !g.primal.converged { &g.primal } else { &g.dual };
    Err(Error::GateFailed(format!(
        "integral near 0 does not converge (integrand decay rate {:.4}, partial integrals {:?})",
        side.rate, side.partials
    )))
}

/// Everything derived from `A` for a fixed context.
#[derive(Clone, Debug)]
pub struct Scales {
    pub ctx: EmbeddingContext,
    pub conjugate: YoungFunction,
    pub gate: GateReport,
    /// `Φ_ν`.
    pub phi: MonotoneFunction,
}

impl Scales {
    pub fn new(a: &YoungFunction, ctx: EmbeddingContext) -> Result<Self> {
        let conj = conjugate(a)?;
        let gate = gate_with_conjugate(a, &conj, ctx);
        require_gate(&gate)?;
        let phi = phi_from_conjugate(&conj, ctx.nu())?;
        Ok(Scales { ctx, conjugate: conj, gate, phi })
    }

    /// `C_ν(s) = s^ν (Φ⁻¹_left(s^ν))^ν`.
    pub fn c_value(&self, s: f64) -> Ext {
        let nu = self.ctx.nu();
        let inv = self.phi.inverse(s.powf(nu), Side::Left);
        if inv.saturated {
            return Ext::Infinite;
        }
        Ext::Finite(s.powf(nu) * inv.value.powf(nu))
    }
}

/// `Φ_n` for the first-order context, `Φ_{n/m}` otherwise.
pub fn phi_n(a: &YoungFunction, ctx: EmbeddingContext) -> Result<MonotoneFunction> {
    Ok(Scales::new(a, ctx)?.phi)
}

/// `∫₀ˢ Ã(t) t^{−1−ν} dt` on the default grid.
pub(crate) fn phi_from_conjugate(conj: &YoungFunction, nu: f64) -> Result<MonotoneFunction> {
    let bound = conj.finite_domain_bound();
    let plateau = conj.zero_plateau_bound();
    let mut xs: Vec<f64> = Grid::default().points();
    if let Some(b) = bound {
        xs.retain(|&s| s < b);
        xs.push(b);
    }
    let g = |u: f64| conj.value(u.exp()).finite().unwrap_or(f64::INFINITY) * (-nu * u).exp();
    let mut vs = quad::cumulative_log(g, &xs, 1e-11)
        .ok_or_else(|| Error::GateFailed("Ã(t)/t^{1+ν} is not integrable at 0".into()))?;
    // overflowing values mark the end of the usable range
    let keep = vs.iter().position(|v| !v.is_finite() || *v > 1e300).unwrap_or(vs.len());
    xs.truncate(keep);
    vs.truncate(keep);
    let mut t = SampleTable::fitted(xs, vs, plateau, bound);
    if bound.is_none() {
        t.tail = phi_tail(conj, nu, &t);
    }
    MonotoneFunction::new(format!("Phi[{nu}]({})", conj.label()), t)
}

/// `Φ` grows like `s^{q−ν}` when the conjugate grows like `t^q`; for
/// `q < ν` it converges to a finite supremum.
fn phi_tail(conj: &YoungFunction, nu: f64, t: &SampleTable) -> Tail {
    let (Some(&s_last), Some(&v_last)) = (t.abscissae().last(), t.values().last()) else {
        return t.tail();
    };
    match conj.tail() {
        Tail::Power(p) if p.exponent < nu - 1e-3 && p.coeff > 0.0 => {
            let decay = nu - p.exponent;
            let coeff = p.coeff / decay;
            Tail::Bounded { sup: v_last + coeff * s_last.powf(-decay), coeff, decay }
        }
        _ => t.tail(),
    }
}

/// `A_n(s) = ∫₀ˢ r^{n'−1} (Φ_n⁻¹(r^{n'}))^{n'} dr` (left inverse).
pub fn first_order_target(a: &YoungFunction, ctx: EmbeddingContext) -> Result<YoungFunction> {
    if ctx.m != 1 {
        return Err(Error::InvalidArgument("first-order target needs m = 1".into()));
    }
    first_order_target_from(&Scales::new(a, ctx)?, a.label())
}

pub(crate) fn first_order_target_from(sc: &Scales, label: &str) -> Result<YoungFunction> {
    let np = sc.ctx.n_prime();
    let sup = sc.phi.supremum();
    let bound = sup.map(|y| y.powf(1.0 / np));
    let mut xs = Grid::default().points();
    if let Some(b) = bound {
        xs.retain(|&s| s < b * (1.0 - 1e-9));
    }
    let g = |u: f64| match sc.c_value(u.exp()) {
        Ext::Finite(c) => c,
        Ext::Infinite => f64::INFINITY,
    };
    let vs = quad::cumulative_log(g, &xs, 1e-11)
        .ok_or_else(|| Error::GateFailed("A_n integrand does not decay at 0".into()))?;
    target_table(format!("A_n({label})"), xs, vs, bound)
}

fn target_table(label: String, mut xs: Vec<f64>, mut vs: Vec<f64>, bound: Option<f64>) -> Result<YoungFunction> {
    let keep = vs.iter().position(|v| !v.is_finite() || *v > 1e300).unwrap_or(vs.len());
    xs.truncate(keep);
    vs.truncate(keep);
    let mut t = SampleTable::fitted(xs, vs, None, bound);
    clamp_young_extrapolation(&mut t);
    YoungFunction::from_parts(label, t)
}

/// Glue points and the glued target `Ā_n`.
#[derive(Clone, Debug)]
pub struct Glue {
    pub target: YoungFunction,
    pub s1: f64,
    pub s2: f64,
    /// Slope of the affine bridge.
    pub slope: f64,
}

/// `Ā_n`: `A` on `[0,s₁]`, affine on `[s₁,s₂]`, `A_n` on `[s₂,∞)`.
///
/// `s₁` runs over the samples of `A`; for each, `s₂` is the first sample
/// of `A_n` beyond it whose chord slope lies between the right difference
/// quotient of `A` at `s₁` and the left one of `A_n` at `s₂`.
pub fn glue_target(a: &YoungFunction, an: &YoungFunction) -> Result<Glue> {
    const DELTA: f64 = 1e-6;
    let right_slope = |f: &YoungFunction, s: f64| -> Option<f64> {
        let (x, y) = (f.value(s).finite()?, f.value(s * (1.0 + DELTA)).finite()?);
        Some((y - x) / (s * DELTA))
    };
    let left_slope = |f: &YoungFunction, s: f64| -> Option<f64> {
        let (x, y) = (f.value(s * (1.0 - DELTA)).finite()?, f.value(s).finite()?);
        Some((y - x) / (s * DELTA))
    };
    let s2_grid = an.table().abscissae();
    for &s1 in a.table().abscissae() {
        let (Some(a1), Some(da)) = (a.value(s1).finite(), right_slope(a, s1)) else { continue };
        let start = s2_grid.partition_point(|&x| x <= s1);
        for &s2 in &s2_grid[start..] {
            let (Some(b2), Some(db)) = (an.value(s2).finite(), left_slope(an, s2)) else { break };
            let chord = (b2 - a1) / (s2 - s1);
            if da <= chord && chord <= db {
                let target = YoungFunction::glued(a, an, s1, s2, s2_grid)?;
                return Ok(Glue { target, s1, s2, slope: chord });
            }
        }
    }
    Err(Error::GlueFailed(format!("no convex bridge between {} and {} on the sample grid", a.label(), an.label())))
}

/// First-order pipeline output.
#[derive(Clone, Debug)]
pub struct FirstOrder {
    pub scales: Scales,
    pub a_n: YoungFunction,
    pub glue: Glue,
}

impl FirstOrder {
    pub fn build(a: &YoungFunction, n: u32) -> Result<Self> {
        let scales = Scales::new(a, EmbeddingContext::first_order(n)?)?;
        let a_n = first_order_target_from(&scales, a.label())?;
        let glue = glue_target(a, &a_n)?;
        Ok(FirstOrder { scales, a_n, glue })
    }

    /// `Ā_n`.
    pub fn target(&self) -> &YoungFunction {
        &self.glue.target
    }
}

/// `A_{n/m}` with the scale `H` it was built from.
#[derive(Clone, Debug)]
pub struct HigherOrder {
    pub target: YoungFunction,
    pub h: MonotoneFunction,
    /// `H` is bounded: the target is `+∞` beyond `sup H` (`pm ≥ n` for powers).
    pub essentially_bounded: bool,
}

/// `A_{n/m} = A ∘ H⁻¹_left`.
pub fn higher_order_target(a: &YoungFunction, ctx: EmbeddingContext) -> Result<HigherOrder> {
    let conj = conjugate(a)?;
    require_gate(&gate_with_conjugate(a, &conj, ctx))?;
    let h = h_scale(a, ctx)?;
    let sup = h.supremum();
    let mut xs = Grid::default().points();
    if let Some(b) = sup {
        xs.retain(|&s| s < b * (1.0 - 1e-9));
    }
    let mut vs = Vec::with_capacity(xs.len());
    for &s in &xs {
        let r = h.inverse(s, Side::Left);
        if r.saturated {
            break;
        }
        match a.value(r.value) {
            Ext::Finite(v) if v.is_finite() => vs.push(v),
            _ => break,
        }
    }
    xs.truncate(vs.len());
    let label = format!("A_{{{}/{}}}({})", ctx.n, ctx.m, a.label());
    let target = target_table(label, xs, vs, sup)?;
    Ok(HigherOrder { target, h, essentially_bounded: sup.is_some() })
}

/// `H_{n/m}(r) = (∫₀ʳ (t/A(t))^{m/(n−m)} dt)^{(n−m)/n}`.
pub fn h_scale(a: &YoungFunction, ctx: EmbeddingContext) -> Result<MonotoneFunction> {
    let k = ctx.m as f64 / (ctx.n - ctx.m) as f64;
    let outer = 1.0 / ctx.nu();
    let xs = Grid::default().points();
    let inner = quad::cumulative_log(|u: f64| primal_integrand(a, k, u), &xs, 1e-11)
        .ok_or_else(|| Error::GateFailed("(t/A(t))^{m/(n−m)} is not integrable at 0".into()))?;
    if inner.iter().any(|v| !v.is_finite()) {
        return Err(Error::GateFailed("(t/A(t))^{m/(n−m)} is not integrable at 0".into()));
    }
    let vs: Vec<f64> = inner.iter().map(|v| v.powf(outer)).collect();
    let mut t = SampleTable::fitted(xs.clone(), vs, None, None);
    // integrand ~ t^{(1−q)k} at infinity: integrable iff (q−1)k > 1
    if let Tail::Power(p) = a.tail() {
        let e = (1.0 - p.exponent) * k + 1.0;
        if e < -1e-6 && p.coeff > 0.0 {
            let s_last = *xs.last().unwrap();
            let i_last = *inner.last().unwrap();
            let c = p.coeff.powf(-k);
            let rest = c * s_last.powf(e) / -e;
            let total = i_last + rest;
            // sup − coeff·s^{−decay} matched to the first-order expansion of total^{outer}
            let decay = -e;
            let coeff = outer * total.powf(outer - 1.0) * c / decay;
            t.tail = Tail::Bounded { sup: total.powf(outer), coeff, decay };
        }
    }
    MonotoneFunction::new(format!("H[{}/{}]({})", ctx.n, ctx.m, a.label()), t)
}

/// Output of the scale checks.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleReport {
    pub ctx: EmbeddingContext,
    /// Worst relative deviation in `C⁻¹(r) = r^{1/n'}/D⁻¹(r)` and where (m = 1).
    pub c_inverse_error: Option<(f64, f64)>,
    /// Worst violation of `C(s/2) ≤ A_n(s) ≤ C(s)` (relative), m = 1.
    pub sandwich_violation: Option<(f64, f64)>,
    /// Witness constants with `E(c₁s) ≤ A_{n/m}(s) ≤ E(c₂s)`, m > 1.
    pub e_constants: Option<(f64, f64)>,
    pub pass: bool,
}

/// `C_n`, `D_n` (m = 1) or `Φ_{n/m}`, `C_{n/m}`, `E_{n/m}` (m > 1), with
/// their defining identities checked.
#[derive(Clone, Debug)]
pub struct ProofScales {
    pub c: MonotoneFunction,
    pub d: Option<MonotoneFunction>,
    pub e: Option<MonotoneFunction>,
    pub phi: MonotoneFunction,
    pub report: ScaleReport,
}

pub fn proof_scales(a: &YoungFunction, ctx: EmbeddingContext) -> Result<ProofScales> {
    let sc = Scales::new(a, ctx)?;
    let nu = ctx.nu();
    let xs: Vec<f64> = Grid::default().points();
    let mut cs = Vec::new();
    let mut cx = Vec::new();
    for &s in &xs {
        match sc.c_value(s) {
            Ext::Finite(v) if v.is_finite() && v < 1e300 => {
                cx.push(s);
                cs.push(v);
            }
            _ => break,
        }
    }
    let c_bound = sc.phi.supremum().map(|y| y.powf(1.0 / nu));
    let c = MonotoneFunction::new(format!("C[{nu}]"), SampleTable::fitted(cx.clone(), cs, None, c_bound))?;

    if ctx.m == 1 {
        let phi_t = sc.phi.table();
        let dv: Vec<f64> = phi_t.abscissae().iter().zip(phi_t.values()).map(|(s, p)| s.powf(nu) * p).collect();
        let dt = SampleTable::fitted(phi_t.abscissae().to_vec(), dv, phi_t.plateau(), phi_t.bound());
        let d = MonotoneFunction::new(format!("D[{nu}]"), dt)?;
        let an = first_order_target_from(&sc, a.label())?;

        let mut worst_id: Option<(f64, f64)> = None;
        for &r in Grid::new(1e-6, 1e8, 141).points().iter() {
            let (ci, di) = (c.inverse(r, Side::Right), d.inverse(r, Side::Right));
            if ci.saturated || di.saturated || di.value <= 0.0 || !strictly_increasing_near(&d, di.value) {
                continue;
            }
            let rhs = r.powf(1.0 / nu) / di.value;
            let err = (ci.value / rhs - 1.0).abs();
            if worst_id.is_none_or(|w| err > w.0) {
                worst_id = Some((err, r));
            }
        }
        let mut worst_sw: Option<(f64, f64)> = None;
        for &s in an.table().abscissae() {
            let (Ext::Finite(lo), Ext::Finite(mid)) = (c.value(0.5 * s), an.value(s)) else { continue };
            let hi = c.value(s).finite().unwrap_or(f64::INFINITY);
            let v = ((lo - mid) / mid).max((mid - hi) / mid).max(0.0);
            if worst_sw.is_none_or(|w| v > w.0) {
                worst_sw = Some((v, s));
            }
        }
        let pass = worst_id.is_none_or(|w| w.0 < 1e-2) && worst_sw.is_none_or(|w| w.0 <= 1e-2);
        let report = ScaleReport { ctx, c_inverse_error: worst_id, sandwich_violation: worst_sw, e_constants: None, pass };
        return Ok(ProofScales { c, d: Some(d), e: None, phi: sc.phi, report });
    }

    let ev = quad::cumulative_log(|u: f64| c.value(u.exp()).finite().unwrap_or(f64::INFINITY), &cx, 1e-11)
        .ok_or_else(|| Error::GateFailed("C(t)/t is not integrable at 0".into()))?;
    let e = MonotoneFunction::new(format!("E[{nu}]"), SampleTable::fitted(cx, ev, None, c_bound))?;
    let target = higher_order_target(a, ctx)?.target;
    let samples: Vec<(f64, f64)> =
        target.table().abscissae().iter().zip(target.table().values()).map(|(s, v)| (*s, *v)).collect();
    let lattice = |k: i32| 2f64.powf(k as f64 / 4.0);
    let below = |c1: f64| samples.iter().all(|&(s, v)| e.value(c1 * s).finite().map_or(false, |w| w <= v * (1.0 + 1e-9)));
    let above = |c2: f64| samples.iter().all(|&(s, v)| e.value(c2 * s).finite().is_none_or(|w| v <= w * (1.0 + 1e-9)));
    let c1 = (-80..=80).rev().map(lattice).find(|&c| below(c));
    let c2 = (-80..=80).map(lattice).find(|&c| above(c));
    let pair = c1.zip(c2);
    let report = ScaleReport { ctx, c_inverse_error: None, sandwich_violation: None, e_constants: pair, pass: pair.is_some() };
    Ok(ProofScales { c, d: None, e: Some(e), phi: sc.phi, report })
}

fn strictly_increasing_near(f: &MonotoneFunction, s: f64) -> bool {
    match (f.value(s * 0.99), f.value(s * 1.01)) {
        (Ext::Finite(a), Ext::Finite(b)) => b > a * (1.0 + 1e-9),
        _ => false,
    }
}

/// Tabulated `ρ(r) = target⁻¹(2r)/A⁻¹(r) · r^{m/n}`.
#[derive(Clone, Debug, Serialize)]
pub struct RatioDecayReport {
    pub r0: f64,
    pub c0: f64,
    /// Least-squares slope of `log ρ` against `log r` over the last decade.
    pub slope: f64,
    pub pass: bool,
    pub table: Vec<[f64; 2]>,
}

/// `target⁻¹(2r)/A⁻¹(r) · r^{m/n}` with right-continuous inverses.
pub fn ratio_rho(a: &YoungFunction, target: &YoungFunction, ctx: EmbeddingContext, r: f64) -> f64 {
    let num = target.inverse(2.0 * r, Side::Right).value;
    let den = a.inverse(r, Side::Right).value;
    num / den * r.powf(ctx.m as f64 / ctx.n as f64)
}

pub const SLOPE_LIMIT: f64 = 0.05;

/// Tabulates `ρ` on a log grid (10 points per decade) over `[r_lo, r_hi]`
/// and tests boundedness above `r0 = r_lo`.
pub fn ratio_decay_check(
    a: &YoungFunction,
    target: &YoungFunction,
    ctx: EmbeddingContext,
    r_range: (f64, f64),
) -> Result<RatioDecayReport> {
    let (lo, hi) = r_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad r range [{lo}, {hi}]")));
    }
    let decades = (hi / lo).log10();
    let len = ((decades * 10.0).round() as usize).max(2) + 1;
    let table: Vec<[f64; 2]> =
        Grid::new(lo, hi, len).points().into_iter().map(|r| [r, ratio_rho(a, target, ctx, r)]).collect();
    if table.iter().any(|p| !(p[1].is_finite() && p[1] > 0.0)) {
        return Err(Error::Precondition("ρ is not finite and positive on the range".into()));
    }
    let c0 = table.iter().map(|p| p[1]).fold(0.0, f64::max);
    let last: Vec<&[f64; 2]> = table.iter().filter(|p| p[0] >= hi / 10.0 * (1.0 - 1e-12)).collect();
    let slope = PowerLaw::fit(
        &last.iter().map(|p| p[0]).collect::<Vec<_>>(),
        &last.iter().map(|p| p[1]).collect::<Vec<_>>(),
    )
    .map(|p| p.exponent)
    .unwrap_or(0.0);
    Ok(RatioDecayReport { r0: lo, c0, slope, pass: slope <= SLOPE_LIMIT, table })
}

/// Checks that the glued target matches `A_n` near infinity.
pub fn glue_is_equivalent(glue: &Glue, an: &YoungFunction) -> bool {
    compare_growth(&glue.target, an, GrowthMode::NearInfinity { threshold: glue.s2 }).equivalent
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(p: f64) -> YoungFunction {
        YoungFunction::power(p).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(EmbeddingContext::new(1, 1).is_err());
        assert!(EmbeddingContext::new(3, 3).is_err());
        assert!((EmbeddingContext::new(3, 1).unwrap().n_prime() - 1.5).abs() < 1e-15);
        assert!((EmbeddingContext::new(5, 2).unwrap().nu() - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gate_square_in_three_dimensions() {
        let g = integrability_gate(&power(2.0), EmbeddingContext::new(3, 1).unwrap()).unwrap();
        assert!(g.pass && g.agree);
        // ∫₀¹ s^{-1/2} ds = 2
        assert!((g.primal.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn gate_linear_in_the_plane() {
        let g = integrability_gate(&YoungFunction::linear(), EmbeddingContext::new(2, 1).unwrap()).unwrap();
        assert!(g.pass && g.agree);
        assert!((g.primal.value - 1.0).abs() < 1e-6);
        assert_eq!(g.dual.value, 0.0);
    }

    #[test]
    fn gate_fails_at_critical_power() {
        let g = integrability_gate(&power(2.0), EmbeddingContext::new(2, 1).unwrap()).unwrap();
        assert!(!g.pass && g.agree);
        assert!(matches!(phi_n(&power(2.0), EmbeddingContext::new(2, 1).unwrap()), Err(Error::GateFailed(_))));
    }

    #[test]
    fn phi_of_power_matches_closed_form() {
        let (p, n) = (2.0, 3u32);
        let ctx = EmbeddingContext::new(n, 1).unwrap();
        let phi = phi_n(&power(p), ctx).unwrap();
        let pp = p / (p - 1.0);
        let k = (p - 1.0) * p.powf(-pp) / (pp - ctx.n_prime());
        for &s in &[1e-4, 0.3, 2.0, 1e5] {
            let v = phi.eval(s).unwrap().finite().unwrap();
            assert!((v / (k * s.powf(pp - ctx.n_prime())) - 1.0).abs() < 1e-6, "{s}: {v}");
        }
        assert_eq!(phi.eval(0.0).unwrap(), Ext::Finite(0.0));
    }

    #[test]
    fn sobolev_exponents() {
        for (n, p) in [(3u32, 2.0), (2, 1.5), (3, 2.5), (2, 1.2)] {
            let an = first_order_target(&power(p), EmbeddingContext::new(n, 1).unwrap()).unwrap();
            let want = n as f64 * p / (n as f64 - p);
            assert!((an.tail_exponent() / want - 1.0).abs() < 1e-2, "n={n} p={p}: {}", an.tail_exponent());
            assert_eq!(an.eval(0.0).unwrap(), Ext::Finite(0.0));
        }
    }

    #[test]
    fn higher_order_exponents() {
        for (n, m, p) in [(5u32, 2u32, 2.0), (4, 3, 1.2), (3, 2, 1.2), (3, 1, 2.0)] {
            let h = higher_order_target(&power(p), EmbeddingContext::new(n, m).unwrap()).unwrap();
            let want = n as f64 * p / (n as f64 - m as f64 * p);
            assert!(!h.essentially_bounded);
            assert!((h.target.tail_exponent() / want - 1.0).abs() < 1e-2, "{n},{m},{p}: {}", h.target.tail_exponent());
        }
    }

    #[test]
    fn supercritical_power_is_essentially_bounded() {
        let h = higher_order_target(&power(2.0), EmbeddingContext::new(3, 2).unwrap());
        // p·m = 4 ≥ 3 but the gate also needs p < n/m near zero
        assert!(h.is_err());
        let tp = YoungFunction::two_power(1.2, 2.0).unwrap();
        let h = higher_order_target(&tp, EmbeddingContext::new(3, 2).unwrap()).unwrap();
        assert!(h.essentially_bounded);
        assert!(h.target.finite_domain_bound().is_some());
    }

    #[test]
    fn glue_and_equivalence() {
        let a = power(2.0);
        let fo = FirstOrder::build(&a, 3).unwrap();
        let t = fo.target();
        assert!(fo.glue.s1 < fo.glue.s2);
        let s = fo.glue.s1;
        assert_eq!(t.eval(s).unwrap(), a.eval(s).unwrap());
        assert!(glue_is_equivalent(&fo.glue, &fo.a_n));
        t.validate().unwrap();
    }

    #[test]
    fn scale_identities_first_order() {
        let ps = proof_scales(&power(2.0), EmbeddingContext::new(3, 1).unwrap()).unwrap();
        assert!(ps.report.pass, "{:?}", ps.report);
        // D_n(s) = s^{n'} Φ_n(s) ∝ s^{p'}
        let d = ps.d.unwrap();
        let e = PowerLaw::fit(d.table().abscissae(), d.table().values()).unwrap().exponent;
        assert!((e - 2.0).abs() < 1e-6);
    }

    #[test]
    fn scale_sandwich_higher_order() {
        let ps = proof_scales(&power(2.0), EmbeddingContext::new(5, 2).unwrap()).unwrap();
        assert!(ps.report.pass, "{:?}", ps.report);
    }

    #[test]
    fn ratio_is_flat_for_square_in_three_dimensions() {
        let a = power(2.0);
        let fo = FirstOrder::build(&a, 3).unwrap();
        let rep = ratio_decay_check(&a, fo.target(), fo.scales.ctx, (1e3, 1e8)).unwrap();
        assert!(rep.pass && rep.slope.abs() < 1e-3, "{}", rep.slope);
        let h = higher_order_target(&a, EmbeddingContext::new(5, 2).unwrap()).unwrap();
        let rep = ratio_decay_check(&a, &h.target, EmbeddingContext::new(5, 2).unwrap(), (1e3, 1e8)).unwrap();
        assert!(rep.pass && rep.slope.abs() < 1e-3, "{}", rep.slope);
    }

    #[test]
    fn counter_family_trends_upward() {
        // twopower(2,4) has index 4 ≥ 3: Φ_3 is bounded, Ā_n⁻¹ saturates and ρ grows
        // at least like r^{1/12}
        let a = YoungFunction::two_power(2.0, 4.0).unwrap();
        let fo = FirstOrder::build(&a, 3).unwrap();
        assert!(fo.a_n.finite_domain_bound().is_some());
        let rep = ratio_decay_check(&a, fo.target(), fo.scales.ctx, (1e3, 1e8)).unwrap();
        assert!(!rep.pass);
        assert!(rep.slope > 1.0 / 12.0 - 1e-3, "{}", rep.slope);
    }
}
