//! Replays the cut-off / radius-halving argument on a raster.
//!
//! For a ball `B_R` about `x`, the chain `R₀ = R`, `R_{i+1} = R̃_i` halves
//! the measure at every step. A cut-off `η_i` between `R_{i+1}` and `R_i`
//! turns the embedding inequality into
//!
//! ```text
//! R_i − R_{i+1} ≤ 2 c_e max{1, c̃} · target⁻¹(2/|B_i|) / A⁻¹(1/|B_i|)
//!              ≤ c₃ |B_i|^{1/n},          c₃ = 2 c_e c₀ max{1, c̃},
//! ```
//!
//! and telescoping gives `R ≤ c₃/(1 − 2^{−1/n}) · |B_R|^{1/n}`. Every
//! constant is measured: `c_e` is a maximum of norm ratios over a finite
//! family, so a pass certifies the internal consistency of the chain, not
//! the embedding itself. For `m > 1` the gap enters as `(R_i − R_{i+1})^m`
//! and `c₄ = (m + 1) c_e max{1, c̃}` replaces `2 c_e max{1, c̃}`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::boyd::{boyd_upper_index, IndexVerdict};
use crate::field::{multi_indices, SampledFunction};
use crate::norms::{chi_norm_closed, luxemburg_norm, sobolev_norm};
use crate::raster::{sample_points, RasterDomain, Sampling, MIN_HALVING_CELLS};
use crate::sobolev::{
    higher_order_target, integrability_gate, ratio_decay_check, ratio_rho, EmbeddingContext, FirstOrder,
};
use crate::young::{Monotone, Side, YoungFunction};
use crate::{Error, Result};

pub const DISCLAIMER: &str = "c_e is the largest norm ratio over a finite family of test functions; \
a pass shows the proof chain is internally consistent with the measured constants, not that the embedding holds";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Polynomial smoothstep of degree `2m + 1`.
    Smoothstep,
    Linear,
}

/// `σ_m(t) = t^{m+1} Σ_{k≤m} C(m+k, k)(1−t)^k`, flat to order `m` at both ends.
pub fn smoothstep(m: u32, t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    if t == 1.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=m {
        if k > 0 {
            binom *= (m + k) as f64 / k as f64;
        }
        sum += binom * (1.0 - t).powi(k as i32);
    }
    t.powi(m as i32 + 1) * sum
}

/// A sampled cut-off with its measured derivative constants.
#[derive(Clone, Debug)]
pub struct Cutoff<'a> {
    pub field: SampledFunction<'a>,
    pub r: f64,
    pub r_tilde: f64,
    /// `max_{1≤|α|≤m} max |D^α η| (R − R̃)^{|α|}`.
    pub c_tilde: f64,
    /// Largest Euclidean length of the discrete gradient.
    pub grad_max: f64,
}

/// `η(y) = σ((R − |y − x|)/(R − R̃))`: 1 on `B_R̃`, 0 off `B_R`.
pub fn cutoff<'a>(d: &'a RasterDomain, x: &[f64], r: f64, r_tilde: f64, m: u32, profile: Profile) -> Result<Cutoff<'a>> {
    if !(r_tilde > 0.0 && r_tilde < r) {
        return Err(Error::InvalidArgument(format!("need 0 < R̃ < R, got R̃ = {r_tilde}, R = {r}")));
    }
    if x.len() != d.dim() {
        return Err(Error::InvalidArgument(format!("center must be a {}-vector", d.dim())));
    }
    let gap = r - r_tilde;
    let lo: Vec<f64> = x.iter().map(|c| c - r).collect();
    let hi: Vec<f64> = x.iter().map(|c| c + r).collect();
    let eta = |y: &[f64]| {
        let dist = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist <= r_tilde {
            1.0
        } else if dist >= r {
            0.0
        } else {
            let t = (r - dist) / gap;
            match profile {
                Profile::Smoothstep => smoothstep(m, t),
                Profile::Linear => t,
            }
        }
    };
    let field = SampledFunction::from_fn_boxed(d, m, &lo, &hi, eta)?;
    let mut c_tilde = 0.0f64;
    for alpha in multi_indices(d.dim(), m) {
        let k: u32 = alpha.iter().sum();
        if k == 0 {
            continue;
        }
        let der = field.derivative(&alpha)?;
        c_tilde = c_tilde.max(der.max_abs() * gap.powi(k as i32));
    }
    let grads: Vec<SampledFunction> = (0..d.dim()).map(|i| field.difference(i)).collect::<Result<_>>()?;
    let grad_max = grad_norm_max(d, &grads);
    Ok(Cutoff { field, r, r_tilde, c_tilde, grad_max })
}

fn grad_norm_max(d: &RasterDomain, grads: &[SampledFunction]) -> f64 {
    let mut best = 0.0f64;
    for idx in d.occupied_cells() {
        let c = d.cell(idx);
        let s: f64 = grads.iter().map(|g| g.at(c).powi(2)).sum();
        best = best.max(s);
    }
    best.sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub c_e: f64,
    pub members: usize,
    /// Members with both norms zero.
    pub skipped: usize,
    pub argmax: usize,
    pub ratios: Vec<f64>,
}

/// `c_e = max ‖u‖_target / ‖u‖_{W^{m,A}}` over the family.
pub fn embedding_probe(
    a: &YoungFunction,
    target: &YoungFunction,
    ctx: EmbeddingContext,
    family: &[SampledFunction],
) -> Result<ProbeReport> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty test family".into()));
    }
    let ratios: Vec<Option<f64>> = family
        .par_iter()
        .map(|u| norm_ratio(a, target, ctx, u))
        .collect::<Result<Vec<_>>>()?;
    let mut best = (f64::NEG_INFINITY, 0);
    let mut kept = Vec::new();
    let mut skipped = 0;
    for (i, r) in ratios.iter().enumerate() {
        match r {
            Some(v) => {
                if *v > best.0 {
                    best = (*v, i);
                }
                kept.push(*v);
            }
            None => skipped += 1,
        }
    }
    if kept.is_empty() {
        return Err(Error::InvalidArgument("every family member vanishes".into()));
    }
    Ok(ProbeReport { c_e: best.0, members: family.len(), skipped, argmax: best.1, ratios: kept })
}

fn norm_ratio(a: &YoungFunction, target: &YoungFunction, ctx: EmbeddingContext, u: &SampledFunction) -> Result<Option<f64>> {
    let t = luxemburg_norm(u, target)?;
    let w = sobolev_norm(u, a, ctx.m)?;
    if w == 0.0 {
        if t > 0.0 {
            return Err(Error::Norm("Sobolev norm vanishes but the target norm does not".into()));
        }
        return Ok(None);
    }
    Ok(Some(t / w))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChainLink {
    pub r: f64,
    pub r_next: f64,
    pub cells: u64,
    pub cells_next: u64,
    /// `|B_{R_{i+1}}|/|B_{R_i}| − ½`.
    pub residual: f64,
}

/// `R₀ = R`, `R_{i+1} = R̃_i`, until a ball holds fewer than 16 cells.
pub fn radius_chain(d: &RasterDomain, x: &[f64], r: f64) -> Result<Vec<ChainLink>> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("R = {r} not in (0, 1]")));
    }
    if !d.contains(x) {
        return Err(Error::InvalidArgument(format!("center {x:?} is not in the domain")));
    }
    let mut out = Vec::new();
    let mut cur = r;
    loop {
        let hv = match d.halving_radius(x, cur) {
            Ok(hv) => hv,
            Err(e) if out.is_empty() => return Err(e),
            Err(_) => break,
        };
        if hv.r_tilde >= cur {
            break;
        }
        out.push(ChainLink {
            r: cur,
            r_next: hv.r_tilde,
            cells: hv.cells_r,
            cells_next: hv.cells_tilde,
            residual: hv.cells_tilde as f64 / hv.cells_r as f64 - 0.5,
        });
        if hv.cells_tilde < MIN_HALVING_CELLS {
            break;
        }
        cur = hv.r_tilde;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct HarnessOptions {
    pub seed: u64,
    pub family_centers: usize,
    pub family_radii: usize,
    pub profile: Profile,
    /// Lemma threshold; `None` uses `1/|B_R|` so every step is in range.
    pub r0: Option<f64>,
    /// Reject functions whose Boyd index is clearly not below `n/m`.
    pub enforce_boyd: bool,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions { seed: 0, family_centers: 20, family_radii: 5, profile: Profile::Smoothstep, r0: None, enforce_boyd: true }
    }
}

/// Replacement of `A` near zero by `A(k)(s/k)^q`, applied when the
/// integrability gate fails; on finite-measure sets it leaves the
/// Orlicz–Sobolev space unchanged.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NearZero {
    pub knee: f64,
    pub q: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Preconditions {
    pub boyd_index: f64,
    pub boyd_verdict: IndexVerdict,
    pub gate_passed_unmodified: bool,
    pub near_zero: Option<NearZero>,
}

/// Everything that depends on the domain and `A` but not on `(x, R)`.
pub struct Harness<'a> {
    pub domain: &'a RasterDomain,
    pub young: YoungFunction,
    pub input_label: String,
    pub target: YoungFunction,
    pub ctx: EmbeddingContext,
    pub opts: HarnessOptions,
    pub preconditions: Preconditions,
    pub family: ProbeReport,
}

const KNEE: f64 = 1.0;

impl<'a> Harness<'a> {
    pub fn prepare(d: &'a RasterDomain, a: &YoungFunction, ctx: EmbeddingContext, opts: HarnessOptions) -> Result<Self> {
        if ctx.n as usize != d.dim() {
            return Err(Error::InvalidArgument(format!("ctx n = {} on a {}-dimensional raster", ctx.n, d.dim())));
        }
        let boyd = boyd_upper_index(a)?;
        let bv = boyd.verdict(ctx.critical_index());
        if opts.enforce_boyd && !matches!(bv, IndexVerdict::Below | IndexVerdict::Boundary) {
            return Err(Error::Precondition(format!(
                "Boyd index {:.4} of {} is not below n/m = {}",
                boyd.index,
                a.label(),
                ctx.critical_index()
            )));
        }
        let gate = integrability_gate(a, ctx)?;
        let (young, near_zero) = if gate.pass {
            (a.clone(), None)
        } else {
            let (f, nz) = modify_near_zero(a, ctx)?;
            (f, Some(nz))
        };
        let target = match ctx.m {
            1 => FirstOrder::build(&young, ctx.n)?.target().clone(),
            _ => higher_order_target(&young, ctx)?.target,
        };
        let family_fns = default_family(d, ctx.m, &opts)?;
        let family = embedding_probe(&young, &target, ctx, &family_fns)?;
        Ok(Harness {
            domain: d,
            young,
            input_label: a.label().to_string(),
            target,
            ctx,
            opts,
            preconditions: Preconditions {
                boyd_index: boyd.index,
                boyd_verdict: bv,
                gate_passed_unmodified: gate.pass,
                near_zero,
            },
            family,
        })
    }

    /// Runs the chain at `(x, R)` and assembles the report.
    pub fn verdict(&self, x: &[f64], r: f64) -> Result<NecessityReport> {
        let d = self.domain;
        let ctx = self.ctx;
        let n = ctx.n as f64;
        let m = ctx.m;
        let vol = d.cell_volume();
        let chain = radius_chain(d, x, r)?;
        let cut: Vec<(f64, f64, Option<f64>)> = chain
            .par_iter()
            .map(|l| {
                let c = cutoff(d, x, l.r, l.r_next, m, self.opts.profile)?;
                let ratio = norm_ratio(&self.young, &self.target, ctx, &c.field)?;
                let w = sobolev_norm(&c.field, &self.young, m)?;
                Ok((c.c_tilde, w, ratio))
            })
            .collect::<Result<Vec<_>>>()?;
        let c_tilde = cut.iter().map(|c| c.0).fold(0.0, f64::max);
        let chain_ce = cut.iter().filter_map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
        let c_e = self.family.c_e.max(chain_ce);
        let big = chain[0].cells as f64 * vol;
        let small = chain.last().map(|l| l.cells as f64 * vol).unwrap_or(big);
        let r0 = self.opts.r0.unwrap_or(1.0 / big);
        let r_hi = (1.0 / small).max(r0 * 10.0);
        let lemma = ratio_decay_check(&self.young, &self.target, ctx, (r0, r_hi))?;
        let rhos: Vec<f64> = chain.iter().map(|l| ratio_rho(&self.young, &self.target, ctx, 1.0 / (l.cells as f64 * vol))).collect();
        let c0 = rhos.iter().copied().fold(lemma.c0, f64::max);
        let lead = if m == 1 { 2.0 } else { (m + 1) as f64 };
        let k = lead * c_e * c_tilde.max(1.0);
        let c3 = (k * c0).powf(1.0 / m as f64);
        let big_c = c3 / (1.0 - 2f64.powf(-1.0 / n));
        let mut steps = Vec::with_capacity(chain.len());
        for (i, l) in chain.iter().enumerate() {
            let bm = l.cells as f64 * vol;
            let gap = l.r - l.r_next;
            let lemma_branch = bm <= 1.0 / r0 * (1.0 + 1e-12);
            let tinv = self.target.inverse(2.0 / bm, Side::Right).value;
            let ainv = self.young.inverse(1.0 / bm, Side::Right).value;
            let bound_minus = (k * tinv / ainv).powf(1.0 / m as f64);
            let bound_final = c3 * bm.powf(1.0 / n);
            let chi = chi_norm_closed(&self.young, bm)?;
            let cut_bound = k / lead * 2f64.max(lead) / gap.powi(m as i32) * chi;
            steps.push(StepRow {
                r: l.r,
                r_next: l.r_next,
                ball_measure: bm,
                half_residual: l.residual,
                gap,
                rho: rhos[i],
                bound_minus,
                bound_final,
                margin: bound_final / gap,
                lemma_branch,
                minus_ok: !lemma_branch || gap <= bound_minus * (1.0 + 1e-9),
                final_ok: !lemma_branch || gap <= bound_final * (1.0 + 1e-9),
                cutoff_norm: cut[i].1,
                cutoff_bound: cut_bound,
            });
        }
        let ball = chain[0].cells as f64 * vol;
        let terminal = chain.last().map(|l| l.r_next).unwrap_or(r);
        let telescoped: f64 = steps.iter().map(|s| s.gap).sum();
        let final_ratio = r / ball.powf(1.0 / n);
        let pass = r <= big_c * ball.powf(1.0 / n);
        let margin_first = steps.first().map(|s| s.margin).unwrap_or(f64::NAN);
        let margin_last = steps.last().map(|s| s.margin).unwrap_or(f64::NAN);
        let margin_min = steps.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
        Ok(NecessityReport {
            domain: d.id(),
            young: self.input_label.clone(),
            young_used: self.young.label().to_string(),
            target: self.target.label().to_string(),
            ctx: CtxRow { n: ctx.n, m: ctx.m },
            seed: self.opts.seed,
            center: x.to_vec(),
            r,
            ball_measure: ball,
            steps,
            constants: Constants {
                c_e,
                c_e_family: self.family.c_e,
                c_tilde,
                c0,
                c3: if m == 1 { Some(c3) } else { None },
                c4: if m > 1 { Some(k) } else { None },
                r0,
                big_c,
            },
            lemma_slope: lemma.slope,
            lemma_pass: lemma.pass,
            preconditions: self.preconditions.clone(),
            telescoped,
            terminal_radius: terminal,
            final_ratio,
            bound_ratio: big_c,
            margin_first,
            margin_last,
            margin_min,
            degrading: margin_min < 0.5 * margin_first,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            disclaimer: DISCLAIMER,
        })
    }
}

/// `A(k)(s/k)^q` below the knee `k = 1`, with `q` halfway between 1 and `n/m`
/// but no larger than the local index `kA'(k)/A(k)` (for convexity).
fn modify_near_zero(a: &YoungFunction, ctx: EmbeddingContext) -> Result<(YoungFunction, NearZero)> {
    let at = |s: f64| a.value(s).finite().unwrap_or(f64::INFINITY);
    let (v0, v1) = (at(KNEE), at(KNEE * (1.0 + 1e-6)));
    let local = (v1 - v0) / (1e-6 * v0);
    let q = (0.5 * (1.0 + ctx.critical_index())).min(local * (1.0 - 1e-9)).max(1.0);
    let f = a.modified_near_zero(KNEE, q)?;
    let gate = integrability_gate(&f, ctx)?;
    if !gate.pass {
        return Err(Error::GateFailed(format!("{} still fails after the near-zero change (q = {q})", a.label())));
    }
    Ok((f, NearZero { knee: KNEE, q }))
}

/// Cut-offs at `family_centers` random points and `family_radii` radii,
/// plus `1`, the coordinates and `|x|²`.
fn default_family<'a>(d: &'a RasterDomain, m: u32, opts: &HarnessOptions) -> Result<Vec<SampledFunction<'a>>> {
    let n = d.dim();
    let mut out = Vec::new();
    out.push(SampledFunction::from_fn(d, m, |_| 1.0)?);
    for i in 0..n {
        out.push(SampledFunction::from_fn(d, m, move |x| x[i])?);
    }
    out.push(SampledFunction::from_fn(d, m, |x| x.iter().map(|v| v * v).sum())?);
    let centers = sample_points(d, &Sampling::Random { count: opts.family_centers, seed: opts.seed });
    let shrink = 2f64.powf(-1.0 / n as f64);
    let floor = 8.0 * d.h();
    for x in &centers {
        for j in 0..opts.family_radii {
            let r = 0.5 * 0.5f64.powi(j as i32);
            if r * (1.0 - shrink) < 2.0 * d.h() || r < floor {
                continue;
            }
            out.push(cutoff(d, x, r, r * shrink, m, opts.profile)?.field);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CtxRow {
    pub n: u32,
    pub m: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRow {
    pub r: f64,
    pub r_next: f64,
    pub ball_measure: f64,
    pub half_residual: f64,
    pub gap: f64,
    pub rho: f64,
    /// Right side of the cut-off inequality (`m`-th root taken for `m > 1`).
    pub bound_minus: f64,
    /// `c₃ |B|^{1/n}`.
    pub bound_final: f64,
    /// `bound_final / gap`.
    pub margin: f64,
    /// `|B| ≤ 1/r₀`; otherwise the step passes trivially.
    pub lemma_branch: bool,
    pub minus_ok: bool,
    pub final_ok: bool,
    pub cutoff_norm: f64,
    /// `(lead · max{1, c̃}/gap^m) ‖χ_B‖` with the chain's `c̃`.
    pub cutoff_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub c_e: f64,
    pub c_e_family: f64,
    pub c_tilde: f64,
    pub c0: f64,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub r0: f64,
    /// `c₃/(1 − 2^{−1/n})`.
    pub big_c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessityReport {
    pub domain: String,
    pub young: String,
    pub young_used: String,
    pub target: String,
    pub ctx: CtxRow,
    pub seed: u64,
    pub center: Vec<f64>,
    pub r: f64,
    pub ball_measure: f64,
    pub steps: Vec<StepRow>,
    pub constants: Constants,
    pub lemma_slope: f64,
    pub lemma_pass: bool,
    pub preconditions: Preconditions,
    /// `Σ (R_i − R_{i+1}) = R − terminal_radius`.
    pub telescoped: f64,
    pub terminal_radius: f64,
    /// `R / |B_R|^{1/n}`.
    pub final_ratio: f64,
    /// `C`, the bound `final_ratio` is tested against.
    pub bound_ratio: f64,
    pub margin_first: f64,
    pub margin_last: f64,
    pub margin_min: f64,
    /// Somewhere along the chain the per-step margin fell below half its
    /// starting value.
    pub degrading: bool,
    pub verdict: Verdict,
    pub disclaimer: &'static str,
}

/// Batch output: one report per `(center, R)`, ordered by center then `R`.
#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub seed: u64,
    pub reports: Vec<NecessityReport>,
    pub pass: bool,
}

impl<'a> Harness<'a> {
    pub fn batch(&self, centers: &[Vec<f64>], radii: &[f64]) -> Result<BatchReport> {
        let jobs: Vec<(usize, usize)> = (0..centers.len()).flat_map(|i| (0..radii.len()).map(move |j| (i, j))).collect();
        let reports = jobs
            .par_iter()
            .map(|&(i, j)| self.verdict(&centers[i], radii[j]))
            .collect::<Result<Vec<_>>>()?;
        let pass = reports.iter().all(|r| r.verdict == Verdict::Pass);
        Ok(BatchReport { seed: self.opts.seed, reports, pass })
    }
}

/// One CSV row per chain step.
pub fn steps_csv(reports: &[NecessityReport]) -> String {
    let mut out = String::from(
        "run,center,R,step,r,r_next,ball_measure,gap,rho,bound_minus,bound_final,margin,minus_ok,final_ok\n",
    );
    for (k, rep) in reports.iter().enumerate() {
        let center: Vec<String> = rep.center.iter().map(|v| v.to_string()).collect();
        for (i, s) in rep.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{k},{},{},{i},{},{},{},{},{},{},{},{},{},{}",
                center.join(" "),
                rep.r,
                s.r,
                s.r_next,
                s.ball_measure,
                s.gap,
                s.rho,
                s.bound_minus,
                s.bound_final,
                s.margin,
                s.minus_ok,
                s.final_ok
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{generate, Shape};

    fn square(lo: f64, hi: f64, h: f64) -> RasterDomain {
        generate(&Shape::Cube { lo, hi }, 2, h).unwrap()
    }

    #[test]
    fn smoothstep_is_flat_at_ends() {
        for m in 1..4 {
            assert_eq!(smoothstep(m, 0.0), 0.0);
            assert_eq!(smoothstep(m, 1.0), 1.0);
            let e = 1e-4;
            assert!(smoothstep(m, e) < 1e-7);
            assert!(1.0 - smoothstep(m, 1.0 - e) < 1e-7);
            assert!((smoothstep(m, 0.5) - 0.5).abs() < 1e-12);
        }
        assert!((smoothstep(1, 0.3) - (3.0 * 0.09 - 2.0 * 0.027)).abs() < 1e-15);
    }

    #[test]
    fn cutoff_levels_and_ramp_slope() {
        let h = 1.0 / 256.0;
        let d = square(0.0, 1.0, h);
        let x = [0.5, 0.5];
        let c = cutoff(&d, &x, 0.3, 0.15, 1, Profile::Linear).unwrap();
        for idx in d.occupied_cells() {
            let cell = d.cell(idx);
            let p = d.center(cell);
            let dist = ((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2)).sqrt();
            let v = c.field.at(cell);
            if dist <= 0.15 {
                assert_eq!(v, 1.0);
            }
            if dist >= 0.3 {
                assert_eq!(v, 0.0);
            }
        }
        assert!(c.grad_max <= 1.05 / 0.15, "{}", c.grad_max);
        assert!(cutoff(&d, &x, 0.2, 0.2, 1, Profile::Linear).is_err());
    }

    #[test]
    fn chain_in_the_plane() {
        let h = 1.0 / 256.0;
        let d = square(-1.0, 1.0, h);
        let x = [0.0123, -0.0071];
        let chain = radius_chain(&d, &x, 0.5).unwrap();
        assert!(chain.len() > 10);
        for (i, l) in chain.iter().enumerate() {
            let expect = 0.5 * 2f64.powf(-((i + 1) as f64) / 2.0);
            assert!((l.r_next - expect).abs() <= (i + 1) as f64 * h, "step {i}");
            assert!(l.r_next < l.r);
        }
        let sum: f64 = chain.iter().map(|l| l.r - l.r_next).sum();
        assert!((sum - (0.5 - chain.last().unwrap().r_next)).abs() < 1e-12);
    }

    #[test]
    fn chain_needs_resolution() {
        let d = square(0.0, 1.0, 1.0 / 32.0);
        assert!(matches!(radius_chain(&d, &[0.5, 0.5], 0.05), Err(Error::Resolution(_))));
    }

    #[test]
    fn probe_is_scale_free_and_skips_zero() {
        let h = 1.0 / 64.0;
        let d = square(0.0, 1.0, h);
        let a = YoungFunction::power(1.5).unwrap();
        let ctx = EmbeddingContext::first_order(2).unwrap();
        let target = FirstOrder::build(&a, 2).unwrap().target().clone();
        let eta = cutoff(&d, &[0.5, 0.5], 0.3, 0.2, 1, Profile::Smoothstep).unwrap().field;
        let zero = SampledFunction::from_fn(&d, 1, |_| 0.0).unwrap();
        let p1 = embedding_probe(&a, &target, ctx, &[eta.clone(), zero]).unwrap();
        let p2 = embedding_probe(&a, &target, ctx, &[eta.scaled(2.0)]).unwrap();
        assert_eq!(p1.skipped, 1);
        assert!(p1.c_e.is_finite() && p1.c_e > 0.0);
        assert!((p1.c_e / p2.c_e - 1.0).abs() < 1e-5);
    }

    #[test]
    fn cutoff_norm_within_bound() {
        let h = 1.0 / 128.0;
        let d = square(0.0, 1.0, h);
        let a = YoungFunction::power(2.0).unwrap();
        let c = cutoff(&d, &[0.5, 0.5], 0.3, 0.2, 1, Profile::Smoothstep).unwrap();
        let bm = d.ball_measure(&[0.5, 0.5], 0.3).unwrap();
        let bound = 2.0 * c.c_tilde.max(1.0) / 0.1 * chi_norm_closed(&a, bm).unwrap();
        assert!(sobolev_norm(&c.field, &a, 1).unwrap() <= bound);
    }

    #[test]
    fn harness_passes_on_small_square() {
        let h = 1.0 / 128.0;
        let d = square(0.0, 1.0, h);
        let a = YoungFunction::power(1.5).unwrap();
        let ctx = EmbeddingContext::first_order(2).unwrap();
        let opts = HarnessOptions { family_centers: 3, family_radii: 2, ..Default::default() };
        let hs = Harness::prepare(&d, &a, ctx, opts).unwrap();
        let rep = hs.verdict(&[0.41, 0.57], 0.3).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.steps.iter().all(|s| s.minus_ok && s.final_ok));
        assert!(rep.preconditions.near_zero.is_none());
    }
}
