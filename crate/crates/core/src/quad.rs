//! Quadrature in logarithmic coordinates.
//!
//! Every integral in this crate has the form `∫₀ˢ f(t) dt` with `f`
//! power-like near zero. With `t = eᵘ` it becomes `∫_{-∞}^{ln s} g(u) du`,
//! `g(u) = f(eᵘ)eᵘ`, whose integrand decays exponentially as `u → −∞`.

use serde::Serialize;

/// Lower end of the explicit `u`-range; the rest is an exponential tail.
pub const U_FLOOR: f64 = -40.0;
/// Relative agreement required between successive partial integrals.
pub const GATE_TOL: f64 = 1e-4;
/// Decay rates below this are indistinguishable from divergence.
pub const MIN_RATE: f64 = 1e-2;

const MAX_DEPTH: u32 = 16;

fn simpson_panel(g: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = g(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    g: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson_panel(g, a, fa, m, fm);
    let (right, rm, frm) = simpson_panel(g, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || !delta.is_finite() {
        // Richardson step on the two Simpson levels
        return left + right + delta / 15.0;
    }
    adapt(g, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + adapt(g, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson with Richardson correction; `rel` is relative to the
/// coarse estimate, `abs` an absolute floor.
pub fn integrate(g: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64, abs: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (g(a), g(b));
    let (whole, m, fm) = simpson_panel(&g, a, fa, b, fb);
    let tol = (rel * whole.abs()).max(abs).max(f64::MIN_POSITIVE);
    adapt(&g, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

/// Local exponential decay rate `d ln g / du` at `u`, if `g > 0` there.
pub fn decay_rate(g: &impl Fn(f64) -> f64, u: f64) -> Option<f64> {
    let (g0, g1) = (g(u), g(u + 0.5));
    (g0 > 0.0 && g1 > 0.0 && g0.is_finite() && g1.is_finite()).then(|| (g1 / g0).ln() / 0.5)
}

/// `∫_{-∞}^{u} g` assuming `g ≈ g(u)e^{κ(v−u)}` below `u`; `None` when
/// the integrand does not decay.
pub fn exponential_tail(g: &impl Fn(f64) -> f64, u: f64) -> Option<f64> {
    let gu = g(u);
    if gu == 0.0 {
        return Some(0.0);
    }
    match decay_rate(g, u) {
        Some(k) if k > MIN_RATE => Some(gu / k),
        _ => None,
    }
}

/// `∫_{-∞}^{ln x_k} g(u) du` for each of the increasing abscissae `x_k > 0`.
/// Returns `None` when the integrand does not decay at the floor.
pub fn cumulative_log(g: impl Fn(f64) -> f64, xs: &[f64], rel: f64) -> Option<Vec<f64>> {
    if xs.is_empty() {
        return Some(vec![]);
    }
    let u_first = xs[0].ln();
    let start = U_FLOOR.min(u_first);
    let mut acc = exponential_tail(&g, start)?;
    let mut u = start;
    while u < u_first {
        let next = (u + 1.0).min(u_first);
        acc += integrate(&g, u, next, rel, 0.0);
        u = next;
    }
    let mut out = Vec::with_capacity(xs.len());
    out.push(acc);
    for w in xs.windows(2) {
        acc += integrate(&g, w[0].ln(), w[1].ln(), rel, 0.0);
        out.push(acc);
    }
    Some(out)
}

/// Outcome of an improper-integral convergence test at zero.
#[derive(Clone, Debug, Serialize)]
pub struct GateOutcome {
    pub converged: bool,
    /// `(L, ∫_{-L}^0 g + tail(−L))` for `L = 10, 20, 30, 40`.
    pub partials: Vec<(f64, f64)>,
    /// Decay rate of the integrand at the floor (≤ 0 means divergence).
    pub rate: f64,
    pub value: f64,
}

/// Tests `∫_{-∞}^0 g(u) du < ∞` through tail-corrected partial integrals.
pub fn gate(g: impl Fn(f64) -> f64) -> GateOutcome {
    let mut partials = Vec::new();
    let mut acc = 0.0;
    let mut upper = 0.0;
    for l in [10.0, 20.0, 30.0, 40.0] {
        let mut u = upper;
        while u > -l {
            let next = (u - 1.0f64).max(-l);
            acc += integrate(&g, next, u, 1e-10, 0.0);
            u = next;
        }
        upper = -l;
        let tail = exponential_tail(&g, -l).unwrap_or(0.0);
        partials.push((l, acc + tail));
    }
    let gl = g(U_FLOOR);
    let rate = if gl == 0.0 { f64::INFINITY } else { decay_rate(&g, U_FLOOR).unwrap_or(f64::NAN) };
    let (i30, i40) = (partials[2].1, partials[3].1);
    let converged = i40.is_finite() && (rate.is_infinite() || rate > MIN_RATE) && (i40 - i30).abs() <= GATE_TOL * i40.abs();
    GateOutcome { converged, partials, rate, value: i40 }
}
