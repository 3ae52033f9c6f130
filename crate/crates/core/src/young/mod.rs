//! Young functions and monotone sample functions.
//!
//! A [`YoungFunction`] always carries a [`SampleTable`] on a log grid; the
//! closed-form families additionally keep their exact evaluator, which is
//! what [`YoungFunction::eval`] uses. Tables built by this crate
//! (conjugates, targets, integral means) are evaluated by log-log
//! interpolation with power-law extrapolation.

mod conjugate;
mod format;
mod growth;
mod table;

use std::fmt;
use std::str::FromStr;

pub use conjugate::conjugate;
pub use format::{read_yf1, write_yf1};
pub use growth::{compare_growth, integral_mean, Dominance, GrowthComparison, GrowthMode};
pub use table::{Ext, Grid, Inverse, PowerLaw, SampleTable, Side, Tail};

use crate::{Error, Result};

/// Relative tolerance on discrete convexity.
pub const EPS_CONV: f64 = 1e-9;

/// Anything with a value and a generalized inverse.
pub trait Monotone {
    /// Value at `s ≥ 0` (callers check the sign).
    fn value(&self, s: f64) -> Ext;
    /// Generalized inverse at `y ≥ 0`.
    fn inverse(&self, y: f64, side: Side) -> Inverse;
}

/// `sup{s : F(s) ≤ r}` (right) or `inf{s : F(s) ≥ r}` (left).
pub fn generalized_inverse<F: Monotone + ?Sized>(f: &F, r: f64, side: Side) -> Result<Inverse> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("inverse level must be ≥ 0, got {r}")));
    }
    Ok(f.inverse(r, side))
}

/// Closed-form and sampled constructions.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `s^p`, `p ≥ 1`.
    Power { p: f64 },
    /// `s^p log^λ(e + s)`.
    PowerLog { p: f64, lambda: f64 },
    /// `s`.
    Linear,
    /// `s^p` on `[0,1]`, `(p/q) s^q + 1 − p/q` beyond; `1 ≤ p ≤ q`.
    TwoPower { p: f64, q: f64 },
    /// `∫₀ˢ a`, with `a` piecewise linear through `(r_k, a_k)`, constant
    /// below `r_0` and beyond the last sample.
    Density { r: Vec<f64>, a: Vec<f64> },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Power { .. } => "power",
            Family::PowerLog { .. } => "powerlog",
            Family::Linear => "linear",
            Family::TwoPower { .. } => "twopower",
            Family::Density { .. } => "density",
        }
    }

    /// Numeric parameters as written in `YF1` headers and CLI specs.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Family::Power { p } => vec![*p],
            Family::PowerLog { p, lambda } => vec![*p, *lambda],
            Family::Linear => vec![],
            Family::TwoPower { p, q } => vec![*p, *q],
            Family::Density { .. } => vec![],
        }
    }

    pub fn from_tag(tag: &str, params: &[f64]) -> Result<Family> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("family `{tag}` takes {k} parameter(s), got {}", params.len())))
            }
        };
        match tag {
            "power" => want(1).map(|_| Family::Power { p: params[0] }),
            "powerlog" | "power-log" => want(2).map(|_| Family::PowerLog { p: params[0], lambda: params[1] }),
            "linear" => want(0).map(|_| Family::Linear),
            "twopower" => want(2).map(|_| Family::TwoPower { p: params[0], q: params[1] }),
            _ => Err(Error::InvalidArgument(format!("unknown Young family `{tag}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params().iter().map(|p| p.to_string()).collect();
        if ps.is_empty() {
            write!(f, "{}", self.tag())
        } else {
            write!(f, "{}:{}", self.tag(), ps.join(","))
        }
    }
}

/// Parses `power:2`, `powerlog:2,1`, `linear`, `twopower:2,4`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Family> {
        let (tag, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let params = rest
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad parameter `{t}` in `{spec}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Family::from_tag(tag.trim(), &params)
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Closed(Family),
    Table,
    /// `inner` on `[0, s1]`, affine on `[s1, s2]`, `outer` on `[s2, ∞)`.
    Glued { inner: Box<YoungFunction>, outer: Box<YoungFunction>, s1: f64, s2: f64 },
    /// `base(knee)·(s/knee)^q` below the knee, `base` above.
    ZeroModified { base: Box<YoungFunction>, knee: f64, q: f64 },
}

/// Convex, increasing `A : [0,∞) → [0,∞]` with `A(0) = 0`.
#[derive(Clone, Debug)]
pub struct YoungFunction {
    label: String,
    repr: Repr,
    table: SampleTable,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        build_young(&Family::Power { p }, &Grid::default())
    }

    pub fn power_log(p: f64, lambda: f64) -> Result<Self> {
        build_young(&Family::PowerLog { p, lambda }, &Grid::default())
    }

    pub fn linear() -> Self {
        build_young(&Family::Linear, &Grid::default()).expect("s ↦ s is a Young function")
    }

    pub fn two_power(p: f64, q: f64) -> Result<Self> {
        build_young(&Family::TwoPower { p, q }, &Grid::default())
    }

    pub fn from_density(r: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        build_young(&Family::Density { r, a }, &Grid::default())
    }

    /// A Young function given only by samples. Head and tail are fitted on
    /// the first and last decade; invariants are checked.
    pub fn from_table(s: Vec<f64>, v: Vec<f64>, plateau: Option<f64>, bound: Option<f64>) -> Result<Self> {
        check_abscissae(&s)?;
        if s.len() != v.len() {
            return Err(Error::InvalidYoung("abscissae and values differ in length".into()));
        }
        let mut table = SampleTable::fitted(s, v, plateau, bound);
        clamp_young_extrapolation(&mut table);
        let f = YoungFunction { label: "table".into(), repr: Repr::Table, table };
        f.validate()?;
        Ok(f)
    }

    /// Table with explicitly given extrapolation laws (used by the `YF1`
    /// reader and internal constructions).
    pub(crate) fn from_parts(label: impl Into<String>, table: SampleTable) -> Result<Self> {
        check_abscissae(&table.s)?;
        let f = YoungFunction { label: label.into(), repr: Repr::Table, table };
        f.validate()?;
        Ok(f)
    }

    /// `inner` up to `s1`, the chord on `[s1, s2]`, `outer` from `s2` on.
    pub(crate) fn glued(inner: &YoungFunction, outer: &YoungFunction, s1: f64, s2: f64, grid: &[f64]) -> Result<Self> {
        let repr = Repr::Glued { inner: Box::new(inner.clone()), outer: Box::new(outer.clone()), s1, s2 };
        let plateau = inner.table.plateau.filter(|&z| z < s1);
        let bound = outer.table.bound;
        let mut f = YoungFunction { label: format!("glue({},{})", inner.label, outer.label), repr, table: empty_table() };
        let mut pts: Vec<f64> = grid.iter().copied().chain([s1, s2]).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        f.table = sample_exact(&f, &pts, plateau, bound);
        if s1 > pts[0] {
            f.table.head = inner.table.head;
        }
        f.table.tail = outer.table.tail;
        f.validate()?;
        Ok(f)
    }

    /// Replaces `A` below `knee` by the power `A(knee)(s/knee)^q`, leaving
    /// `A` untouched above it. Convex as long as `1 ≤ q ≤ knee·A'(knee)/A(knee)`.
    pub fn modified_near_zero(&self, knee: f64, q: f64) -> Result<Self> {
        if !(knee > 0.0) || !(q >= 1.0) {
            return Err(Error::InvalidArgument("knee must be > 0 and exponent ≥ 1".into()));
        }
        let base_at = self.value(knee).finite().filter(|v| *v > 0.0).ok_or_else(|| {
            Error::InvalidArgument(format!("A({knee}) must be finite and positive"))
        })?;
        let repr = Repr::ZeroModified { base: Box::new(self.clone()), knee, q };
        let mut f = YoungFunction { label: format!("{}~q{q}@{knee}", self.label), repr, table: empty_table() };
        let grid: Vec<f64> = self.table.s.clone();
        f.table = sample_exact(&f, &grid, None, self.table.bound);
        f.table.head = PowerLaw { exponent: q, coeff: base_at / knee.powf(q) };
        f.table.tail = self.table.tail;
        f.validate()?;
        Ok(f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The closed-form family, if any.
    pub fn family(&self) -> Option<&Family> {
        match &self.repr {
            Repr::Closed(f) => Some(f),
            _ => None,
        }
    }

    /// True when values come from an exact evaluator rather than the table.
    pub fn is_exact(&self) -> bool {
        !matches!(self.repr, Repr::Table)
    }

    pub fn table(&self) -> &SampleTable {
        &self.table
    }

    pub fn tail(&self) -> Tail {
        self.table.tail
    }

    pub fn tail_exponent(&self) -> f64 {
        self.table.tail.exponent()
    }

    pub fn head(&self) -> PowerLaw {
        self.table.head
    }

    pub fn finite_domain_bound(&self) -> Option<f64> {
        self.table.bound
    }

    pub fn zero_plateau_bound(&self) -> Option<f64> {
        self.table.plateau
    }

    /// Glue points, when this is a glued function.
    pub fn glue_points(&self) -> Option<(f64, f64)> {
        match self.repr {
            Repr::Glued { s1, s2, .. } => Some((s1, s2)),
            _ => None,
        }
    }

    /// `A(s)` for `s ≥ 0`.
    pub fn eval(&self, s: f64) -> Result<Ext> {
        if !(s >= 0.0) {
            return Err(Error::InvalidArgument(format!("Young functions live on [0,∞); got s = {s}")));
        }
        Ok(self.value(s))
    }

    fn exact_value(&self, s: f64) -> Ext {
        if s == 0.0 {
            return Ext::Finite(0.0);
        }
        match &self.repr {
            Repr::Table => self.table.eval(s),
            Repr::Closed(fam) => closed_value(fam, s),
            Repr::Glued { inner, outer, s1, s2 } => {
                if s <= *s1 {
                    inner.value(s)
                } else if s >= *s2 {
                    outer.value(s)
                } else {
                    match (inner.value(*s1), outer.value(*s2)) {
                        (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + (b - a) * (s - s1) / (s2 - s1)),
                        _ => Ext::Infinite,
                    }
                }
            }
            Repr::ZeroModified { base, knee, q } => {
                if s >= *knee {
                    base.value(s)
                } else {
                    match base.value(*knee) {
                        Ext::Finite(v) => Ext::Finite(v * (s / knee).powf(*q)),
                        Ext::Infinite => Ext::Infinite,
                    }
                }
            }
        }
    }

    /// Checks `A(0)=0`, monotonicity, discrete convexity, `A(s)/s`
    /// nondecreasing and tail exponent ≥ 1 on the samples.
    pub fn validate(&self) -> Result<()> {
        let t = &self.table;
        let (s, v) = (&t.s, &t.v);
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidYoung(format!("{}: samples must be finite and nonnegative", self.label)));
        }
        for k in 1..s.len() {
            if v[k] < v[k - 1] * (1.0 - 1e-12) {
                return Err(Error::InvalidYoung(format!("{}: decreasing at s = {:e}", self.label, s[k])));
            }
        }
        // A(s)/s nondecreasing
        for k in 1..s.len() {
            let (q0, q1) = (v[k - 1] / s[k - 1], v[k] / s[k]);
            if q1 < q0 * (1.0 - EPS_CONV) - f64::MIN_POSITIVE {
                return Err(Error::InvalidYoung(format!(
                    "{}: A(s)/s decreases at s = {:e} ({q0:e} → {q1:e})",
                    self.label, s[k]
                )));
            }
        }
        if let Some(k) = convexity_violation(s, v, EPS_CONV) {
            return Err(Error::InvalidYoung(format!("{}: convexity fails at s = {:e}", self.label, s[k])));
        }
        if let Tail::Power(p) = t.tail {
            if p.exponent < 1.0 - 1e-6 && p.coeff > 0.0 {
                return Err(Error::InvalidYoung(format!("{}: tail exponent {} < 1", self.label, p.exponent)));
            }
        } else {
            return Err(Error::InvalidYoung(format!("{}: Young functions cannot be bounded", self.label)));
        }
        Ok(())
    }

    /// Right-continuous generalized inverse.
    pub fn inverse_right(&self, y: f64) -> f64 {
        self.inverse(y, Side::Right).value
    }

    /// `lim A(s)/s` as `s → 0⁺` when `A` is asymptotically linear there.
    pub(crate) fn linear_head_slope(&self) -> Option<f64> {
        if self.table.plateau.is_some() {
            return None;
        }
        match &self.repr {
            Repr::Closed(Family::Linear) => Some(1.0),
            Repr::Closed(Family::Power { p }) | Repr::Closed(Family::TwoPower { p, .. }) if *p == 1.0 => Some(1.0),
            Repr::Closed(Family::PowerLog { p, .. }) if *p == 1.0 => Some(1.0),
            Repr::Closed(Family::Density { a, .. }) => Some(a[0]),
            Repr::Closed(_) => None,
            _ => {
                let h = self.table.head;
                ((h.exponent - 1.0).abs() < 1e-4 && h.coeff > 0.0).then_some(h.coeff)
            }
        }
    }

    /// `lim A(s)/s` as `s → ∞` when `A` has linear growth.
    pub(crate) fn linear_tail_slope(&self) -> Option<f64> {
        if self.table.bound.is_some() {
            return None;
        }
        match &self.repr {
            Repr::Closed(Family::Linear) => Some(1.0),
            Repr::Closed(Family::Power { p }) if *p == 1.0 => Some(1.0),
            Repr::Closed(Family::TwoPower { q, .. }) if *q == 1.0 => Some(1.0),
            Repr::Closed(Family::PowerLog { p, lambda }) if *p == 1.0 && *lambda == 0.0 => Some(1.0),
            Repr::Closed(Family::Density { a, .. }) => Some(a[a.len() - 1]),
            Repr::Closed(_) => None,
            _ => match self.table.tail {
                Tail::Power(t) if (t.exponent - 1.0).abs() < 1e-4 && t.coeff > 0.0 => Some(t.coeff),
                _ => None,
            },
        }
    }
}

impl Monotone for YoungFunction {
    fn value(&self, s: f64) -> Ext {
        self.exact_value(s)
    }

    fn inverse(&self, y: f64, side: Side) -> Inverse {
        let (approx, bracket) = self.table.inverse_bracket(y, side);
        if y <= 0.0 || approx.saturated || matches!(self.repr, Repr::Table) {
            return approx;
        }
        refine_inverse(|s| self.exact_value(s), y, side, approx.value, bracket)
    }
}

/// First index `k` where the slope into `s_k` drops below the slope into
/// `s_{k-1}` by more than `eps` relative.
pub(crate) fn convexity_violation(s: &[f64], v: &[f64], eps: f64) -> Option<usize> {
    let mut prev = v.first().zip(s.first()).map(|(v0, s0)| v0 / s0)?;
    for k in 1..s.len() {
        let slope = (v[k] - v[k - 1]) / (s[k] - s[k - 1]);
        if slope < prev - eps * slope.abs().max(prev.abs()) - f64::MIN_POSITIVE {
            return Some(k);
        }
        prev = slope;
    }
    None
}

fn check_abscissae(s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidYoung("empty sample table".into()));
    }
    if s[0] <= 0.0 || s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidYoung("abscissae must be positive and strictly increasing".into()));
    }
    Ok(())
}

fn empty_table() -> SampleTable {
    SampleTable {
        s: vec![],
        v: vec![],
        head: PowerLaw { exponent: 1.0, coeff: 0.0 },
        tail: Tail::Power(PowerLaw { exponent: 1.0, coeff: 0.0 }),
        plateau: None,
        bound: None,
    }
}

pub(crate) fn clamp_young_extrapolation(t: &mut SampleTable) {
    if t.head.exponent < 1.0 {
        if let (Some(&s0), Some(&v0)) = (t.s.first(), t.v.first()) {
            t.head = PowerLaw { exponent: 1.0, coeff: v0 / s0 };
        }
    }
    if let Tail::Power(p) = t.tail {
        if p.exponent < 1.0 {
            if let (Some(&s1), Some(&v1)) = (t.s.last(), t.v.last()) {
                t.tail = Tail::Power(PowerLaw { exponent: 1.0, coeff: v1 / s1 });
            }
        }
    }
}

/// Samples an exact evaluator on `grid` up to `bound`.
fn sample_exact(f: &YoungFunction, grid: &[f64], plateau: Option<f64>, bound: Option<f64>) -> SampleTable {
    let mut s = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    for &x in grid {
        if matches!(bound, Some(b) if x > b) {
            break;
        }
        match f.exact_value(x) {
            Ext::Finite(y) if y.is_finite() => {
                s.push(x);
                v.push(y);
            }
            _ => break,
        }
    }
    let mut t = SampleTable::fitted(s, v, plateau, bound);
    clamp_young_extrapolation(&mut t);
    t
}

fn closed_value(fam: &Family, s: f64) -> Ext {
    let v = match fam {
        Family::Power { p } => s.powf(*p),
        Family::PowerLog { p, lambda } => s.powf(*p) * (std::f64::consts::E + s).ln().powf(*lambda),
        Family::Linear => s,
        Family::TwoPower { p, q } => {
            if s <= 1.0 {
                s.powf(*p)
            } else {
                (p / q) * s.powf(*q) + (1.0 - p / q)
            }
        }
        Family::Density { r, a } => density_integral(r, a, s),
    };
    if v.is_finite() {
        Ext::Finite(v)
    } else {
        Ext::Infinite
    }
}

/// Exact integral of the piecewise-linear density.
fn density_integral(r: &[f64], a: &[f64], s: f64) -> f64 {
    let n = r.len();
    if s <= r[0] {
        return a[0] * s;
    }
    let mut acc = a[0] * r[0];
    for k in 1..n {
        let (r0, r1, a0, a1) = (r[k - 1], r[k], a[k - 1], a[k]);
        if s <= r1 {
            let d = s - r0;
            let slope = (a1 - a0) / (r1 - r0);
            return acc + a0 * d + 0.5 * slope * d * d;
        }
        acc += 0.5 * (a0 + a1) * (r1 - r0);
    }
    acc + a[n - 1] * (s - r[n - 1])
}

#[cfg(test)]
/// Density value at `s` (piecewise linear).
pub(crate) fn density_value(r: &[f64], a: &[f64], s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s <= r[0] {
        return a[0];
    }
    let n = r.len();
    if s >= r[n - 1] {
        return a[n - 1];
    }
    let k = r.partition_point(|&x| x < s);
    a[k - 1] + (a[k] - a[k - 1]) * (s - r[k - 1]) / (r[k] - r[k - 1])
}

/// Builds a Young function from a family description on `grid`.
pub fn build_young(spec: &Family, grid: &Grid) -> Result<YoungFunction> {
    let bad = |m: String| Err(Error::InvalidYoung(m));
    let mut plateau = None;
    match spec {
        Family::Power { p } | Family::PowerLog { p, .. } if !(*p >= 1.0) => {
            return bad(format!("exponent p = {p} < 1 breaks convexity"));
        }
        Family::PowerLog { lambda, .. } if !lambda.is_finite() => return bad("λ must be finite".into()),
        Family::TwoPower { p, q } if !(*p >= 1.0 && *q >= *p) => {
            return bad(format!("two-power needs 1 ≤ p ≤ q, got p = {p}, q = {q}"));
        }
        Family::Density { r, a } => {
            if r.is_empty() || r.len() != a.len() {
                return bad("density needs matching nonempty r and a samples".into());
            }
            if r[0] <= 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                return bad("density abscissae must be positive and strictly increasing".into());
            }
            if a.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return bad("density must be finite and nonnegative".into());
            }
            if let Some(k) = (1..a.len()).find(|&k| a[k] < a[k - 1]) {
                return bad(format!("density decreases between r = {} and r = {}", r[k - 1], r[k]));
            }
            if a.iter().all(|&x| x == 0.0) {
                return bad("density is identically zero".into());
            }
            if a[0] == 0.0 {
                let last_zero = a.iter().rposition(|&x| x == 0.0).unwrap();
                plateau = Some(r[last_zero]);
            }
        }
        _ => {}
    }
    let mut f = YoungFunction { label: spec.to_string(), repr: Repr::Closed(spec.clone()), table: empty_table() };
    f.table = sample_exact(&f, &grid.points(), plateau, None);
    match spec {
        Family::Power { p } => {
            f.table.head = PowerLaw { exponent: *p, coeff: 1.0 };
            f.table.tail = Tail::Power(PowerLaw { exponent: *p, coeff: 1.0 });
        }
        Family::Linear => {
            f.table.head = PowerLaw { exponent: 1.0, coeff: 1.0 };
            f.table.tail = Tail::Power(PowerLaw { exponent: 1.0, coeff: 1.0 });
        }
        Family::TwoPower { p, .. } => f.table.head = PowerLaw { exponent: *p, coeff: 1.0 },
        Family::Density { a, .. } if a[0] > 0.0 => f.table.head = PowerLaw { exponent: 1.0, coeff: a[0] },
        _ => {}
    }
    f.validate()?;
    Ok(f)
}

/// Sharpens a table-derived inverse against the exact evaluator by
/// bisection on the monotone predicate `F(s) ≤ y` (right) / `F(s) < y`
/// (left).
fn refine_inverse(f: impl Fn(f64) -> Ext, y: f64, side: Side, guess: f64, bracket: (f64, f64)) -> Inverse {
    let below = |s: f64| -> bool {
        match f(s) {
            Ext::Finite(v) => match side {
                Side::Right => v <= y,
                Side::Left => v < y,
            },
            Ext::Infinite => false,
        }
    };
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0) || !below(lo) {
        lo = guess;
        let mut k = 0;
        while lo > 0.0 && !below(lo) {
            lo = if k > 60 { 0.0 } else { lo * 0.5 };
            k += 1;
        }
    }
    if !hi.is_finite() || below(hi) {
        hi = guess.max(lo).max(f64::MIN_POSITIVE) * (1.0 + 1e-9);
        let mut k = 0;
        while below(hi) {
            hi *= 2.0;
            k += 1;
            if k > 2000 || !hi.is_finite() {
                return Inverse { value: lo, saturated: true };
            }
        }
    }
    for _ in 0..200 {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Inverse::finite(match side {
        Side::Right => lo,
        Side::Left => hi,
    })
}

/// A nondecreasing function known through samples (no convexity).
#[derive(Clone, Debug)]
pub struct MonotoneFunction {
    label: String,
    table: SampleTable,
}

impl MonotoneFunction {
    pub fn new(label: impl Into<String>, table: SampleTable) -> Result<Self> {
        check_abscissae(&table.s).or_else(|e| if table.s.is_empty() { Ok(()) } else { Err(e) })?;
        if table.v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument("monotone samples must be finite and nonnegative".into()));
        }
        if let Some(k) = (1..table.v.len()).find(|&k| table.v[k] < table.v[k - 1] * (1.0 - 1e-12)) {
            return Err(Error::InvalidArgument(format!("samples decrease at s = {:e}", table.s[k])));
        }
        Ok(MonotoneFunction { label: label.into(), table })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn table(&self) -> &SampleTable {
        &self.table
    }

    pub fn eval(&self, s: f64) -> Result<Ext> {
        if !(s >= 0.0) {
            return Err(Error::InvalidArgument(format!("s must be ≥ 0, got {s}")));
        }
        Ok(self.table.eval(s))
    }

    pub fn tail(&self) -> Tail {
        self.table.tail
    }

    /// Supremum when the function is bounded.
    pub fn supremum(&self) -> Option<f64> {
        match self.table.tail {
            Tail::Bounded { sup, .. } => Some(sup),
            _ => None,
        }
    }
}

impl Monotone for MonotoneFunction {
    fn value(&self, s: f64) -> Ext {
        self.table.eval(s)
    }

    fn inverse(&self, y: f64, side: Side) -> Inverse {
        self.table.inverse(y, side)
    }
}
