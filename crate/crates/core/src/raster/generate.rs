//! Analytic domains sampled at cell centers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use serde::Serialize;

use super::{DomainMeta, RasterDomain};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    /// `(lo, hi)ⁿ`.
    Cube { lo: f64, hi: f64 },
    /// Ball of the given radius about the origin.
    Ball { radius: f64 },
    /// `{x' ∈ (0,1)^{n−1}, 0 < xₙ < ½ + amp·Σ|xᵢ − ½|}`.
    LipschitzGraph { amp: f64 },
    /// `{0 < x₁ < 1, 0 < xᵢ < x₁^γ for i ≥ 2}`; the tip sits at the origin.
    InwardCusp { gamma: f64 },
    /// Unit cube with centered holes of relative side `4^{−k}` removed from
    /// each of the `2^{(k−1)n}` sub-cubes at stage `k`.
    FatCarpet { stages: u32 },
}

/// One stage of the carpet schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarpetStage {
    pub stage: u32,
    pub cells_per_axis: u64,
    pub relative_side: f64,
    /// Measure removed at this stage.
    pub removed: f64,
}

impl Shape {
    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Cube { .. } => "cube",
            Shape::Ball { .. } => "ball",
            Shape::LipschitzGraph { .. } => "lipschitz-graph",
            Shape::InwardCusp { .. } => "inward-cusp",
            Shape::FatCarpet { .. } => "fat-carpet",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDomain(m));
        match *self {
            Shape::Cube { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => bad(format!("cube ({lo}, {hi})")),
            Shape::Ball { radius } if !(radius > 0.0 && radius.is_finite()) => bad(format!("ball radius {radius}")),
            Shape::LipschitzGraph { amp } if !(amp >= 0.0 && amp.is_finite()) => bad(format!("graph amplitude {amp}")),
            Shape::InwardCusp { gamma } if !(gamma > 1.0 && gamma.is_finite()) => {
                bad(format!("cusp exponent {gamma} must exceed 1"))
            }
            Shape::FatCarpet { stages } if stages == 0 || stages > 12 => bad(format!("carpet stages {stages} not in 1..=12")),
            _ => Ok(()),
        }
    }

    /// Bounding box `(lo, hi)` per axis.
    fn bbox(&self, n: usize) -> ([f64; 3], [f64; 3]) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..n {
            let (a, b) = match *self {
                Shape::Cube { lo, hi } => (lo, hi),
                Shape::Ball { radius } => (-radius, radius),
                Shape::LipschitzGraph { amp } if d == n - 1 => (0.0, 0.5 + amp * 0.5 * (n - 1) as f64),
                Shape::InwardCusp { .. } | Shape::LipschitzGraph { .. } | Shape::FatCarpet { .. } => (0.0, 1.0),
            };
            lo[d] = a;
            hi[d] = b;
        }
        (lo, hi)
    }

    fn contains(&self, p: &[f64]) -> bool {
        let n = p.len();
        match *self {
            Shape::Cube { lo, hi } => p.iter().all(|&x| lo < x && x < hi),
            Shape::Ball { radius } => p.iter().map(|x| x * x).sum::<f64>() < radius * radius,
            Shape::LipschitzGraph { amp } => {
                let base = &p[..n - 1];
                base.iter().all(|&x| 0.0 < x && x < 1.0) && {
                    let top = 0.5 + amp * base.iter().map(|x| (x - 0.5).abs()).sum::<f64>();
                    0.0 < p[n - 1] && p[n - 1] < top
                }
            }
            Shape::InwardCusp { gamma } => {
                let x1 = p[0];
                0.0 < x1 && x1 < 1.0 && {
                    let w = x1.powf(gamma);
                    p[1..].iter().all(|&y| 0.0 < y && y < w)
                }
            }
            Shape::FatCarpet { stages } => {
                if !p.iter().all(|&x| 0.0 < x && x < 1.0) {
                    return false;
                }
                (1..=stages).all(|k| {
                    let side = 0.5f64.powi(k as i32 - 1);
                    let half = 0.5 * side * 0.25f64.powi(k as i32);
                    !p.iter().all(|&x| {
                        let q = (x / side).floor();
                        (x - (q + 0.5) * side).abs() <= half
                    })
                })
            }
        }
    }

    fn meta(&self, n: usize) -> DomainMeta {
        let mut params = BTreeMap::new();
        let nf = n as f64;
        let mut schedule = Vec::new();
        let exact = match *self {
            Shape::Cube { lo, hi } => {
                params.insert("lo".into(), lo);
                params.insert("hi".into(), hi);
                Some((hi - lo).powf(nf))
            }
            Shape::Ball { radius } => {
                params.insert("radius".into(), radius);
                Some(super::unit_ball_volume(n) * radius.powf(nf))
            }
            Shape::LipschitzGraph { amp } => {
                params.insert("amp".into(), amp);
                // mean of |x − ½| over (0,1) is ¼
                Some(0.5 + amp * 0.25 * (nf - 1.0))
            }
            Shape::InwardCusp { gamma } => {
                params.insert("gamma".into(), gamma);
                Some(1.0 / ((nf - 1.0) * gamma + 1.0))
            }
            Shape::FatCarpet { stages } => {
                params.insert("stages".into(), stages as f64);
                let mut m = 1.0;
                for k in 1..=stages {
                    let removed = 0.25f64.powf(k as f64 * nf);
                    m -= removed;
                    schedule.push(CarpetStage {
                        stage: k,
                        cells_per_axis: 1 << (k - 1),
                        relative_side: 0.25f64.powi(k as i32),
                        removed,
                    });
                }
                Some(m)
            }
        };
        DomainMeta { kind: self.kind().into(), params, exact_measure: exact, schedule }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Cube { lo, hi } => write!(f, "cube:{lo},{hi}"),
            Shape::Ball { radius } => write!(f, "ball:{radius}"),
            Shape::LipschitzGraph { amp } => write!(f, "lipschitz-graph:{amp}"),
            Shape::InwardCusp { gamma } => write!(f, "inward-cusp:{gamma}"),
            Shape::FatCarpet { stages } => write!(f, "fat-carpet:{stages}"),
        }
    }
}

/// `kind[:p1,p2]`; parameters default to the unit cube, unit ball,
/// amplitude ½, `γ = 2` and four carpet stages.
impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Shape> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let ps: Vec<f64> = if rest.trim().is_empty() {
            vec![]
        } else {
            rest.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad parameter {t:?} in {s:?}"))))
                .collect::<Result<_>>()?
        };
        let arg = |i: usize, d: f64| ps.get(i).copied().unwrap_or(d);
        let shape = match kind.trim() {
            "cube" => Shape::Cube { lo: arg(0, 0.0), hi: arg(1, 1.0) },
            "ball" => Shape::Ball { radius: arg(0, 1.0) },
            "lipschitz-graph" | "lipschitz" => Shape::LipschitzGraph { amp: arg(0, 0.5) },
            "inward-cusp" | "cusp" => Shape::InwardCusp { gamma: arg(0, 2.0) },
            "fat-carpet" | "carpet" => {
                let k = arg(0, 4.0);
                if k.fract() != 0.0 || k < 0.0 {
                    return Err(Error::InvalidArgument(format!("carpet stages {k}")));
                }
                Shape::FatCarpet { stages: k as u32 }
            }
            other => return Err(Error::InvalidArgument(format!("unknown domain kind {other:?}"))),
        };
        shape.validate()?;
        Ok(shape)
    }
}

/// Rasterizes `shape` in dimension `n` with spacing `h`.
pub fn generate(shape: &Shape, n: usize, h: f64) -> Result<RasterDomain> {
    shape.validate()?;
    if !(n == 2 || n == 3) {
        return Err(Error::InvalidDomain(format!("dimension {n} not in {{2, 3}}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidDomain(format!("grid spacing {h}")));
    }
    let (lo, hi) = shape.bbox(n);
    let mut dims = [1usize; 3];
    for d in 0..n {
        let cells = ((hi[d] - lo[d]) / h - 1e-9).ceil();
        if cells > 1e5 {
            return Err(Error::InvalidDomain(format!("{cells} cells per axis at h = {h}")));
        }
        dims[d] = cells.max(1.0) as usize;
    }
    let total: usize = dims.iter().product();
    if total > 1 << 30 {
        return Err(Error::InvalidDomain(format!("{total} cells exceed the raster budget")));
    }
    let mut bits = bitvec![0; total];
    let mut p = [0.0; 3];
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let c = [i, j, k];
                for d in 0..n {
                    p[d] = lo[d] + (c[d] as f64 + 0.5) * h;
                }
                if shape.contains(&p[..n]) {
                    bits.set((k * dims[1] + j) * dims[0] + i, true);
                }
            }
        }
    }
    let mut meta = shape.meta(n);
    meta.kind = shape.to_string();
    RasterDomain::from_bits(n, h, lo, dims, bits, meta)
        .map_err(|e| Error::InvalidDomain(format!("{shape} at h = {h}: {e}")))
}
