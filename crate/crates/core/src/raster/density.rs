//! Measure-density sweeps `c(x, r) = |B(x, r) ∩ Ω| / rⁿ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::RasterDomain;
use crate::{Error, Result};

/// Smallest radius, in cells, used by any sweep.
pub const MIN_RADIUS_CELLS: f64 = 8.0;

/// Log-slope of the per-radius minimum above which density is declared lost.
const FAIL_SLOPE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Sampling {
    AllBoundaryCells,
    /// `count` points drawn uniformly from occupied cells.
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityVerdict {
    /// The sampled minimum stays bounded away from zero.
    Holds,
    /// The minimum decays with the radius: fails measure density.
    Fails,
}

#[derive(Clone, Debug, Serialize)]
pub struct Minimizer {
    pub point: Vec<f64>,
    pub r: f64,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub domain: String,
    pub h: f64,
    pub sampling: Sampling,
    pub points: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    /// `matrix[j][k] = c(points[j], radii[k])`.
    pub matrix: Vec<Vec<f64>>,
    pub inf: f64,
    pub minimizer: Minimizer,
    /// Minimum over points, per radius.
    pub radius_minima: Vec<f64>,
    /// Log-log slope of `radius_minima` over the larger half of the radii,
    /// where the raster resolves the geometry; near 0 under measure density
    /// and near 1 at an inward cusp of `x₂ < x₁²` type.
    pub resolved_slope: f64,
    pub verdict: DensityVerdict,
    pub note: &'static str,
}

const NOTE: &str = "finite sample of points and radii; an estimate, not a certificate";

/// `c(x, r)` for each radius. `x` must lie in an occupied cell.
pub fn density_profile(d: &RasterDomain, x: &[f64], radii: &[f64]) -> Result<Vec<f64>> {
    if !d.contains(x) {
        return Err(Error::InvalidArgument(format!("point {x:?} is not in the domain")));
    }
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::InvalidArgument(format!("radius {r} not in (0, 1]")));
            }
            Ok(d.ball_measure(x, r)? / r.powi(d.dim() as i32))
        })
        .collect()
}

/// Geometric radii from `c_min·h` to 1.
pub fn radius_grid(h: f64, c_min: f64, count: usize) -> Result<Vec<f64>> {
    if c_min < MIN_RADIUS_CELLS {
        return Err(Error::InvalidArgument(format!("minimum radius {c_min}h is below {MIN_RADIUS_CELLS}h")));
    }
    let lo = c_min * h;
    if !(lo < 1.0) || count < 2 {
        return Err(Error::InvalidArgument(format!("no radius grid in [{lo}, 1] with {count} points")));
    }
    let step = lo.ln().abs() / (count - 1) as f64;
    Ok((0..count).map(|k| if k + 1 == count { 1.0 } else { (lo.ln() + k as f64 * step).exp() }).collect())
}

/// Sample points for a protocol, in deterministic order.
pub fn sample_points(d: &RasterDomain, sampling: &Sampling) -> Vec<Vec<f64>> {
    let n = d.dim();
    match *sampling {
        Sampling::AllBoundaryCells => d
            .occupied_cells()
            .filter(|&i| d.is_boundary_cell(i))
            .map(|i| d.center(d.cell(i))[..n].to_vec())
            .collect(),
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total = d.cell_count();
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let idx = rng.gen_range(0..total);
                if !d.is_occupied(idx) {
                    continue;
                }
                let c = d.center(d.cell(idx));
                let p: Vec<f64> = (0..n).map(|k| c[k] + (rng.gen::<f64>() - 0.5) * d.h() * 0.999).collect();
                out.push(p);
            }
            out
        }
    }
}

/// Infimum of `c(x, r)` over the sampled points and radii.
pub fn density_constant(d: &RasterDomain, sampling: &Sampling, radii: &[f64]) -> Result<DensityReport> {
    let floor = MIN_RADIUS_CELLS * d.h();
    if radii.is_empty() || radii.iter().any(|&r| !(r >= floor * (1.0 - 1e-12) && r <= 1.0)) {
        return Err(Error::InvalidArgument(format!("radii must lie in [{floor}, 1]")));
    }
    let points = sample_points(d, sampling);
    if points.is_empty() {
        return Err(Error::InvalidArgument("sampling produced no points".into()));
    }
    let matrix: Vec<Vec<f64>> =
        points.par_iter().map(|x| density_profile(d, x, radii)).collect::<Result<Vec<_>>>()?;
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (j, row) in matrix.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c < best.0 {
                best = (c, j, k);
            }
        }
    }
    let radius_minima: Vec<f64> =
        (0..radii.len()).map(|k| matrix.iter().map(|row| row[k]).fold(f64::INFINITY, f64::min)).collect();
    let slope = resolved_slope(radii, &radius_minima);
    let verdict = if best.0 > 0.0 && slope <= FAIL_SLOPE { DensityVerdict::Holds } else { DensityVerdict::Fails };
    Ok(DensityReport {
        domain: d.id(),
        h: d.h(),
        sampling: sampling.clone(),
        minimizer: Minimizer { point: points[best.1].clone(), r: radii[best.2], c: best.0 },
        points,
        radii: radii.to_vec(),
        matrix,
        inf: best.0,
        radius_minima,
        resolved_slope: slope,
        verdict,
        note: NOTE,
    })
}

/// Least-squares slope of `ln m` against `ln r` over the larger half.
///
/// At the smallest radii a thin feature is a one-cell strand and `c ~ h/r`,
/// which says more about the raster than the set.
fn resolved_slope(radii: &[f64], minima: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..radii.len()).collect();
    idx.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));
    let take = (radii.len().div_ceil(2)).max(2).min(radii.len());
    let pts: Vec<(f64, f64)> = idx[..take]
        .iter()
        .filter(|&&k| minima[k] > 0.0)
        .map(|&k| (radii[k].ln(), minima[k].ln()))
        .collect();
    if pts.len() < 2 {
        return if minima.iter().any(|&m| m <= 0.0) { f64::INFINITY } else { 0.0 };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// The infimum across resolutions.
#[derive(Clone, Debug, Serialize)]
pub struct ResolutionStudy {
    pub h: Vec<f64>,
    pub inf: Vec<f64>,
    /// `(max − min)/max` of the infima.
    pub variation: f64,
    pub stable: bool,
}

impl ResolutionStudy {
    pub fn new(reports: &[DensityReport], tol: f64) -> Self {
        let inf: Vec<f64> = reports.iter().map(|r| r.inf).collect();
        let hi = inf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = inf.iter().copied().fold(f64::INFINITY, f64::min);
        let variation = if hi > 0.0 { (hi - lo) / hi } else { f64::INFINITY };
        ResolutionStudy { h: reports.iter().map(|r| r.h).collect(), inf, variation, stable: variation < tol }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generate, Shape};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn corner_profile_is_quarter_disk() {
        let h = 1.0 / 256.0;
        let d = generate(&Shape::Cube { lo: 0.0, hi: 1.0 }, 2, h).unwrap();
        let radii: Vec<f64> = radius_grid(h, 8.0, 8).unwrap().into_iter().filter(|&r| r <= 0.5).collect();
        let c = density_profile(&d, &[0.0, 0.0], &radii).unwrap();
        for v in c {
            assert!((v / (PI / 4.0) - 1.0).abs() < 0.05, "{v}");
        }
    }

    #[test]
    fn ball_center_is_full() {
        let h = 1.0 / 128.0;
        let d = generate(&Shape::Ball { radius: 1.0 }, 2, h).unwrap();
        let c = density_profile(&d, &[0.001, 0.002], &[0.5, 0.9]).unwrap();
        for v in c {
            assert!((v / PI - 1.0).abs() < 0.03, "{v}");
        }
    }

    #[test]
    fn outside_point_rejected() {
        let d = generate(&Shape::Cube { lo: 0.0, hi: 1.0 }, 2, 1.0 / 64.0).unwrap();
        assert!(density_profile(&d, &[1.5, 0.5], &[0.5]).is_err());
    }

    #[test]
    fn radius_floor_enforced() {
        assert!(radius_grid(1.0 / 64.0, 4.0, 5).is_err());
        let r = radius_grid(1.0 / 64.0, 8.0, 5).unwrap();
        assert!((r[0] - 0.125).abs() < 1e-12 && r[4] == 1.0);
    }

    #[test]
    fn cube_inf_sits_at_a_corner() {
        let h = 1.0 / 128.0;
        let d = generate(&Shape::Cube { lo: 0.0, hi: 1.0 }, 2, h).unwrap();
        let radii = radius_grid(h, 8.0, 6).unwrap();
        let rep = density_constant(&d, &Sampling::AllBoundaryCells, &radii).unwrap();
        assert!(rep.inf > 0.75 * PI / 4.0);
        assert_eq!(rep.verdict, DensityVerdict::Holds);
        let p = &rep.minimizer.point;
        assert!(p.iter().all(|&t| t < 2.0 * h || t > 1.0 - 2.0 * h), "{p:?}");
    }

    #[test]
    fn cusp_fails() {
        let h = 1.0 / 256.0;
        let d = generate(&Shape::InwardCusp { gamma: 2.0 }, 2, h).unwrap();
        let radii = radius_grid(h, 8.0, 8).unwrap();
        let rep = density_constant(&d, &Sampling::AllBoundaryCells, &radii).unwrap();
        assert_eq!(rep.verdict, DensityVerdict::Fails, "slope {}", rep.resolved_slope);
    }

    #[test]
    fn random_sampling_is_seeded() {
        let d = generate(&Shape::Cube { lo: 0.0, hi: 1.0 }, 2, 1.0 / 64.0).unwrap();
        let a = sample_points(&d, &Sampling::Random { count: 5, seed: 7 });
        let b = sample_points(&d, &Sampling::Random { count: 5, seed: 7 });
        assert_eq!(a, b);
        assert!(a.iter().all(|p| d.contains(p)));
    }
}
