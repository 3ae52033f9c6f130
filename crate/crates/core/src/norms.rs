//! Modulars, Luxemburg norms and Orlicz–Sobolev norms of sampled functions.
//!
//! Sums are taken over fixed 4096-term chunks, then combined by a pairwise
//! tree, so the result does not depend on how many workers ran.

use rayon::prelude::*;

use crate::field::{multi_indices, SampledFunction};
use crate::young::{Ext, Monotone, Side, YoungFunction};
use crate::{Error, Result};

const CHUNK: usize = 4096;
/// Relative width at which the λ search stops.
pub const LUX_REL_TOL: f64 = 1e-6;
const MAX_ITERS: usize = 400;

/// `hⁿ Σ A(|f|/λ)` over occupied cells.
pub fn modular(f: &SampledFunction, a: &YoungFunction, lambda: f64) -> Result<Ext> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} must be positive")));
    }
    let vals = magnitudes(f);
    Ok(modular_of(&vals, a, lambda, f.domain().cell_volume()))
}

fn magnitudes(f: &SampledFunction) -> Vec<f64> {
    f.occupied_values().map(f64::abs).filter(|v| *v > 0.0).collect()
}

fn modular_of(vals: &[f64], a: &YoungFunction, lambda: f64, cell: f64) -> Ext {
    let partial: Vec<Option<f64>> = vals
        .par_chunks(CHUNK)
        .map(|c| {
            let mut s = 0.0;
            for &v in c {
                s += a.value(v / lambda).finite()?;
            }
            Some(s)
        })
        .collect();
    let mut sums = Vec::with_capacity(partial.len());
    for p in partial {
        match p {
            Some(s) if s.is_finite() => sums.push(s),
            _ => return Ext::Infinite,
        }
    }
    Ext::Finite(pairwise(&sums) * cell)
}

fn pairwise(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}

/// `‖χ_E‖ = 1 / A⁻¹(1/|E|)`.
pub fn chi_norm_closed(a: &YoungFunction, measure: f64) -> Result<f64> {
    if !(measure > 0.0) {
        return Err(Error::InvalidArgument(format!("measure {measure} must be positive")));
    }
    Ok(1.0 / a.inverse(1.0 / measure, Side::Right).value)
}

/// `inf{λ > 0 : modular(f, A, λ) ≤ 1}`.
///
/// Regula falsi (Illinois variant) on `ln modular` against `ln λ`, which is
/// exactly linear for powers, with bisection whenever an endpoint is
/// infinite or the bracket fails to halve.
pub fn luxemburg_norm(f: &SampledFunction, a: &YoungFunction) -> Result<f64> {
    let vals = magnitudes(f);
    if vals.is_empty() {
        return Ok(0.0);
    }
    let cell = f.domain().cell_volume();
    let measure = f.domain().measure();
    let max = vals.iter().copied().fold(0.0, f64::max);
    let ainv = a.inverse(1.0 / measure, Side::Right).value;
    let mut hi = max * if ainv > 0.0 { (1.0 / ainv).max(1.0) } else { 1.0 };
    let mut lo = hi * 1e-12;
    let phi = |lam: f64| match modular_of(&vals, a, lam, cell) {
        Ext::Finite(m) if m > 0.0 => m.ln(),
        Ext::Finite(_) => f64::NEG_INFINITY,
        Ext::Infinite => f64::INFINITY,
    };
    let mut fhi = phi(hi);
    let mut grow = 0;
    while fhi > 0.0 {
        if grow == 60 {
            return Err(Error::Norm(format!(
                "modular stays above 1 on [{lo:.3e}, {hi:.3e}] for {}",
                a.label()
            )));
        }
        lo = hi;
        hi *= 4.0;
        fhi = phi(hi);
        grow += 1;
    }
    let mut flo = phi(lo);
    let mut shrink = 0;
    while flo <= 0.0 {
        if shrink == 60 {
            return Ok(lo);
        }
        hi = lo;
        fhi = flo;
        lo *= 1e-3;
        flo = phi(lo);
        shrink += 1;
    }
    // invariant: phi(lo) > 0 ≥ phi(hi)
    let (mut u0, mut u1) = (lo.ln(), hi.ln());
    let mut side = 0i8;
    let mut width = u1 - u0;
    for it in 0..MAX_ITERS {
        if (u1 - u0).exp() - 1.0 <= LUX_REL_TOL {
            break;
        }
        let bisect = !flo.is_finite() || !fhi.is_finite() || (it % 3 == 2 && u1 - u0 > 0.5 * width);
        if it % 3 == 2 {
            width = u1 - u0;
        }
        let mut u = if bisect { 0.5 * (u0 + u1) } else { u1 - fhi * (u1 - u0) / (fhi - flo) };
        // keep strictly inside, and step past the root by a hair so both
        // ends move
        let eps = 0.25 * LUX_REL_TOL;
        u = u.clamp(u0 + eps.min(0.5 * (u1 - u0)), u1 - eps.min(0.5 * (u1 - u0)));
        let fu = phi(u.exp());
        if fu > 0.0 {
            u0 = u;
            flo = fu;
            if side == -1 && fhi.is_finite() {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            u1 = u;
            fhi = fu;
            if side == 1 && flo.is_finite() {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(u1.exp())
}

/// `Σ_{|α|≤m} ‖D^α f‖`, with the term for each multi-index.
pub fn sobolev_terms(f: &SampledFunction, a: &YoungFunction, m: u32) -> Result<Vec<(Vec<u32>, f64)>> {
    if m > f.order() {
        return Err(Error::InvalidArgument(format!(
            "order {m} exceeds the declared stencil order {}",
            f.order()
        )));
    }
    multi_indices(f.domain().dim(), m)
        .into_iter()
        .map(|alpha| {
            let d = f.derivative(&alpha)?;
            Ok((alpha, luxemburg_norm(&d, a)?))
        })
        .collect()
}

pub fn sobolev_norm(f: &SampledFunction, a: &YoungFunction, m: u32) -> Result<f64> {
    Ok(sobolev_terms(f, a, m)?.iter().map(|t| t.1).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{generate, Shape};

    fn unit_square(h: f64) -> crate::raster::RasterDomain {
        generate(&Shape::Cube { lo: 0.0, hi: 1.0 }, 2, h).unwrap()
    }

    #[test]
    fn modular_examples() {
        let d = unit_square(1.0 / 32.0);
        let sq = YoungFunction::power(2.0).unwrap();
        let zero = SampledFunction::from_fn(&d, 1, |_| 0.0).unwrap();
        assert_eq!(modular(&zero, &sq, 0.3).unwrap(), Ext::Finite(0.0));
        let chi = SampledFunction::from_fn(&d, 1, |x| if x[0] < 0.25 { 1.0 } else { 0.0 }).unwrap();
        assert!((modular(&chi, &sq, 1.0).unwrap().finite().unwrap() - 0.25).abs() < 1e-12);
        let c = SampledFunction::from_fn(&d, 1, |_| 3.0).unwrap();
        assert!((modular(&c, &sq, 3.0).unwrap().finite().unwrap() - 1.0).abs() < 1e-12);
        assert!(modular(&c, &sq, 0.0).is_err());
    }

    #[test]
    fn constant_norm() {
        let d = unit_square(1.0 / 32.0);
        let c = SampledFunction::from_fn(&d, 1, |_| 3.0).unwrap();
        for (a, expect) in [(YoungFunction::power(2.0).unwrap(), 3.0), (YoungFunction::power(3.0).unwrap(), 3.0)] {
            let v = luxemburg_norm(&c, &a).unwrap();
            assert!((v / expect - 1.0).abs() < 2e-6, "{v}");
        }
        let zero = SampledFunction::from_fn(&d, 1, |_| 0.0).unwrap();
        assert_eq!(luxemburg_norm(&zero, &YoungFunction::power(2.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn chi_closed_examples() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert!((chi_norm_closed(&sq, 0.25).unwrap() - 0.5).abs() < 1e-12);
        assert!((chi_norm_closed(&YoungFunction::linear(), 2.0).unwrap() - 2.0).abs() < 1e-12);
        let cube = YoungFunction::power(3.0).unwrap();
        assert!((chi_norm_closed(&cube, 0.125).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn indicator_matches_closed_form() {
        let d = unit_square(1.0 / 64.0);
        let chi = SampledFunction::from_fn(&d, 1, |x| if x[1] < 0.3 { 1.0 } else { 0.0 }).unwrap();
        let meas = chi.occupied_values().filter(|v| *v != 0.0).count() as f64 * d.cell_volume();
        for a in [YoungFunction::power(2.0).unwrap(), YoungFunction::power_log(2.0, 1.0).unwrap()] {
            let v = luxemburg_norm(&chi, &a).unwrap();
            let c = chi_norm_closed(&a, meas).unwrap();
            assert!((v / c - 1.0).abs() < 1e-5, "{v} vs {c}");
        }
    }

    #[test]
    fn threshold_and_sobolev() {
        let d = unit_square(1.0 / 32.0);
        let sq = YoungFunction::power(2.0).unwrap();
        let f = SampledFunction::from_fn(&d, 1, |x| x[0]).unwrap();
        let v = luxemburg_norm(&f, &sq).unwrap();
        assert!(modular(&f, &sq, v * (1.0 + 1e-5)).unwrap().finite().unwrap() <= 1.0);
        let terms = sobolev_terms(&f, &sq, 1).unwrap();
        assert!((terms[1].1 - 1.0).abs() < 1e-5, "{terms:?}");
        assert!(terms[2].1 == 0.0);
        assert!(sobolev_norm(&f, &sq, 2).is_err());
        let c = SampledFunction::from_fn(&d, 1, |_| 2.0).unwrap();
        assert!((sobolev_norm(&c, &sq, 1).unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn bounded_conjugate_saturates() {
        let d = unit_square(1.0 / 16.0);
        let lin = crate::young::conjugate(&YoungFunction::linear()).unwrap();
        let f = SampledFunction::from_fn(&d, 1, |_| 1.0).unwrap();
        assert_eq!(modular(&f, &lin, 0.5).unwrap(), Ext::Infinite);
        assert_eq!(modular(&f, &lin, 2.0).unwrap(), Ext::Finite(0.0));
        // L^∞ norm in disguise: Ã = ∞·χ_(1,∞)
        assert!((luxemburg_norm(&f, &lin).unwrap() - 1.0).abs() < 1e-5);
    }
}
