//! Occupancy-grid domains.
//!
//! A cell is occupied when its center lies in the open set. Balls are
//! measured by counting occupied centers within distance `r`, using
//! per-row prefix sums so one ball costs `O((r/h)^{n-1})`.

mod density;
mod format;
mod generate;

pub use density::{
    density_constant, density_profile, radius_grid, sample_points, DensityReport, DensityVerdict, Minimizer, ResolutionStudy,
    Sampling, MIN_RADIUS_CELLS,
};
pub use format::{read_ord1, write_ord1};
pub use generate::{generate, CarpetStage, Shape};

use std::collections::BTreeMap;

use bitvec::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

/// Minimum ball measure, in cells, for a meaningful halving.
pub const MIN_HALVING_CELLS: u64 = 16;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DomainMeta {
    pub kind: String,
    pub params: BTreeMap<String, f64>,
    /// Continuum measure when known in closed form.
    pub exact_measure: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<CarpetStage>,
}

#[derive(Clone, Debug)]
pub struct RasterDomain {
    n: usize,
    h: f64,
    origin: [f64; 3],
    dims: [usize; 3],
    bits: BitVec,
    count: u64,
    /// `prefix[row * (nx + 1) + i]` = occupied cells `< i` in that row.
    prefix: Vec<u32>,
    meta: DomainMeta,
}

impl PartialEq for RasterDomain {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n
            && self.h.to_bits() == o.h.to_bits()
            && self.origin.map(f64::to_bits) == o.origin.map(f64::to_bits)
            && self.dims == o.dims
            && self.bits == o.bits
    }
}

/// Result of one halving step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Halving {
    pub r: f64,
    pub r_tilde: f64,
    pub cells_r: u64,
    pub cells_tilde: u64,
}

impl RasterDomain {
    /// Builds a domain from its occupancy bits (x fastest, then y, then z).
    pub fn from_bits(n: usize, h: f64, origin: [f64; 3], dims: [usize; 3], bits: BitVec, meta: DomainMeta) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::InvalidDomain(format!("dimension {n} not in {{2, 3}}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidDomain(format!("grid spacing {h}")));
        }
        let dims = if n == 2 { [dims[0], dims[1], 1] } else { dims };
        let total = dims.iter().product::<usize>();
        if total == 0 || bits.len() != total {
            return Err(Error::InvalidDomain(format!("bit grid of {} cells for dims {dims:?}", bits.len())));
        }
        let count = bits.count_ones() as u64;
        if count == 0 {
            return Err(Error::InvalidDomain("no occupied cells".into()));
        }
        let nx = dims[0];
        let rows = dims[1] * dims[2];
        let mut prefix = vec![0u32; rows * (nx + 1)];
        for row in 0..rows {
            let base = row * (nx + 1);
            let mut acc = 0u32;
            for i in 0..nx {
                prefix[base + i] = acc;
                acc += bits[row * nx + i] as u32;
            }
            prefix[base + nx] = acc;
        }
        Ok(RasterDomain { n, h, origin, dims, bits, count, prefix, meta })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn meta(&self) -> &DomainMeta {
        &self.meta
    }

    pub fn occupied_count(&self) -> u64 {
        self.count
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    pub fn measure(&self) -> f64 {
        self.count as f64 * self.cell_volume()
    }

    pub fn id(&self) -> String {
        format!("{}@h={}", self.meta.kind, self.h)
    }

    pub(crate) fn bits(&self) -> &BitSlice {
        &self.bits
    }

    pub fn cell_count(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    #[inline]
    pub fn cell(&self, idx: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    #[inline]
    pub fn is_occupied(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    /// Center of a cell; unused coordinates are zero.
    #[inline]
    pub fn center(&self, c: [usize; 3]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (d, pd) in p.iter_mut().enumerate().take(self.n) {
            *pd = self.origin[d] + (c[d] as f64 + 0.5) * self.h;
        }
        p
    }

    /// Cell containing `x`, if it lies in the bounding box.
    pub fn locate(&self, x: &[f64]) -> Option<[usize; 3]> {
        if x.len() != self.n {
            return None;
        }
        let mut c = [0usize; 3];
        for d in 0..self.n {
            let u = ((x[d] - self.origin[d]) / self.h).floor();
            if !(u >= 0.0 && u < self.dims[d] as f64) {
                return None;
            }
            c[d] = u as usize;
        }
        Some(c)
    }

    /// `x` lies in an occupied cell.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.locate(x).is_some_and(|c| self.bits[self.index(c)])
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// Occupied cell with an unoccupied face neighbour (or on the box edge).
    pub fn is_boundary_cell(&self, idx: usize) -> bool {
        if !self.bits[idx] {
            return false;
        }
        let c = self.cell(idx);
        for d in 0..self.n {
            for up in [false, true] {
                match self.neighbour(c, d, up) {
                    Some(j) if self.bits[j] => {}
                    _ => return true,
                }
            }
        }
        false
    }

    #[inline]
    pub fn neighbour(&self, c: [usize; 3], axis: usize, up: bool) -> Option<usize> {
        let mut c = c;
        if up {
            if c[axis] + 1 >= self.dims[axis] {
                return None;
            }
            c[axis] += 1;
        } else {
            if c[axis] == 0 {
                return None;
            }
            c[axis] -= 1;
        }
        Some(self.index(c))
    }

    fn point3(&self, x: &[f64]) -> Result<[f64; 3]> {
        if x.len() != self.n || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("point {x:?} is not a finite {}-vector", self.n)));
        }
        let mut p = [0.0; 3];
        p[..self.n].copy_from_slice(x);
        Ok(p)
    }

    /// Index range of cells along `axis` whose centers satisfy `|c − x| ≤ w`.
    fn axis_range(&self, axis: usize, x: f64, w: f64) -> Option<(usize, usize)> {
        let o = self.origin[axis];
        let h = self.h;
        let len = self.dims[axis] as i64;
        let lo = (((x - w - o) / h) - 0.5).ceil() as i64 - 1;
        let hi = (((x + w - o) / h) - 0.5).floor() as i64 + 1;
        let lo = lo.max(0);
        let hi = hi.min(len - 1);
        if lo > hi {
            None
        } else {
            Some((lo as usize, hi as usize))
        }
    }

    /// Visits every row `(j, k)` that meets the ball, with the squared
    /// distance already used up by the `y` and `z` offsets.
    fn for_rows(&self, x: [f64; 3], r2: f64, mut f: impl FnMut(usize, f64)) {
        let r = r2.sqrt();
        let h = self.h;
        let (klo, khi) = if self.n == 3 {
            match self.axis_range(2, x[2], r) {
                Some(v) => v,
                None => return,
            }
        } else {
            (0, 0)
        };
        let Some((jlo, jhi)) = self.axis_range(1, x[1], r) else { return };
        for k in klo..=khi {
            let dz = if self.n == 3 { self.origin[2] + (k as f64 + 0.5) * h - x[2] } else { 0.0 };
            let rz = r2 - dz * dz;
            if rz < 0.0 {
                continue;
            }
            for j in jlo..=jhi {
                let dy = self.origin[1] + (j as f64 + 0.5) * h - x[1];
                let rem = rz - dy * dy;
                if rem < 0.0 {
                    continue;
                }
                f(k * self.dims[1] + j, rem);
            }
        }
    }

    /// Exact `[lo, hi]` range of `i` with `(c_i − x)² ≤ rem`.
    fn row_span(&self, x0: f64, rem: f64) -> Option<(usize, usize)> {
        let (mut lo, mut hi) = self.axis_range(0, x0, rem.sqrt())?;
        let d2 = |i: usize| {
            let d = self.origin[0] + (i as f64 + 0.5) * self.h - x0;
            d * d
        };
        while lo <= hi && d2(lo) > rem {
            lo += 1;
        }
        while hi >= lo && d2(hi) > rem {
            if hi == 0 {
                return None;
            }
            hi -= 1;
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }

    fn ball_cells(&self, x: [f64; 3], r2: f64) -> u64 {
        let nx1 = self.dims[0] + 1;
        let mut total = 0u64;
        self.for_rows(x, r2, |row, rem| {
            if let Some((lo, hi)) = self.row_span(x[0], rem) {
                let base = row * nx1;
                total += (self.prefix[base + hi + 1] - self.prefix[base + lo]) as u64;
            }
        });
        total
    }

    /// Occupied cells with center in the closed ball `B(x, r)`.
    pub fn ball_count(&self, x: &[f64], r: f64) -> Result<u64> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
        }
        let p = self.point3(x)?;
        Ok(self.ball_cells(p, r * r))
    }

    /// `|B(x, r) ∩ Ω|` as a cell count times `hⁿ`.
    pub fn ball_measure(&self, x: &[f64], r: f64) -> Result<f64> {
        Ok(self.ball_count(x, r)? as f64 * self.cell_volume())
    }

    /// Squared distances from `x` to the occupied centers within `r`.
    fn ball_distances(&self, x: [f64; 3], r2: f64) -> Vec<f64> {
        let nx = self.dims[0];
        let mut out = Vec::new();
        self.for_rows(x, r2, |row, rem| {
            if let Some((lo, hi)) = self.row_span(x[0], rem) {
                let off = r2 - rem;
                for i in lo..=hi {
                    if self.bits[row * nx + i] {
                        let d = self.origin[0] + (i as f64 + 0.5) * self.h - x[0];
                        out.push(d * d + off);
                    }
                }
            }
        });
        out
    }

    /// Smallest `R̃` with at least half the cells of `B(x, R)` inside
    /// `B(x, R̃)`, found as an exact order statistic of the center distances.
    pub fn halving_radius(&self, x: &[f64], r: f64) -> Result<Halving> {
        let cells_r = self.ball_count(x, r)?;
        if cells_r < MIN_HALVING_CELLS {
            return Err(Error::Resolution(format!(
                "B({x:?}, {r}) holds {cells_r} cells, need {MIN_HALVING_CELLS}; refine h below {:.3e}",
                required_h(self, cells_r)
            )));
        }
        let p = self.point3(x)?;
        let mut d2 = self.ball_distances(p, r * r);
        debug_assert_eq!(d2.len() as u64, cells_r);
        let k = cells_r.div_ceil(2) as usize;
        let (_, kth, _) = d2.select_nth_unstable_by(k - 1, f64::total_cmp);
        let target = *kth;
        let mut rt = target.sqrt();
        while rt * rt < target {
            rt = f64::from_bits(rt.to_bits() + 1);
        }
        // the row-wise inclusion test rounds differently from `d2`; nudge up
        let mut cells_tilde = self.ball_cells(p, rt * rt);
        let mut step = 1u64;
        while cells_tilde < k as u64 {
            rt = f64::from_bits(rt.to_bits() + step);
            step *= 2;
            cells_tilde = self.ball_cells(p, rt * rt);
        }
        Ok(Halving { r, r_tilde: rt, cells_r, cells_tilde })
    }
}

/// Spacing that would put `MIN_HALVING_CELLS` cells in a ball that now has `cells`.
fn required_h(d: &RasterDomain, cells: u64) -> f64 {
    let ratio = cells.max(1) as f64 / MIN_HALVING_CELLS as f64;
    d.h * ratio.powf(1.0 / d.n as f64)
}

/// Volume of the unit ball `ωₙ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 / 3.0 * std::f64::consts::PI,
        _ => {
            let nf = n as f64;
            std::f64::consts::PI.powf(nf / 2.0) / gamma_half_int(n + 2)
        }
    }
}

/// `Γ(k/2)` for positive integer `k`.
fn gamma_half_int(k: usize) -> f64 {
    if k == 1 {
        std::f64::consts::PI.sqrt()
    } else if k == 2 {
        1.0
    } else {
        (k as f64 / 2.0 - 1.0) * gamma_half_int(k - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cube(n: usize, lo: f64, hi: f64, h: f64) -> RasterDomain {
        generate(&Shape::Cube { lo, hi }, n, h).unwrap()
    }

    #[test]
    fn full_plane_disk() {
        let h = 1.0 / 128.0;
        let d = cube(2, -2.0, 2.0, h);
        let m = d.ball_measure(&[0.013, -0.027], 1.0).unwrap();
        assert!((m - PI).abs() < 4.0 * h, "{m}");
    }

    #[test]
    fn tiny_ball_is_one_cell() {
        let h = 1.0 / 64.0;
        let d = cube(2, 0.0, 1.0, h);
        let c = d.center([10, 20, 0]);
        assert_eq!(d.ball_measure(&c[..2], 0.4 * h).unwrap(), h * h);
    }

    #[test]
    fn corner_quarter_disk() {
        let h = 1.0 / 512.0;
        let d = cube(2, 0.0, 1.0, h);
        let r = 0.1;
        let m = d.ball_measure(&[0.0, 0.0], r).unwrap();
        assert!((m - PI * r * r / 4.0).abs() < 2.0 * h * r, "{m}");
    }

    #[test]
    fn halving_in_the_plane_and_space() {
        let h = 1.0 / 256.0;
        let d = cube(2, -1.0, 1.0, h);
        let x = [0.0031, 0.0107];
        let hv = d.halving_radius(&x, 0.5).unwrap();
        assert!((hv.r_tilde - 0.5 / 2f64.sqrt()).abs() < h);
        let tol = 2.0 / hv.cells_r as f64;
        assert!((hv.cells_tilde as f64 / hv.cells_r as f64 - 0.5).abs() <= tol);

        let h3 = 1.0 / 64.0;
        let d3 = cube(3, -1.0, 1.0, h3);
        let hv = d3.halving_radius(&[0.003, 0.011, -0.007], 0.5).unwrap();
        assert!((hv.r_tilde - 0.5 * 2f64.powf(-1.0 / 3.0)).abs() < h3);
    }

    #[test]
    fn halving_needs_cells() {
        let h = 1.0 / 64.0;
        let d = cube(2, 0.0, 1.0, h);
        let e = d.halving_radius(&[0.5, 0.5], 1.5 * h).unwrap_err();
        assert!(matches!(e, Error::Resolution(_)));
    }

    #[test]
    fn corner_halving() {
        let h = 1.0 / 512.0;
        let d = cube(2, 0.0, 1.0, h);
        let hv = d.halving_radius(&[0.0, 0.0], 0.2).unwrap();
        assert!((hv.r_tilde - 0.2 / 2f64.sqrt()).abs() < 2.0 * h);
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }
}
