//! Functions sampled at the occupied cell centers of a raster.
//!
//! Values live on a rectangular window of the grid and are zero outside it,
//! so a compactly supported function costs only its support. Differences
//! are central where both neighbours are occupied and one-sided otherwise;
//! each difference grows the window by one cell along its axis, which
//! keeps derivatives of windowed functions exact.

use crate::raster::RasterDomain;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SampledFunction<'a> {
    domain: &'a RasterDomain,
    lo: [usize; 3],
    dims: [usize; 3],
    values: Vec<f64>,
    order: u32,
}

impl<'a> SampledFunction<'a> {
    /// Samples `f` on every occupied cell.
    pub fn from_fn(domain: &'a RasterDomain, order: u32, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn_in(domain, order, [0; 3], domain.dims(), f)
    }

    /// Samples `f` on the occupied cells whose centers lie in the closed box
    /// `[lo, hi]`; `f` is taken to vanish elsewhere.
    pub fn from_fn_boxed(domain: &'a RasterDomain, order: u32, lo: &[f64], hi: &[f64], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = domain.dim();
        if lo.len() != n || hi.len() != n {
            return Err(Error::InvalidArgument(format!("box corners must be {n}-vectors")));
        }
        let h = domain.h();
        let o = domain.origin();
        let gd = domain.dims();
        let mut a = [0usize; 3];
        let mut dims = [1usize; 3];
        for d in 0..n {
            let i0 = ((lo[d] - o[d]) / h - 0.5).ceil().max(0.0);
            let i1 = ((hi[d] - o[d]) / h - 0.5).floor().min(gd[d] as f64 - 1.0);
            if i1 < i0 {
                return Self::from_fn_in(domain, order, [0; 3], [0, 0, 0], f);
            }
            a[d] = i0 as usize;
            dims[d] = (i1 - i0) as usize + 1;
        }
        Self::from_fn_in(domain, order, a, dims, f)
    }

    fn from_fn_in(domain: &'a RasterDomain, order: u32, lo: [usize; 3], dims: [usize; 3], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = domain.dim();
        let total: usize = dims.iter().product();
        let mut values = vec![0.0; total];
        let mut k = 0;
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    let c = [lo[0] + x, lo[1] + y, lo[2] + z];
                    if domain.is_occupied(domain.index(c)) {
                        let v = f(&domain.center(c)[..n]);
                        if !v.is_finite() {
                            return Err(Error::InvalidArgument(format!("non-finite sample {v} at cell {c:?}")));
                        }
                        values[k] = v;
                    }
                    k += 1;
                }
            }
        }
        Ok(SampledFunction { domain, lo, dims, values, order })
    }

    pub fn domain(&self) -> &'a RasterDomain {
        self.domain
    }

    /// Highest difference order this function was declared for.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut g = self.clone();
        g.values.iter_mut().for_each(|v| *v *= t);
        g
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut g = self.clone();
        for k in 0..g.values.len() {
            if g.domain.is_occupied(g.global_index(k)) {
                g.values[k] = f(g.values[k]);
            }
        }
        g
    }

    fn global_index(&self, k: usize) -> usize {
        let x = k % self.dims[0];
        let y = (k / self.dims[0]) % self.dims[1];
        let z = k / (self.dims[0] * self.dims[1]);
        self.domain.index([self.lo[0] + x, self.lo[1] + y, self.lo[2] + z])
    }

    /// Value at a grid cell; zero outside the window.
    pub fn at(&self, c: [usize; 3]) -> f64 {
        let mut k = 0;
        let mut stride = 1;
        for d in 0..3 {
            if c[d] < self.lo[d] || c[d] >= self.lo[d] + self.dims[d] {
                return 0.0;
            }
            k += (c[d] - self.lo[d]) * stride;
            stride *= self.dims[d];
        }
        self.values[k]
    }

    /// Values on the occupied cells of the window, in grid order.
    pub fn occupied_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().enumerate().filter(|(k, _)| self.domain.is_occupied(self.global_index(*k))).map(|(_, v)| *v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// One difference along `axis`.
    pub fn difference(&self, axis: usize) -> Result<Self> {
        if axis >= self.domain.dim() {
            return Err(Error::InvalidArgument(format!("axis {axis} in dimension {}", self.domain.dim())));
        }
        let gd = self.domain.dims();
        let mut lo = self.lo;
        let mut dims = self.dims;
        if dims[axis] > 0 {
            let a = lo[axis].saturating_sub(1);
            let b = (lo[axis] + dims[axis] + 1).min(gd[axis]);
            lo[axis] = a;
            dims[axis] = b - a;
        }
        let h = self.domain.h();
        let dom = self.domain;
        let total: usize = dims.iter().product();
        let mut values = vec![0.0; total];
        let mut k = 0;
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    let c = [lo[0] + x, lo[1] + y, lo[2] + z];
                    if dom.is_occupied(dom.index(c)) {
                        let up = dom.neighbour(c, axis, true).filter(|&j| dom.is_occupied(j));
                        let dn = dom.neighbour(c, axis, false).filter(|&j| dom.is_occupied(j));
                        let shift = |up: bool| {
                            let mut e = c;
                            if up {
                                e[axis] += 1;
                            } else {
                                e[axis] -= 1;
                            }
                            self.at(e)
                        };
                        values[k] = match (up, dn) {
                            (Some(_), Some(_)) => (shift(true) - shift(false)) / (2.0 * h),
                            (Some(_), None) => (shift(true) - self.at(c)) / h,
                            (None, Some(_)) => (self.at(c) - shift(false)) / h,
                            (None, None) => 0.0,
                        };
                    }
                    k += 1;
                }
            }
        }
        Ok(SampledFunction { domain: dom, lo, dims, values, order: self.order.saturating_sub(1) })
    }

    /// `D^α f` as iterated first differences.
    pub fn derivative(&self, alpha: &[u32]) -> Result<Self> {
        let total: u32 = alpha.iter().sum();
        if total > self.order {
            return Err(Error::InvalidArgument(format!(
                "derivative of order {total} exceeds the declared order {}",
                self.order
            )));
        }
        let mut g = self.clone();
        for (axis, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                g = g.difference(axis)?;
            }
        }
        Ok(g)
    }
}

/// All multi-indices of length `n` with `|α| ≤ m`, in graded order.
pub fn multi_indices(n: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=m {
        let mut cur = vec![0u32; n];
        fill(&mut out, &mut cur, 0, total);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        fill(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}
