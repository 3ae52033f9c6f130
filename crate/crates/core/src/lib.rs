//! Young-function calculus, optimal Orlicz–Sobolev embedding targets, Boyd
//! indices and Luxemburg norms, together with a numerical harness that
//! replays the cut-off / radius-halving argument linking Orlicz–Sobolev
//! embeddings to the measure density condition
//!
//! ```text
//! |B(x, r) ∩ Ω| ≥ c rⁿ     for all x ∈ Ω, 0 < r ≤ 1
//! ```
//!
//! on rasterized domains.
//!
//! Module map:
//!
//! * [`young`]: Young functions, conjugates, generalized inverses, `Ā`,
//!   growth comparison and the `YF1` exchange format.
//! * [`sobolev`]: optimal targets `A_n`, `Ā_n`, `A_{n/m}`, the auxiliary
//!   scales `Φ`, `C`, `D`, `E` and the ratio-decay check.
//! * [`boyd`]: local upper Boyd index and the pointwise / integral growth
//!   conditions.
//! * [`field`] and [`norms`]: sampled functions, finite differences,
//!   modulars, Luxemburg and Orlicz–Sobolev norms.
//! * [`raster`]: occupancy-grid domains, ball measures, density sweeps,
//!   half-measure radii and the `ORD1` format.
//! * [`harness`]: cut-offs, embedding probes, radius chains and the final
//!   necessity report.
//! * [`cli`]: the `orliczkit` command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boyd;
pub mod cli;
mod error;
pub mod field;
pub mod harness;
pub mod norms;
pub mod quad;
pub mod raster;
pub mod sobolev;
pub mod young;

pub use error::{Error, Result};
