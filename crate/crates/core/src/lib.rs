//! Normalized maximum likelihood code-lengths for data on Riemannian manifolds.
//!
//! Code-lengths are measured against densities taken with respect to the
//! Riemannian volume element, which makes them independent of the chart the
//! data happen to be written in. The crate provides the general asymptotic
//! parametric-complexity machinery and a complete instantiation for the
//! Riemannian Gaussian distribution on the hyperbolic space `H^D`
//! (curvature fixed to `-1`).
//!
//! Module map:
//!
//! | module         | contents                                                      |
//! |----------------|---------------------------------------------------------------|
//! | [`hygeo`]      | Lorentz / Poincaré models, distances, exp/log, isometries, volumes |
//! | [`quad`]       | adaptive 1-D quadrature, `erf`, seeded Monte Carlo            |
//! | [`rgd`]        | Riemannian Gaussian: normaliser, density, sampling, MLE       |
//! | [`fisher`]     | closed-form and Monte-Carlo Fisher information                |
//! | [`complexity`] | parametric complexity, code-lengths, regret, chart gap        |
//! | [`coding`]     | prefix-code lengths on a partition of a geodesic ball         |
//! | [`select`]     | dimension selection by minimum code-length                    |
//! | [`io`]         | dataset and result file formats                               |
//! | [`validate`]   | the oracle suites behind `rmnml validate`                     |
//!
//! All code-lengths are in nats unless stated otherwise; the [`coding`] module
//! works in bits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coding;
pub mod complexity;
pub mod error;
pub mod fisher;
pub mod hygeo;
pub mod io;
pub mod quad;
pub mod rgd;
pub mod select;
pub mod validate;

pub use complexity::{CodeLengthReport, ParamDomain, PcResult};
pub use error::{Error, Result};
pub use hygeo::{Chart, LorentzPoint, PoincarePoint, PolarCoords, TangentVector};
pub use quad::{QuadMethod, QuadSpec, RngSeed};
pub use rgd::{Dataset, RgdParams};
