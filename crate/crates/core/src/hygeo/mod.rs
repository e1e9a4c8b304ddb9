//! Hyperbolic geometry with curvature `-1`.
//!
//! Points are stored canonically in the Lorentz (hyperboloid) model
//! `{x in R^{D+1} : <x,x>_L = -1, x_0 > 0}`; the Poincaré ball is available
//! as a second chart through the stereographic map `p_i = x_i / (1 + x_0)`.
//!
//! Two coordinate charts matter for densities:
//!
//! * [`Chart::LorentzGraph`]: the hyperboloid written as a graph over its
//!   spatial coordinates `(x_1, .., x_D)`, with `sqrt(det g) = 1 / x_0`;
//! * [`Chart::Poincare`]: the ball model, with `sqrt(det g) = (2 / (1 - |p|^2))^D`.

pub(crate) mod maps;
mod point;
pub(crate) mod volume;

pub use maps::{dist, exp_map, isometry_to, log_map, Isometry};
pub use point::{LorentzPoint, PoincarePoint, PolarCoords, TangentVector};
pub use volume::{
    ball_volume, density_chart_transform, log_sqrt_det_metric, sphere_area, sqrt_det_metric,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the hyperboloid constraint `<x,x>_L = -1`, relative to `max(1, x_0^2)`.
pub const ON_MANIFOLD_TOL: f64 = 1e-9;

/// Points whose Minkowski product falls below `1 - OFF_MANIFOLD_BAND` in
/// `-<x,y>_L` are rejected by [`dist`] rather than clamped.
pub const OFF_MANIFOLD_BAND: f64 = 1e-7;

/// Coordinate charts in which a density on `H^D` can be expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// Spatial coordinates `(x_1, .., x_D)` of the hyperboloid.
    LorentzGraph,
    /// Poincaré ball coordinates.
    Poincare,
}

impl Chart {
    pub const ALL: [Chart; 2] = [Chart::LorentzGraph, Chart::Poincare];

    pub fn name(self) -> &'static str {
        match self {
            Chart::LorentzGraph => "lorentz-graph",
            Chart::Poincare => "poincare",
        }
    }
}

impl std::str::FromStr for Chart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lorentz-graph" | "lorentz" => Ok(Chart::LorentzGraph),
            "poincare" => Ok(Chart::Poincare),
            other => Err(Error::InvalidArgument(format!("unknown chart '{other}'"))),
        }
    }
}

/// Minkowski bilinear form `-x_0 y_0 + sum_{i>=1} x_i y_i`.
///
/// No manifold check is made; any two vectors of equal length are accepted.
pub fn minkowski_inner(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidArgument("empty vector".into()));
    }
    Ok(minkowski_unchecked(x, y))
}

#[inline]
pub(crate) fn minkowski_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let spatial: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
    spatial - x[0] * y[0]
}

#[inline]
pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}
