use serde::{Deserialize, Serialize};

use super::{minkowski_unchecked, norm_sq, ON_MANIFOLD_TOL};
use crate::error::{invalid, Error, Result};

/// A point of `H^D` in the Lorentz model, stored as `(x_0, x_1, .., x_D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LorentzPoint(Vec<f64>);

impl LorentzPoint {
    /// Validates the hyperboloid constraint and `x_0 > 0`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::UnsupportedDimension(coords.len().saturating_sub(1)));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::OffManifold("non-finite coordinate".into()));
        }
        if coords[0] <= 0.0 {
            return Err(Error::OffManifold(format!("x0 = {} is not positive", coords[0])));
        }
        let q = minkowski_unchecked(&coords, &coords);
        let scale = coords[0].powi(2).max(1.0);
        if (q + 1.0).abs() > ON_MANIFOLD_TOL * scale {
            return Err(Error::OffManifold(format!("<x,x>_L = {q} differs from -1")));
        }
        Ok(Self(coords))
    }

    /// Lifts spatial coordinates onto the hyperboloid, `x_0 = sqrt(1 + |s|^2)`.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push((1.0 + norm_sq(spatial)).sqrt());
        coords.extend_from_slice(spatial);
        Self(coords)
    }

    /// The base point `(1, 0, .., 0)`.
    pub fn origin(dim: usize) -> Self {
        let mut coords = vec![0.0; dim + 1];
        coords[0] = 1.0;
        Self(coords)
    }

    /// Recomputes `x_0` from the spatial part. Used after long chains of
    /// floating-point operations.
    pub(crate) fn reprojected(mut coords: Vec<f64>) -> Self {
        coords[0] = (1.0 + norm_sq(&coords[1..])).sqrt();
        Self(coords)
    }

    /// No validation at all; for tests that need off-manifold input.
    #[cfg(test)]
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Stereographic projection `p_i = x_i / (1 + x_0)`.
    pub fn to_poincare(&self) -> PoincarePoint {
        let denom = 1.0 + self.0[0];
        PoincarePoint(self.0[1..].iter().map(|x| x / denom).collect())
    }

    /// Geodesic polar coordinates about the origin.
    pub fn to_polar(&self) -> PolarCoords {
        let s = self.spatial();
        let rho = norm_sq(s).sqrt();
        if rho == 0.0 {
            let mut direction = vec![0.0; s.len()];
            direction[0] = 1.0;
            return PolarCoords { r: 0.0, direction };
        }
        PolarCoords {
            r: rho.asinh(),
            direction: s.iter().map(|x| x / rho).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for LorentzPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LorentzPoint> for Vec<f64> {
    fn from(p: LorentzPoint) -> Self {
        p.0
    }
}

/// A point of the open unit ball carrying the Poincaré metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PoincarePoint(Vec<f64>);

impl PoincarePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::OffManifold("non-finite coordinate".into()));
        }
        let n2 = norm_sq(&coords);
        if n2 >= 1.0 {
            return Err(Error::OffManifold(format!(
                "Poincaré point has squared norm {n2} >= 1"
            )));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }

    /// Inverse stereographic map.
    pub fn to_lorentz(&self) -> LorentzPoint {
        let n2 = self.norm_sq();
        let denom = 1.0 - n2;
        let mut coords = Vec::with_capacity(self.0.len() + 1);
        coords.push((1.0 + n2) / denom);
        coords.extend(self.0.iter().map(|p| 2.0 * p / denom));
        LorentzPoint::reprojected(coords)
    }

    /// Distance induced by `4 |dp|^2 / (1 - |p|^2)^2`.
    pub fn dist(&self, other: &PoincarePoint) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let diff: f64 = self.0.iter().zip(&other.0).map(|(a, b)| (a - b).powi(2)).sum();
        let denom = (1.0 - self.norm_sq()) * (1.0 - other.norm_sq());
        // acosh(1 + 2 u) = 2 asinh(sqrt(u)), stable for nearby points.
        Ok(2.0 * (diff / denom).sqrt().asinh())
    }
}

impl TryFrom<Vec<f64>> for PoincarePoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PoincarePoint> for Vec<f64> {
    fn from(p: PoincarePoint) -> Self {
        p.0
    }
}

/// A tangent vector at `base`, stored in ambient `R^{D+1}` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: LorentzPoint,
    vec: Vec<f64>,
}

impl TangentVector {
    /// Checks `<base, vec>_L = 0` up to the rejection band used by [`super::exp_map`].
    pub fn new(base: LorentzPoint, vec: Vec<f64>) -> Result<Self> {
        if vec.len() != base.0.len() {
            return Err(Error::DimensionMismatch {
                expected: base.0.len(),
                got: vec.len(),
            });
        }
        check_tangent(&base, &vec)?;
        Ok(Self { base, vec })
    }

    /// Orthogonal projection of an arbitrary ambient vector onto `T_base H^D`.
    pub fn project(base: LorentzPoint, raw: &[f64]) -> Result<Self> {
        if raw.len() != base.0.len() {
            return Err(Error::DimensionMismatch {
                expected: base.0.len(),
                got: raw.len(),
            });
        }
        let c = minkowski_unchecked(&base.0, raw);
        let vec = raw.iter().zip(&base.0).map(|(v, b)| v + c * b).collect();
        Ok(Self { base, vec })
    }

    /// Tangent vector at the origin with the given spatial components.
    pub fn at_origin(spatial: &[f64]) -> Self {
        let mut vec = Vec::with_capacity(spatial.len() + 1);
        vec.push(0.0);
        vec.extend_from_slice(spatial);
        Self {
            base: LorentzPoint::origin(spatial.len()),
            vec,
        }
    }

    pub fn zero(base: LorentzPoint) -> Self {
        let vec = vec![0.0; base.0.len()];
        Self { base, vec }
    }

    pub(crate) fn from_parts_unchecked(base: LorentzPoint, vec: Vec<f64>) -> Self {
        Self { base, vec }
    }

    pub fn base(&self) -> &LorentzPoint {
        &self.base
    }

    pub fn vec(&self) -> &[f64] {
        &self.vec
    }

    /// Riemannian norm `sqrt(<v,v>_L)`.
    pub fn norm(&self) -> f64 {
        minkowski_unchecked(&self.vec, &self.vec).max(0.0).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            base: self.base.clone(),
            vec: self.vec.iter().map(|v| v * factor).collect(),
        }
    }
}

pub(crate) fn check_tangent(base: &LorentzPoint, vec: &[f64]) -> Result<()> {
    let c = minkowski_unchecked(&base.0, vec);
    let scale = vec.iter().fold(1.0f64, |m, v| m.max(v.abs())) * base.0[0];
    if c.abs() > super::OFF_MANIFOLD_BAND * scale.max(1.0) {
        return Err(Error::NotTangent(c));
    }
    Ok(())
}

/// Geodesic polar coordinates `(r, u)` about the origin: the point is
/// `(cosh r, sinh r * u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarCoords {
    pub r: f64,
    pub direction: Vec<f64>,
}

impl PolarCoords {
    pub fn new(r: f64, direction: Vec<f64>) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(invalid(format!("radius must be finite and >= 0, got {r}")));
        }
        if direction.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        let n = norm_sq(&direction).sqrt();
        if n == 0.0 && r > 0.0 {
            return Err(invalid("zero direction with positive radius"));
        }
        if (n - 1.0).abs() > 1e-12 && n != 0.0 {
            return Err(invalid(format!("direction has norm {n}, expected 1")));
        }
        let mut direction = direction;
        if n == 0.0 {
            direction[0] = 1.0;
        }
        Ok(Self { r, direction })
    }

    /// Builds the direction from hyperspherical angles
    /// `u = (cos t1, sin t1 cos t2, .., sin t1 .. sin t_{D-2} cos t_{D-1}, sin t1 .. sin t_{D-1})`.
    /// Needs `D - 1 >= 1` angles.
    pub fn from_angles(r: f64, angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(invalid("at least one angle is required (D >= 2)"));
        }
        let d = angles.len() + 1;
        let mut direction = Vec::with_capacity(d);
        let mut sin_prod = 1.0;
        for &t in angles {
            direction.push(sin_prod * t.cos());
            sin_prod *= t.sin();
        }
        direction.push(sin_prod);
        Self::new(r, direction)
    }

    /// Inverse of [`PolarCoords::from_angles`]: `t_1..t_{D-2}` in `[0, pi]`,
    /// `t_{D-1}` in `(-pi, pi]`.
    pub fn angles(&self) -> Vec<f64> {
        let u = &self.direction;
        let d = u.len();
        if d < 2 {
            return Vec::new();
        }
        let mut angles = Vec::with_capacity(d - 1);
        for k in 0..d - 2 {
            let tail = norm_sq(&u[k + 1..]).sqrt();
            angles.push(tail.atan2(u[k]));
        }
        angles.push(u[d - 1].atan2(u[d - 2]));
        angles
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn to_lorentz(&self) -> LorentzPoint {
        let (s, c) = (self.r.sinh(), self.r.cosh());
        let mut coords = Vec::with_capacity(self.direction.len() + 1);
        coords.push(c);
        coords.extend(self.direction.iter().map(|u| s * u));
        LorentzPoint(coords)
    }
}
