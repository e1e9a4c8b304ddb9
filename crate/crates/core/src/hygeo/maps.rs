use nalgebra::{DMatrix, DVector};

use super::point::check_tangent;
use super::{minkowski_unchecked, LorentzPoint, TangentVector, OFF_MANIFOLD_BAND};
use crate::error::{Error, Result};

fn same_dim(x: &LorentzPoint, y: &LorentzPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(())
}

/// Geodesic distance `arccosh(-<x,y>_L)`.
///
/// `-<x,y>_L` is clamped to `[1, inf)`; values below `1 - 1e-7` are
/// rejected as off-manifold input.
pub fn dist(x: &LorentzPoint, y: &LorentzPoint) -> Result<f64> {
    same_dim(x, y)?;
    let z = -minkowski_unchecked(x.coords(), y.coords());
    if z < 1.0 - OFF_MANIFOLD_BAND {
        return Err(Error::OffManifold(format!("-<x,y>_L = {z} < 1")));
    }
    Ok(dist_coords(x.coords(), y.coords()))
}

/// Distance without dimension or manifold checks.
#[inline]
pub(crate) fn dist_coords(x: &[f64], y: &[f64]) -> f64 {
    let z = -minkowski_unchecked(x, y);
    if z < 2.0 {
        // For nearby points use |x - y|_L = 2 sinh(d / 2), which avoids the
        // cancellation in z - 1.
        let mut q = -(x[0] - y[0]).powi(2);
        for (a, b) in x[1..].iter().zip(&y[1..]) {
            q += (a - b).powi(2);
        }
        2.0 * (0.5 * q.max(0.0).sqrt()).asinh()
    } else {
        z.acosh()
    }
}

/// Exponential map `cosh(|v|) base + sinh(|v|) v / |v|`.
pub fn exp_map(base: &LorentzPoint, v: &TangentVector) -> Result<LorentzPoint> {
    same_dim(base, v.base())?;
    check_tangent(base, v.vec())?;
    Ok(exp_coords(base.coords(), v.vec()))
}

pub(crate) fn exp_coords(base: &[f64], v: &[f64]) -> LorentzPoint {
    let n = minkowski_unchecked(v, v).max(0.0).sqrt();
    if n == 0.0 {
        return LorentzPoint::reprojected(base.to_vec());
    }
    let (c, s) = (n.cosh(), n.sinh() / n);
    let coords = base.iter().zip(v).map(|(b, t)| c * b + s * t).collect();
    LorentzPoint::reprojected(coords)
}

/// Inverse of [`exp_map`]: the tangent vector at `base` pointing to `x` with
/// length `dist(base, x)`.
pub fn log_map(base: &LorentzPoint, x: &LorentzPoint) -> Result<TangentVector> {
    let d = dist(base, x)?;
    Ok(TangentVector::from_parts_unchecked(
        base.clone(),
        log_coords(base.coords(), x.coords(), d),
    ))
}

pub(crate) fn log_coords(base: &[f64], x: &[f64], d: f64) -> Vec<f64> {
    if d == 0.0 {
        return vec![0.0; base.len()];
    }
    // u = x + <base,x> base has Minkowski norm sinh(d).
    let c = minkowski_unchecked(base, x);
    let factor = d / d.sinh();
    x.iter().zip(base).map(|(xi, bi)| factor * (xi + c * bi)).collect()
}

/// A linear isometry of `H^D` acting on ambient `R^{D+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: DMatrix<f64>,
}

impl Isometry {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim + 1, dim + 1),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// `J T^T J`, the inverse of a Lorentz transformation.
    pub fn inverse(&self) -> Self {
        let mut m = self.matrix.transpose();
        let n = m.nrows();
        for j in 1..n {
            m[(0, j)] = -m[(0, j)];
            m[(j, 0)] = -m[(j, 0)];
        }
        Self { matrix: m }
    }

    pub fn compose(&self, other: &Isometry) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let out = &self.matrix * DVector::from_column_slice(v);
        out.iter().copied().collect()
    }

    pub fn apply(&self, x: &LorentzPoint) -> LorentzPoint {
        LorentzPoint::reprojected(self.apply_vec(x.coords()))
    }

    /// Pushes a tangent vector forward; the base point moves with it.
    pub fn apply_tangent(&self, v: &TangentVector) -> TangentVector {
        TangentVector::from_parts_unchecked(self.apply(v.base()), self.apply_vec(v.vec()))
    }

    /// The image of the `i`-th coordinate direction at the origin, which is an
    /// orthonormal frame of the tangent space at `self(o)`.
    pub fn frame_vector(&self, i: usize) -> Vec<f64> {
        self.matrix.column(i + 1).iter().copied().collect()
    }
}

/// The Lorentz boost taking the origin to `mu`:
///
/// ```text
/// T = [ m0   s^T                    ]
///     [ s    I + s s^T / (1 + m0)   ]
/// ```
///
/// where `mu = (m0, s)`. It fixes the directions orthogonal to `s`.
pub fn isometry_to(mu: &LorentzPoint) -> Isometry {
    let d = mu.dim();
    let m0 = mu.time();
    let s = mu.spatial();
    let mut m = DMatrix::identity(d + 1, d + 1);
    m[(0, 0)] = m0;
    for i in 0..d {
        m[(0, i + 1)] = s[i];
        m[(i + 1, 0)] = s[i];
        for j in 0..d {
            m[(i + 1, j + 1)] += s[i] * s[j] / (1.0 + m0);
        }
    }
    Isometry { matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn distance_known_values() {
        let o = LorentzPoint::origin(1);
        assert_eq!(dist(&o, &o).unwrap(), 0.0);
        let x = LorentzPoint::new(vec![2f64.cosh(), 2f64.sinh()]).unwrap();
        assert_relative_eq!(dist(&x, &o).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn distance_rejects_far_off_manifold() {
        let o = LorentzPoint::origin(1);
        let bad = LorentzPoint::from_raw(vec![0.5, 0.0]);
        assert!(matches!(dist(&o, &bad), Err(Error::OffManifold(_))));
        // Small drift is clamped instead.
        let drift = LorentzPoint::from_raw(vec![1.0 - 1e-9, 0.0]);
        assert_eq!(dist(&o, &drift).unwrap(), 0.0);
        let p = LorentzPoint::origin(2);
        assert!(matches!(dist(&o, &p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn exp_at_origin_closed_form() {
        let o = LorentzPoint::origin(2);
        let v = TangentVector::at_origin(&[1.5, 0.0]);
        let x = exp_map(&o, &v).unwrap();
        assert_relative_eq!(x.coords()[0], 1.5f64.cosh(), epsilon = 1e-14);
        assert_relative_eq!(x.coords()[1], 1.5f64.sinh(), epsilon = 1e-14);
        assert_eq!(x.coords()[2], 0.0);
        assert_eq!(exp_map(&o, &TangentVector::zero(o.clone())).unwrap(), o);
    }

    #[test]
    fn exp_rejects_non_tangent() {
        let base = LorentzPoint::from_spatial(&[0.5]);
        let v = TangentVector::at_origin(&[1.0]);
        assert!(matches!(exp_map(&base, &v), Err(Error::NotTangent(_))));
    }

    #[test]
    fn log_norm_equals_distance() {
        let o = LorentzPoint::origin(1);
        let x = LorentzPoint::new(vec![2f64.cosh(), 2f64.sinh()]).unwrap();
        assert_relative_eq!(log_map(&o, &x).unwrap().norm(), 2.0, epsilon = 1e-13);
        assert!(log_map(&o, &o).unwrap().vec().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn isometry_of_origin_is_identity() {
        let t = isometry_to(&LorentzPoint::origin(3));
        assert_eq!(t, Isometry::identity(3));
    }

    #[test]
    fn inverse_undoes_boost() {
        let mu = LorentzPoint::from_spatial(&[0.7, -2.0, 0.1]);
        let t = isometry_to(&mu);
        let back = t.inverse().apply(&mu);
        assert!(back.spatial().iter().all(|s| s.abs() < 1e-12));
    }
}
