use std::f64::consts::PI;

use super::{norm_sq, Chart, LorentzPoint};
use crate::error::{invalid, Error, Result};

/// `sqrt(det g)` at chart coordinates `coords`.
///
/// * Poincaré: `(2 / (1 - |p|^2))^D`
/// * Lorentz graph over `(x_1, .., x_D)`: `1 / sqrt(1 + |x|^2)`
pub fn sqrt_det_metric(chart: Chart, coords: &[f64]) -> Result<f64> {
    if coords.is_empty() {
        return Err(Error::UnsupportedDimension(0));
    }
    let n2 = norm_sq(coords);
    match chart {
        Chart::LorentzGraph => Ok(1.0 / (1.0 + n2).sqrt()),
        Chart::Poincare => {
            if n2 >= 1.0 {
                return Err(Error::OffManifold(format!(
                    "Poincaré point has squared norm {n2} >= 1"
                )));
            }
            Ok((2.0 / (1.0 - n2)).powi(coords.len() as i32))
        }
    }
}

/// `log sqrt(det g)` of `chart` at the point `x`.
///
/// Evaluated through `x_0` directly: `1 / x_0` for the graph chart and
/// `(1 + x_0)^D` for the ball, since `2 / (1 - |p|^2) = 1 + x_0`.
pub fn log_sqrt_det_metric(chart: Chart, x: &LorentzPoint) -> f64 {
    match chart {
        Chart::LorentzGraph => -x.time().ln(),
        Chart::Poincare => x.dim() as f64 * x.time().ln_1p(),
    }
}

/// Re-expresses a density `f_L` written in the Lorentz graph chart as a
/// density in the Poincaré chart:
/// `f_P = f_L * sqrt(1 + |x_{1:D}|^2) * (2 / (1 - |p|^2))^D`.
pub fn density_chart_transform(f_lorentz: f64, x: &LorentzPoint) -> f64 {
    let p = x.to_poincare();
    let d = x.dim() as i32;
    f_lorentz * (1.0 + norm_sq(x.spatial())).sqrt() * (2.0 / (1.0 - p.norm_sq())).powi(d)
}

/// Area of the unit sphere `S^{D-1}`, `2 pi^{D/2} / Gamma(D/2)`.
pub fn sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Volume of a geodesic ball of radius `radius` in `H^D`:
///
/// ```text
/// pi^{D/2} / (2^{D-2} Gamma(D/2)) * sum_{i=0}^{D-1} (-1)^i C(D-1, i) (exp(p_i R) - 1) / p_i
/// ```
///
/// with `p_i = D - 1 - 2i` and the `p_i = 0` term replaced by its limit `R`.
pub fn ball_volume(dim: usize, radius: f64) -> Result<f64> {
    if dim < 1 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(invalid(format!("radius must be finite and >= 0, got {radius}")));
    }
    let m = dim - 1;
    let mut sum = 0.0;
    for i in 0..=m {
        let p = m as f64 - 2.0 * i as f64;
        let term = if p == 0.0 {
            radius
        } else {
            (p * radius).exp_m1() / p
        };
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(m, i) * term;
    }
    let h = dim as f64 / 2.0;
    let prefactor = PI.powf(h) / (2f64.powi(dim as i32 - 2) * libm::tgamma(h));
    Ok((prefactor * sum).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poincare_factor_at_origin() {
        assert_relative_eq!(sqrt_det_metric(Chart::Poincare, &[0.0; 3]).unwrap(), 8.0);
        assert_eq!(sqrt_det_metric(Chart::LorentzGraph, &[0.0; 3]).unwrap(), 1.0);
        assert!(sqrt_det_metric(Chart::Poincare, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn log_factor_matches_coordinates() {
        let x = LorentzPoint::from_spatial(&[0.4, -1.1, 2.0]);
        let p = x.to_poincare();
        for chart in Chart::ALL {
            let coords = match chart {
                Chart::LorentzGraph => x.spatial().to_vec(),
                Chart::Poincare => p.coords().to_vec(),
            };
            let direct = sqrt_det_metric(chart, &coords).unwrap().ln();
            assert_relative_eq!(log_sqrt_det_metric(chart, &x), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn transform_factor_at_origin() {
        let o = LorentzPoint::origin(2);
        assert_eq!(density_chart_transform(0.0, &o), 0.0);
        assert_relative_eq!(density_chart_transform(1.0, &o), 4.0);
    }

    #[test]
    fn ball_volume_known_values() {
        assert_eq!(ball_volume(3, 0.0).unwrap(), 0.0);
        // 2 pi (cosh 1 - 1)
        assert_relative_eq!(ball_volume(2, 1.0).unwrap(), 3.412_276_265_284_902, epsilon = 1e-12);
        // pi (sinh 2 - 2), exercises the p_i = 0 term
        assert_relative_eq!(ball_volume(3, 1.0).unwrap(), 5.110_932_705_708_289, epsilon = 1e-12);
        assert_relative_eq!(ball_volume(1, 2.5).unwrap(), 5.0, epsilon = 1e-14);
        assert!(ball_volume(0, 1.0).is_err());
        assert!(ball_volume(2, -1.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(1), 2.0, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(2), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, epsilon = 1e-14);
    }
}
