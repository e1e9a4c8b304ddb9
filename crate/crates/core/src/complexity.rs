//! Parametric complexity and code-lengths, in nats.
//!
//! For a `k`-parameter model on a compact domain the log parametric
//! complexity is approximated by
//!
//! ```text
//! log C(n) = k/2 log(n / 2 pi) + log int sqrt(det I(theta)) d theta + o(1)
//! ```
//!
//! and the `o(1)` term is dropped everywhere in this module. When the Fisher
//! information splits into a constant location block and a scale block, the
//! integral factors into `vol(Theta) * int sqrt(C_theta(gamma) C_gamma(gamma)) d gamma`.
//!
//! Code-lengths use densities with respect to the Riemannian volume element.
//! Writing the same model as a density in a coordinate chart multiplies every
//! point's likelihood by `sqrt(det g(x_i))`, so chart-based and volume-based
//! code-lengths differ by exactly `-sum_i log sqrt(det g(x_i))` while the
//! regret is unchanged.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fisher::{gamma_integral, sigma_integrand_from_ratios, ScaleParam};
use crate::hygeo::{ball_volume, log_sqrt_det_metric, sqrt_det_metric, Chart};
use crate::quad::{integrate_1d, mc_mean, normal_cdf, QuadSpec, RngSeed};
use crate::rgd::{log_lik, log_pdf_vol, mle, Dataset, MleFit};

/// Compact parameter region: `mu` in the closed geodesic ball of radius
/// `radius` about the origin, `sigma` in `[sigma_min, sigma_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub radius: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl ParamDomain {
    pub fn new(radius: f64, sigma_min: f64, sigma_max: f64) -> Result<Self> {
        let d = Self {
            radius,
            sigma_min,
            sigma_max,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(invalid(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.sigma_min > 0.0) || !(self.sigma_min < self.sigma_max) || !self.sigma_max.is_finite() {
            return Err(invalid(format!(
                "need 0 < sigma_min < sigma_max, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        Ok(())
    }
}

impl Default for ParamDomain {
    fn default() -> Self {
        Self {
            radius: 3.0,
            sigma_min: 0.1,
            sigma_max: 3.0,
        }
    }
}

/// Decomposed log parametric complexity; `total_log_pc` is the sum of the three terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcResult {
    pub k: usize,
    pub n: usize,
    pub term_kn: f64,
    pub term_volume: f64,
    pub term_fisher: f64,
    pub total_log_pc: f64,
}

impl PcResult {
    fn from_terms(k: usize, n: usize, term_volume: f64, term_fisher: f64) -> Self {
        let term_kn = 0.5 * k as f64 * (n as f64 / (2.0 * PI)).ln();
        Self {
            k,
            n,
            term_kn,
            term_volume,
            term_fisher,
            total_log_pc: term_kn + term_volume + term_fisher,
        }
    }
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k < 1 {
        return Err(invalid("parameter count k must be >= 1"));
    }
    if n < 2 {
        return Err(invalid(format!("sample size n must be >= 2, got {n}")));
    }
    Ok(())
}

fn positive_log(x: f64, what: &str) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("{what} must be positive and finite, got {x}")));
    }
    Ok(x.ln())
}

/// `k/2 log(n / 2 pi) + log fisher_integral`.
pub fn pc_general(k: usize, n: usize, fisher_integral: f64) -> Result<PcResult> {
    check_kn(k, n)?;
    let f = positive_log(fisher_integral, "Fisher integral")?;
    Ok(PcResult::from_terms(k, n, 0.0, f))
}

/// `(D + m)/2 log(n / 2 pi) + log vol(Theta) + log gamma_integral` for a
/// family with a `D`-dimensional location and `m` extra parameters.
pub fn pc_symmetric(
    dim: usize,
    m: usize,
    n: usize,
    vol_theta: f64,
    gamma_integral: f64,
) -> Result<PcResult> {
    check_kn(dim + m, n)?;
    let v = positive_log(vol_theta, "vol(Theta)")?;
    let g = positive_log(gamma_integral, "scale integral")?;
    Ok(PcResult::from_terms(dim + m, n, v, g))
}

/// Log parametric complexity of the hyperbolic Gaussian on `domain`:
/// `(D+1)/2 log(n/2pi) + log V(R) + log int (xi'/(D sigma xi))^{D/2} sqrt(I_sigma) d sigma`.
pub fn pc_hgd(dim: usize, n: usize, domain: &ParamDomain, spec: &QuadSpec) -> Result<PcResult> {
    domain.validate()?;
    let g = gamma_integral(dim, domain.sigma_min, domain.sigma_max, ScaleParam::Sigma, spec)?;
    pc_symmetric(dim, 1, n, ball_volume(dim, domain.radius)?, g)
}

/// [`pc_hgd`] with the ratios `(xi'/xi, xi''/xi)` supplied by the caller.
pub fn pc_hgd_from_ratios<F>(
    dim: usize,
    n: usize,
    domain: &ParamDomain,
    spec: &QuadSpec,
    ratios: F,
) -> Result<PcResult>
where
    F: Fn(f64) -> (f64, f64),
{
    domain.validate()?;
    let f = |sigma: f64| {
        let (d1, d2) = ratios(sigma);
        sigma_integrand_from_ratios(dim, sigma, d1, d2)
    };
    let g = integrate_1d(f, domain.sigma_min, domain.sigma_max, spec)?;
    pc_symmetric(dim, 1, n, ball_volume(dim, domain.radius)?, g)
}

/// Rm-NML code-length `-log p_vol(x^n | theta_hat) + log C`, in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeLengthReport {
    pub neg_max_loglik: f64,
    pub log_pc: f64,
    pub total: f64,
    /// The MLE was clamped to the domain boundary, so the asymptotic
    /// complexity formula is outside its regime.
    pub boundary_flag: bool,
    pub n: usize,
    pub dim: usize,
    pub mu_hat: Vec<f64>,
    pub sigma_hat: f64,
}

/// `-log p_vol(x^n | theta_hat)` together with the fit.
pub fn neg_max_loglik(data: &Dataset, domain: &ParamDomain) -> Result<(f64, MleFit)> {
    let fit = mle(data, domain)?;
    Ok((-log_lik(data, &fit.params)?, fit))
}

pub fn rm_nml_codelength(
    data: &Dataset,
    domain: &ParamDomain,
    spec: &QuadSpec,
) -> Result<CodeLengthReport> {
    let pc = pc_hgd(data.dim(), data.len(), domain, spec)?;
    let (nll, fit) = neg_max_loglik(data, domain)?;
    Ok(CodeLengthReport {
        neg_max_loglik: nll,
        log_pc: pc.total_log_pc,
        total: nll + pc.total_log_pc,
        boundary_flag: fit.boundary,
        n: data.len(),
        dim: data.dim(),
        mu_hat: fit.params.mu.coords().to_vec(),
        sigma_hat: fit.params.sigma,
    })
}

/// `-sum_i log sqrt(det g(x_i))` in `chart`: conventional NML code-length in
/// that chart minus the Rm-NML code-length.
pub fn chart_gap(data: &Dataset, chart: Chart) -> f64 {
    -data.points().iter().map(|x| log_sqrt_det_metric(chart, x)).sum::<f64>()
}

/// Chart coordinates of every point together with `log sqrt(det g)` there,
/// evaluated from the coordinates themselves.
fn chart_log_factors(data: &Dataset, chart: Chart) -> Result<Vec<f64>> {
    data.points()
        .iter()
        .map(|x| {
            let coords = match chart {
                Chart::LorentzGraph => x.spatial().to_vec(),
                Chart::Poincare => x.to_poincare().coords().to_vec(),
            };
            Ok(sqrt_det_metric(chart, &coords)?.ln())
        })
        .collect()
}

/// `-sum_i log f_chart(x_i | theta_hat)` where `f_chart = p_vol sqrt(det g)`
/// is the model written as a density in chart coordinates.
pub fn neg_max_loglik_in_chart(data: &Dataset, chart: Chart, domain: &ParamDomain) -> Result<f64> {
    let fit = mle(data, domain)?;
    let factors = chart_log_factors(data, chart)?;
    let mut total = 0.0;
    for (x, lf) in data.points().iter().zip(factors) {
        total -= log_pdf_vol(x, &fit.params)? + lf;
    }
    Ok(total)
}

/// Conventional NML code-length of the model written as a chart density.
///
/// The chart normaliser equals the volume one, since
/// `int prod f_chart(y_i | theta_hat) dy = int prod p_vol(y_i | theta_hat) dvol`.
pub fn nml_codelength_in_chart(
    data: &Dataset,
    chart: Chart,
    domain: &ParamDomain,
    spec: &QuadSpec,
) -> Result<f64> {
    let pc = pc_hgd(data.dim(), data.len(), domain, spec)?;
    Ok(neg_max_loglik_in_chart(data, chart, domain)? + pc.total_log_pc)
}

/// `codelength - (-log p_vol(x^n | theta_hat))`.
pub fn regret(data: &Dataset, codelength: f64, domain: &ParamDomain) -> Result<f64> {
    Ok(codelength - neg_max_loglik(data, domain)?.0)
}

/// Regret of a chart-based code-length against the maximised chart likelihood.
pub fn regret_in_chart(
    data: &Dataset,
    chart: Chart,
    codelength: f64,
    domain: &ParamDomain,
) -> Result<f64> {
    Ok(codelength - neg_max_loglik_in_chart(data, chart, domain)?)
}

/// Monte-Carlo estimate of a log parametric complexity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McPc {
    pub log_pc: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Monte-Carlo log parametric complexity of the unit-variance Gaussian
/// `N(theta, 1)` with `theta` restricted to `[a, b]`, counting samples whose
/// MLE `y_bar` lies in `[a, b]`:
///
/// ```text
/// C = int_{y_bar in [a,b]} p(y^n | y_bar) dy^n = int_a^b sqrt(n / 2 pi) d y_bar
/// ```
///
/// Draw `theta ~ U[a, b]` and `y_bar | theta ~ N(theta, 1/n)` (the sample
/// mean is sufficient, so `y^n` itself is never formed). The marginal of
/// `y_bar` is `m(y) = [Phi(sqrt n (b - y)) - Phi(sqrt n (a - y))] / (b - a)`,
/// and `sqrt(n / 2 pi) 1{y in [a,b]} / m(y)` is an unbiased, bounded
/// importance weight for `C`.
pub fn pc_mc_gauss1d(n: usize, a: f64, b: f64, samples: usize, seed: RngSeed) -> Result<McPc> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("degenerate interval [{a}, {b}]")));
    }
    if n < 10 {
        return Err(invalid(format!("n must be >= 10, got {n}")));
    }
    if samples < 10_000 {
        return Err(invalid(format!("need at least 10000 samples, got {samples}")));
    }
    let sn = (n as f64).sqrt();
    let width = b - a;
    let scale = sn / (2.0 * PI).sqrt() * width;
    let draw = |rng: &mut crate::quad::McRng| {
        let theta = a + width * rng.random::<f64>();
        let z: f64 = rng.sample(StandardNormal);
        theta + z / sn
    };
    let weight = |y: &f64| {
        if *y < a || *y > b {
            return 0.0;
        }
        scale / (normal_cdf(sn * (b - y)) - normal_cdf(sn * (a - y)))
    };
    let est = mc_mean(weight, draw, samples, seed)?;
    Ok(McPc {
        log_pc: est.mean.ln(),
        stderr: est.stderr / est.mean,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hygeo::LorentzPoint;
    use crate::rgd::{sample, RgdParams};
    use approx::assert_relative_eq;

    #[test]
    fn general_formula() {
        let r = pc_general(1, 100, 1.0).unwrap();
        assert_relative_eq!(r.total_log_pc, 1.383_646_559_789_373, epsilon = 1e-12);
        let doubled = pc_general(1, 200, 1.0).unwrap();
        assert_relative_eq!(doubled.total_log_pc - r.total_log_pc, 0.5 * 2f64.ln(), epsilon = 1e-14);
        assert!(pc_general(1, 100, 0.0).is_err());
        assert!(pc_general(0, 100, 1.0).is_err());
    }

    #[test]
    fn symmetric_matches_general() {
        let s = pc_symmetric(1, 1, 100, 1.0, 3.0 / 2f64.sqrt()).unwrap();
        assert_relative_eq!(s.total_log_pc, 3.519_331_817_966_883, epsilon = 1e-12);
        let g = pc_general(2, 100, 3.0 / 2f64.sqrt()).unwrap();
        assert_relative_eq!(s.total_log_pc, g.total_log_pc, epsilon = 1e-14);
        let bare = pc_symmetric(2, 1, 50, 1.0, 1.0).unwrap();
        assert_eq!(bare.total_log_pc, bare.term_kn);
    }

    #[test]
    fn hgd_line_reduction() {
        let domain = ParamDomain::new(0.5, 0.5, 2.0).unwrap();
        let r = pc_hgd(1, 100, &domain, &QuadSpec::complexity()).unwrap();
        let expected = pc_symmetric(1, 1, 100, 1.0, 3.0 / 2f64.sqrt()).unwrap();
        assert_relative_eq!(r.total_log_pc, expected.total_log_pc, epsilon = 1e-9);
        assert_eq!(r.total_log_pc, r.term_kn + r.term_volume + r.term_fisher);
    }

    #[test]
    fn hgd_monotone_in_radius() {
        let spec = QuadSpec::complexity();
        let mut prev = f64::NEG_INFINITY;
        for radius in [0.5, 1.0, 2.0, 3.0] {
            let d = ParamDomain::new(radius, 0.3, 2.0).unwrap();
            let v = pc_hgd(2, 1000, &d, &spec).unwrap().total_log_pc;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn chart_gap_at_origin() {
        let o = LorentzPoint::origin(2);
        let data = Dataset::new(vec![o.clone(), o.clone(), o]).unwrap();
        assert_eq!(chart_gap(&data, Chart::LorentzGraph), 0.0);
        assert_relative_eq!(chart_gap(&data, Chart::Poincare), -3.0 * 4f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn regret_identities() {
        let domain = ParamDomain::default();
        let spec = QuadSpec::complexity();
        let params = RgdParams::new(LorentzPoint::from_spatial(&[0.2, -0.1]), 0.9).unwrap();
        let data = sample(60, &params, RngSeed(11)).unwrap();
        let report = rm_nml_codelength(&data, &domain, &spec).unwrap();
        assert_eq!(report.total, report.neg_max_loglik + report.log_pc);
        let r = regret(&data, report.total, &domain).unwrap();
        assert_relative_eq!(r, report.log_pc, epsilon = 1e-9);
        assert_eq!(regret(&data, report.neg_max_loglik, &domain).unwrap(), 0.0);
        for chart in Chart::ALL {
            let nml = nml_codelength_in_chart(&data, chart, &domain, &spec).unwrap();
            assert_relative_eq!(nml - report.total, chart_gap(&data, chart), epsilon = 1e-9);
            let rc = regret_in_chart(&data, chart, nml, &domain).unwrap();
            assert_relative_eq!(rc, r, epsilon = 1e-9);
        }
    }

    #[test]
    fn mc_gauss_is_deterministic_and_scales_with_width() {
        let a = pc_mc_gauss1d(100, 0.0, 1.0, 20_000, RngSeed(1)).unwrap();
        assert_eq!(a, pc_mc_gauss1d(100, 0.0, 1.0, 20_000, RngSeed(1)).unwrap());
        let b = pc_mc_gauss1d(100, 0.0, 2.0, 20_000, RngSeed(2)).unwrap();
        assert!((b.log_pc - a.log_pc - 2f64.ln()).abs() < 0.05);
        assert!(pc_mc_gauss1d(100, 1.0, 1.0, 20_000, RngSeed(1)).is_err());
    }
}
