//! Oracle suites: each closed form is checked against an independent route
//! (quadrature, Monte Carlo, or an exact special case).

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coding::{coding_summary, partition_ball};
use crate::complexity::{pc_general, pc_mc_gauss1d, ParamDomain};
use crate::error::Result;
use crate::fisher::{fisher_integral, fisher_mu_scalar, fisher_numeric, fisher_sigma_closed, ScaleParam};
use crate::hygeo::{sphere_area, LorentzPoint};
use crate::quad::{integrate_1d, QuadSpec, RngSeed};
use crate::rgd::{pdf_vol, xi, RgdParams};

fn ln_sinh(r: f64) -> f64 {
    if r < 20.0 {
        r.sinh().ln()
    } else {
        r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
    }
}

/// `Omega_{D-1} int_0^inf exp(-r^2 / 2 sigma^2) sinh^{D-1}(r) r^{2k} dr`,
/// truncated at `(D-1) sigma^2 + 40 sigma`.
fn radial_moment(dim: usize, sigma: f64, k: i32) -> Result<f64> {
    let m = (dim - 1) as f64;
    let upper = m * sigma * sigma + 40.0 * sigma;
    let f = |r: f64| {
        if r == 0.0 {
            return if dim == 1 && k == 0 { 1.0 } else { 0.0 };
        }
        (-r * r / (2.0 * sigma * sigma) + m * ln_sinh(r)).exp() * r.powi(2 * k)
    };
    let half = integrate_1d(f, 0.0, upper, &QuadSpec::geometry())?;
    Ok(sphere_area(dim) * half)
}

/// `xi(sigma)` by quadrature of its defining integral.
pub fn xi_by_quadrature(dim: usize, sigma: f64) -> Result<f64> {
    radial_moment(dim, sigma, 0)
}

/// `E[d(x, mu)^2]` under the model, by quadrature.
pub fn expected_sq_dist_by_quadrature(dim: usize, sigma: f64) -> Result<f64> {
    Ok(radial_moment(dim, sigma, 1)? / radial_moment(dim, sigma, 0)?)
}

/// `Omega_{D-1} int_0^R sinh^{D-1}(r) dr`.
pub fn ball_volume_by_quadrature(dim: usize, radius: f64) -> Result<f64> {
    let m = (dim - 1) as i32;
    let half = integrate_1d(|r| r.sinh().powi(m), 0.0, radius, &QuadSpec::geometry())?;
    Ok(sphere_area(dim) * half)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidateConfig {
    /// Smaller Monte-Carlo budgets and grids.
    pub quick: bool,
    /// Factor applied to the closed-form `xi` before it is compared; `1.0`
    /// except when checking that the `xi` suite can fail.
    pub xi_scale: f64,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            quick: false,
            xi_scale: 1.0,
            seed: 20_240_601,
        }
    }
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(e.to_string());
                None
            }
        }
    }
}

fn run_suite(name: &'static str, body: impl FnOnce(&mut Suite)) -> SuiteResult {
    let start = Instant::now();
    let mut s = Suite::new(name);
    body(&mut s);
    SuiteResult {
        name: s.name.to_string(),
        passed: s.failures.is_empty(),
        checks: s.checks,
        failures: s.failures,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn xi_suite(cfg: &ValidateConfig) -> SuiteResult {
    run_suite("xi-vs-quadrature", |s| {
        for dim in 1..=5 {
            for sigma in [0.1, 0.5, 1.0, 2.0, 3.0] {
                let Some(closed) = s.record(xi(dim, sigma)) else { continue };
                let Some(oracle) = s.record(xi_by_quadrature(dim, sigma)) else { continue };
                let e = rel_err(closed * cfg.xi_scale, oracle);
                s.check(e <= 1e-8, || format!("D={dim} sigma={sigma}: rel err {e:.3e}"));
            }
        }
    })
}

pub fn fisher_suite(cfg: &ValidateConfig) -> SuiteResult {
    let (dims, sigmas, n): (&[usize], &[f64], usize) = if cfg.quick {
        (&[1, 2], &[1.0], 20_000)
    } else {
        (&[1, 2, 3], &[0.5, 1.0, 2.0], 100_000)
    };
    run_suite("fisher-closed-vs-numeric", |s| {
        for &dim in dims {
            for &sigma in sigmas {
                let mu = LorentzPoint::from_spatial(&vec![0.3; dim]);
                let Some(params) = s.record(RgdParams::new(mu, sigma)) else { continue };
                let seed = RngSeed(cfg.seed ^ (dim as u64 * 1000 + (sigma * 100.0) as u64));
                let Some(est) = s.record(fisher_numeric(&params, n, seed)) else { continue };
                let Some(c_mu) = s.record(fisher_mu_scalar(dim, sigma)) else { continue };
                let Some(c_sigma) = s.record(fisher_sigma_closed(dim, sigma)) else { continue };
                for i in 0..dim {
                    for j in 0..dim {
                        let target = if i == j { c_mu } else { 0.0 };
                        let tol = (0.05 * c_mu).max(3.0 * est.mu_stderr[(i, j)]);
                        let got = est.mu_block[(i, j)];
                        s.check((got - target).abs() <= tol, || {
                            format!("D={dim} sigma={sigma} I_mu[{i},{j}] = {got:.6} vs {target:.6}")
                        });
                    }
                }
                let tol = (0.05 * c_sigma).max(3.0 * est.sigma_stderr);
                s.check((est.sigma_entry - c_sigma).abs() <= tol, || {
                    format!("D={dim} sigma={sigma} I_sigma = {:.6} vs {c_sigma:.6}", est.sigma_entry)
                });
            }
        }
    })
}

/// Twenty domains on which the `sigma` and `log sigma` Fisher integrals are compared.
pub fn reparam_domains() -> Vec<(usize, ParamDomain)> {
    let mut out = Vec::new();
    for dim in 1..=5 {
        for (k, (lo, hi)) in [(0.1, 3.0), (0.3, 2.0), (0.5, 1.0), (1.0, 2.5)].into_iter().enumerate() {
            let radius = 0.5 + 0.75 * k as f64;
            out.push((dim, ParamDomain::new(radius, lo, hi).expect("valid domain")));
        }
    }
    out
}

pub fn reparam_suite(_cfg: &ValidateConfig) -> SuiteResult {
    run_suite("sigma-vs-log-sigma", |s| {
        let spec = QuadSpec::complexity();
        for (dim, domain) in reparam_domains() {
            let Some(a) = s.record(fisher_integral(dim, &domain, ScaleParam::Sigma, &spec)) else { continue };
            let Some(b) = s.record(fisher_integral(dim, &domain, ScaleParam::LogSigma, &spec)) else { continue };
            let e = rel_err(b, a);
            s.check(e <= 1e-8, || format!("D={dim} {domain:?}: rel diff {e:.3e}"));
        }
    })
}

pub fn kraft_suite(cfg: &ValidateConfig) -> SuiteResult {
    let grid = if cfg.quick { 16 } else { 32 };
    run_suite("kraft-and-lower-bound", |s| {
        let Some(partition) = s.record(partition_ball(2, 3.0, grid, grid)) else { return };
        for sigma in [0.5, 1.0] {
            let Some(params) = s.record(RgdParams::new(LorentzPoint::from_spatial(&[0.2, -0.1]), sigma)) else {
                continue;
            };
            let sum = coding_summary(&partition, |x| pdf_vol(x, &params).expect("matching dims"));
            s.check(sum.kraft_sum <= 1.0, || format!("sigma={sigma}: Kraft sum {}", sum.kraft_sum));
            s.check(
                sum.average_length >= sum.lower_bound && sum.average_length <= sum.lower_bound + 2.0,
                || format!("sigma={sigma}: average {} vs bound {}", sum.average_length, sum.lower_bound),
            );
        }
    })
}

pub fn pc_mc_suite(cfg: &ValidateConfig) -> SuiteResult {
    let samples = if cfg.quick { 100_000 } else { 1_000_000 };
    run_suite("gaussian-pc-monte-carlo", |s| {
        let Some(mc) = s.record(pc_mc_gauss1d(100, 0.0, 1.0, samples, RngSeed(cfg.seed))) else { return };
        let Some(asym) = s.record(pc_general(1, 100, 1.0)) else { return };
        let tol = (3.0 * mc.stderr).max(0.05);
        let diff = (mc.log_pc - asym.total_log_pc).abs();
        s.check(diff <= tol, || {
            format!("Monte Carlo {:.5} vs asymptotic {:.5}", mc.log_pc, asym.total_log_pc)
        });
    })
}

/// Runs every suite in order.
pub fn run_all(cfg: &ValidateConfig) -> Vec<SuiteResult> {
    vec![
        xi_suite(cfg),
        fisher_suite(cfg),
        reparam_suite(cfg),
        kraft_suite(cfg),
        pc_mc_suite(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_oracles_on_known_values() {
        assert!((xi_by_quadrature(1, 1.0).unwrap() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        assert!((ball_volume_by_quadrature(2, 1.0).unwrap() - 3.412_276_265_284_902).abs() < 1e-10);
        assert!((expected_sq_dist_by_quadrature(1, 0.7).unwrap() - 0.49).abs() < 1e-10);
    }

    #[test]
    fn xi_suite_detects_wrong_constant() {
        let ok = xi_suite(&ValidateConfig::default());
        assert!(ok.passed, "{:?}", ok.failures);
        let bad = xi_suite(&ValidateConfig {
            xi_scale: 1.0 + 1e-6,
            ..ValidateConfig::default()
        });
        assert!(!bad.passed);
        assert_eq!(bad.failures.len(), 25);
    }

    #[test]
    fn reparam_domains_count() {
        assert_eq!(reparam_domains().len(), 20);
    }
}
