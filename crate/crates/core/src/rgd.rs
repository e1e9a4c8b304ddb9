//! The Riemannian Gaussian distribution on `H^D`,
//! `p_vol(x | mu, sigma) = exp(-d(x, mu)^2 / (2 sigma^2)) / xi(sigma)`,
//! a density with respect to the Riemannian volume element.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::complexity::ParamDomain;
use crate::error::{invalid, Error, Result};
use crate::hygeo::maps::{dist_coords, exp_coords, log_coords};
use crate::hygeo::volume::binomial;
use crate::hygeo::{isometry_to, minkowski_unchecked, Isometry, LorentzPoint, PolarCoords};
use crate::quad::{erf, erfcx, RngSeed};

/// Parameters `(mu, sigma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgdParams {
    pub mu: LorentzPoint,
    pub sigma: f64,
}

impl RgdParams {
    pub fn new(mu: LorentzPoint, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }
}

/// An i.i.d. sample `x^n` of points in `H^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dim: usize,
    points: Vec<LorentzPoint>,
}

impl Dataset {
    pub fn new(points: Vec<LorentzPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| invalid("dataset must contain at least one point"))?;
        let dim = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LorentzPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<LorentzPoint> {
        self.points
    }

    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Dataset::new(points)
    }

    /// The image of every point under `t`.
    pub fn transformed(&self, t: &Isometry) -> Dataset {
        Dataset {
            dim: self.dim,
            points: self.points.iter().map(|p| t.apply(p)).collect(),
        }
    }

    /// `(1/n) sum_i d(x_i, mu)^2`.
    pub fn mean_sq_dist(&self, mu: &LorentzPoint) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .map(|x| dist_coords(x.coords(), mu.coords()).powi(2))
            .sum();
        s / self.len() as f64
    }
}

/// `log xi(sigma)` together with the ratios `xi'/xi` and `xi''/xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiTerms {
    pub ln_xi: f64,
    pub d1_ratio: f64,
    pub d2_ratio: f64,
}

/// Closed form of the normaliser. With `p_i = D - 1 - 2i`, `s_i = (-1)^i C(D-1, i)`
/// and `e_i = exp(sigma^2 p_i^2 / 2) (1 + erf(p_i sigma / sqrt 2))`,
///
/// ```text
/// xi   = K sigma S0
/// xi'  = K (S0 + sigma^2 S2 + c sigma T1)
/// xi'' = K (3 sigma S2 + sigma^3 S4 + 2 c T1 + c sigma^2 T3)
/// ```
///
/// where `K = pi^{D/2} / Gamma(D/2) sqrt(pi/2) / 2^{D-2}`, `c = sqrt(2/pi)`,
/// `S_k = sum s_i p_i^k e_i` and `T_k = sum s_i p_i^k`. `T1` is nonzero only
/// for `D = 2` and `T3` only for `D = 2, 4`.
///
/// All sums are scaled by `exp(-sigma^2 (D-1)^2 / 2)` so that large `sigma`
/// does not overflow.
pub fn xi_terms(dim: usize, sigma: f64) -> XiTerms {
    debug_assert!(dim >= 1 && sigma > 0.0);
    let m = dim - 1;
    let log_scale = 0.5 * (sigma * m as f64).powi(2);
    let (mut s0, mut s2, mut s4, mut t1, mut t3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..=m {
        let p = m as f64 - 2.0 * i as f64;
        let s = if i % 2 == 0 { 1.0 } else { -1.0 } * binomial(m, i);
        let x = p * sigma / SQRT_2;
        let e = if p >= 0.0 {
            (0.5 * (sigma * p).powi(2) - log_scale).exp() * (1.0 + erf(x))
        } else {
            erfcx(-x) * (-log_scale).exp()
        };
        let p2 = p * p;
        s0 += s * e;
        s2 += s * p2 * e;
        s4 += s * p2 * p2 * e;
        t1 += s * p;
        t3 += s * p2 * p;
    }
    let c = FRAC_2_SQRT_PI / SQRT_2; // sqrt(2/pi)
    let unscaled = (-log_scale).exp();
    let (t1, t3) = (c * t1 * unscaled, c * t3 * unscaled);
    let d = dim as f64;
    let ln_k = 0.5 * d * PI.ln() - libm::lgamma(0.5 * d) + 0.5 * (0.5 * PI).ln()
        - (d - 2.0) * std::f64::consts::LN_2;
    let denom = sigma * s0;
    XiTerms {
        ln_xi: ln_k + sigma.ln() + log_scale + s0.ln(),
        d1_ratio: (s0 + sigma * sigma * s2 + sigma * t1) / denom,
        d2_ratio: (3.0 * sigma * s2 + sigma.powi(3) * s4 + 2.0 * t1 + sigma * sigma * t3) / denom,
    }
}

/// The normaliser `xi(sigma) = int exp(-d(x, mu)^2 / (2 sigma^2)) dvol(x)`.
pub fn xi(dim: usize, sigma: f64) -> Result<f64> {
    check_dim_sigma(dim, sigma)?;
    Ok(xi_terms(dim, sigma).ln_xi.exp())
}

pub fn ln_xi(dim: usize, sigma: f64) -> Result<f64> {
    check_dim_sigma(dim, sigma)?;
    Ok(xi_terms(dim, sigma).ln_xi)
}

/// `(xi'(sigma), xi''(sigma))`.
pub fn xi_derivatives(dim: usize, sigma: f64) -> Result<(f64, f64)> {
    check_dim_sigma(dim, sigma)?;
    let t = xi_terms(dim, sigma);
    let x = t.ln_xi.exp();
    Ok((t.d1_ratio * x, t.d2_ratio * x))
}

/// `sigma^3 xi'(sigma) / xi(sigma)`, which equals `E[d(x, mu)^2]` under the model.
pub fn expected_sq_dist(dim: usize, sigma: f64) -> f64 {
    sigma.powi(3) * xi_terms(dim, sigma).d1_ratio
}

fn check_dim_sigma(dim: usize, sigma: f64) -> Result<()> {
    if dim < 1 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(())
}

fn check_point(x: &LorentzPoint, params: &RgdParams) -> Result<()> {
    if x.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

pub fn log_pdf_vol(x: &LorentzPoint, params: &RgdParams) -> Result<f64> {
    check_point(x, params)?;
    let d = crate::hygeo::dist(x, &params.mu)?;
    Ok(-ln_xi(params.dim(), params.sigma)? - d * d / (2.0 * params.sigma * params.sigma))
}

/// Density with respect to the volume element.
pub fn pdf_vol(x: &LorentzPoint, params: &RgdParams) -> Result<f64> {
    log_pdf_vol(x, params).map(f64::exp)
}

/// `log prod_i p_vol(x_i | params) = -n log xi(sigma) - sum_i d(x_i, mu)^2 / (2 sigma^2)`.
pub fn log_lik(data: &Dataset, params: &RgdParams) -> Result<f64> {
    if data.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: data.dim(),
        });
    }
    let n = data.len() as f64;
    let ss = data.mean_sq_dist(&params.mu) * n;
    Ok(-n * ln_xi(params.dim(), params.sigma)? - ss / (2.0 * params.sigma * params.sigma))
}

/// Number of nodes in the tabulated radial inverse CDF.
pub const RADIAL_TABLE_NODES: usize = 4096;

/// Inverse-CDF sampler for the geodesic radius, whose density is
/// proportional to `exp(-r^2 / (2 sigma^2)) sinh^{D-1}(r)`.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

fn ln_sinh(r: f64) -> f64 {
    if r < 20.0 {
        r.sinh().ln()
    } else {
        r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
    }
}

impl RadialSampler {
    pub fn new(dim: usize, sigma: f64) -> Result<Self> {
        check_dim_sigma(dim, sigma)?;
        let m = (dim - 1) as f64;
        let r_max = radial_cutoff(dim, sigma);
        let log_density = |r: f64| {
            if m == 0.0 {
                -r * r / (2.0 * sigma * sigma)
            } else if r == 0.0 {
                f64::NEG_INFINITY
            } else {
                -r * r / (2.0 * sigma * sigma) + m * ln_sinh(r)
            }
        };
        let peak = (m * sigma * sigma).min(r_max);
        let shift = log_density(peak.max(1e-300)).max(log_density(sigma.min(r_max)));
        let density = |r: f64| (log_density(r) - shift).exp();

        let n = RADIAL_TABLE_NODES;
        let h = r_max / (n - 1) as f64;
        let grid: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        let mut acc = 0.0;
        for k in 0..n - 1 {
            let (a, b) = (grid[k], grid[k + 1]);
            acc += (b - a) / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self { grid, cdf })
    }

    /// Maps `u` in `[0, 1)` to a radius by linear interpolation of the table.
    pub fn quantile(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let (r0, r1) = (self.grid[k - 1], self.grid[k]);
        if c1 <= c0 {
            return r0;
        }
        r0 + (r1 - r0) * (u - c0) / (c1 - c0)
    }
}

/// Upper end of the radial table: the mode `(D-1) sigma^2` of the tilted
/// Gaussian plus twelve standard deviations.
pub fn radial_cutoff(dim: usize, sigma: f64) -> f64 {
    (dim - 1) as f64 * sigma * sigma + 12.0 * sigma
}

fn random_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-150 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Draws points from a fixed parameter value: radius by inverse CDF,
/// direction uniform on the sphere, placed at the origin in polar form and
/// moved by `isometry_to(mu)`.
#[derive(Debug, Clone)]
pub struct PointSampler {
    dim: usize,
    radial: RadialSampler,
    to_mu: Isometry,
}

impl PointSampler {
    pub fn new(params: &RgdParams) -> Result<Self> {
        Ok(Self {
            dim: params.dim(),
            radial: RadialSampler::new(params.dim(), params.sigma)?,
            to_mu: isometry_to(&params.mu),
        })
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> LorentzPoint {
        let r = self.radial.quantile(rng.random::<f64>());
        let u = random_direction(self.dim, rng);
        self.to_mu.apply(&PolarCoords { r, direction: u }.to_lorentz())
    }
}

/// `n` i.i.d. draws, deterministic given `seed`.
pub fn sample(n: usize, params: &RgdParams, seed: RngSeed) -> Result<Dataset> {
    if n < 1 {
        return Err(invalid("sample size must be >= 1"));
    }
    let sampler = PointSampler::new(params)?;
    let mut rng = seed.rng();
    Dataset::new((0..n).map(|_| sampler.draw(&mut rng)).collect())
}

/// Maximum-likelihood fit, possibly clamped to a [`ParamDomain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub params: RgdParams,
    /// Set when either parameter was clamped to the domain boundary.
    pub boundary: bool,
    /// Fréchet-mean descent iterations.
    pub iterations: usize,
    /// `(1/n) sum d(x_i, mu_hat)^2`.
    pub mean_sq_dist: f64,
}

pub const FRECHET_MAX_ITER: usize = 10_000;
pub const FRECHET_STEP_TOL: f64 = 1e-10;

/// Fréchet mean by Riemannian gradient descent,
/// `mu <- exp_mu(eta / n * sum_i log_mu(x_i))`, halving `eta` whenever the
/// sum of squared distances fails to decrease. Returns `(mu, iterations)`.
pub fn frechet_mean(data: &Dataset) -> Result<(LorentzPoint, usize)> {
    let pts = data.points();
    let n = pts.len() as f64;
    // Start from the normalised ambient centroid.
    let mut sum = vec![0.0; data.dim() + 1];
    for p in pts {
        for (s, c) in sum.iter_mut().zip(p.coords()) {
            *s += c;
        }
    }
    let scale = (-minkowski_unchecked(&sum, &sum)).sqrt();
    let mut mu = LorentzPoint::reprojected(sum.iter().map(|s| s / scale).collect());
    let objective = |m: &LorentzPoint| -> f64 {
        pts.iter()
            .map(|x| dist_coords(x.coords(), m.coords()).powi(2))
            .sum()
    };
    let mut value = objective(&mu);
    let mut eta = 1.0;
    for iter in 0..FRECHET_MAX_ITER {
        let mut grad = vec![0.0; data.dim() + 1];
        for x in pts {
            let d = dist_coords(mu.coords(), x.coords());
            for (g, l) in grad.iter_mut().zip(log_coords(mu.coords(), x.coords(), d)) {
                *g += l / n;
            }
        }
        let step: Vec<f64> = grad.iter().map(|g| eta * g).collect();
        let step_norm = minkowski_unchecked(&step, &step).max(0.0).sqrt();
        if step_norm < FRECHET_STEP_TOL {
            return Ok((mu, iter));
        }
        let candidate = exp_coords(mu.coords(), &step);
        let cand_value = objective(&candidate);
        if cand_value < value {
            mu = candidate;
            value = cand_value;
            eta = (2.0 * eta).min(1.0);
        } else {
            eta *= 0.5;
        }
    }
    Err(Error::NoConvergence(FRECHET_MAX_ITER))
}

/// Solves `sigma^3 xi'(sigma) / xi(sigma) = target` on `[lo, hi]` by bisection.
/// Returns the clamped endpoint and `true` when the root lies outside.
pub fn solve_sigma(dim: usize, target: f64, lo: f64, hi: f64) -> (f64, bool) {
    if target <= expected_sq_dist(dim, lo) {
        return (lo, true);
    }
    if target >= expected_sq_dist(dim, hi) {
        return (hi, true);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if expected_sq_dist(dim, m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    (0.5 * (a + b), false)
}

/// MLE `(mu_hat, sigma_hat)`: `mu_hat` is the Fréchet mean, then projected
/// onto the geodesic ball of radius `domain.radius` about the origin;
/// `sigma_hat` solves `sigma^3 xi'/xi = (1/n) sum d(x_i, mu_hat)^2` and is
/// clamped to `[sigma_min, sigma_max]`.
pub fn mle(data: &Dataset, domain: &ParamDomain) -> Result<MleFit> {
    if data.len() < 2 {
        return Err(invalid("the MLE needs at least two points"));
    }
    let (mut mu, iterations) = frechet_mean(data)?;
    let mut boundary = false;
    let origin = LorentzPoint::origin(data.dim());
    let r = dist_coords(origin.coords(), mu.coords());
    if r > domain.radius {
        let dir = log_coords(origin.coords(), mu.coords(), r);
        let scaled: Vec<f64> = dir.iter().map(|v| v * domain.radius / r).collect();
        mu = exp_coords(origin.coords(), &scaled);
        boundary = true;
    }
    let m2 = data.mean_sq_dist(&mu);
    let (sigma, clamped) = solve_sigma(data.dim(), m2, domain.sigma_min, domain.sigma_max);
    Ok(MleFit {
        params: RgdParams { mu, sigma },
        boundary: boundary || clamped,
        iterations,
        mean_sq_dist: m2,
    })
}
