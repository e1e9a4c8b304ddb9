//! Fisher information of the hyperbolic Gaussian.
//!
//! Parameters are `eta = (v, sigma)` where `v` are normal coordinates of the
//! mean: `mu(v) = exp_mu(sum_i v_i e_i)` with `e_i` the orthonormal frame at
//! `mu` obtained by pushing the coordinate frame at the origin through
//! [`isometry_to`]. In these coordinates the information is
//!
//! ```text
//! I_mu    = xi' / (D sigma xi) * Id_D
//! I_sigma = xi''/xi - (xi'/xi)^2 + 3 xi' / (sigma xi)
//! ```
//!
//! with vanishing cross terms; neither depends on `mu`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::ParamDomain;
use crate::error::{invalid, Error, Result};
use crate::hygeo::maps::{dist_coords, exp_coords};
use crate::hygeo::{ball_volume, isometry_to, LorentzPoint};
use crate::quad::{integrate_1d, Moments, QuadSpec, RngSeed, MC_CHUNK};
use crate::rgd::{ln_xi, xi_terms, PointSampler, RgdParams};

fn check(dim: usize, sigma: f64) -> Result<()> {
    if dim < 1 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(())
}

/// The scalar `xi' / (D sigma xi)` multiplying the identity in `I_mu`.
pub fn fisher_mu_scalar(dim: usize, sigma: f64) -> Result<f64> {
    check(dim, sigma)?;
    Ok(xi_terms(dim, sigma).d1_ratio / (dim as f64 * sigma))
}

/// `I_mu` in a normal orthonormal basis at any `mu`.
pub fn fisher_mu_closed(dim: usize, sigma: f64) -> Result<DMatrix<f64>> {
    Ok(DMatrix::identity(dim, dim) * fisher_mu_scalar(dim, sigma)?)
}

pub fn fisher_sigma_closed(dim: usize, sigma: f64) -> Result<f64> {
    check(dim, sigma)?;
    let t = xi_terms(dim, sigma);
    Ok(sigma_entry_from_ratios(sigma, t.d1_ratio, t.d2_ratio))
}

/// `I_sigma` from the ratios `xi'/xi` and `xi''/xi`.
pub fn sigma_entry_from_ratios(sigma: f64, d1_ratio: f64, d2_ratio: f64) -> f64 {
    d2_ratio - d1_ratio * d1_ratio + 3.0 * d1_ratio / sigma
}

/// `sqrt(det I_mu * I_sigma)` expressed through the ratios `xi'/xi`, `xi''/xi`.
pub fn sigma_integrand_from_ratios(dim: usize, sigma: f64, d1_ratio: f64, d2_ratio: f64) -> f64 {
    let c_mu = d1_ratio / (dim as f64 * sigma);
    c_mu.powf(0.5 * dim as f64) * sigma_entry_from_ratios(sigma, d1_ratio, d2_ratio).sqrt()
}

/// Parameterisation of the scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleParam {
    Sigma,
    LogSigma,
}

/// `int sqrt(det I_mu * I_gamma) d gamma` over `[sigma_min, sigma_max]`, where
/// `gamma` is `sigma` or `log sigma`. In the latter case `I_gamma = sigma^2 I_sigma`.
pub fn gamma_integral(
    dim: usize,
    sigma_min: f64,
    sigma_max: f64,
    param: ScaleParam,
    spec: &QuadSpec,
) -> Result<f64> {
    check(dim, sigma_min)?;
    check(dim, sigma_max)?;
    if sigma_min >= sigma_max {
        return Err(invalid("need sigma_min < sigma_max"));
    }
    let integrand = |sigma: f64| {
        let t = xi_terms(dim, sigma);
        sigma_integrand_from_ratios(dim, sigma, t.d1_ratio, t.d2_ratio)
    };
    match param {
        ScaleParam::Sigma => integrate_1d(integrand, sigma_min, sigma_max, spec),
        ScaleParam::LogSigma => {
            let f = |t: f64| {
                let sigma = t.exp();
                let x = xi_terms(dim, sigma);
                let c_mu = x.d1_ratio / (dim as f64 * sigma);
                let c_gamma = sigma * sigma * sigma_entry_from_ratios(sigma, x.d1_ratio, x.d2_ratio);
                (c_mu.powi(dim as i32) * c_gamma).sqrt()
            };
            integrate_1d(f, sigma_min.ln(), sigma_max.ln(), spec)
        }
    }
}

/// `vol(Theta) * int sqrt(det I_mu * I_gamma) d gamma`, with `Theta` the
/// geodesic ball of radius `domain.radius`.
pub fn fisher_integral(
    dim: usize,
    domain: &ParamDomain,
    param: ScaleParam,
    spec: &QuadSpec,
) -> Result<f64> {
    domain.validate()?;
    Ok(ball_volume(dim, domain.radius)?
        * gamma_integral(dim, domain.sigma_min, domain.sigma_max, param, spec)?)
}

/// Minimum sample count accepted by [`fisher_numeric`].
pub const FISHER_MIN_SAMPLES: usize = 10_000;
/// Central-difference step in every coordinate.
pub const FISHER_FD_STEP: f64 = 1e-4;
/// Batches used for the standard error of `det I_mu`.
pub const FISHER_BATCHES: usize = 20;

/// A Monte-Carlo Fisher estimate with per-entry standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherBlock {
    pub mu_block: DMatrix<f64>,
    pub sigma_entry: f64,
    pub cross_block: DVector<f64>,
    pub mu_stderr: DMatrix<f64>,
    pub sigma_stderr: f64,
    pub cross_stderr: DVector<f64>,
    /// `det mu_block` and its batch-means standard error.
    pub mu_det: f64,
    pub mu_det_stderr: f64,
    pub samples: usize,
}

/// Displaced parameter value used by the difference stencil.
struct Probe {
    point: Vec<f64>,
    sigma: f64,
    ln_xi: f64,
}

struct Stencil {
    k: usize,
    h: f64,
    centre: Probe,
    /// `plus[i]`, `minus[i]`: centre displaced by `+-h` along coordinate `i`.
    plus: Vec<Probe>,
    minus: Vec<Probe>,
    /// For `i < j`: displacements `(+,+), (+,-), (-,+), (-,-)`.
    corners: Vec<[Probe; 4]>,
}

impl Stencil {
    fn new(params: &RgdParams, h: f64) -> Result<Self> {
        let dim = params.dim();
        let k = dim + 1;
        let frame = isometry_to(&params.mu);
        let mu = params.mu.coords().to_vec();
        let probe = |delta: &[f64]| -> Result<Probe> {
            let mut v = vec![0.0; dim + 1];
            for (i, d) in delta[..dim].iter().enumerate() {
                if *d != 0.0 {
                    for (vj, ej) in v.iter_mut().zip(frame.frame_vector(i)) {
                        *vj += d * ej;
                    }
                }
            }
            let point = exp_coords(&mu, &v).into_coords();
            let sigma = params.sigma + delta[dim];
            Ok(Probe {
                point,
                sigma,
                ln_xi: ln_xi(dim, sigma)?,
            })
        };
        let unit = |i: usize, s: f64| {
            let mut d = vec![0.0; k];
            d[i] = s;
            d
        };
        let centre = probe(&vec![0.0; k])?;
        let plus = (0..k).map(|i| probe(&unit(i, h))).collect::<Result<_>>()?;
        let minus = (0..k).map(|i| probe(&unit(i, -h))).collect::<Result<_>>()?;
        let mut corners = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let c = |si: f64, sj: f64| {
                    let mut d = vec![0.0; k];
                    d[i] = si;
                    d[j] = sj;
                    probe(&d)
                };
                corners.push([c(h, h)?, c(h, -h)?, c(-h, h)?, c(-h, -h)?]);
            }
        }
        Ok(Self {
            k,
            h,
            centre,
            plus,
            minus,
            corners,
        })
    }

    /// Upper triangle (row-major) of `-Hess log p_vol(x | eta)` at the centre.
    fn neg_hessian(&self, x: &[f64], out: &mut [f64]) {
        let f = |p: &Probe| -p.ln_xi - dist_coords(x, &p.point).powi(2) / (2.0 * p.sigma * p.sigma);
        let h2 = self.h * self.h;
        let f0 = f(&self.centre);
        let mut corner = 0;
        let mut idx = 0;
        for i in 0..self.k {
            for j in i..self.k {
                out[idx] = if i == j {
                    -(f(&self.plus[i]) - 2.0 * f0 + f(&self.minus[i])) / h2
                } else {
                    let [pp, pm, mp, mm] = &self.corners[corner];
                    corner += 1;
                    -(f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h2)
                };
                idx += 1;
            }
        }
    }
}

#[derive(Clone)]
struct Accumulator {
    entries: Vec<Moments>,
    batch_sums: Vec<Vec<f64>>,
    batch_counts: Vec<usize>,
}

impl Accumulator {
    fn new(entries: usize) -> Self {
        Self {
            entries: vec![Moments::default(); entries],
            batch_sums: vec![vec![0.0; entries]; FISHER_BATCHES],
            batch_counts: vec![0; FISHER_BATCHES],
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        for (a, b) in self.entries.iter_mut().zip(other.entries) {
            *a = a.merge(b);
        }
        for (a, b) in self.batch_sums.iter_mut().zip(other.batch_sums) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.batch_counts.iter_mut().zip(other.batch_counts) {
            *a += b;
        }
        self
    }
}

/// Monte-Carlo estimate of `E[-Hess log p_vol(x | eta)]` at `eta = (0, sigma)`
/// in normal coordinates at `params.mu`: `samples` draws from the model,
/// Hessians by central differences with step [`FISHER_FD_STEP`].
///
/// Work is split into chunks of [`MC_CHUNK`] draws seeded from independent
/// streams of `seed`, so the result does not depend on the thread count.
pub fn fisher_numeric(params: &RgdParams, samples: usize, seed: RngSeed) -> Result<FisherBlock> {
    fisher_numeric_with_step(params, samples, seed, FISHER_FD_STEP)
}

/// [`fisher_numeric`] with an explicit difference step.
pub fn fisher_numeric_with_step(
    params: &RgdParams,
    samples: usize,
    seed: RngSeed,
    step: f64,
) -> Result<FisherBlock> {
    if samples < FISHER_MIN_SAMPLES {
        return Err(invalid(format!(
            "fisher_numeric needs at least {FISHER_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if !(step > 0.0) || step >= params.sigma {
        return Err(invalid(format!("difference step {step} must lie in (0, sigma)")));
    }
    let dim = params.dim();
    let k = dim + 1;
    let n_entries = k * (k + 1) / 2;
    let stencil = Stencil::new(params, step)?;
    let sampler = PointSampler::new(params)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed.stream(c as u64);
            let start = c * MC_CHUNK;
            let len = MC_CHUNK.min(samples - start);
            let mut acc = Accumulator::new(n_entries);
            let mut h = vec![0.0; n_entries];
            for s in start..start + len {
                let x = sampler.draw(&mut rng);
                stencil.neg_hessian(x.coords(), &mut h);
                let batch = s * FISHER_BATCHES / samples;
                for (e, (m, b)) in h
                    .iter()
                    .zip(acc.entries.iter_mut().zip(acc.batch_sums[batch].iter_mut()))
                {
                    m.push(*e);
                    *b += e;
                }
                acc.batch_counts[batch] += 1;
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Accumulator::new(n_entries), Accumulator::merge);

    let index = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * k - i * (i + 1) / 2 + j
    };
    let mu_block = DMatrix::from_fn(dim, dim, |i, j| acc.entries[index(i, j)].mean);
    let mu_stderr = DMatrix::from_fn(dim, dim, |i, j| acc.entries[index(i, j)].stderr());
    let cross_block = DVector::from_fn(dim, |i, _| acc.entries[index(i, dim)].mean);
    let cross_stderr = DVector::from_fn(dim, |i, _| acc.entries[index(i, dim)].stderr());
    let sigma = acc.entries[index(dim, dim)];

    let batch_dets: Vec<f64> = acc
        .batch_sums
        .iter()
        .zip(&acc.batch_counts)
        .map(|(sums, &count)| {
            DMatrix::from_fn(dim, dim, |i, j| sums[index(i, j)] / count as f64).determinant()
        })
        .collect();
    let mut det_moments = Moments::default();
    for d in &batch_dets {
        det_moments.push(*d);
    }

    Ok(FisherBlock {
        mu_det: mu_block.determinant(),
        mu_det_stderr: det_moments.stderr(),
        mu_block,
        sigma_entry: sigma.mean,
        cross_block,
        mu_stderr,
        sigma_stderr: sigma.stderr(),
        cross_stderr,
        samples,
    })
}

/// Convenience: [`fisher_numeric`] at `(mu, sigma)`.
pub fn fisher_numeric_at(mu: &LorentzPoint, sigma: f64, samples: usize, seed: RngSeed) -> Result<FisherBlock> {
    fisher_numeric(&RgdParams::new(mu.clone(), sigma)?, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn line_reduction() {
        for sigma in [0.25, 1.0, 3.0] {
            assert_relative_eq!(fisher_mu_scalar(1, sigma).unwrap(), 1.0 / (sigma * sigma), max_relative = 1e-13);
            assert_relative_eq!(fisher_sigma_closed(1, sigma).unwrap(), 2.0 / (sigma * sigma), max_relative = 1e-13);
        }
    }

    #[test]
    fn mu_block_is_scalar_identity() {
        let m = fisher_mu_closed(3, 0.8).unwrap();
        let s = m[(0, 0)];
        assert!(s > 0.0);
        assert_eq!(m, DMatrix::identity(3, 3) * s);
    }

    #[test]
    fn sigma_entry_positive() {
        for dim in 1..=5 {
            for k in 1..=30 {
                let sigma = 0.1 * k as f64;
                assert!(fisher_sigma_closed(dim, sigma).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn line_integral_analytic() {
        // vol = 2R = 1; int_{0.5}^{2} sqrt(2) / sigma^2 = 3 / sqrt(2)
        let domain = ParamDomain::new(0.5, 0.5, 2.0).unwrap();
        let spec = QuadSpec::complexity();
        let expected = 3.0 / 2f64.sqrt();
        for p in [ScaleParam::Sigma, ScaleParam::LogSigma] {
            assert_relative_eq!(fisher_integral(1, &domain, p, &spec).unwrap(), expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn numeric_matches_closed_on_line() {
        let params = RgdParams::new(LorentzPoint::from_spatial(&[0.3]), 0.7).unwrap();
        let est = fisher_numeric(&params, 20_000, RngSeed(3)).unwrap();
        assert_relative_eq!(est.mu_block[(0, 0)], 1.0 / 0.49, max_relative = 1e-5);
        let closed = fisher_sigma_closed(1, 0.7).unwrap();
        assert!((est.sigma_entry - closed).abs() < 4.0 * est.sigma_stderr);
        assert!(est.cross_block[0].abs() < 4.0 * est.cross_stderr[0]);
    }

    #[test]
    fn numeric_is_deterministic_and_validates_inputs() {
        let params = RgdParams::new(LorentzPoint::origin(2), 1.0).unwrap();
        let a = fisher_numeric(&params, 10_000, RngSeed(5)).unwrap();
        let b = fisher_numeric(&params, 10_000, RngSeed(5)).unwrap();
        assert_eq!(a, b);
        assert!(fisher_numeric(&params, 100, RngSeed(5)).is_err());
    }
}
