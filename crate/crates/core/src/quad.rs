//! One-dimensional quadrature, the error function, and seeded Monte Carlo.
//!
//! Everything here is deterministic: adaptive refinement order depends only on
//! the integrand, and Monte-Carlo work is cut into fixed-size chunks whose
//! random streams are derived from the master seed, so results do not depend
//! on the number of worker threads.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Random generator used throughout the crate.
pub type McRng = ChaCha8Rng;

/// Seed for every stochastic routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> McRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `index` of this seed.
    pub fn stream(self, index: u64) -> McRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

/// Samples per parallel work unit in [`mc_mean`]. Fixed so that the partition
/// is independent of the thread count.
pub const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    /// Globally adaptive Simpson with Richardson extrapolation.
    AdaptiveSimpson,
    /// Composite 20-point Gauss-Legendre on `max_subdivisions` equal panels,
    /// checked against twice as many panels.
    FixedGaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub method: QuadMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadSpec {
    pub fn new(method: QuadMethod, rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            method,
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default for the 1-D geometry oracles: relative tolerance `1e-10`.
    pub fn geometry() -> Self {
        Self {
            method: QuadMethod::AdaptiveSimpson,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 200_000,
        }
    }

    /// Default for parametric-complexity integrals: relative tolerance `1e-8`.
    pub fn complexity() -> Self {
        Self {
            rel_tol: 1e-8,
            ..Self::geometry()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(invalid(format!("abs_tol must be >= 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(invalid("max_subdivisions must be >= 1"));
        }
        Ok(())
    }
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self::complexity()
    }
}

/// Result of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// `int_a^b f(x) dx` to within `max(abs_tol, rel_tol * |result|)`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    integrate_1d_detailed(f, a, b, spec).map(|r| r.value)
}

pub fn integrate_1d_detailed<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<Integral> {
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    match spec.method {
        QuadMethod::AdaptiveSimpson => adaptive_simpson(&f, a, b, spec),
        QuadMethod::FixedGaussLegendre => gauss_legendre(&f, a, b, spec),
    }
}

const INITIAL_PANELS: usize = 16;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    fl: f64,
    fr: f64,
    value: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let fl = f(0.5 * (a + m));
        let fr = f(0.5 * (m + b));
        let h = (b - a) / 12.0;
        let left = h * (fa + 4.0 * fl + fm);
        let right = h * (fm + 4.0 * fr + fb);
        let delta = left + right - whole;
        Self {
            a,
            b,
            fa,
            fm,
            fb,
            fl,
            fr,
            value: left + right + delta / 15.0,
            error: delta.abs() / 15.0,
        }
    }

    fn split<F: Fn(f64) -> f64>(self, f: &F) -> (Panel, Panel) {
        let m = 0.5 * (self.a + self.b);
        let h = (self.b - self.a) / 12.0;
        let left_whole = h * (self.fa + 4.0 * self.fl + self.fm);
        let right_whole = h * (self.fm + 4.0 * self.fr + self.fb);
        (
            Panel::new(f, self.a, m, self.fa, self.fl, self.fm, left_whole),
            Panel::new(f, m, self.b, self.fm, self.fr, self.fb, right_whole),
        )
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadSpec) -> Result<Integral> {
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut heap = BinaryHeap::with_capacity(2 * INITIAL_PANELS);
    let mut evaluations = 0;
    let mut f_left = f(a);
    evaluations += 1;
    for k in 0..INITIAL_PANELS {
        let pa = a + k as f64 * width;
        let pb = if k + 1 == INITIAL_PANELS { b } else { pa + width };
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        let whole = (pb - pa) / 6.0 * (f_left + 4.0 * fm + fb);
        heap.push(Panel::new(f, pa, pb, f_left, fm, fb, whole));
        evaluations += 4;
        f_left = fb;
    }

    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut subdivisions = 0;
    while !(error <= spec.abs_tol.max(spec.rel_tol * value.abs())) {
        if !value.is_finite() || !error.is_finite() {
            return Err(invalid("integrand is not finite on the interval"));
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        value -= worst.value;
        error -= worst.error;
        let (l, r) = worst.split(f);
        evaluations += 4;
        value += l.value + r.value;
        error += l.error + r.error;
        heap.push(l);
        heap.push(r);
        subdivisions += 1;
        // Re-sum periodically so the running totals do not drift.
        if subdivisions % 1024 == 0 {
            (value, error) = totals(&heap);
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

const GL_ORDER: usize = 20;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadSpec) -> Result<Integral> {
    let (nodes, weights) = gauss_legendre_rule(GL_ORDER);
    let composite = |panels: usize| {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * h;
                let c = lo + 0.5 * h;
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(x, w)| w * f(c + 0.5 * h * x))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum::<f64>()
    };
    let coarse = composite(spec.max_subdivisions);
    let fine = composite(2 * spec.max_subdivisions);
    let error = (fine - coarse).abs();
    let evaluations = 3 * spec.max_subdivisions * GL_ORDER;
    if !fine.is_finite() {
        return Err(invalid("integrand is not finite on the interval"));
    }
    if error > spec.abs_tol.max(spec.rel_tol * fine.abs()) {
        return Err(Error::Quadrature {
            estimate: fine,
            error,
            subdivisions: spec.max_subdivisions,
        });
    }
    Ok(Integral {
        value: fine,
        error,
        evaluations,
    })
}

/// The error function `2/sqrt(pi) int_0^x exp(-t^2) dt`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// `1 - erf(x)` without cancellation for large `x`.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `exp(x^2) erfc(x)`, accurate for
/// large positive `x` where both factors leave the floating-point range.
pub fn erfcx(x: f64) -> f64 {
    if x < 25.0 {
        return (x * x).exp() * erfc(x);
    }
    // Asymptotic series sum_k (-1)^k (2k-1)!! t^k; at x >= 25 the terms
    // after t^6 are below 1e-18.
    let t = 1.0 / (2.0 * x * x);
    let series = [1.0, -1.0, 3.0, -15.0, 105.0, -945.0, 10395.0]
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * t + c);
    series / (x * std::f64::consts::PI.sqrt())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Sample mean and its standard error `sd / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Running moments merged with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Monte-Carlo mean of `f(X)` with `X` drawn by `sampler`.
///
/// The `n` draws are split into chunks of [`MC_CHUNK`]; chunk `k` uses
/// random stream `k` of `seed`. Chunks run in parallel and are merged in
/// order, so the output is bit-identical for a given seed.
pub fn mc_mean<T, S, F>(f: F, sampler: S, n: usize, seed: RngSeed) -> Result<McEstimate>
where
    S: Fn(&mut McRng) -> T + Sync,
    F: Fn(&T) -> f64 + Sync,
{
    if n < 2 {
        return Err(invalid("mc_mean needs n >= 2"));
    }
    let chunks = n.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.stream(k as u64);
            let len = MC_CHUNK.min(n - k * MC_CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                let x = sampler(&mut rng);
                m.push(f(&x));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok(McEstimate {
        mean: total.mean,
        stderr: total.stderr(),
        n,
    })
}

/// Uniform draw on `[0, 1)`.
pub fn uniform01(rng: &mut McRng) -> f64 {
    rng.random::<f64>()
}

/// Caps the global worker pool. Only the first call in a process has an effect.
pub fn configure_threads(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| invalid(format!("cannot configure thread pool: {e}")))
}
