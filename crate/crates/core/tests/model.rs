use std::f64::consts::PI;

use rmnml::fisher::fisher_numeric;
use rmnml::hygeo::{dist, sqrt_det_metric};
use rmnml::quad::{integrate_1d, QuadSpec};
use rmnml::rgd::{expected_sq_dist, pdf_vol, sample};
use rmnml::validate::expected_sq_dist_by_quadrature;
use rmnml::{Chart, LorentzPoint, PoincarePoint, RgdParams, RngSeed};

#[test]
fn sampled_mean_square_distance_matches_quadrature() {
    for dim in 1..=4 {
        for sigma in [0.4, 1.2] {
            let mu = LorentzPoint::from_spatial(&vec![0.5; dim]);
            let p = RgdParams::new(mu.clone(), sigma).unwrap();
            let data = sample(200_000, &p, RngSeed(31 + dim as u64)).unwrap();
            let d2: Vec<f64> = data.points().iter().map(|x| dist(x, &mu).unwrap().powi(2)).collect();
            let n = d2.len() as f64;
            let mean = d2.iter().sum::<f64>() / n;
            let var = d2.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let oracle = expected_sq_dist_by_quadrature(dim, sigma).unwrap();
            assert!((expected_sq_dist(dim, sigma) - oracle).abs() <= 1e-9 * oracle);
            assert!(
                (mean - oracle).abs() <= 4.0 * (var / n).sqrt(),
                "D={dim} sigma={sigma}: sample {mean} vs {oracle}"
            );
        }
    }
}

#[test]
fn density_has_unit_mass_in_the_poincare_disk() {
    let p = RgdParams::new(LorentzPoint::from_spatial(&[0.4, -0.3]), 0.6).unwrap();
    let spec = QuadSpec::new(rmnml::QuadMethod::AdaptiveSimpson, 1e-9, 1e-14, 200_000).unwrap();
    let inner = |theta: f64| {
        integrate_1d(
            |rho| {
                let c = [rho * theta.cos(), rho * theta.sin()];
                let x = PoincarePoint::new(c.to_vec()).unwrap().to_lorentz();
                pdf_vol(&x, &p).unwrap() * sqrt_det_metric(Chart::Poincare, &c).unwrap() * rho
            },
            0.0,
            0.999,
            &spec,
        )
        .unwrap()
    };
    let mass = integrate_1d(inner, 0.0, 2.0 * PI, &spec).unwrap();
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
}

#[test]
fn density_has_unit_mass_in_the_graph_chart() {
    let p = RgdParams::new(LorentzPoint::from_spatial(&[1.2]), 0.8).unwrap();
    let f = |s: f64| pdf_vol(&LorentzPoint::from_spatial(&[s]), &p).unwrap() * sqrt_det_metric(Chart::LorentzGraph, &[s]).unwrap();
    let mass = integrate_1d(f, -1e4, 1e4, &QuadSpec::geometry()).unwrap();
    assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
}

#[test]
fn monte_carlo_is_independent_of_thread_count() {
    let p = RgdParams::new(LorentzPoint::from_spatial(&[0.2, 0.1]), 0.9).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| (sample(10_000, &p, RngSeed(5)).unwrap(), fisher_numeric(&p, 20_000, RngSeed(6)).unwrap()))
    };
    let (d1, f1) = run(1);
    let (d4, f4) = run(4);
    assert_eq!(d1, d4);
    assert_eq!(f1.mu_block, f4.mu_block);
    assert_eq!(f1.sigma_entry.to_bits(), f4.sigma_entry.to_bits());
    assert_eq!(f1.mu_det_stderr.to_bits(), f4.mu_det_stderr.to_bits());
}
