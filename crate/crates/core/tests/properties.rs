use proptest::prelude::*;

use rmnml::complexity::ParamDomain;
use rmnml::hygeo::{dist, exp_map, isometry_to, log_map, sqrt_det_metric};
use rmnml::quad::{integrate_1d, QuadSpec};
use rmnml::rgd::{log_lik, log_pdf_vol, mle, sample, Dataset, RgdParams};
use rmnml::{Chart, LorentzPoint, PolarCoords, RngSeed, TangentVector};

fn point(dim: usize) -> impl Strategy<Value = LorentzPoint> {
    prop::collection::vec(-3.0..3.0f64, dim).prop_map(|s| LorentzPoint::from_spatial(&s))
}

fn pair(dim: usize) -> impl Strategy<Value = (LorentzPoint, LorentzPoint)> {
    (point(dim), point(dim))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn coords_close(x: &LorentzPoint, y: &LorentzPoint, tol: f64) -> bool {
    x.coords().iter().zip(y.coords()).all(|(a, b)| close(*a, *b, tol))
}

proptest! {
    #[test]
    fn distance_is_a_metric((x, y, z) in (1usize..5).prop_flat_map(|d| (point(d), point(d), point(d)))) {
        let dxy = dist(&x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!(close(dxy, dist(&y, &x).unwrap(), 1e-12));
        prop_assert!(dist(&x, &x).unwrap() < 1e-7);
        let bound = dist(&x, &z).unwrap() + dist(&z, &y).unwrap();
        prop_assert!(dxy <= bound + 1e-9 * (1.0 + bound));
    }

    #[test]
    fn poincare_chart_round_trips_and_preserves_distance((x, y) in pair(3)) {
        let (px, py) = (x.to_poincare(), y.to_poincare());
        prop_assert!(coords_close(&px.to_lorentz(), &x, 1e-10));
        prop_assert!(close(px.dist(&py).unwrap(), dist(&x, &y).unwrap(), 1e-9));
    }

    #[test]
    fn boost_is_an_isometry(mu in point(3), (x, y) in pair(3)) {
        let t = isometry_to(&mu);
        prop_assert!(coords_close(&t.apply(&LorentzPoint::origin(3)), &mu, 1e-10));
        prop_assert!(close(dist(&t.apply(&x), &t.apply(&y)).unwrap(), dist(&x, &y).unwrap(), 1e-8));
        let back = t.inverse().apply(&t.apply(&x));
        prop_assert!(coords_close(&back, &x, 1e-8));
    }

    #[test]
    fn exp_inverts_log((x, y) in pair(2)) {
        let v = log_map(&x, &y).unwrap();
        prop_assert!(close(v.norm(), dist(&x, &y).unwrap(), 1e-9));
        prop_assert!(coords_close(&exp_map(&x, &v).unwrap(), &y, 1e-8));
    }

    #[test]
    fn exp_of_short_vector_moves_by_its_length(base in point(3), raw in prop::collection::vec(-2.0..2.0f64, 4)) {
        let v = TangentVector::project(base.clone(), &raw).unwrap();
        let y = exp_map(&base, &v).unwrap();
        prop_assert!(close(dist(&base, &y).unwrap(), v.norm(), 1e-8));
    }

    #[test]
    fn polar_coordinates_round_trip(r in 0.01..5.0f64, t1 in 0.05..3.0f64, t2 in -3.0..3.0f64) {
        let p = PolarCoords::from_angles(r, &[t1, t2]).unwrap();
        let back = p.to_lorentz().to_polar();
        prop_assert!(close(back.r, r, 1e-10));
        for (a, b) in back.angles().iter().zip([t1, t2]) {
            prop_assert!(close(*a, b, 1e-8));
        }
    }

    #[test]
    fn integration_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, k in 0.1..3.0f64) {
        let spec = QuadSpec::geometry();
        let f = |x: f64| (k * x).sin();
        let g = |x: f64| (-x * x).exp();
        let lhs = integrate_1d(|x| a * f(x) + b * g(x), -1.0, 2.0, &spec).unwrap();
        let rhs = a * integrate_1d(f, -1.0, 2.0, &spec).unwrap() + b * integrate_1d(g, -1.0, 2.0, &spec).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn density_is_isometry_invariant(mu in point(2), x in point(2), s in point(2), sigma in 0.2..2.5f64) {
        let t = isometry_to(&s);
        let p = RgdParams::new(mu.clone(), sigma).unwrap();
        let q = RgdParams::new(t.apply(&mu), sigma).unwrap();
        let a = log_pdf_vol(&x, &p).unwrap();
        let b = log_pdf_vol(&t.apply(&x), &q).unwrap();
        prop_assert!(close(a, b, 1e-8));
    }

    #[test]
    fn chart_metrics_agree_on_the_point(x in point(3)) {
        let lor = sqrt_det_metric(Chart::LorentzGraph, x.spatial()).unwrap();
        prop_assert!(close(lor, 1.0 / x.time(), 1e-12));
        let poi = sqrt_det_metric(Chart::Poincare, x.to_poincare().coords()).unwrap();
        prop_assert!(close(poi.ln(), 3.0 * x.time().ln_1p(), 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mle_is_isometry_equivariant(seed in any::<u64>(), s in point(2), sigma in 0.3..1.5f64) {
        let domain = ParamDomain::new(50.0, 0.05, 10.0).unwrap();
        let p = RgdParams::new(LorentzPoint::from_spatial(&[0.3, -0.2]), sigma).unwrap();
        let data = sample(40, &p, RngSeed(seed)).unwrap();
        let t = isometry_to(&s);
        let a = mle(&data, &domain).unwrap();
        let b = mle(&data.transformed(&t), &domain).unwrap();
        prop_assert!(dist(&t.apply(&a.params.mu), &b.params.mu).unwrap() < 1e-6);
        prop_assert!(close(a.params.sigma, b.params.sigma, 1e-6));
    }

    #[test]
    fn mle_beats_nearby_parameters(seed in any::<u64>(), dmu in prop::collection::vec(-0.2..0.2f64, 2), dsig in -0.2..0.2f64) {
        let domain = ParamDomain::default();
        let p = RgdParams::new(LorentzPoint::from_spatial(&[0.1, 0.4]), 0.8).unwrap();
        let data: Dataset = sample(60, &p, RngSeed(seed)).unwrap();
        let fit = mle(&data, &domain).unwrap();
        let best = log_lik(&data, &fit.params).unwrap();
        let mu = isometry_to(&fit.params.mu).apply(&LorentzPoint::from_spatial(&dmu));
        let other = RgdParams::new(mu, (fit.params.sigma + dsig).max(0.1)).unwrap();
        prop_assert!(best >= log_lik(&data, &other).unwrap() - 1e-9);
    }
}
