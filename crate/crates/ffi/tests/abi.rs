use std::ffi::{CStr, CString};
use std::ptr;

use rmnml_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rmnml_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn xi_matches_closed_form_in_one_dimension() {
    let mut v = 0.0;
    let s = unsafe { rmnml_xi(1, 0.7, &mut v) };
    assert_eq!(s, RmnmlStatus::Ok);
    assert!((v - 0.7 * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);
}

#[test]
fn derivatives_and_fisher() {
    let (mut d1, mut d2) = (0.0, 0.0);
    assert_eq!(unsafe { rmnml_xi_derivatives(1, 2.0, &mut d1, &mut d2) }, RmnmlStatus::Ok);
    assert!((d1 - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    assert!(d2.abs() < 1e-12);
    let (mut m, mut s) = (0.0, 0.0);
    assert_eq!(unsafe { rmnml_fisher_closed(1, 2.0, &mut m, &mut s) }, RmnmlStatus::Ok);
    assert!((m - 0.25).abs() < 1e-12);
    assert!((s - 0.5).abs() < 1e-12);
}

#[test]
fn errors_set_status_and_message() {
    let mut v = 0.0;
    assert_eq!(unsafe { rmnml_xi(2, -1.0, &mut v) }, RmnmlStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { rmnml_xi(2, 1.0, ptr::null_mut()) }, RmnmlStatus::NullPointer);
    assert!(last_error().contains("out_value"));
    assert_eq!(unsafe { rmnml_ball_volume(0, 1.0, &mut v) }, RmnmlStatus::UnsupportedDimension);
}

#[test]
fn pc_with_default_domain() {
    let dom = rmnml_domain_default();
    assert_eq!((dom.radius, dom.sigma_min, dom.sigma_max), (3.0, 0.1, 3.0));
    let mut r = RmnmlPcResult::default();
    assert_eq!(unsafe { rmnml_pc_hgd(2, 100, &dom, &mut r) }, RmnmlStatus::Ok);
    assert_eq!((r.k, r.n), (3, 100));
    assert!((r.term_kn + r.term_volume + r.term_fisher - r.total_log_pc).abs() < 1e-12);
    let bad = RmnmlDomain { radius: -1.0, ..dom };
    assert_eq!(unsafe { rmnml_pc_hgd(2, 100, &bad, &mut r) }, RmnmlStatus::InvalidArgument);
}

#[test]
fn dataset_lifecycle() {
    unsafe {
        let mut ds = ptr::null_mut();
        let mu = [0.3, -0.2];
        assert_eq!(rmnml_sample(2, 50, mu.as_ptr(), 0.8, 7, &mut ds), RmnmlStatus::Ok);
        assert_eq!(rmnml_dataset_len(ds), 50);
        assert_eq!(rmnml_dataset_dim(ds), 2);

        let mut buf = vec![0.0; 150];
        assert_eq!(rmnml_dataset_coords(ds, buf.as_mut_ptr(), 149), RmnmlStatus::InvalidArgument);
        assert_eq!(rmnml_dataset_coords(ds, buf.as_mut_ptr(), 150), RmnmlStatus::Ok);

        let mut copy = ptr::null_mut();
        assert_eq!(rmnml_dataset_from_lorentz(buf.as_ptr(), 50, 2, &mut copy), RmnmlStatus::Ok);

        let dom = rmnml_domain_default();
        let (mut a, mut b) = (RmnmlCodeLength::default(), RmnmlCodeLength::default());
        assert_eq!(rmnml_codelength(ds, &dom, &mut a), RmnmlStatus::Ok);
        assert_eq!(rmnml_codelength(copy, &dom, &mut b), RmnmlStatus::Ok);
        assert_eq!(a.total.to_bits(), b.total.to_bits());
        assert!((a.neg_max_loglik + a.log_pc - a.total).abs() < 1e-9);

        let mut gap = 0.0;
        assert_eq!(rmnml_chart_gap(ds, RmnmlChart::Poincare, &mut gap), RmnmlStatus::Ok);
        assert!(gap.is_finite());

        rmnml_dataset_free(ds);
        rmnml_dataset_free(copy);
        rmnml_dataset_free(ptr::null_mut());
        assert_eq!(rmnml_dataset_len(ptr::null()), 0);
    }
}

#[test]
fn rejects_off_manifold_points() {
    let coords = [1.0, 0.0, 2.0, 0.0];
    let mut ds = ptr::null_mut();
    let s = unsafe { rmnml_dataset_from_lorentz(coords.as_ptr(), 2, 1, &mut ds) };
    assert_eq!(s, RmnmlStatus::OffManifold);
    assert!(ds.is_null());
}

#[test]
fn reads_dataset_file() {
    let dir = std::env::temp_dir().join(format!("rmnml-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d.json");
    std::fs::write(&path, r#"{"chart":"poincare","dim":1,"points":[[0.0],[0.5],[-0.25]]}"#).unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(rmnml_dataset_from_file(c.as_ptr(), &mut ds), RmnmlStatus::Ok);
        assert_eq!(rmnml_dataset_len(ds), 3);
        rmnml_dataset_free(ds);
        let missing = CString::new(dir.join("nope.json").to_str().unwrap()).unwrap();
        assert_eq!(rmnml_dataset_from_file(missing.as_ptr(), &mut ds), RmnmlStatus::InvalidArgument);
        assert!(last_error().contains("cannot read"));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(rmnml_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rmnml.h")).unwrap();
    for name in [
        "rmnml_last_error",
        "rmnml_version",
        "rmnml_domain_default",
        "rmnml_xi",
        "rmnml_xi_derivatives",
        "rmnml_fisher_closed",
        "rmnml_ball_volume",
        "rmnml_pc_hgd",
        "rmnml_dataset_from_lorentz",
        "rmnml_dataset_from_file",
        "rmnml_sample",
        "rmnml_dataset_free",
        "rmnml_dataset_len",
        "rmnml_dataset_dim",
        "rmnml_dataset_coords",
        "rmnml_codelength",
        "rmnml_chart_gap",
        "typedef struct RmnmlDataset RmnmlDataset",
        "RMNML_STATUS_OK = 0",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}
