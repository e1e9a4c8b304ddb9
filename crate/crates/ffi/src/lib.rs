//! C ABI over `rmnml`.
//!
//! Every fallible function returns an [`RmnmlStatus`] and writes results
//! through out-pointers. On failure a message is available from
//! [`rmnml_last_error`] on the same thread. Datasets cross the boundary as the
//! opaque [`RmnmlDataset`] handle, created by one of the `rmnml_dataset_*`
//! constructors or [`rmnml_sample`] and released with [`rmnml_dataset_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rmnml::complexity::{chart_gap, pc_hgd, rm_nml_codelength};
use rmnml::fisher::{fisher_mu_scalar, fisher_sigma_closed};
use rmnml::hygeo::ball_volume;
use rmnml::rgd::{sample, xi, xi_derivatives};
use rmnml::{io, Chart, Dataset, Error, LorentzPoint, ParamDomain, QuadSpec, RgdParams, RngSeed};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmnmlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OffManifold = 4,
    NotTangent = 5,
    Quadrature = 6,
    NoConvergence = 7,
    UnsupportedDimension = 8,
    Panic = 9,
}

impl From<&Error> for RmnmlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => RmnmlStatus::DimensionMismatch,
            Error::OffManifold(_) => RmnmlStatus::OffManifold,
            Error::NotTangent(_) => RmnmlStatus::NotTangent,
            Error::InvalidArgument(_) => RmnmlStatus::InvalidArgument,
            Error::Quadrature { .. } => RmnmlStatus::Quadrature,
            Error::NoConvergence(_) => RmnmlStatus::NoConvergence,
            Error::UnsupportedDimension(_) => RmnmlStatus::UnsupportedDimension,
        }
    }
}

/// Coordinate chart for [`rmnml_chart_gap`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmnmlChart {
    LorentzGraph = 0,
    Poincare = 1,
}

/// Parameter domain: mean in the geodesic ball of `radius` about the origin,
/// scale in `[sigma_min, sigma_max]`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RmnmlDomain {
    pub radius: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RmnmlPcResult {
    pub k: usize,
    pub n: usize,
    pub term_kn: f64,
    pub term_volume: f64,
    pub term_fisher: f64,
    pub total_log_pc: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RmnmlCodeLength {
    pub neg_max_loglik: f64,
    pub log_pc: f64,
    pub total: f64,
    pub sigma_hat: f64,
    pub boundary_flag: bool,
}

/// Opaque dataset handle.
pub struct RmnmlDataset {
    inner: Dataset,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), RmnmlStatus>>(f: F) -> RmnmlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RmnmlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("internal panic");
            RmnmlStatus::Panic
        }
    }
}

fn fail(e: Error) -> RmnmlStatus {
    set_last_error(&e.to_string());
    RmnmlStatus::from(&e)
}

fn null(what: &str) -> RmnmlStatus {
    set_last_error(&format!("{what} is null"));
    RmnmlStatus::NullPointer
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, RmnmlStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn dataset<'a>(p: *const RmnmlDataset) -> Result<&'a Dataset, RmnmlStatus> {
    p.as_ref().map(|d| &d.inner).ok_or_else(|| null("dataset"))
}

fn domain(d: &RmnmlDomain) -> Result<ParamDomain, RmnmlStatus> {
    ParamDomain::new(d.radius, d.sigma_min, d.sigma_max).map_err(fail)
}

fn boxed(data: Dataset) -> *mut RmnmlDataset {
    Box::into_raw(Box::new(RmnmlDataset { inner: data }))
}

/// Message for the most recent failure on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rmnml_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rmnml_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default domain: radius 3, sigma in [0.1, 3].
#[no_mangle]
pub extern "C" fn rmnml_domain_default() -> RmnmlDomain {
    let d = ParamDomain::default();
    RmnmlDomain {
        radius: d.radius,
        sigma_min: d.sigma_min,
        sigma_max: d.sigma_max,
    }
}

/// Normaliser `xi(sigma)` of the Gaussian on `H^dim`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_xi(dim: usize, sigma: f64, out_value: *mut f64) -> RmnmlStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = xi(dim, sigma).map_err(fail)?;
        Ok(())
    })
}

/// `xi'(sigma)` and `xi''(sigma)`.
///
/// # Safety
/// Both out-pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_xi_derivatives(
    dim: usize,
    sigma: f64,
    out_d1: *mut f64,
    out_d2: *mut f64,
) -> RmnmlStatus {
    guard(|| {
        let d1 = out(out_d1, "out_d1")?;
        let d2 = out(out_d2, "out_d2")?;
        (*d1, *d2) = xi_derivatives(dim, sigma).map_err(fail)?;
        Ok(())
    })
}

/// Closed-form Fisher information: the scalar multiplying the identity in the
/// mean block, and the scale entry.
///
/// # Safety
/// Both out-pointers must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_fisher_closed(
    dim: usize,
    sigma: f64,
    out_mu_scalar: *mut f64,
    out_sigma_entry: *mut f64,
) -> RmnmlStatus {
    guard(|| {
        let m = out(out_mu_scalar, "out_mu_scalar")?;
        let s = out(out_sigma_entry, "out_sigma_entry")?;
        *m = fisher_mu_scalar(dim, sigma).map_err(fail)?;
        *s = fisher_sigma_closed(dim, sigma).map_err(fail)?;
        Ok(())
    })
}

/// Volume of a geodesic ball of `radius` in `H^dim`.
///
/// # Safety
/// `out_value` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_ball_volume(
    dim: usize,
    radius: f64,
    out_value: *mut f64,
) -> RmnmlStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = ball_volume(dim, radius).map_err(fail)?;
        Ok(())
    })
}

/// Log parametric complexity of the Gaussian on `H^dim` with `n` samples.
///
/// # Safety
/// `dom` must be null or point to a valid domain; `out_result` must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_pc_hgd(
    dim: usize,
    n: usize,
    dom: *const RmnmlDomain,
    out_result: *mut RmnmlPcResult,
) -> RmnmlStatus {
    guard(|| {
        let d = domain(dom.as_ref().ok_or_else(|| null("domain"))?)?;
        let o = out(out_result, "out_result")?;
        let r = pc_hgd(dim, n, &d, &QuadSpec::complexity()).map_err(fail)?;
        *o = RmnmlPcResult {
            k: r.k,
            n: r.n,
            term_kn: r.term_kn,
            term_volume: r.term_volume,
            term_fisher: r.term_fisher,
            total_log_pc: r.total_log_pc,
        };
        Ok(())
    })
}

/// Builds a dataset from `n` points of `H^dim`, given row-major as `n`
/// rows of `dim + 1` Lorentz coordinates.
///
/// # Safety
/// `coords` must point to `n * (dim + 1)` readable doubles; `out_dataset`
/// must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_dataset_from_lorentz(
    coords: *const f64,
    n: usize,
    dim: usize,
    out_dataset: *mut *mut RmnmlDataset,
) -> RmnmlStatus {
    guard(|| {
        let o = out(out_dataset, "out_dataset")?;
        *o = ptr::null_mut();
        if coords.is_null() {
            return Err(null("coords"));
        }
        if n == 0 || dim == 0 {
            return Err(fail(Error::InvalidArgument("need n >= 1 and dim >= 1".into())));
        }
        let len = n
            .checked_mul(dim + 1)
            .ok_or_else(|| fail(Error::InvalidArgument("n * (dim + 1) overflows".into())))?;
        let flat = std::slice::from_raw_parts(coords, len);
        let points = flat
            .chunks_exact(dim + 1)
            .map(|c| LorentzPoint::new(c.to_vec()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        *o = boxed(Dataset::new(points).map_err(fail)?);
        Ok(())
    })
}

/// Reads a dataset JSON file.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out_dataset` must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_dataset_from_file(
    path: *const c_char,
    out_dataset: *mut *mut RmnmlDataset,
) -> RmnmlStatus {
    guard(|| {
        let o = out(out_dataset, "out_dataset")?;
        *o = ptr::null_mut();
        if path.is_null() {
            return Err(null("path"));
        }
        let p = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(Error::InvalidArgument("path is not UTF-8".into())))?;
        *o = boxed(io::read_dataset(Path::new(p)).map_err(fail)?);
        Ok(())
    })
}

/// Draws `n` points from the Gaussian with mean at spatial coordinates
/// `mu_spatial` (`dim` values; null for the origin) and scale `sigma`.
///
/// # Safety
/// `mu_spatial` must be null or point to `dim` readable doubles;
/// `out_dataset` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_sample(
    dim: usize,
    n: usize,
    mu_spatial: *const f64,
    sigma: f64,
    seed: u64,
    out_dataset: *mut *mut RmnmlDataset,
) -> RmnmlStatus {
    guard(|| {
        let o = out(out_dataset, "out_dataset")?;
        *o = ptr::null_mut();
        if dim == 0 {
            return Err(fail(Error::UnsupportedDimension(0)));
        }
        let mu = if mu_spatial.is_null() {
            LorentzPoint::origin(dim)
        } else {
            LorentzPoint::from_spatial(std::slice::from_raw_parts(mu_spatial, dim))
        };
        let params = RgdParams::new(mu, sigma).map_err(fail)?;
        *o = boxed(sample(n, &params, RngSeed(seed)).map_err(fail)?);
        Ok(())
    })
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `ds` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rmnml_dataset_free(ds: *mut RmnmlDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rmnml_dataset_len(ds: *const RmnmlDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.len())
}

/// Dimension `D`; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rmnml_dataset_dim(ds: *const RmnmlDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.dim())
}

/// Copies the Lorentz coordinates, row-major, into `buf`, which must hold
/// `len * (dim + 1)` doubles; `buf_len` is its capacity in doubles.
///
/// # Safety
/// `ds` must be null or a live handle; `buf` must be null or valid for
/// `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_dataset_coords(
    ds: *const RmnmlDataset,
    buf: *mut f64,
    buf_len: usize,
) -> RmnmlStatus {
    guard(|| {
        let d = dataset(ds)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = d.len() * (d.dim() + 1);
        if buf_len < need {
            return Err(fail(Error::InvalidArgument(format!(
                "buffer holds {buf_len} values, need {need}"
            ))));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (row, p) in out.chunks_exact_mut(d.dim() + 1).zip(d.points()) {
            row.copy_from_slice(p.coords());
        }
        Ok(())
    })
}

/// Rm-NML code-length of a dataset, in nats.
///
/// # Safety
/// `ds` must be null or a live handle, `dom` null or valid, `out_report`
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_codelength(
    ds: *const RmnmlDataset,
    dom: *const RmnmlDomain,
    out_report: *mut RmnmlCodeLength,
) -> RmnmlStatus {
    guard(|| {
        let d = dataset(ds)?;
        let dom = domain(dom.as_ref().ok_or_else(|| null("domain"))?)?;
        let o = out(out_report, "out_report")?;
        let r = rm_nml_codelength(d, &dom, &QuadSpec::complexity()).map_err(fail)?;
        *o = RmnmlCodeLength {
            neg_max_loglik: r.neg_max_loglik,
            log_pc: r.log_pc,
            total: r.total,
            sigma_hat: r.sigma_hat,
            boundary_flag: r.boundary_flag,
        };
        Ok(())
    })
}

/// Difference between the conventional NML code-length in `chart` and the
/// Rm-NML code-length, `-sum_i log sqrt(det g(x_i))`.
///
/// # Safety
/// `ds` must be null or a live handle; `out_value` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmnml_chart_gap(
    ds: *const RmnmlDataset,
    chart: RmnmlChart,
    out_value: *mut f64,
) -> RmnmlStatus {
    guard(|| {
        let d = dataset(ds)?;
        let o = out(out_value, "out_value")?;
        let c = match chart {
            RmnmlChart::LorentzGraph => Chart::LorentzGraph,
            RmnmlChart::Poincare => Chart::Poincare,
        };
        *o = chart_gap(d, c);
        Ok(())
    })
}
