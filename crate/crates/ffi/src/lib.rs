//! C interface to `specteig`.
//!
//! Objects are opaque handles created by the `*_parse`, `*_read`, `*_from_*`,
//! `*_random_*` and `*_solve` calls and
//! released with the matching `*_free`. Every fallible call returns a
//! [`SpecteigStatus`]; the message of the last failure on the calling thread
//! is available from [`specteig_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use specteig::eigen::{self, build_problem, Extremum, Kind, MultiStart, MultiStartReport};
use specteig::pam::{kl_exponent, Init};
use specteig::trust_region::{self, check_second_order, CubicScales, TaylorPoly, TrConfig};
use specteig::{Error, MultilinearForm, SymTensor};

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecteigStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Dimension = 4,
    Denominator = 5,
    NoConvergence = 6,
    Numerical = 7,
    Io = 8,
    Panic = 9,
}

/// Right-hand operator of an eigenproblem.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecteigKind {
    Z = 0,
    H = 1,
    D = 2,
    B = 3,
}

/// Symmetric tensor.
pub struct SpecteigTensor(SymTensor);

/// Clustered multistart outcome.
pub struct SpecteigReport(MultiStartReport);

/// Polynomial model for the trust-region solver.
pub struct SpecteigPoly(TaylorPoly);

/// Multistart eigen settings. Negative or NaN numeric fields select the
/// library default.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpecteigEigenOptions {
    pub trials: i64,
    pub seed: u64,
    pub alpha: f64,
    pub gamma: f64,
    pub eps: f64,
    pub tol: f64,
    pub init_lo: f64,
    pub init_hi: f64,
    pub max_inner: i64,
    pub max_outer: i64,
    /// Nonzero for the largest eigenvalues.
    pub largest: u8,
}

/// Trust-region settings; same default convention as [`SpecteigEigenOptions`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpecteigTrOptions {
    pub gamma: f64,
    pub alpha: f64,
    pub eps: f64,
    pub tol: f64,
    pub max_inner: i64,
    pub max_outer: i64,
    pub starts: i64,
    pub seed: u64,
    /// Nonzero for `lambda = s^T grad T / delta^2`.
    pub flip_sign: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpecteigTrSummary {
    pub lambda: f64,
    pub value: f64,
    pub grad_norm: f64,
    pub proj_min_eig: f64,
    pub outer_iters: u64,
    pub inner_iters: u64,
    pub converged: u8,
    pub proj_pd: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SpecteigStatus {
    match err {
        Error::Parse { .. } | Error::DuplicateEntry { .. } => SpecteigStatus::Parse,
        Error::Dim { .. } | Error::Arity { .. } | Error::Index { .. } => SpecteigStatus::Dimension,
        Error::Domain(_) | Error::Config(_) => SpecteigStatus::InvalidArgument,
        Error::Denominator(_) => SpecteigStatus::Denominator,
        Error::Numerical { .. } => SpecteigStatus::Numerical,
        Error::Io(_) => SpecteigStatus::Io,
    }
}

struct Failure(SpecteigStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpecteigStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpecteigStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SpecteigStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SpecteigStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SpecteigStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn specteig_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn specteig_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses the plain-text tensor format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_parse(text: *const c_char, out: *mut *mut SpecteigTensor) -> SpecteigStatus {
    guard(|| {
        let t = specteig::tensor::parse_tensor(self::text(text, "text")?)?;
        put(out, SpecteigTensor(t))
    })
}

/// Reads a tensor file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_read(path: *const c_char, out: *mut *mut SpecteigTensor) -> SpecteigStatus {
    guard(|| {
        let t = specteig::tensor::read_tensor(text(path, "path")?)?;
        put(out, SpecteigTensor(t))
    })
}

/// Builds a tensor from `count` entries; `indices` holds `count * order`
/// 1-based indices, one class representative per entry.
///
/// # Safety
/// `indices` and `values` must point to arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_from_entries(
    order: usize,
    dim: usize,
    indices: *const usize,
    values: *const f64,
    count: usize,
    out: *mut *mut SpecteigTensor,
) -> SpecteigStatus {
    guard(|| {
        let idx = slice(indices, count * order, "indices")?;
        let vals = slice(values, count, "values")?;
        let entries = (0..count).map(|k| (idx[k * order..(k + 1) * order].to_vec(), vals[k]));
        let t = SymTensor::from_entries(order, dim, entries)?;
        put(out, SpecteigTensor(t))
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_free(t: *mut SpecteigTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a valid handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_order(t: *const SpecteigTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.order())
}

/// # Safety
/// `t` must be a valid handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_dim(t: *const SpecteigTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.dim())
}

/// `A x^m`.
///
/// # Safety
/// `x` must hold `n` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_tensor_apply(
    t: *const SpecteigTensor,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> SpecteigStatus {
    guard(|| {
        let t = handle(t, "tensor")?;
        let v = t.0.apply_full(slice(x, n, "x")?)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Defaults matching the fourth-order Z example: 100 trials, seed 2024,
/// `gamma = 1`, `alpha` from the Frobenius norm, starts in `[-1, 1)`.
#[no_mangle]
pub extern "C" fn specteig_eigen_options_default() -> SpecteigEigenOptions {
    SpecteigEigenOptions {
        trials: 100,
        seed: 2024,
        alpha: f64::NAN,
        gamma: 1.0,
        eps: 1e-6,
        tol: 1e-3,
        init_lo: -1.0,
        init_hi: 1.0,
        max_inner: -1,
        max_outer: -1,
        largest: 0,
    }
}

fn given(v: f64) -> Option<f64> {
    (v >= 0.0).then_some(v)
}

fn given_count(v: i64) -> Option<usize> {
    (v >= 0).then_some(v as usize)
}

/// Multistart solve for the extremal eigenpairs of `a`. `b` is required for
/// the D and B kinds and must be null otherwise; `options` may be null.
///
/// # Safety
/// Handles must be valid or null as described; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_eigen_solve(
    a: *const SpecteigTensor,
    kind: SpecteigKind,
    b: *const SpecteigTensor,
    options: *const SpecteigEigenOptions,
    out: *mut *mut SpecteigReport,
) -> SpecteigStatus {
    guard(|| {
        let a = handle(a, "a")?;
        let b = b.as_ref().map(|b| b.0.clone());
        let o = options.as_ref().copied().unwrap_or_else(|| specteig_eigen_options_default());
        let kind = match kind {
            SpecteigKind::Z => Kind::Z,
            SpecteigKind::H => Kind::H,
            SpecteigKind::D => Kind::D,
            SpecteigKind::B => Kind::B,
        };
        let extremum = if o.largest != 0 { Extremum::Max } else { Extremum::Min };
        let problem = build_problem(a.0.clone(), kind, b, extremum)?;
        let mut config = eigen::default_config();
        config.inner.alpha = given(o.alpha);
        if let Some(g) = given(o.gamma) {
            config.inner.gammas = vec![g];
        }
        if let Some(e) = given(o.eps) {
            config.inner.eps = e;
        }
        if let Some(t) = given(o.tol) {
            config.tol = t;
        }
        if o.init_lo.is_finite() && o.init_hi.is_finite() {
            config.inner.init = Init::Uniform {
                lo: o.init_lo,
                hi: o.init_hi,
            };
        }
        if let Some(n) = given_count(o.max_inner) {
            config.inner.max_iter = n;
        }
        if let Some(n) = given_count(o.max_outer) {
            config.k_max = n;
        }
        let opts = MultiStart {
            trials: given_count(o.trials).unwrap_or(100),
            base_seed: o.seed,
            ..MultiStart::default()
        };
        let report = eigen::solve_multistart(&problem, &opts, &config)?;
        put(out, SpecteigReport(report))
    })
}

/// # Safety
/// `r` must be a valid handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn specteig_report_pair_count(r: *const SpecteigReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.pairs.len())
}

/// # Safety
/// `r` must be a valid handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn specteig_report_non_converged(r: *const SpecteigReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.non_converged)
}

/// Copies pair `index`. `x` receives `n` entries and `n` must equal the
/// tensor dimension; any scalar output may be null.
///
/// # Safety
/// `r` must be a valid handle and the output pointers valid or null.
#[no_mangle]
pub unsafe extern "C" fn specteig_report_pair(
    r: *const SpecteigReport,
    index: usize,
    lambda: *mut f64,
    x: *mut f64,
    n: usize,
    residual: *mut f64,
    occurrence: *mut f64,
) -> SpecteigStatus {
    guard(|| {
        let r = handle(r, "report")?;
        let p = r.0.pairs.get(index).ok_or_else(|| {
            Failure(
                SpecteigStatus::InvalidArgument,
                format!("pair {index} out of range ({} pairs)", r.0.pairs.len()),
            )
        })?;
        if !x.is_null() {
            if n != p.x.len() {
                return Err(Error::Dim {
                    expected: p.x.len(),
                    got: n,
                }
                .into());
            }
            out_slice(x, n, "x")?.copy_from_slice(&p.x);
        }
        for (ptr, v) in [(lambda, p.lambda), (residual, p.residual), (occurrence, p.occurrence)] {
            if let Some(o) = ptr.as_mut() {
                *o = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `r` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn specteig_report_free(r: *mut SpecteigReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Seeded random cubic `g = a randn`, `H = b symm(randn)`, `T = c symm(randn)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_poly_random_cubic(
    n: usize,
    a: f64,
    b: f64,
    c: f64,
    seed: u64,
    out: *mut *mut SpecteigPoly,
) -> SpecteigStatus {
    guard(|| {
        let p = trust_region::random_cubic(n, CubicScales { a, b, c }, seed)?;
        put(out, SpecteigPoly(p))
    })
}

/// Parses the JSON polynomial format.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_poly_parse_json(json: *const c_char, out: *mut *mut SpecteigPoly) -> SpecteigStatus {
    guard(|| {
        let p = trust_region::parse_poly(text(json, "json")?)?;
        put(out, SpecteigPoly(p))
    })
}

/// # Safety
/// `p` must be a valid handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn specteig_poly_dim(p: *const SpecteigPoly) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// `T_p(s)`.
///
/// # Safety
/// `s` must hold `n` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specteig_poly_eval(
    p: *const SpecteigPoly,
    s: *const f64,
    n: usize,
    out: *mut f64,
) -> SpecteigStatus {
    guard(|| {
        let p = handle(p, "poly")?;
        let v = p.0.eval(slice(s, n, "s")?)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn specteig_poly_free(p: *mut SpecteigPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Defaults: `gamma = 8`, `alpha = 1`, `eps = 1e-9`, `tol = 1e-5`, one start.
#[no_mangle]
pub extern "C" fn specteig_tr_options_default() -> SpecteigTrOptions {
    let d = TrConfig::default();
    SpecteigTrOptions {
        gamma: d.gammas[0],
        alpha: d.alpha,
        eps: d.eps,
        tol: d.tol,
        max_inner: d.max_inner as i64,
        max_outer: d.k_max as i64,
        starts: d.starts as i64,
        seed: d.seed,
        flip_sign: 0,
    }
}

/// Minimizes the model on `||s|| = delta`. `s` receives `n` entries, `n`
/// being the model dimension. Returns `NoConvergence` (with all outputs
/// filled) when the multiplier test was not met.
///
/// # Safety
/// `p` must be a valid handle, `options` valid or null, `s` an array of `n`
/// values and `summary` valid or null.
#[no_mangle]
pub unsafe extern "C" fn specteig_trust_region_solve(
    p: *const SpecteigPoly,
    delta: f64,
    options: *const SpecteigTrOptions,
    s: *mut f64,
    n: usize,
    summary: *mut SpecteigTrSummary,
) -> SpecteigStatus {
    let mut converged = true;
    let status = guard(|| {
        let p = handle(p, "poly")?;
        if n != p.0.dim() {
            return Err(Error::Dim {
                expected: p.0.dim(),
                got: n,
            }
            .into());
        }
        let o = options.as_ref().copied().unwrap_or_else(|| specteig_tr_options_default());
        let d = TrConfig::default();
        let config = TrConfig {
            gammas: vec![given(o.gamma).unwrap_or(d.gammas[0])],
            alpha: given(o.alpha).unwrap_or(d.alpha),
            eps: given(o.eps).unwrap_or(d.eps),
            tol: given(o.tol).unwrap_or(d.tol),
            max_inner: given_count(o.max_inner).unwrap_or(d.max_inner),
            k_max: given_count(o.max_outer).unwrap_or(d.k_max),
            starts: given_count(o.starts).unwrap_or(d.starts),
            seed: o.seed,
            s0: None,
            sign: if o.flip_sign != 0 {
                trust_region::MultiplierSign::Flipped
            } else {
                trust_region::MultiplierSign::Stationary
            },
        };
        let r = trust_region::solve_boundary(&p.0, delta, &config)?;
        out_slice(s, n, "s")?.copy_from_slice(&r.s);
        let (proj_min_eig, proj_pd) = check_second_order(&p.0, &r.s, r.lambda)?;
        if let Some(sum) = summary.as_mut() {
            *sum = SpecteigTrSummary {
                lambda: r.lambda,
                value: r.value,
                grad_norm: r.grad_lagrangian_norm,
                proj_min_eig,
                outer_iters: r.outer_iters as u64,
                inner_iters: r.inner_iters as u64,
                converged: r.converged as u8,
                proj_pd: proj_pd as u8,
            };
        }
        converged = r.converged;
        Ok(())
    });
    if status == SpecteigStatus::Ok && !converged {
        set_error("multiplier test not met within the outer iteration limit".into());
        return SpecteigStatus::NoConvergence;
    }
    status
}

/// `tau` and the rate exponent of the convergence estimate.
///
/// # Safety
/// `tau` and `rate` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn specteig_kl_exponent(d: usize, n: usize, tau: *mut f64, rate: *mut f64) -> SpecteigStatus {
    guard(|| {
        let (t, r) = kl_exponent(d, n)?;
        *tau.as_mut().ok_or_else(|| null("tau"))? = t;
        *rate.as_mut().ok_or_else(|| null("rate"))? = r;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_handles_are_reported() {
        let mut out: *mut SpecteigTensor = ptr::null_mut();
        let st = unsafe { specteig_tensor_parse(ptr::null(), &mut out) };
        assert_eq!(st, SpecteigStatus::NullPointer);
        assert!(!specteig_last_error().is_null());
        assert_eq!(unsafe { specteig_tensor_dim(ptr::null()) }, 0);
    }

    #[test]
    fn success_clears_the_error() {
        let mut tau = 0.0;
        let mut rate = 0.0;
        assert_eq!(unsafe { specteig_kl_exponent(1, 2, &mut tau, &mut rate) }, SpecteigStatus::InvalidArgument);
        assert_eq!(unsafe { specteig_kl_exponent(2, 2, &mut tau, &mut rate) }, SpecteigStatus::Ok);
        assert!(specteig_last_error().is_null());
        assert_eq!(tau, 1.0 / 54.0);
    }
}
