//! C ABI over `condquant`.
//!
//! Objects are opaque heap handles created by `cq_*_new` and released by the
//! matching `cq_*_free`. Every function returns a [`CqStatus`]; on failure the
//! message is available from [`cq_last_error_message`] on the same thread.
//! Solves use the default settings (`tol_x = 1e-10`, `tol_f = 1e-12`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use condquant::dynamic::RiskMeasure;
use condquant::{
    Gamma, LossFunction, Partition, ProbabilitySpace, RandomVariable, RiskSpec, ScoreFunction, ShortfallSpec,
    SolveSettings,
};

/// Result code of every `cq_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed input: bad probabilities, lengths, parameters or tags.
    InvalidArgument = 2,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 3,
    /// The solver could not bracket or converge.
    SolverFailure = 4,
    /// The output buffer is shorter than the number of outcomes.
    BufferTooSmall = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// A finite probability space.
pub struct CqSpace {
    inner: ProbabilitySpace,
}

/// A partition of the outcomes, standing for the information sigma-algebra.
pub struct CqPartition {
    inner: Partition,
}

/// A risk measure: generalized quantile, shortfall, entropic, VaR or expectile.
pub struct CqMeasure {
    inner: RiskMeasure,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(CqStatus, String);

impl From<condquant::Error> for Failure {
    fn from(e: condquant::Error) -> Self {
        let status = if e.is_validation() { CqStatus::InvalidArgument } else { CqStatus::SolverFailure };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside condquant");
            CqStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(CqStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null or point to `n` readable values.
unsafe fn slice<'a, T>(p: *const T, n: usize, name: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, n))
}

/// # Safety
/// `p` must be null or a nul-terminated string.
unsafe fn string<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CqStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

/// # Safety
/// `out` must be null or writable.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    non_null(out, "out")?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or `""`. Valid until the next call.
#[no_mangle]
pub extern "C" fn cq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a space from `n` strictly positive probabilities summing to 1 within 1e-12.
///
/// # Safety
/// `probs` must point to `n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_space_new(probs: *const f64, n: usize, out: *mut *mut CqSpace) -> CqStatus {
    guard(|| {
        let probs = slice(probs, n, "probs")?.to_vec();
        emit(out, CqSpace { inner: ProbabilitySpace::new(probs)? })
    })
}

/// Number of outcomes, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_space_len(space: *const CqSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// `space` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cq_space_free(space: *mut CqSpace) {
    release(space)
}

/// Creates a partition from one atom label per outcome; equal labels share an atom.
///
/// # Safety
/// `labels` must point to `n` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_partition_new(labels: *const usize, n: usize, out: *mut *mut CqPartition) -> CqStatus {
    guard(|| {
        let labels = slice(labels, n, "labels")?;
        emit(out, CqPartition { inner: Partition::from_labels(labels)? })
    })
}

/// Number of atoms, or 0 for a null handle.
///
/// # Safety
/// `partition` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_partition_num_atoms(partition: *const CqPartition) -> usize {
    partition.as_ref().map_or(0, |p| p.inner.num_atoms())
}

/// # Safety
/// `partition` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cq_partition_free(partition: *mut CqPartition) {
    release(partition)
}

/// Generalized quantile with losses given as tags such as `"quadratic"`,
/// `"power:1,1.5"` or `"exp:1,1"`.
///
/// # Safety
/// Both tags must be nul-terminated strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_measure_quantile(
    alpha: f64,
    u1: *const c_char,
    u2: *const c_char,
    out: *mut *mut CqMeasure,
) -> CqStatus {
    guard(|| {
        let u1 = LossFunction::from_tag(string(u1, "u1")?)?;
        let u2 = LossFunction::from_tag(string(u2, "u2")?)?;
        emit(out, CqMeasure { inner: RiskMeasure::Quantile(RiskSpec::new(alpha, u1, u2)?) })
    })
}

/// Shortfall risk measure for a score given as a tag such as `"entropic:2"`.
///
/// # Safety
/// `score` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_measure_shortfall(score: *const c_char, out: *mut *mut CqMeasure) -> CqStatus {
    guard(|| {
        let v = ScoreFunction::from_tag(string(score, "score")?)?;
        emit(out, CqMeasure { inner: RiskMeasure::Shortfall(ShortfallSpec::new(v)?) })
    })
}

/// Entropic risk measure; `gamma = INFINITY` gives the essential supremum.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_measure_entropic(gamma: f64, out: *mut *mut CqMeasure) -> CqStatus {
    guard(|| {
        let gamma = if gamma == f64::INFINITY {
            Gamma::Infinity
        } else if gamma.is_finite() {
            Gamma::Finite(gamma)
        } else {
            return Err(Failure(CqStatus::InvalidArgument, format!("gamma {gamma} must be finite or +inf")));
        };
        emit(out, CqMeasure { inner: RiskMeasure::Entropic(gamma) })
    })
}

/// Value at risk at level `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_measure_var(alpha: f64, out: *mut *mut CqMeasure) -> CqStatus {
    guard(|| {
        ScoreFunction::var(alpha)?;
        emit(out, CqMeasure { inner: RiskMeasure::Var(alpha) })
    })
}

/// Expectile at level `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_measure_expectile(alpha: f64, out: *mut *mut CqMeasure) -> CqStatus {
    guard(|| {
        ScoreFunction::expectile(alpha)?;
        emit(out, CqMeasure { inner: RiskMeasure::Expectile(alpha) })
    })
}

/// # Safety
/// `measure` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cq_measure_free(measure: *mut CqMeasure) {
    release(measure)
}

/// Conditional risk of `x` (one value per outcome) given `partition`, written
/// per outcome into `out`, which must hold at least `out_len >= n` doubles.
///
/// # Safety
/// Handles must be live, `x` must point to `n` doubles and `out` to `out_len`.
#[no_mangle]
pub unsafe extern "C" fn cq_conditional_risk(
    space: *const CqSpace,
    partition: *const CqPartition,
    measure: *const CqMeasure,
    x: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> CqStatus {
    guard(|| {
        non_null(space, "space")?;
        non_null(partition, "partition")?;
        non_null(measure, "measure")?;
        let x = RandomVariable::new(slice(x, n, "x")?.to_vec())?;
        let rho = (*measure).inner.evaluate(&(*space).inner, &x, &(*partition).inner, &SolveSettings::default())?;
        write_out(rho.values(), out, out_len)
    })
}

/// Unconditional risk of the distribution putting weight `probs[i]` on `values[i]`.
///
/// # Safety
/// `values` and `probs` must point to `n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_static_risk(
    measure: *const CqMeasure,
    values: *const f64,
    probs: *const f64,
    n: usize,
    out: *mut f64,
) -> CqStatus {
    guard(|| {
        non_null(measure, "measure")?;
        let space = ProbabilitySpace::new(slice(probs, n, "probs")?.to_vec())?;
        let x = RandomVariable::new(slice(values, n, "values")?.to_vec())?;
        let rho = (*measure).inner.evaluate(&space, &x, &Partition::trivial(n), &SolveSettings::default())?;
        write_out(&rho.values()[..1], out, 1)
    })
}

unsafe fn write_out(values: &[f64], out: *mut f64, out_len: usize) -> Result<(), Failure> {
    non_null(out, "out")?;
    if out_len < values.len() {
        return Err(Failure(
            CqStatus::BufferTooSmall,
            format!("output holds {out_len} values, need {}", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}
