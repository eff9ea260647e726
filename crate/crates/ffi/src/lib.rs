//! C ABI over `warpband`.
//!
//! Every fallible function returns a [`WbStatus`]; on failure the message is
//! available from [`wb_last_error_message`] on the same thread. Objects are
//! opaque handles released with their `*_free` function. Matrices are
//! row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use warpband::bayes_lm::{FittedModel, SigmaMode};
use warpband::boundary::{confidence_band, BandBundle, BandSettings, SliceSpec};
use warpband::dataset::{Dataset, VariableSpec};
use warpband::error::Error;
use warpband::optimizer::{decision_ensemble, minimize_model, DecisionEnsemble, Objective, OptimSettings};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    /// Under-determined, rank-deficient or otherwise unsolvable fit.
    Numerical = 5,
    /// Zero noise variance where a band needs a positive one.
    DegeneratePosterior = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

pub struct WbModel(FittedModel);
pub struct WbEnsemble(DecisionEnsemble);
pub struct WbBand(BandBundle);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WbStatus {
    match e {
        Error::Io { .. } => WbStatus::Io,
        Error::Csv(_)
        | Error::MalformedCell { .. }
        | Error::DuplicateColumn(_)
        | Error::MissingColumn(_)
        | Error::ModelFormat(_)
        | Error::Json(_)
        | Error::Config(_) => WbStatus::Format,
        Error::UnderDetermined { .. } | Error::RankDeficient { .. } | Error::Factorization(_) => WbStatus::Numerical,
        Error::DegeneratePosterior(_) => WbStatus::DegeneratePosterior,
        _ => WbStatus::InvalidArgument,
    }
}

struct Fail(WbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(WbStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(WbStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording any error or panic in the thread-local slot.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            WbStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid("path is not UTF-8"))
}

unsafe fn objective(weights: *const f64, m: usize) -> Result<Objective, Fail> {
    if weights.is_null() {
        Ok(Objective::sum_of_squares(m))
    } else {
        Ok(Objective::weighted(slice(weights, m, "weights")?.to_vec())?)
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Fits a full polynomial of `degree` to `n` runs. `x` is `n x d`, `y` is
/// `n x m`; `lower`/`upper` give the input box. Outputs are named `y1..ym`
/// and inputs `x1..xd`.
///
/// # Safety
/// Pointers must reference arrays of the stated sizes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_model_fit(
    x: *const f64,
    n: usize,
    d: usize,
    y: *const f64,
    m: usize,
    lower: *const f64,
    upper: *const f64,
    degree: u32,
    out: *mut *mut WbModel,
) -> WbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let xs = slice(x, n * d, "x")?;
        let ys = slice(y, n * m, "y")?;
        let lo = slice(lower, d, "lower")?;
        let hi = slice(upper, d, "upper")?;
        let specs = (0..d)
            .map(|k| VariableSpec::new(format!("x{}", k + 1), lo[k], hi[k]))
            .collect::<Result<Vec<_>, _>>()?;
        let names = (0..m).map(|l| format!("y{}", l + 1)).collect();
        let ds = Dataset::new(
            DMatrix::from_row_slice(n, d, xs),
            DMatrix::from_row_slice(n, m, ys),
            specs,
            names,
            true,
        )?;
        let model = FittedModel::fit_physical(&ds, degree)?;
        *out = Box::into_raw(Box::new(WbModel(model)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_model_load(path: *const c_char, out: *mut *mut WbModel) -> WbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = FittedModel::load(path_arg(path)?)?;
        *out = Box::into_raw(Box::new(WbModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn wb_model_save(model: *const WbModel, path: *const c_char) -> WbStatus {
    guard(|| {
        let m = handle(model, "model")?;
        m.0.save(path_arg(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wb_model_free(model: *mut WbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Writes runs, inputs, outputs and basis size; any pointer may be null.
///
/// # Safety
/// `model` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn wb_model_dims(
    model: *const WbModel,
    n: *mut usize,
    d: *mut usize,
    m: *mut usize,
    p: *mut usize,
) -> WbStatus {
    guard(|| {
        let md = &handle(model, "model")?.0;
        for (ptr, v) in [(n, md.n()), (d, md.d()), (m, md.m()), (p, md.p())] {
            if !ptr.is_null() {
                *ptr = v;
            }
        }
        Ok(())
    })
}

/// Noise variance estimate of output `l`.
///
/// # Safety
/// `model` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_model_sigma2(model: *const WbModel, l: usize, out: *mut f64) -> WbStatus {
    guard(|| {
        let md = &handle(model, "model")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = md.output(l)?.sigma2_hat;
        Ok(())
    })
}

/// Posterior mean and prediction standard deviation of output `l` at a
/// physical point; `sd` may be null.
///
/// # Safety
/// `x` must hold `d` values.
#[no_mangle]
pub unsafe extern "C" fn wb_model_predict(
    model: *const WbModel,
    x: *const f64,
    d: usize,
    l: usize,
    mean: *mut f64,
    sd: *mut f64,
) -> WbStatus {
    guard(|| {
        let md = &handle(model, "model")?.0;
        let xs = slice(x, d, "x")?;
        if mean.is_null() {
            return Err(null("mean"));
        }
        let coded = md.domain().to_coded(xs)?;
        *mean = md.predict_mean(&coded, l)?;
        if !sd.is_null() {
            *sd = md.predict_sd(&coded, l)?;
        }
        Ok(())
    })
}

/// Minimizes the (weighted) sum of squared outputs under the point estimates.
/// `weights` may be null for equal weights; `x_out` receives `d` values.
///
/// # Safety
/// Array pointers must match the model's dimensions.
#[no_mangle]
pub unsafe extern "C" fn wb_optimize(
    model: *const WbModel,
    weights: *const f64,
    seed: u64,
    x_out: *mut f64,
    d: usize,
    objective_out: *mut f64,
) -> WbStatus {
    guard(|| {
        let md = &handle(model, "model")?.0;
        if d != md.d() {
            return Err(invalid(format!("model has {} inputs, buffer holds {d}", md.d())));
        }
        let xo = slice_mut(x_out, d, "x_out")?;
        let obj = objective(weights, md.m())?;
        let res = minimize_model(md, &obj, &OptimSettings { seed, ..Default::default() })?;
        xo.copy_from_slice(&res.x_star);
        if !objective_out.is_null() {
            *objective_out = res.objective_value;
        }
        Ok(())
    })
}

/// Optimal decisions under `r` posterior draws.
///
/// # Safety
/// `weights` is null or holds one value per output; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_ensemble_run(
    model: *const WbModel,
    weights: *const f64,
    r: usize,
    seed: u64,
    hierarchical: bool,
    out: *mut *mut WbEnsemble,
) -> WbStatus {
    guard(|| {
        let md = &handle(model, "model")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let obj = objective(weights, md.m())?;
        let mode = if hierarchical { SigmaMode::Hierarchical } else { SigmaMode::Map };
        let settings = OptimSettings { seed, ..Default::default() };
        let ens = decision_ensemble(md, &obj, r, seed, mode, &settings)?;
        *out = Box::into_raw(Box::new(WbEnsemble(ens)));
        Ok(())
    })
}

/// # Safety
/// `ens` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn wb_ensemble_len(ens: *const WbEnsemble, out: *mut usize) -> WbStatus {
    guard(|| {
        let e = &handle(ens, "ensemble")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = e.len();
        Ok(())
    })
}

/// Copies the `R x d` decisions into `buf` (capacity `len` values).
///
/// # Safety
/// `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn wb_ensemble_decisions(ens: *const WbEnsemble, buf: *mut f64, len: usize) -> WbStatus {
    guard(|| {
        let e = &handle(ens, "ensemble")?.0;
        let (r, d) = e.decisions.shape();
        if len < r * d {
            return Err(Fail(WbStatus::BufferTooSmall, format!("need {} values, got {len}", r * d)));
        }
        let b = slice_mut(buf, r * d, "buf")?;
        for i in 0..r {
            for k in 0..d {
                b[i * d + k] = e.decisions[(i, k)];
            }
        }
        Ok(())
    })
}

/// Median and quartiles of dimension `k` over converged draws.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_ensemble_quantiles(
    ens: *const WbEnsemble,
    k: usize,
    median: *mut f64,
    q25: *mut f64,
    q75: *mut f64,
) -> WbStatus {
    guard(|| {
        let e = &handle(ens, "ensemble")?.0;
        let q = e
            .summaries
            .get(k)
            .ok_or_else(|| invalid(format!("dimension {k} out of range")))?
            .ok_or_else(|| Fail(WbStatus::Numerical, "no posterior draw converged".into()))?;
        for (p, v) in [(median, q.median), (q25, q.q25), (q75, q.q75)] {
            if p.is_null() {
                return Err(null("quantile output"));
            }
            *p = v;
        }
        Ok(())
    })
}

/// # Safety
/// `ens` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wb_ensemble_free(ens: *mut WbEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Standardized confidence band of output `l` over dims `(free_a, free_b)`,
/// the other dims fixed at the physical values in `fixed` (in index order).
///
/// # Safety
/// `fixed` must hold `n_fixed` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_band_compute(
    model: *const WbModel,
    l: usize,
    free_a: usize,
    free_b: usize,
    fixed: *const f64,
    n_fixed: usize,
    resolution: usize,
    alpha: f64,
    eps: f64,
    r: usize,
    seed: u64,
    out: *mut *mut WbBand,
) -> WbStatus {
    guard(|| {
        let md = &handle(model, "model")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let fv = slice(fixed, n_fixed, "fixed")?.to_vec();
        let s = SliceSpec::new(md.domain(), (free_a, free_b), fv, (resolution, resolution))?;
        let settings = BandSettings {
            alpha,
            draws: r,
            seed,
            draw_contours: 0,
            ..Default::default()
        };
        let b = confidence_band(md, l, &s, eps, &settings)?;
        *out = Box::into_raw(Box::new(WbBand(b)));
        Ok(())
    })
}

/// # Safety
/// `band` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn wb_band_resolution(band: *const WbBand, nx: *mut usize, ny: *mut usize) -> WbStatus {
    guard(|| {
        let b = &handle(band, "band")?.0;
        if nx.is_null() || ny.is_null() {
            return Err(null("nx/ny"));
        }
        (*nx, *ny) = b.grid.slice.resolution;
        Ok(())
    })
}

/// Coverage fractions, `ny` rows of `nx` values.
///
/// # Safety
/// `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn wb_band_coverage(band: *const WbBand, buf: *mut f64, len: usize) -> WbStatus {
    guard(|| {
        let v = handle(band, "band")?.0.grid.coverage_fraction.values();
        if len < v.len() {
            return Err(Fail(WbStatus::BufferTooSmall, format!("need {} values, got {len}", v.len())));
        }
        slice_mut(buf, v.len(), "buf")?.copy_from_slice(v);
        Ok(())
    })
}

/// Band membership (0 or 1), same layout as [`wb_band_coverage`].
///
/// # Safety
/// `buf` must hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wb_band_mask(band: *const WbBand, buf: *mut u8, len: usize) -> WbStatus {
    guard(|| {
        let mask = &handle(band, "band")?.0.grid.band_mask;
        if len < mask.len() {
            return Err(Fail(WbStatus::BufferTooSmall, format!("need {} values, got {len}", mask.len())));
        }
        let b = slice_mut(buf, mask.len(), "buf")?;
        for (o, m) in b.iter_mut().zip(mask) {
            *o = *m as u8;
        }
        Ok(())
    })
}

/// # Safety
/// `band` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wb_band_free(band: *mut WbBand) {
    if !band.is_null() {
        drop(Box::from_raw(band));
    }
}
