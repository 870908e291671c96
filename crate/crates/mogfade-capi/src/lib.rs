//! C ABI over the mogfade library.
//!
//! Conventions: every function that can fail returns [`MfStatus`] and writes
//! its result through an out-pointer that is touched only on `MF_STATUS_OK`.
//! Handles are opaque; free them with the matching `*_free`. On failure a
//! thread-local message is kept for [`mf_last_error`]. No function unwinds
//! across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mogfade::channels::{sample_envelope, ChannelSpec};
use mogfade::error::Error;
use mogfade::metrics::{
    amount_of_fading, avg_pd_series, ergodic_capacity, false_alarm_prob, mgf, outage_probability,
    pd_truncation_bound, raw_moment, ser, threshold_from_pf, DetectorSpec, SerScheme,
};
use mogfade::mog::{em_fit, kl_divergence, FitConfig, MoGModel};

/// Result codes. Anything other than `MF_STATUS_OK` leaves out-parameters
/// untouched; call `mf_last_error` for a diagnostic.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    MfStatusOk = 0,
    /// A required pointer argument was null.
    MfStatusNullArg = 1,
    /// Malformed UTF-8 or JSON input.
    MfStatusParse = 2,
    /// A numeric routine left its supported regime (domain, overflow,
    /// divergence, non-convergence, quadrature failure, pdf pole).
    MfStatusNumeric = 3,
    /// Structurally valid input that fails semantic checks.
    MfStatusInvalid = 4,
    MfStatusIo = 5,
    /// A panic was caught at the boundary; state may be stale, inputs are
    /// untouched.
    MfStatusPanic = 6,
}

/// A fitted Gaussian-mixture envelope model. Opaque; create via
/// `mf_model_from_json` or `mf_model_fit`, release via `mf_model_free`.
pub struct MfModel {
    inner: MoGModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MfStatus {
    match err {
        Error::Parse(_) => MfStatus::MfStatusParse,
        e if e.is_numeric() => MfStatus::MfStatusNumeric,
        Error::Validation(_) | Error::InvalidSpec(_) | Error::DegenerateData(_) => {
            MfStatus::MfStatusInvalid
        }
        Error::Io(_) => MfStatus::MfStatusIo,
        _ => MfStatus::MfStatusIo,
    }
}

fn fail(err: Error) -> MfStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs `f` with panics converted to `MF_STATUS_PANIC`.
fn guarded(f: impl FnOnce() -> MfStatus) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MfStatus::MfStatusPanic
        }
    }
}

/// `ptr` must be null or valid UTF-8 ending in NUL.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, MfStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(MfStatus::MfStatusNullArg);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|e| {
        set_error(format!("invalid UTF-8: {e}"));
        MfStatus::MfStatusParse
    })
}

unsafe fn read_model<'a>(ptr: *const MfModel) -> Result<&'a MoGModel, MfStatus> {
    if ptr.is_null() {
        set_error("null model handle".into());
        return Err(MfStatus::MfStatusNullArg);
    }
    Ok(unsafe { &(*ptr).inner })
}

fn write_out<T>(out: *mut T, value: T) -> MfStatus {
    if out.is_null() {
        set_error("null out-pointer".into());
        return MfStatus::MfStatusNullArg;
    }
    unsafe { out.write(value) };
    MfStatus::MfStatusOk
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

fn model_from_json_str(text: &str) -> Result<MoGModel, Error> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let body = if value.get("components").is_some() {
        value
    } else if let Some(inner) = value.get("model") {
        inner.clone()
    } else {
        return Err(Error::Parse("neither a model nor a fit artifact".into()));
    };
    serde_json::from_value(body).map_err(|e| Error::Parse(e.to_string()))
}

/// Message from the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a model from JSON: either a bare model document or a `fit`
/// artifact wrapping one under `"model"`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_model_from_json(
    json: *const c_char,
    out: *mut *mut MfModel,
) -> MfStatus {
    guarded(|| {
        let text = try_ffi!(unsafe { read_str(json) });
        match model_from_json_str(text) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(MfModel { inner }))),
            Err(e) => fail(e),
        }
    })
}

/// Serializes the model as a JSON document. The returned string must be
/// released with `mf_string_free`.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_model_to_json(
    model: *const MfModel,
    out: *mut *mut c_char,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        let text = match serde_json::to_string_pretty(model) {
            Ok(t) => t,
            Err(e) => return fail(Error::Parse(e.to_string())),
        };
        let c = match CString::new(text) {
            Ok(c) => c,
            Err(e) => return fail(Error::Parse(e.to_string())),
        };
        write_out(out, c.into_raw())
    })
}

/// Draws envelope samples from the channel described by `channel_json` and
/// fits a `components`-term mixture to them. `fit_config_json` may be null
/// for defaults; `n_train` of 0 selects the default training size.
///
/// # Safety
/// String arguments must be NUL-terminated (or null where allowed); `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_model_fit(
    channel_json: *const c_char,
    components: usize,
    n_train: usize,
    seed: u64,
    fit_config_json: *const c_char,
    out: *mut *mut MfModel,
) -> MfStatus {
    guarded(|| {
        let channel = try_ffi!(unsafe { read_str(channel_json) });
        let spec: ChannelSpec = match serde_json::from_str(channel) {
            Ok(s) => s,
            Err(e) => return fail(Error::Parse(e.to_string())),
        };
        if let Err(e) = spec.validate() {
            return fail(e);
        }
        let cfg: FitConfig = if fit_config_json.is_null() {
            FitConfig::default()
        } else {
            let text = try_ffi!(unsafe { read_str(fit_config_json) });
            match serde_json::from_str(text) {
                Ok(c) => c,
                Err(e) => return fail(Error::Parse(e.to_string())),
            }
        };
        let n = if n_train == 0 { 200_000 } else { n_train };
        let result = sample_envelope(&spec, n, seed)
            .and_then(|samples| em_fit(&samples, components, &cfg))
            .and_then(|(model, _)| model.with_avg_snr(spec.avg_snr));
        match result {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(MfModel { inner }))),
            Err(e) => fail(e),
        }
    })
}

/// Releases a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be null or a pointer from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_model_free(model: *mut MfModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Number of mixture components.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_model_components(
    model: *const MfModel,
    out: *mut usize,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        write_out(out, model.components())
    })
}

/// Mean SNR the model is scaled to.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_model_avg_snr(model: *const MfModel, out: *mut f64) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        write_out(out, model.avg_snr())
    })
}

/// Copies the model, rescaled to a new mean SNR.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_model_with_avg_snr(
    model: *const MfModel,
    avg_snr: f64,
    out: *mut *mut MfModel,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match model.clone().with_avg_snr(avg_snr) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(MfModel { inner }))),
            Err(e) => fail(e),
        }
    })
}

/// P[γ < gamma_th].
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_outage(
    model: *const MfModel,
    gamma_th: f64,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match outage_probability(model, gamma_th) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

/// Ergodic capacity in bits/s for the given bandwidth in Hz.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_capacity(
    model: *const MfModel,
    bandwidth: f64,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match ergodic_capacity(model, bandwidth) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

/// E[γⁿ] for n up to 4.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_raw_moment(
    model: *const MfModel,
    n: u32,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match raw_moment(model, n) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

/// Amount of fading, Var[γ]/E[γ]².
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_amount_of_fading(
    model: *const MfModel,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        write_out(out, amount_of_fading(model))
    })
}

/// MGF E[e^{−sγ}] at `s ≥ 0`.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_mgf(model: *const MfModel, s: f64, out: *mut f64) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match mgf(model, s) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

fn ser_over_branches(
    model: &MoGModel,
    scheme: SerScheme,
    branches: usize,
    out: *mut f64,
) -> MfStatus {
    let stack = vec![model.clone(); branches];
    match ser(&stack, scheme) {
        Ok(v) => write_out(out, v),
        Err(e) => fail(e),
    }
}

/// Symbol error rate for coherent binary signaling with argument scale `g`
/// (1.0 for BPSK, 0.5 for orthogonal BFSK) over `branches` MRC branches.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_ser_binary(
    model: *const MfModel,
    g: f64,
    branches: usize,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        ser_over_branches(model, SerScheme::CoherentBinary { g }, branches, out)
    })
}

/// Symbol error rate for M-ary PSK over `branches` MRC branches.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_ser_mpsk(
    model: *const MfModel,
    m: u32,
    branches: usize,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        ser_over_branches(model, SerScheme::Mpsk { m }, branches, out)
    })
}

/// Symbol error rate for square M-QAM over `branches` MRC branches.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_ser_qam(
    model: *const MfModel,
    m: u32,
    branches: usize,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        ser_over_branches(model, SerScheme::SquareMqam { m }, branches, out)
    })
}

/// Detection threshold achieving false-alarm probability `pf` for
/// time-bandwidth product `u`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_threshold_from_pf(u: u32, pf: f64, out: *mut f64) -> MfStatus {
    guarded(|| match threshold_from_pf(u, pf) {
        Ok(v) => write_out(out, v),
        Err(e) => fail(e),
    })
}

/// False-alarm probability of an energy detector at threshold `lambda`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_false_alarm_prob(u: u32, lambda: f64, out: *mut f64) -> MfStatus {
    guarded(|| match false_alarm_prob(u, lambda) {
        Ok(v) => write_out(out, v),
        Err(e) => fail(e),
    })
}

/// Average detection probability, truncating the series at `terms`.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_avg_pd(
    model: *const MfModel,
    u: u32,
    lambda: f64,
    terms: usize,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match avg_pd_series(model, &DetectorSpec::with_lambda(u, lambda), terms) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

/// Upper bound on the detection-probability mass dropped by truncating at
/// `terms`.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_pd_truncation_bound(
    model: *const MfModel,
    u: u32,
    lambda: f64,
    terms: usize,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let model = try_ffi!(unsafe { read_model(model) });
        match pd_truncation_bound(model, &DetectorSpec::with_lambda(u, lambda), terms) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}

/// KL divergence (nats) from the channel's exact envelope density to the
/// model's, over the positive axis.
///
/// # Safety
/// `channel_json` must be a NUL-terminated string; `model` must be a live
/// handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_kl_divergence(
    channel_json: *const c_char,
    model: *const MfModel,
    out: *mut f64,
) -> MfStatus {
    guarded(|| {
        let text = try_ffi!(unsafe { read_str(channel_json) });
        let model = try_ffi!(unsafe { read_model(model) });
        let spec: ChannelSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => return fail(Error::Parse(e.to_string())),
        };
        if let Err(e) = spec.validate() {
            return fail(e);
        }
        match kl_divergence(&spec, model) {
            Ok(v) => write_out(out, v),
            Err(e) => fail(e),
        }
    })
}
