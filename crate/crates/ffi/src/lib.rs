//! C ABI over the binmotion core. All entry points are `bm_`-prefixed,
//! return a [`BmStatus`] (out-parameters carry results), and never unwind
//! across the boundary. Handles are opaque; free them with the matching
//! `bm_*_free`. On failure, `bm_last_error` returns a thread-local
//! message describing the most recent error.

use binmotion::caption::{parse_caption, predict_trajectory_from_caption, CaptionLexicon};
use binmotion::metrics::{endpoint_loss, total_loss, traj_loss, LossWeights};
use binmotion::render::{load_hrir_set, read_wav, render_binaural, write_wav_f32, HrirSet};
use binmotion::spatial::{EventWindow, Trajectory};
use binmotion::trajio::read_trajectory_csv;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmStatus {
    BmOk = 0,
    /// A required pointer was null.
    BmNullPointer = 1,
    /// An argument failed validation (encoding, range, pairing).
    BmInvalidArgument = 2,
    /// File could not be read or written.
    BmIo = 3,
    /// Input parsed but violated a format or domain rule.
    BmParse = 4,
    /// The renderer rejected the inputs.
    BmRender = 5,
    /// A panic was caught at the boundary; state may be stale.
    BmInternal = 6,
}

/// Loaded caption lexicon.
pub struct BmLexicon(CaptionLexicon);

/// Loaded HRIR grid.
pub struct BmHrirSet(HrirSet);

/// A 20 Hz spatial trajectory with validity mask.
pub struct BmTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = clean);
}

fn fail(status: BmStatus, msg: impl AsRef<str>) -> BmStatus {
    set_error(msg.as_ref());
    status
}

fn guarded(f: impl FnOnce() -> BmStatus) -> BmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(BmStatus::BmInternal, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string.
unsafe fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BmStatus> {
    if ptr.is_null() {
        return Err(fail(BmStatus::BmNullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(BmStatus::BmInvalidArgument, format!("{what} is not UTF-8")))
}

fn required<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, BmStatus> {
    unsafe { ptr.as_ref() }.ok_or_else(|| fail(BmStatus::BmNullPointer, format!("{what} is null")))
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing `bm_` call on the same thread.
#[no_mangle]
pub extern "C" fn bm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The built-in caption lexicon. Never fails; free with `bm_lexicon_free`.
#[no_mangle]
pub extern "C" fn bm_lexicon_default() -> *mut BmLexicon {
    Box::into_raw(Box::new(BmLexicon(CaptionLexicon::default_lexicon())))
}

/// Loads a lexicon JSON file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bm_lexicon_load(
    path: *const c_char,
    out: *mut *mut BmLexicon,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::BmNullPointer, "out is null");
        }
        let path = match required_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match CaptionLexicon::load(Path::new(path)) {
            Ok(lex) => {
                *out = Box::into_raw(Box::new(BmLexicon(lex)));
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmParse, e.to_string()),
        }
    })
}

/// # Safety
/// `lex` must come from `bm_lexicon_default`/`bm_lexicon_load` and not be
/// freed twice.
#[no_mangle]
pub unsafe extern "C" fn bm_lexicon_free(lex: *mut BmLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// Loads an HRIR set manifest (JSON, WAV files relative to it).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bm_hrir_set_load(
    path: *const c_char,
    out: *mut *mut BmHrirSet,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::BmNullPointer, "out is null");
        }
        let path = match required_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_hrir_set(Path::new(path)) {
            Ok(set) => {
                *out = Box::into_raw(Box::new(BmHrirSet(set)));
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmIo, e.to_string()),
        }
    })
}

/// # Safety
/// `set` must come from `bm_hrir_set_load` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bm_hrir_set_free(set: *mut BmHrirSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Reads a trajectory CSV (`t_s,azimuth_deg,elevation_deg,distance_m,mask`).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bm_trajectory_from_csv(
    path: *const c_char,
    out: *mut *mut BmTrajectory,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::BmNullPointer, "out is null");
        }
        let path = match required_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match read_trajectory_csv(Path::new(path)) {
            Ok(traj) => {
                *out = Box::into_raw(Box::new(BmTrajectory(traj)));
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmParse, e.to_string()),
        }
    })
}

/// Caption-to-trajectory baseline: parses `caption` and synthesizes the
/// category-midpoint linear trajectory over the given event window.
///
/// # Safety
/// `caption` must be NUL-terminated; `lex` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bm_trajectory_from_caption(
    caption: *const c_char,
    t0_s: f64,
    t1_s: f64,
    clip_duration_s: f64,
    lex: *const BmLexicon,
    out: *mut *mut BmTrajectory,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::BmNullPointer, "out is null");
        }
        let caption = match required_str(caption, "caption") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let lex = match required(lex, "lex") {
            Ok(l) => l,
            Err(s) => return s,
        };
        let window = match EventWindow::new(t0_s, t1_s) {
            Ok(w) => w,
            Err(e) => return fail(BmStatus::BmInvalidArgument, e.to_string()),
        };
        match predict_trajectory_from_caption(caption, window, clip_duration_s, &lex.0) {
            Ok(traj) => {
                *out = Box::into_raw(Box::new(BmTrajectory(traj)));
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmInvalidArgument, e.to_string()),
        }
    })
}

/// Number of 20 Hz samples, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn bm_trajectory_len(traj: *const BmTrajectory) -> usize {
    unsafe { traj.as_ref() }.map_or(0, |t| t.0.len())
}

/// Copies sample `k` into the out-parameters (any may be null to skip).
///
/// # Safety
/// Non-null out-parameters must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn bm_trajectory_sample(
    traj: *const BmTrajectory,
    k: usize,
    azimuth_deg: *mut f64,
    elevation_deg: *mut f64,
    distance_m: *mut f64,
    mask: *mut u8,
) -> BmStatus {
    guarded(|| {
        let traj = match required(traj, "traj") {
            Ok(t) => &t.0,
            Err(s) => return s,
        };
        if k >= traj.len() {
            return fail(
                BmStatus::BmInvalidArgument,
                format!("sample {k} out of range (len {})", traj.len()),
            );
        }
        if !azimuth_deg.is_null() {
            *azimuth_deg = traj.azimuth_deg[k];
        }
        if !elevation_deg.is_null() {
            *elevation_deg = traj.elevation_deg[k];
        }
        if !distance_m.is_null() {
            *distance_m = traj.distance_m[k];
        }
        if !mask.is_null() {
            *mask = traj.mask[k];
        }
        BmStatus::BmOk
    })
}

/// # Safety
/// `traj` must come from a `bm_trajectory_*` constructor and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn bm_trajectory_free(traj: *mut BmTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Renders `in_wav` (mono) along `traj` through `set`, writing a stereo
/// 32-bit float WAV to `out_wav`.
///
/// # Safety
/// Paths must be NUL-terminated; handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn bm_render_file(
    in_wav: *const c_char,
    traj: *const BmTrajectory,
    set: *const BmHrirSet,
    out_wav: *const c_char,
) -> BmStatus {
    guarded(|| {
        let in_wav = match required_str(in_wav, "in_wav") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let out_wav = match required_str(out_wav, "out_wav") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let traj = match required(traj, "traj") {
            Ok(t) => &t.0,
            Err(s) => return s,
        };
        let set = match required(set, "set") {
            Ok(s) => &s.0,
            Err(e) => return e,
        };
        let mono = match read_wav(Path::new(in_wav)) {
            Ok(c) => c,
            Err(e) => return fail(BmStatus::BmIo, e.to_string()),
        };
        let stereo = match render_binaural(&mono, traj, set) {
            Ok(s) => s,
            Err(e) => return fail(BmStatus::BmRender, e.to_string()),
        };
        match write_wav_f32(Path::new(out_wav), &stereo) {
            Ok(()) => BmStatus::BmOk,
            Err(e) => fail(BmStatus::BmIo, e.to_string()),
        }
    })
}

unsafe fn loss_args<'a>(
    pred: *const BmTrajectory,
    gt: *const BmTrajectory,
    out: *mut f64,
) -> Result<(&'a Trajectory, &'a Trajectory), BmStatus> {
    if out.is_null() {
        return Err(fail(BmStatus::BmNullPointer, "out is null"));
    }
    let pred = required(pred, "pred")?;
    let gt = required(gt, "gt")?;
    Ok((&pred.0, &gt.0))
}

/// Masked mean trajectory loss; circular for angles.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_traj_loss(
    pred: *const BmTrajectory,
    gt: *const BmTrajectory,
    w_az: f64,
    w_el: f64,
    w_ds: f64,
    out: *mut f64,
) -> BmStatus {
    guarded(|| {
        let (pred, gt) = match loss_args(pred, gt, out) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let w = LossWeights { w_az, w_el, w_ds, lambda_time: 1.0 };
        match traj_loss(pred, gt, &w) {
            Ok(v) => {
                *out = v;
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmInvalidArgument, e.to_string()),
        }
    })
}

/// Start/end endpoint loss at the first and last valid ground-truth steps.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_endpoint_loss(
    pred: *const BmTrajectory,
    gt: *const BmTrajectory,
    w_az: f64,
    w_el: f64,
    w_ds: f64,
    out: *mut f64,
) -> BmStatus {
    guarded(|| {
        let (pred, gt) = match loss_args(pred, gt, out) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let w = LossWeights { w_az, w_el, w_ds, lambda_time: 1.0 };
        match endpoint_loss(pred, gt, &w) {
            Ok(v) => {
                *out = v;
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmInvalidArgument, e.to_string()),
        }
    })
}

/// Total loss: trajectory term plus `lambda_time` times the endpoint term.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_total_loss(
    pred: *const BmTrajectory,
    gt: *const BmTrajectory,
    w_az: f64,
    w_el: f64,
    w_ds: f64,
    lambda_time: f64,
    out: *mut f64,
) -> BmStatus {
    guarded(|| {
        let (pred, gt) = match loss_args(pred, gt, out) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let w = LossWeights { w_az, w_el, w_ds, lambda_time };
        match total_loss(pred, gt, &w) {
            Ok(v) => {
                *out = v;
                BmStatus::BmOk
            }
            Err(e) => fail(BmStatus::BmInvalidArgument, e.to_string()),
        }
    })
}

/// Circular angular difference in degrees, in [0, 180].
#[no_mangle]
pub extern "C" fn bm_circular_delta(x_deg: f64, y_deg: f64) -> f64 {
    binmotion::metrics::circular_delta(x_deg, y_deg)
}

/// Parses a caption into its motion attributes, returned as a JSON string
/// (category names per side, plus the omitted list). Free the string with
/// `bm_string_free`.
///
/// # Safety
/// `caption` must be NUL-terminated; `lex` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bm_parse_caption_json(
    caption: *const c_char,
    lex: *const BmLexicon,
    out: *mut *mut c_char,
) -> BmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BmStatus::BmNullPointer, "out is null");
        }
        let caption = match required_str(caption, "caption") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let lex = match required(lex, "lex") {
            Ok(l) => l,
            Err(s) => return s,
        };
        let spec = parse_caption(caption, &lex.0);
        let json = serde_json::to_string(&spec).expect("spec serializes");
        match CString::new(json) {
            Ok(s) => {
                *out = s.into_raw();
                BmStatus::BmOk
            }
            Err(_) => fail(BmStatus::BmInternal, "JSON contained a NUL byte"),
        }
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from a `bm_*` call that documents this deallocator.
#[no_mangle]
pub unsafe extern "C" fn bm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
