//! C ABI over checksynth: IoU, amount words, stroke dilation and the
//! detection evaluator.
//!
//! Every fallible function returns a [`CsStatus`]. On failure a message is
//! available from [`cs_last_error`] on the same thread. Objects are opaque
//! handles released with their `*_free` function; strings returned through
//! `char **` are released with [`cs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use checksynth::cocoio::{self, CocoDataset, CocoError};
use checksynth::composer::{amount_to_words, ComposeError};
use checksynth::evaluator::{self, Detection, EvalConfig, EvalError, EvalResult, ReportLayout};
use checksynth::morphology::{dilate_dark, StructuringElement};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidData = 5,
    /// The metric has no ground truth to be computed from.
    Undefined = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsMetric {
    Map = 0,
    ApSmall = 1,
    ApMedium = 2,
    ApLarge = 3,
    ArSmall = 4,
    ArMedium = 5,
    ArLarge = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsLayout {
    Overall = 0,
    ClassWise = 1,
}

/// Ground-truth annotations.
pub struct CsDataset(CocoDataset);

/// A list of scored detections.
pub struct CsPredictions(Vec<Detection>);

/// Metrics computed by `cs_evaluate`.
pub struct CsEvalResult(EvalResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `CsStatus::Panic`.
fn guard(f: impl FnOnce() -> CsStatus) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CsStatus::Panic, "internal panic"),
    }
}

fn coco_status(e: &CocoError) -> CsStatus {
    match e {
        CocoError::Io { .. } | CocoError::Image { .. } => CsStatus::Io,
        CocoError::Parse { .. } => CsStatus::Parse,
        _ => CsStatus::InvalidData,
    }
}

fn eval_status(e: &EvalError) -> CsStatus {
    match e {
        EvalError::Io { .. } => CsStatus::Io,
        EvalError::Parse { .. } => CsStatus::Parse,
        EvalError::InvalidConfig(_) => CsStatus::InvalidArgument,
        _ => CsStatus::InvalidData,
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, CsStatus> {
    if path.is_null() {
        return Err(fail(CsStatus::NullPointer, "path is null"));
    }
    match CStr::from_ptr(path).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => Err(fail(CsStatus::InvalidArgument, "path is not UTF-8")),
    }
}

fn into_c_string(s: String, out: *mut *mut c_char) -> CsStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CsStatus::Ok
        }
        Err(_) => fail(CsStatus::InvalidData, "string contains NUL"),
    }
}

/// Message describing the last failure on this thread, or NULL. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// IoU of two `[x, y, w, h]` boxes.
///
/// # Safety
/// `a` and `b` must point to four doubles; `out` to one.
#[no_mangle]
pub unsafe extern "C" fn cs_iou(a: *const f64, b: *const f64, out: *mut f64) -> CsStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return fail(CsStatus::NullPointer, "null argument");
    }
    let a = *a.cast::<[f64; 4]>();
    let b = *b.cast::<[f64; 4]>();
    guard(|| match evaluator::iou(a, b) {
        Ok(v) => {
            *out = v;
            CsStatus::Ok
        }
        Err(e) => fail(CsStatus::InvalidArgument, e.to_string()),
    })
}

/// Legal-line wording of an amount in cents. Free the result with
/// `cs_string_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_amount_to_words(cents: u64, out: *mut *mut c_char) -> CsStatus {
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    guard(|| match amount_to_words(cents) {
        Ok(s) => into_c_string(s, out),
        Err(e @ ComposeError::AmountOutOfRange { .. }) => fail(CsStatus::InvalidArgument, e.to_string()),
        Err(e) => fail(CsStatus::InvalidData, e.to_string()),
    })
}

/// Dark-stroke dilation of an 8-bit grayscale raster, row-major without
/// padding. `out` receives `width * height` bytes and may alias `pixels`.
///
/// # Safety
/// `pixels` and `out` must each hold `width * height` bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_dilate_gray(
    pixels: *const u8,
    width: u32,
    height: u32,
    radius: u32,
    iterations: u32,
    out: *mut u8,
) -> CsStatus {
    if pixels.is_null() || out.is_null() {
        return fail(CsStatus::NullPointer, "null buffer");
    }
    let len = width as usize * height as usize;
    let input = std::slice::from_raw_parts(pixels, len).to_vec();
    guard(|| {
        let se = match StructuringElement::square(radius, iterations) {
            Ok(se) => se,
            Err(e) => return fail(CsStatus::InvalidArgument, e.to_string()),
        };
        let Some(img) = image::GrayImage::from_raw(width, height, input) else {
            return fail(CsStatus::InvalidArgument, "buffer size mismatch");
        };
        let result = dilate_dark(&img, se);
        ptr::copy_nonoverlapping(result.as_raw().as_ptr(), out, len);
        CsStatus::Ok
    })
}

/// Reads and validates a COCO annotation file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_read(path: *const c_char, out: *mut *mut CsDataset) -> CsStatus {
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guard(|| match cocoio::read_dataset(&path) {
        Ok(ds) => {
            *out = Box::into_raw(Box::new(CsDataset(ds)));
            CsStatus::Ok
        }
        Err(e) => fail(coco_status(&e), e.to_string()),
    })
}

/// # Safety
/// `ds` must be NULL or a live handle from `cs_dataset_read`.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_free(ds: *mut CsDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_num_images(ds: *const CsDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.images.len())
}

/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_num_annotations(ds: *const CsDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.annotations.len())
}

/// An empty prediction list.
#[no_mangle]
pub extern "C" fn cs_predictions_new() -> *mut CsPredictions {
    Box::into_raw(Box::new(CsPredictions(Vec::new())))
}

/// Reads a COCO results file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_predictions_read(
    path: *const c_char,
    out: *mut *mut CsPredictions,
) -> CsStatus {
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guard(|| match evaluator::load_predictions(&path) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(CsPredictions(p)));
            CsStatus::Ok
        }
        Err(e) => fail(eval_status(&e), e.to_string()),
    })
}

/// Appends one detection. `bbox` points to `[x, y, w, h]`.
///
/// # Safety
/// `preds` must be a live handle and `bbox` point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_predictions_push(
    preds: *mut CsPredictions,
    image_id: u64,
    category_id: u64,
    bbox: *const f64,
    score: f64,
) -> CsStatus {
    let Some(preds) = preds.as_mut() else {
        return fail(CsStatus::NullPointer, "predictions handle is null");
    };
    if bbox.is_null() {
        return fail(CsStatus::NullPointer, "bbox is null");
    }
    let bbox = *bbox.cast::<[f64; 4]>();
    if !(bbox[2] > 0.0 && bbox[3] > 0.0) || !(0.0..=1.0).contains(&score) {
        return fail(CsStatus::InvalidArgument, "need positive size and score in [0, 1]");
    }
    preds.0.push(Detection {
        image_id,
        category_id,
        bbox,
        score,
    });
    CsStatus::Ok
}

/// # Safety
/// `preds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_predictions_len(preds: *const CsPredictions) -> usize {
    preds.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `preds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_predictions_free(preds: *mut CsPredictions) {
    if !preds.is_null() {
        drop(Box::from_raw(preds));
    }
}

/// Scores `preds` against `gt` with the default configuration: AP over
/// IoU 0.50:0.05:0.95, size metrics at IoU 0.5, 100 detections per image.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_evaluate(
    gt: *const CsDataset,
    preds: *const CsPredictions,
    out: *mut *mut CsEvalResult,
) -> CsStatus {
    let (Some(gt), Some(preds)) = (gt.as_ref(), preds.as_ref()) else {
        return fail(CsStatus::NullPointer, "null handle");
    };
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    guard(|| match evaluator::evaluate(&preds.0, &gt.0, &EvalConfig::default()) {
        Ok(r) => {
            *out = Box::into_raw(Box::new(CsEvalResult(r)));
            CsStatus::Ok
        }
        Err(e) => fail(eval_status(&e), e.to_string()),
    })
}

fn defined(v: Option<f64>, out: *mut f64, what: &str) -> CsStatus {
    match v {
        Some(v) => {
            unsafe { *out = v };
            CsStatus::Ok
        }
        None => fail(CsStatus::Undefined, format!("{what} has no ground truth")),
    }
}

/// One scalar metric in `[0, 1]`. Returns `CS_STATUS_UNDEFINED` and leaves
/// `out` untouched when the metric has no ground truth.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_eval_metric(
    result: *const CsEvalResult,
    metric: CsMetric,
    out: *mut f64,
) -> CsStatus {
    let Some(r) = result.as_ref() else {
        return fail(CsStatus::NullPointer, "result handle is null");
    };
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    let r = &r.0;
    let v = match metric {
        CsMetric::Map => r.map,
        CsMetric::ApSmall => r.ap_small,
        CsMetric::ApMedium => r.ap_medium,
        CsMetric::ApLarge => r.ap_large,
        CsMetric::ArSmall => r.ar_small,
        CsMetric::ArMedium => r.ar_medium,
        CsMetric::ArLarge => r.ar_large,
    };
    defined(v, out, "metric")
}

/// Per-class AP for `category_id`.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_eval_class_ap(
    result: *const CsEvalResult,
    category_id: u64,
    out: *mut f64,
) -> CsStatus {
    let Some(r) = result.as_ref() else {
        return fail(CsStatus::NullPointer, "result handle is null");
    };
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    match r.0.per_class_ap.get(&category_id) {
        None => fail(CsStatus::InvalidArgument, format!("unknown category id {category_id}")),
        Some(v) => defined(*v, out, "class"),
    }
}

/// Plain-text table of the result. Free with `cs_string_free`.
///
/// # Safety
/// `result` must be a live handle; `label` NULL or a NUL-terminated
/// string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_eval_report(
    result: *const CsEvalResult,
    layout: CsLayout,
    label: *const c_char,
    out: *mut *mut c_char,
) -> CsStatus {
    let Some(r) = result.as_ref() else {
        return fail(CsStatus::NullPointer, "result handle is null");
    };
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    let label = if label.is_null() {
        "result".to_string()
    } else {
        CStr::from_ptr(label).to_string_lossy().into_owned()
    };
    let layout = match layout {
        CsLayout::Overall => ReportLayout::Overall,
        CsLayout::ClassWise => ReportLayout::ClassWise,
    };
    guard(|| into_c_string(evaluator::report(&r.0, layout, &label), out))
}

/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_eval_result_free(result: *mut CsEvalResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
