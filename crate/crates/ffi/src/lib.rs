//! C interface to the segmenter.
//!
//! Every entry point returns a [`SylsegStatus`]; on failure the message is
//! available from [`sylseg_last_error`] on the same thread. Strings handed
//! out by the library must be released with [`sylseg_string_free`], models
//! with [`sylseg_model_free`]. Panics never cross the boundary: they are
//! caught and reported as `SYLSEG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sylseg::eval::score;
use sylseg::{
    train_model, Corpus, Error, FeatureConfig, Lexicon, LinearModel, NameLists, Segmenter,
    SolverParams,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SylsegStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed input text or an invalid setting.
    InvalidInput = 3,
    /// A file could not be read or written.
    Io = 4,
    /// A model file was malformed or of the wrong version.
    Model = 5,
    /// Training could not proceed on the given data.
    Training = 6,
    /// Internal error; the library caught a panic.
    Panic = 7,
}

/// Word-level scores, percentages expressed as ratios in [0, 1].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SylsegScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold_words: u64,
    pub pred_words: u64,
    pub correct_words: u64,
}

/// Opaque handle to a loaded model.
pub struct SylsegModel {
    model: LinearModel,
    lexicon: Option<Lexicon>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SylsegStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::ResourceIo { .. } | Error::Io(_) => SylsegStatus::Io,
            Error::ModelVersion(_) | Error::ModelFormat { .. } => SylsegStatus::Model,
            Error::NotEnoughData(_) | Error::DegenerateLabels => SylsegStatus::Training,
            _ => SylsegStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

/// Runs `f`, recording any failure or panic for `sylseg_last_error`.
fn guard(f: impl FnOnce() -> Outcome<()>) -> SylsegStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure(
            SylsegStatus::Panic,
            format!("internal error: {msg}"),
        ))
    });
    match result {
        Ok(()) => {
            set_last_error("");
            SylsegStatus::Ok
        }
        Err(Failure(status, message)) => {
            set_last_error(&message);
            status
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SylsegStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` is null or points to a NUL-terminated string valid for this call.
unsafe fn required_str<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    optional_str(p, what)?.ok_or_else(|| null(what))
}

/// # Safety
/// As [`required_str`].
unsafe fn optional_str<'a>(p: *const c_char, what: &str) -> Outcome<Option<&'a str>> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Failure(SylsegStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> Outcome<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(SylsegStatus::InvalidInput, "output contains NUL".into()))
}

/// Loads a model file and stores a new handle in `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sylseg_model_load(
    path: *const c_char,
    out: *mut *mut SylsegModel,
) -> SylsegStatus {
    sylseg_model_load_with_lexicon(path, ptr::null(), out)
}

/// Like [`sylseg_model_load`], but decodes with the lexicon at
/// `lexicon_path` instead of the one stored in the model. A null
/// `lexicon_path` keeps the stored lexicon.
///
/// # Safety
/// `path` and `lexicon_path` (if not null) must be NUL-terminated strings and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sylseg_model_load_with_lexicon(
    path: *const c_char,
    lexicon_path: *const c_char,
    out: *mut *mut SylsegModel,
) -> SylsegStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = required_str(path, "path")?;
        let model = LinearModel::load(path)?;
        let lexicon = match optional_str(lexicon_path, "lexicon_path")? {
            Some(p) => {
                let lex = Lexicon::load(p)?;
                model.check_lexicon(&lex);
                Some(lex)
            }
            None => None,
        };
        *out = Box::into_raw(Box::new(SylsegModel { model, lexicon }));
        Ok(())
    })
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from `sylseg_model_load*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sylseg_model_free(model: *mut SylsegModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Segments one line of space-separated syllables. On success `*out` holds
/// a new string with word-internal gaps written as `_`.
///
/// # Safety
/// `model` must be a live handle, `line` a NUL-terminated string and `out` a
/// valid pointer. A handle may be shared between threads.
#[no_mangle]
pub unsafe extern "C" fn sylseg_segment_line(
    model: *const SylsegModel,
    line: *const c_char,
    out: *mut *mut c_char,
) -> SylsegStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let handle = model.as_ref().ok_or_else(|| null("model"))?;
        let line = required_str(line, "line")?;
        let segmenter = match &handle.lexicon {
            Some(lex) => Segmenter::with_lexicon(&handle.model, lex),
            None => Segmenter::new(&handle.model),
        };
        *out = into_c_string(segmenter.segment_line(line)?)?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sylseg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn sylseg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library and model-format version, as a static string.
#[no_mangle]
pub extern "C" fn sylseg_version() -> *const c_char {
    static VERSION: &CStr = {
        const BYTES: &[u8] = concat!(
            env!("CARGO_PKG_VERSION"),
            " (model format UITWS-MODEL v1)\0"
        )
        .as_bytes();
        match CStr::from_bytes_with_nul(BYTES) {
            Ok(s) => s,
            Err(_) => panic!("version string"),
        }
    };
    VERSION.as_ptr()
}

/// Trains a model on an underscore-segmented corpus and writes it to
/// `out_path`. `lexicon`, `family` and `middle` may be null. `features` is a
/// comma list drawn from base, long, sep and sfx; null means all four.
///
/// # Safety
/// Every non-null pointer must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sylseg_train(
    corpus: *const c_char,
    lexicon: *const c_char,
    family: *const c_char,
    middle: *const c_char,
    features: *const c_char,
    c: f64,
    seed: u64,
    out_path: *const c_char,
) -> SylsegStatus {
    guard(|| {
        let corpus = Corpus::read_segmented(required_str(corpus, "corpus")?)?;
        let lexicon = match optional_str(lexicon, "lexicon")? {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::new(),
        };
        let family = optional_str(family, "family")?.map(PathBuf::from);
        let middle = optional_str(middle, "middle")?.map(PathBuf::from);
        let names = NameLists::load(family.as_deref(), middle.as_deref())?;
        let features: FeatureConfig = match optional_str(features, "features")? {
            Some(list) => list.parse()?,
            None => FeatureConfig::all(),
        };
        let out_path = required_str(out_path, "out_path")?;
        let params = SolverParams {
            c,
            seed,
            ..SolverParams::default()
        };
        train_model(&corpus, &lexicon, &names, features, &params)?.save(out_path)?;
        Ok(())
    })
}

/// Scores a predicted segmentation file against a gold one.
///
/// # Safety
/// `gold` and `pred` must be NUL-terminated strings and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sylseg_score_files(
    gold: *const c_char,
    pred: *const c_char,
    out: *mut SylsegScore,
) -> SylsegStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let gold = Corpus::read_segmented(required_str(gold, "gold")?)?;
        let pred = Corpus::read_segmented(required_str(pred, "pred")?)?;
        let m = score(&gold, &pred)?;
        *out = SylsegScore {
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            gold_words: m.counts.gold,
            pred_words: m.counts.pred,
            correct_words: m.counts.correct,
        };
        Ok(())
    })
}
