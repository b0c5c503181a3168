//! C ABI over the URL obfuscation classifier.
//!
//! The analyzer is an opaque handle created with [`phishscope_analyzer_new`]
//! and released with [`phishscope_analyzer_free`]. Every function returns a
//! [`PhishscopeStatus`] code; strings handed out by this library are
//! NUL-terminated, UTF-8, owned by the caller and released with
//! [`phishscope_string_free`]. Handles are not synchronized: share one across
//! threads only behind your own lock, or give each thread its own.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use phishscope::detectors::{classify, decode_punycode, DetectorConfig};
use phishscope::url_model::parse_url;

/// Opaque analyzer handle wrapping a detector configuration.
pub struct PhishscopeAnalyzer {
    config: DetectorConfig,
}

/// Result codes for every ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhishscopeStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The URL did not parse; nothing was classified.
    ParseError = 3,
    /// The label is not valid punycode.
    InvalidPunycode = 4,
    /// A configuration value or file was rejected.
    InvalidConfig = 5,
}

fn status_str(status: PhishscopeStatus) -> &'static CStr {
    match status {
        PhishscopeStatus::Ok => c"ok",
        PhishscopeStatus::NullArgument => c"null argument",
        PhishscopeStatus::InvalidUtf8 => c"invalid utf-8",
        PhishscopeStatus::ParseError => c"url parse error",
        PhishscopeStatus::InvalidPunycode => c"invalid punycode",
        PhishscopeStatus::InvalidConfig => c"invalid configuration",
    }
}

/// Static descriptive name for a status code.
#[no_mangle]
pub extern "C" fn phishscope_status_name(status: PhishscopeStatus) -> *const c_char {
    status_str(status).as_ptr()
}

/// Create an analyzer with the bundled default configuration.
#[no_mangle]
pub extern "C" fn phishscope_analyzer_new() -> *mut PhishscopeAnalyzer {
    Box::into_raw(Box::new(PhishscopeAnalyzer {
        config: DetectorConfig::default(),
    }))
}

/// Release an analyzer.
///
/// # Safety
/// `analyzer` must be a pointer returned by [`phishscope_analyzer_new`] that
/// has not been freed, or NULL (a no-op).
#[no_mangle]
pub unsafe extern "C" fn phishscope_analyzer_free(analyzer: *mut PhishscopeAnalyzer) {
    if !analyzer.is_null() {
        drop(unsafe { Box::from_raw(analyzer) });
    }
}

/// Set the minimum extra hostname length for the oversized-subdomain
/// detector. Zero is rejected.
///
/// # Safety
/// `analyzer` must be a live pointer from [`phishscope_analyzer_new`].
#[no_mangle]
pub unsafe extern "C" fn phishscope_analyzer_set_type3_threshold(
    analyzer: *mut PhishscopeAnalyzer,
    threshold: usize,
) -> PhishscopeStatus {
    let Some(analyzer) = (unsafe { analyzer.as_mut() }) else {
        return PhishscopeStatus::NullArgument;
    };
    if threshold == 0 {
        return PhishscopeStatus::InvalidConfig;
    }
    analyzer.config.type3_length_threshold = threshold;
    PhishscopeStatus::Ok
}

/// Set the maximum edit distance for the look-alike-domain detector.
///
/// # Safety
/// `analyzer` must be a live pointer from [`phishscope_analyzer_new`].
#[no_mangle]
pub unsafe extern "C" fn phishscope_analyzer_set_edit_distance(
    analyzer: *mut PhishscopeAnalyzer,
    distance: usize,
) -> PhishscopeStatus {
    let Some(analyzer) = (unsafe { analyzer.as_mut() }) else {
        return PhishscopeStatus::NullArgument;
    };
    analyzer.config.type4_max_edit_distance = distance;
    PhishscopeStatus::Ok
}

unsafe fn path_arg<'a>(ptr: *const c_char) -> Result<&'a Path, PhishscopeStatus> {
    if ptr.is_null() {
        return Err(PhishscopeStatus::NullArgument);
    }
    let text = unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| PhishscopeStatus::InvalidUtf8)?;
    Ok(Path::new(text))
}

/// Replace the brand list from a file (one lowercase brand per line).
///
/// # Safety
/// `analyzer` must be a live pointer from [`phishscope_analyzer_new`];
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn phishscope_analyzer_load_brands(
    analyzer: *mut PhishscopeAnalyzer,
    path: *const c_char,
) -> PhishscopeStatus {
    let Some(analyzer) = (unsafe { analyzer.as_mut() }) else {
        return PhishscopeStatus::NullArgument;
    };
    let path = match unsafe { path_arg(path) } {
        Ok(p) => p,
        Err(s) => return s,
    };
    match analyzer.config.load_brands(path) {
        Ok(()) => PhishscopeStatus::Ok,
        Err(_) => PhishscopeStatus::InvalidConfig,
    }
}

/// Replace the public-suffix snapshot from a file.
///
/// # Safety
/// Same contract as [`phishscope_analyzer_load_brands`].
#[no_mangle]
pub unsafe extern "C" fn phishscope_analyzer_load_suffixes(
    analyzer: *mut PhishscopeAnalyzer,
    path: *const c_char,
) -> PhishscopeStatus {
    let Some(analyzer) = (unsafe { analyzer.as_mut() }) else {
        return PhishscopeStatus::NullArgument;
    };
    let path = match unsafe { path_arg(path) } {
        Ok(p) => p,
        Err(s) => return s,
    };
    match analyzer.config.load_suffixes(path) {
        Ok(()) => PhishscopeStatus::Ok,
        Err(_) => PhishscopeStatus::InvalidConfig,
    }
}

fn give_string(out: *mut *mut c_char, text: String) -> PhishscopeStatus {
    // interior NULs cannot occur in our JSON/host output, but stay defensive
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PhishscopeStatus::Ok
        }
        Err(_) => {
            unsafe { *out = ptr::null_mut() };
            PhishscopeStatus::InvalidUtf8
        }
    }
}

/// Classify one URL. On `Ok`, `*out_json` receives a JSON object
/// `{"url": ..., "detections": [{"type", "evidence", "score_inputs"}, ...]}`
/// that the caller frees with [`phishscope_string_free`].
///
/// # Safety
/// `analyzer` must be a live pointer from [`phishscope_analyzer_new`];
/// `url` must be a NUL-terminated string; `out_json` must be a valid
/// pointer to a `char*` slot.
#[no_mangle]
pub unsafe extern "C" fn phishscope_classify_json(
    analyzer: *const PhishscopeAnalyzer,
    url: *const c_char,
    out_json: *mut *mut c_char,
) -> PhishscopeStatus {
    if out_json.is_null() {
        return PhishscopeStatus::NullArgument;
    }
    unsafe { *out_json = ptr::null_mut() };
    let Some(analyzer) = (unsafe { analyzer.as_ref() }) else {
        return PhishscopeStatus::NullArgument;
    };
    if url.is_null() {
        return PhishscopeStatus::NullArgument;
    }
    let Ok(url) = (unsafe { CStr::from_ptr(url) }).to_str() else {
        return PhishscopeStatus::InvalidUtf8;
    };
    let parsed = match parse_url(url) {
        Ok(p) => p,
        Err(_) => return PhishscopeStatus::ParseError,
    };
    let classification = classify(&parsed, &analyzer.config, None);
    let payload = serde_json::json!({
        "url": url,
        "detections": classification.detections,
    });
    give_string(out_json, payload.to_string())
}

/// Decode one `xn--` label to UTF-8. The caller frees `*out` with
/// [`phishscope_string_free`].
///
/// # Safety
/// `label` must be a NUL-terminated string; `out` must be a valid pointer
/// to a `char*` slot.
#[no_mangle]
pub unsafe extern "C" fn phishscope_decode_punycode(
    label: *const c_char,
    out: *mut *mut c_char,
) -> PhishscopeStatus {
    if out.is_null() {
        return PhishscopeStatus::NullArgument;
    }
    unsafe { *out = ptr::null_mut() };
    if label.is_null() {
        return PhishscopeStatus::NullArgument;
    }
    let Ok(label) = (unsafe { CStr::from_ptr(label) }).to_str() else {
        return PhishscopeStatus::InvalidUtf8;
    };
    match decode_punycode(label) {
        Ok(unicode) => give_string(out, unicode),
        Err(_) => PhishscopeStatus::InvalidPunycode,
    }
}

/// Release a string produced by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library and not yet freed, or NULL (a no-op).
#[no_mangle]
pub unsafe extern "C" fn phishscope_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
