//! C ABI over the `osbmdi` simulator.
//!
//! Configs and reports are opaque heap handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`OsbStatus`]; on failure a message is available from
//! [`osb_last_error`] until the next call on the same thread.
//!
//! Bell labels cross the boundary as `0 = psi+`, `1 = psi-`, `2 = phi+`,
//! `3 = phi-`; Pauli symbols as `0 = I`, `1 = X`, `2 = iY`, `3 = Z`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use osbmdi::analysis::{leakage_bits, NoiseSpec};
use osbmdi::cli::{parse_config, render_run, run_report, RunManifest, RunReport};
use osbmdi::protocol::{decode_message, Decoder, Mode, SessionConfig};
use osbmdi::quantum::{BellLabel, PairSide};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidConfig = 4,
    Protocol = 5,
    Analysis = 6,
    Panic = 7,
}

/// Session configuration handle.
pub struct OsbConfig {
    inner: SessionConfig,
}

/// Result of a batch run.
pub struct OsbReport {
    inner: RunReport,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OsbSummary {
    pub sessions: u64,
    pub completed: u64,
    pub aborted: u64,
    pub symbols_sent: u64,
    pub symbols_correct: u64,
    pub decode_accuracy: f64,
    pub stage1_error_rate: f64,
    pub stage2_error_rate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OsbDetection {
    pub checks: u64,
    pub failures: u64,
    pub rate: f64,
    pub half_width: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: OsbStatus, msg: impl Into<String>) -> OsbStatus {
    set_error(msg);
    status
}

/// Runs `f`, clearing the last error first and turning panics into
/// [`OsbStatus::Panic`].
fn guard(f: impl FnOnce() -> OsbStatus) -> OsbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(OsbStatus::Panic, "panic inside osbmdi"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, OsbStatus> {
    if p.is_null() {
        return Err(fail(OsbStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(OsbStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn label(code: u8) -> Result<BellLabel, OsbStatus> {
    BellLabel::from_index(code as usize).ok_or_else(|| {
        fail(
            OsbStatus::InvalidArgument,
            format!("bad Bell label code {code}"),
        )
    })
}

unsafe fn labels(p: *const u8, n: usize) -> Result<Vec<BellLabel>, OsbStatus> {
    if p.is_null() || n == 0 {
        return Err(fail(
            OsbStatus::InvalidArgument,
            "label set must be a nonempty array",
        ));
    }
    std::slice::from_raw_parts(p, n)
        .iter()
        .map(|&c| label(c))
        .collect()
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(x) => x,
            None => return fail(OsbStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

macro_rules! deref_mut {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(x) => x,
            None => return fail(OsbStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(x) => x,
            Err(s) => return s,
        }
    };
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next `osb_` call on this thread.
#[no_mangle]
pub extern "C" fn osb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn osb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration. Never null.
#[no_mangle]
pub extern "C" fn osb_config_new() -> *mut OsbConfig {
    Box::into_raw(Box::new(OsbConfig {
        inner: SessionConfig::default(),
    }))
}

/// Parses a TOML document with a `[session]` table.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osb_config_from_toml(
    text: *const c_char,
    out: *mut *mut OsbConfig,
) -> OsbStatus {
    guard(|| {
        let out = deref_mut!(out);
        let text = tri!(str_arg(text));
        let cfg = match parse_config(text) {
            Ok(c) => c,
            Err(e) => return fail(OsbStatus::InvalidConfig, e),
        };
        if let Err(e) = cfg.validate() {
            return fail(OsbStatus::InvalidConfig, e.to_string());
        }
        *out = Box::into_raw(Box::new(OsbConfig { inner: cfg }));
        OsbStatus::Ok
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn osb_config_free(cfg: *mut OsbConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn osb_config_set_seed(cfg: *mut OsbConfig, seed: u64) -> OsbStatus {
    guard(|| {
        deref_mut!(cfg).inner.master_seed = seed;
        OsbStatus::Ok
    })
}

/// Message pairs per party; must be positive and even.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn osb_config_set_pairs(cfg: *mut OsbConfig, n_pairs: usize) -> OsbStatus {
    guard(|| {
        let cfg = deref_mut!(cfg);
        let next = SessionConfig {
            n_pairs,
            ..cfg.inner.clone()
        };
        if let Err(e) = next.validate() {
            return fail(OsbStatus::InvalidConfig, e.to_string());
        }
        cfg.inner = next;
        OsbStatus::Ok
    })
}

/// `"qsdc"`, `"qd"` or `"qkd"`.
///
/// # Safety
/// `cfg` must be a live handle and `mode` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn osb_config_set_mode(
    cfg: *mut OsbConfig,
    mode: *const c_char,
) -> OsbStatus {
    guard(|| {
        let cfg = deref_mut!(cfg);
        match tri!(str_arg(mode)).parse::<Mode>() {
            Ok(m) => {
                cfg.inner.mode = m;
                OsbStatus::Ok
            }
            Err(e) => fail(OsbStatus::InvalidArgument, e),
        }
    })
}

/// Attack in `NAME[:key=value,...]` form; null removes the attack.
///
/// # Safety
/// `cfg` must be a live handle; `attack` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn osb_config_set_attack(
    cfg: *mut OsbConfig,
    attack: *const c_char,
) -> OsbStatus {
    guard(|| {
        let cfg = deref_mut!(cfg);
        if attack.is_null() {
            cfg.inner.attack = None;
            return OsbStatus::Ok;
        }
        match tri!(str_arg(attack)).parse() {
            Ok(a) => {
                cfg.inner.attack = Some(a);
                OsbStatus::Ok
            }
            Err(e) => fail(OsbStatus::InvalidArgument, format!("{e}")),
        }
    })
}

/// Noise in `NAME:PARAM` form; null removes the noise.
///
/// # Safety
/// `cfg` must be a live handle; `noise` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn osb_config_set_noise(
    cfg: *mut OsbConfig,
    noise: *const c_char,
) -> OsbStatus {
    guard(|| {
        let cfg = deref_mut!(cfg);
        if noise.is_null() {
            cfg.inner.noise = None;
            return OsbStatus::Ok;
        }
        match tri!(str_arg(noise)).parse::<NoiseSpec>() {
            Ok(n) => {
                cfg.inner.noise = Some(n);
                OsbStatus::Ok
            }
            Err(e) => fail(OsbStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn osb_config_set_threshold(
    cfg: *mut OsbConfig,
    threshold: f64,
) -> OsbStatus {
    guard(|| {
        let cfg = deref_mut!(cfg);
        if !(0.0..=1.0).contains(&threshold) {
            return fail(
                OsbStatus::InvalidArgument,
                format!("threshold {threshold} outside [0, 1]"),
            );
        }
        cfg.inner.error_threshold = threshold;
        OsbStatus::Ok
    })
}

/// Runs sessions `0..sessions` and stores the report in `*out`.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osb_run(
    cfg: *const OsbConfig,
    sessions: u64,
    out: *mut *mut OsbReport,
) -> OsbStatus {
    guard(|| {
        let cfg = &deref!(cfg).inner;
        let out = deref_mut!(out);
        let manifest = RunManifest::new(&None, cfg, sessions, "-".into());
        match run_report(manifest, cfg, sessions) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(OsbReport { inner: r }));
                OsbStatus::Ok
            }
            Err(e @ osbmdi::protocol::ProtocolError::InvalidConfig(_)) => {
                fail(OsbStatus::InvalidConfig, e.to_string())
            }
            Err(e) => fail(OsbStatus::Protocol, e.to_string()),
        }
    })
}

/// # Safety
/// `report` must come from [`osb_run`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn osb_report_free(report: *mut OsbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osb_report_summary(
    report: *const OsbReport,
    out: *mut OsbSummary,
) -> OsbStatus {
    guard(|| {
        let r = &deref!(report).inner;
        let out = deref_mut!(out);
        *out = OsbSummary {
            sessions: r.summary.sessions,
            completed: r.summary.completed,
            aborted: r.summary.aborted,
            symbols_sent: r.summary.symbols_sent,
            symbols_correct: r.summary.symbols_correct,
            decode_accuracy: r.summary.decode_accuracy,
            stage1_error_rate: r.stage1.error_rate,
            stage2_error_rate: r.stage2.error_rate,
        };
        OsbStatus::Ok
    })
}

/// Pooled detection estimate for the configured attack's characteristic
/// checks (all checks when there is no attack).
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osb_report_detection(
    report: *const OsbReport,
    out: *mut OsbDetection,
) -> OsbStatus {
    guard(|| {
        let d = &deref!(report).inner.detection;
        let out = deref_mut!(out);
        *out = OsbDetection {
            checks: d.checks,
            failures: d.failures,
            rate: d.rate,
            half_width: d.half_width,
        };
        OsbStatus::Ok
    })
}

/// The full report as TOML. Release with [`osb_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osb_report_to_toml(
    report: *const OsbReport,
    out: *mut *mut c_char,
) -> OsbStatus {
    guard(|| {
        let r = &deref!(report).inner;
        let out = deref_mut!(out);
        let text = match render_run(r) {
            Ok(t) => t,
            Err(e) => return fail(OsbStatus::Protocol, e),
        };
        match CString::new(text) {
            Ok(c) => {
                *out = c.into_raw();
                OsbStatus::Ok
            }
            Err(_) => fail(OsbStatus::Protocol, "report contains NUL"),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn osb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Dialogue leakage for the given state sets and announcements, uniform
/// priors.
///
/// # Safety
/// `alice` and `bob` must point to `n_alice` and `n_bob` label codes;
/// `leaked` and `consistent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn osb_leakage_bits(
    alice: *const u8,
    n_alice: usize,
    bob: *const u8,
    n_bob: usize,
    bmo1: u8,
    bmo2: u8,
    leaked: *mut f64,
    consistent: *mut usize,
) -> OsbStatus {
    guard(|| {
        let leaked = deref_mut!(leaked);
        let consistent = deref_mut!(consistent);
        let (a, b) = (tri!(labels(alice, n_alice)), tri!(labels(bob, n_bob)));
        match leakage_bits(&a, &b, tri!(label(bmo1)), tri!(label(bmo2))) {
            Ok(r) => {
                *leaked = r.leaked;
                *consistent = r.consistent;
                OsbStatus::Ok
            }
            Err(e) => fail(OsbStatus::Analysis, e.to_string()),
        }
    })
}

/// Receiver-side decoding of a direct-mode pair: the sender's Pauli symbol
/// from both initial labels and both announcements.
///
/// # Safety
/// `symbol` must be writable.
#[no_mangle]
pub unsafe extern "C" fn osb_decode(
    alice_init: u8,
    bob_init: u8,
    bmo1: u8,
    bmo2: u8,
    symbol: *mut u8,
) -> OsbStatus {
    guard(|| {
        let symbol = deref_mut!(symbol);
        let (a, b, m1, m2) = (
            tri!(label(alice_init)),
            tri!(label(bob_init)),
            tri!(label(bmo1)),
            tri!(label(bmo2)),
        );
        match decode_message(
            Some(a),
            Some(b),
            Some(m1),
            Some(m2),
            Decoder::Receiver {
                sender_side: PairSide::First,
            },
        ) {
            Ok(p) => {
                *symbol = p.symbol();
                OsbStatus::Ok
            }
            Err(e) => fail(OsbStatus::Protocol, e.to_string()),
        }
    })
}
