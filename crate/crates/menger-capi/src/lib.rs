//! C ABI for the menger length-functional library.
//!
//! Conventions:
//!
//! - A space is an opaque handle created by [`menger_space_from_json`] and
//!   released with [`menger_space_free`].
//! - Every fallible call returns a [`MengerStatus`]; results land in out
//!   parameters. On failure [`menger_last_error_message`] returns a
//!   thread-local, NUL-terminated diagnostic (valid until the next failing
//!   call on the same thread).
//! - Index sets are passed as `(const size_t*, size_t)` pairs; the pointer
//!   may be null when the length is zero, and an empty set means "all
//!   points" where a default makes sense.
//! - Strings returned through out parameters are heap-allocated and must
//!   be released with [`menger_string_free`].
//! - Infinite lengths come back as the IEEE infinity.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use menger::error::Error;
use menger::golab::{check_hits, hit_collection, HitCollection, SmtEngine};
use menger::length::{
    intrinsic_menger_estimate, menger_choquet_estimate, menger_estimate, proof_cover,
    CandidateSource,
};
use menger::metric::{hausdorff, IndexSet, MetricSpace};
use menger::report;
use menger::shapes::{generate, ShapeSpec};
use menger::steiner::{smt_euclidean_small, smt_restricted};

/// Result codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MengerStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    CapExceeded = 5,
    Compute = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> MengerStatus {
    match err {
        Error::Parse(_) | Error::Io(_) => MengerStatus::Parse,
        Error::TerminalCapExceeded { .. } => MengerStatus::CapExceeded,
        Error::IndexOutOfRange { .. }
        | Error::EmptySet { .. }
        | Error::ParamOutOfRange { .. }
        | Error::NonPlanar { .. }
        | Error::MatrixValidation { .. }
        | Error::PointValidation { .. } => MengerStatus::InvalidArgument,
        _ => MengerStatus::Compute,
    }
}

fn fail(err: Error) -> MengerStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn guarded<F: FnOnce() -> MengerStatus>(f: F) -> MengerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            MengerStatus::Panic
        }
    }
}

/// Opaque handle around a validated metric space.
pub struct MengerSpace {
    inner: MetricSpace,
}

/// Opaque handle around a hit collection (ball centers plus radius).
pub struct MengerHitCollection {
    inner: HitCollection,
}

unsafe fn slice_arg<'a>(ptr: *const usize, len: usize) -> Option<&'a [usize]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn f64_slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn index_set_arg(items: &[usize], space: &MetricSpace, all_when_empty: bool) -> IndexSet {
    if items.is_empty() && all_when_empty {
        IndexSet::full(space)
    } else {
        IndexSet::new(items.to_vec())
    }
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> MengerStatus {
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            MengerStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            MengerStatus::Compute
        }
    }
}

/// Most recent error message for this thread (empty when no error has
/// occurred). The pointer stays valid until the next failing call.
#[no_mangle]
pub extern "C" fn menger_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by any `*_json` entry point.
///
/// # Safety
/// `s` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn menger_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a point-set JSON document (`{"dim": ..., "points": ...}` or
/// `{"matrix": ...}`) into a new space handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn menger_space_from_json(
    json: *const c_char,
    out: *mut *mut MengerSpace,
) -> MengerStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("input is not valid UTF-8");
                return MengerStatus::Utf8;
            }
        };
        match report::space_from_json(text) {
            Ok(space) => {
                *out = Box::into_raw(Box::new(MengerSpace { inner: space }));
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `space` must come from [`menger_space_from_json`], or be null.
#[no_mangle]
pub unsafe extern "C" fn menger_space_free(space: *mut MengerSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points in the space; 0 for a null handle.
///
/// # Safety
/// `space` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn menger_space_point_count(space: *const MengerSpace) -> usize {
    if space.is_null() {
        0
    } else {
        (*space).inner.len()
    }
}

/// Distance between two points by index.
///
/// # Safety
/// `space` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn menger_dist(
    space: *const MengerSpace,
    i: usize,
    j: usize,
    out: *mut f64,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        match menger::metric::dist(&(*space).inner, i, j) {
            Ok(d) => {
                *out = d.value();
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Hausdorff distance between two index sets; infinity when exactly one
/// side is empty.
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_hausdorff(
    space: *const MengerSpace,
    a: *const usize,
    a_len: usize,
    b: *const usize,
    b_len: usize,
    out: *mut f64,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let (Some(a), Some(b)) = (slice_arg(a, a_len), slice_arg(b, b_len)) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let a = IndexSet::new(a.to_vec());
        let b = IndexSet::new(b.to_vec());
        match hausdorff(sp, &a, &b) {
            Ok(d) => {
                *out = d.value();
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Minimum-spanning-tree length over the given terminals (all points when
/// the list is empty).
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_mst_length(
    space: *const MengerSpace,
    terminals: *const usize,
    terminals_len: usize,
    out: *mut f64,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let Some(t) = slice_arg(terminals, terminals_len) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let p = index_set_arg(t, sp, true);
        if let Err(e) = p.validate_for(sp) {
            return fail(e);
        }
        match menger::graph::mst(sp, &p) {
            Ok((_, len)) => {
                *out = len.value();
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exact euclidean Steiner minimal tree length for up to 4 terminals in
/// the plane.
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_smt_euclidean_small(
    space: *const MengerSpace,
    terminals: *const usize,
    terminals_len: usize,
    out: *mut f64,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let Some(t) = slice_arg(terminals, terminals_len) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let p = index_set_arg(t, sp, true);
        if let Err(e) = p.validate_for(sp) {
            return fail(e);
        }
        match smt_euclidean_small(sp, &p) {
            Ok(r) => {
                *out = r.length.value();
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exact Steiner tree length with Steiner points restricted to the given
/// candidate indices (Dreyfus-Wagner; at most 12 terminals).
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_smt_restricted(
    space: *const MengerSpace,
    terminals: *const usize,
    terminals_len: usize,
    candidates: *const usize,
    candidates_len: usize,
    out: *mut f64,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let (Some(t), Some(c)) = (
            slice_arg(terminals, terminals_len),
            slice_arg(candidates, candidates_len),
        ) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let p = IndexSet::new(t.to_vec());
        let cands = IndexSet::new(c.to_vec());
        if let Err(e) = p.validate_for(sp).and_then(|_| cands.validate_for(sp)) {
            return fail(e);
        }
        match smt_restricted(sp, &p, &cands) {
            Ok(r) => {
                *out = r.length.value();
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Which length functional an estimate sweep targets.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MengerFunctional {
    /// Menger length `L_M` (spanning trees).
    Menger = 0,
    /// Menger-Choquet length `L_MC` (free Steiner points).
    MengerChoquet = 1,
    /// Intrinsic Menger length `L_IM` (Steiner points from the set).
    IntrinsicMenger = 2,
}

/// Runs a length-functional estimate over an eps-net sweep and returns the
/// full JSON report (schedule, per-level engines and brackets, witness
/// net). The set may be empty to mean "all points".
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_estimate_json(
    space: *const MengerSpace,
    functional: MengerFunctional,
    set: *const usize,
    set_len: usize,
    eps_schedule: *const f64,
    schedule_len: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let (Some(set), Some(schedule)) = (
            slice_arg(set, set_len),
            f64_slice_arg(eps_schedule, schedule_len),
        ) else {
            set_error("null array pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let a = index_set_arg(set, sp, true);
        if let Err(e) = a.validate_for(sp) {
            return fail(e);
        }
        let result = match functional {
            MengerFunctional::Menger => menger_estimate(sp, &a, schedule, seed),
            MengerFunctional::MengerChoquet => {
                menger_choquet_estimate(sp, &a, schedule, CandidateSource::Sample, seed)
            }
            MengerFunctional::IntrinsicMenger => {
                intrinsic_menger_estimate(sp, &a, schedule, seed)
            }
        };
        match result {
            Ok(est) => write_string(
                out,
                serde_json::to_string(&report::estimate_json(&est)).unwrap(),
            ),
            Err(e) => fail(e),
        }
    })
}

/// Builds the delta-cover certificate for the set and returns its JSON
/// report (elements, diameter sum, length certificate, guaranteed bound).
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_proof_cover_json(
    space: *const MengerSpace,
    set: *const usize,
    set_len: usize,
    delta: f64,
    out: *mut *mut c_char,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let Some(set) = slice_arg(set, set_len) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let a = index_set_arg(set, sp, true);
        if let Err(e) = a.validate_for(sp) {
            return fail(e);
        }
        match proof_cover(sp, &a, delta) {
            Ok(pc) => write_string(
                out,
                serde_json::to_string(&report::proof_cover_json(&pc)).unwrap(),
            ),
            Err(e) => fail(e),
        }
    })
}

/// Builds a hit collection for the set at accuracy `eps`.
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_hit_collection(
    space: *const MengerSpace,
    set: *const usize,
    set_len: usize,
    eps: f64,
    out: *mut *mut MengerHitCollection,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let Some(set) = slice_arg(set, set_len) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let a = index_set_arg(set, sp, true);
        if let Err(e) = a.validate_for(sp) {
            return fail(e);
        }
        match hit_collection(sp, &a, eps, SmtEngine::Auto) {
            Ok(hc) => {
                *out = Box::into_raw(Box::new(MengerHitCollection { inner: hc }));
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `hc` must come from [`menger_hit_collection`], or be null.
#[no_mangle]
pub unsafe extern "C" fn menger_hit_collection_free(hc: *mut MengerHitCollection) {
    if !hc.is_null() {
        drop(Box::from_raw(hc));
    }
}

/// Radius of the collection's open balls; NaN for a null handle.
///
/// # Safety
/// `hc` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn menger_hit_collection_radius(
    hc: *const MengerHitCollection,
) -> f64 {
    if hc.is_null() {
        f64::NAN
    } else {
        (*hc).inner.radius
    }
}

/// Whether the given set meets every ball of the collection.
///
/// # Safety
/// Pointer arguments must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn menger_check_hits(
    space: *const MengerSpace,
    hc: *const MengerHitCollection,
    set: *const usize,
    set_len: usize,
    out: *mut bool,
) -> MengerStatus {
    guarded(|| {
        if space.is_null() || hc.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let Some(set) = slice_arg(set, set_len) else {
            set_error("null index-set pointer with non-zero length");
            return MengerStatus::NullPointer;
        };
        let sp = &(*space).inner;
        let b = IndexSet::new(set.to_vec());
        match check_hits(sp, &b, &(*hc).inner) {
            Ok(hit) => {
                *out = hit;
                MengerStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Shape families exposed over the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MengerShapeKind {
    Segment = 0,
    SemicircleChain = 1,
    Koch = 2,
    ShrunkKoch = 3,
    SquareDiagonals = 4,
}

/// Generates an example shape; returns a JSON document
/// `{"points": <point-set>, "true_length": ..., "pitch": ...}` whose
/// `points` member can be fed back into [`menger_space_from_json`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn menger_shape_json(
    kind: MengerShapeKind,
    n: usize,
    base_length: f64,
    samples: usize,
    out: *mut *mut c_char,
) -> MengerStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null pointer argument");
            return MengerStatus::NullPointer;
        }
        let spec = match kind {
            MengerShapeKind::Segment => ShapeSpec::Segment { samples },
            MengerShapeKind::SemicircleChain => ShapeSpec::SemicircleChain {
                n,
                samples_per_arc: samples,
            },
            MengerShapeKind::Koch => ShapeSpec::Koch {
                n,
                base_length,
                samples_per_edge: samples,
            },
            MengerShapeKind::ShrunkKoch => ShapeSpec::ShrunkKoch {
                n,
                samples_per_edge: samples,
            },
            MengerShapeKind::SquareDiagonals => ShapeSpec::SquareDiagonals {
                samples_per_diagonal: samples,
            },
        };
        match generate(&spec) {
            Ok(shape) => {
                let (points, sidecar) = report::shape_files(&shape);
                let doc = serde_json::json!({
                    "points": points,
                    "true_length": sidecar["true_length"].clone(),
                    "pitch": sidecar["pitch"].clone(),
                });
                write_string(out, serde_json::to_string(&doc).unwrap())
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_of(json: &str) -> *mut MengerSpace {
        let c = CString::new(json).unwrap();
        let mut out: *mut MengerSpace = std::ptr::null_mut();
        let status = unsafe { menger_space_from_json(c.as_ptr(), &mut out) };
        assert_eq!(status, MengerStatus::Ok);
        out
    }

    #[test]
    fn space_lifecycle_and_dist() {
        let sp = space_of(r#"{"dim": 2, "points": [[0,0],[3,4]]}"#);
        assert_eq!(unsafe { menger_space_point_count(sp) }, 2);
        let mut d = 0.0;
        assert_eq!(unsafe { menger_dist(sp, 0, 1, &mut d) }, MengerStatus::Ok);
        assert_eq!(d, 5.0);
        // out-of-range index reports InvalidArgument with a message
        assert_eq!(
            unsafe { menger_dist(sp, 0, 9, &mut d) },
            MengerStatus::InvalidArgument
        );
        let msg = unsafe { CStr::from_ptr(menger_last_error_message()) };
        assert!(!msg.to_bytes().is_empty());
        unsafe { menger_space_free(sp) };
    }

    #[test]
    fn null_and_parse_errors() {
        let mut out: *mut MengerSpace = std::ptr::null_mut();
        assert_eq!(
            unsafe { menger_space_from_json(std::ptr::null(), &mut out) },
            MengerStatus::NullPointer
        );
        let bad = CString::new("not json").unwrap();
        assert_eq!(
            unsafe { menger_space_from_json(bad.as_ptr(), &mut out) },
            MengerStatus::Parse
        );
    }
}
