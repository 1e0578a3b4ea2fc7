//! C ABI over the incremental embedding engine.
//!
//! Handles are opaque pointers created by `*_new`/`*_load` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`DygcnStatus`]; on failure the message is available from
//! [`dygcn_last_error_message`] on the same thread. No function unwinds
//! into the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dygcn::cli::{load_checkpoint, Checkpoint};
use dygcn::graph::{compute_delta, FeatureMatrix, GraphSnapshot};
use dygcn::linalg::Matrix;
use dygcn::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DygcnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Shape = 5,
    Graph = 6,
    Numeric = 7,
    Panic = 8,
}

/// Ordered snapshots over one node universe.
pub struct DygcnSequence {
    snapshots: Vec<GraphSnapshot>,
    n_slots: usize,
}

/// Row-major `N × d` embedding matrix.
pub struct DygcnEmbeddings {
    matrix: Matrix,
}

/// Trained base GCN plus update parameters.
pub struct DygcnModel {
    checkpoint: Checkpoint,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DygcnStatus {
    match err {
        Error::Io { .. } => DygcnStatus::Io,
        Error::Parse { .. } => DygcnStatus::Parse,
        Error::Shape(_) => DygcnStatus::Shape,
        Error::Structural(_)
        | Error::Ordering { .. }
        | Error::DeltaConsistency(_)
        | Error::Index { .. } => DygcnStatus::Graph,
        Error::Numeric(_) | Error::Training { .. } => DygcnStatus::Numeric,
        Error::Parameter(_) | Error::Evaluation(_) | Error::Config(_) | Error::Input(_) => {
            DygcnStatus::InvalidArgument
        }
    }
}

struct Failure(DygcnStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail<T>(status: DygcnStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DygcnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DygcnStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            DygcnStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(DygcnStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .map_or_else(|| fail(DygcnStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return fail(DygcnStatus::NullPointer, "path is null");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => fail(DygcnStatus::InvalidArgument, "path is not UTF-8"),
    }
}

unsafe fn out_slot<'a, T>(out: *mut *mut T) -> Result<&'a mut *mut T, Failure> {
    let slot = borrow_mut(out, "output pointer")?;
    *slot = ptr::null_mut();
    Ok(slot)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dygcn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dygcn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ------------------------------------------------------------ sequence

/// Empty sequence over `n_slots` node slots.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dygcn_sequence_new(n_slots: usize, out: *mut *mut DygcnSequence) -> DygcnStatus {
    guard(|| {
        let slot = out_slot(out)?;
        *slot = Box::into_raw(Box::new(DygcnSequence {
            snapshots: Vec::new(),
            n_slots,
        }));
        Ok(())
    })
}

/// Loads a temporal event file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dygcn_sequence_load_events(
    path: *const c_char,
    out: *mut *mut DygcnSequence,
) -> DygcnStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let snapshots = dygcn::io::read_events(&path_arg(path)?)?;
        let n_slots = snapshots.first().map_or(0, GraphSnapshot::n_slots);
        *slot = Box::into_raw(Box::new(DygcnSequence { snapshots, n_slots }));
        Ok(())
    })
}

/// Appends a snapshot given as `n_edges` node pairs stored flat in
/// `pairs` (`2 * n_edges` entries). Its time index is the current length.
///
/// # Safety
/// `seq` must come from this library; `pairs` must hold `2 * n_edges`
/// readable entries (it may be null when `n_edges` is 0).
#[no_mangle]
pub unsafe extern "C" fn dygcn_sequence_push_snapshot(
    seq: *mut DygcnSequence,
    pairs: *const usize,
    n_edges: usize,
) -> DygcnStatus {
    guard(|| {
        let seq = borrow_mut(seq, "sequence")?;
        let flat: &[usize] = if n_edges == 0 {
            &[]
        } else {
            if pairs.is_null() {
                return fail(DygcnStatus::NullPointer, "edge array is null");
            }
            std::slice::from_raw_parts(pairs, 2 * n_edges)
        };
        let t = seq.snapshots.len() as u64;
        let snap = GraphSnapshot::from_edges(seq.n_slots, t, flat.chunks_exact(2).map(|p| (p[0], p[1])))?;
        seq.snapshots.push(snap);
        Ok(())
    })
}

/// Number of snapshots, 0 for a null handle.
///
/// # Safety
/// `seq` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dygcn_sequence_len(seq: *const DygcnSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.snapshots.len())
}

/// Number of node slots, 0 for a null handle.
///
/// # Safety
/// `seq` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dygcn_sequence_n_slots(seq: *const DygcnSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.n_slots)
}

/// # Safety
/// `seq` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dygcn_sequence_free(seq: *mut DygcnSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

// ---------------------------------------------------------- embeddings

/// Copies `rows * cols` row-major values into a new matrix.
///
/// # Safety
/// `data` must hold `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dygcn_embeddings_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut DygcnEmbeddings,
) -> DygcnStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure(DygcnStatus::InvalidArgument, "matrix size overflows".into()))?;
        let values = if len == 0 {
            Vec::new()
        } else {
            if data.is_null() {
                return fail(DygcnStatus::NullPointer, "data is null");
            }
            std::slice::from_raw_parts(data, len).to_vec()
        };
        let matrix = Matrix::from_vec(rows, cols, values)?;
        *slot = Box::into_raw(Box::new(DygcnEmbeddings { matrix }));
        Ok(())
    })
}

/// # Safety
/// `emb` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dygcn_embeddings_rows(emb: *const DygcnEmbeddings) -> usize {
    emb.as_ref().map_or(0, |e| e.matrix.rows())
}

/// # Safety
/// `emb` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dygcn_embeddings_cols(emb: *const DygcnEmbeddings) -> usize {
    emb.as_ref().map_or(0, |e| e.matrix.cols())
}

/// Row-major values, valid until the handle is modified or freed.
///
/// # Safety
/// `emb` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dygcn_embeddings_data(emb: *const DygcnEmbeddings) -> *const f64 {
    emb.as_ref().map_or(ptr::null(), |e| e.matrix.as_slice().as_ptr())
}

/// # Safety
/// `emb` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dygcn_embeddings_free(emb: *mut DygcnEmbeddings) {
    if !emb.is_null() {
        drop(Box::from_raw(emb));
    }
}

// --------------------------------------------------------------- model

/// Loads the output directory of `dygcn train`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dygcn_model_load(dir: *const c_char, out: *mut *mut DygcnModel) -> DygcnStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let checkpoint = load_checkpoint(&path_arg(dir)?)?;
        *slot = Box::into_raw(Box::new(DygcnModel { checkpoint }));
        Ok(())
    })
}

/// Embedding width, 0 for a null handle.
///
/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dygcn_model_dim(model: *const DygcnModel) -> usize {
    model.as_ref().map_or(0, |m| m.checkpoint.params.dim())
}

/// # Safety
/// `model` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dygcn_model_free(model: *mut DygcnModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

fn snapshot(seq: &DygcnSequence, t: usize) -> Result<&GraphSnapshot, Failure> {
    seq.snapshots.get(t).map_or_else(
        || {
            fail(
                DygcnStatus::InvalidArgument,
                format!("no snapshot {t} in a sequence of {}", seq.snapshots.len()),
            )
        },
        Ok,
    )
}

/// Full base-GCN embedding of snapshot `t`.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dygcn_model_embed(
    model: *const DygcnModel,
    seq: *const DygcnSequence,
    t: usize,
    out: *mut *mut DygcnEmbeddings,
) -> DygcnStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let ck = &borrow(model, "model")?.checkpoint;
        let seq = borrow(seq, "sequence")?;
        let first = snapshot(seq, 0)?;
        let features = FeatureMatrix::build(ck.features, first);
        let matrix = ck.gcn.forward(snapshot(seq, t)?, &features)?;
        *slot = Box::into_raw(Box::new(DygcnEmbeddings { matrix }));
        Ok(())
    })
}

/// Advances `emb` in place from snapshot `t` to `t + 1`. When
/// `updated_rows` is non-null it receives the number of rewritten rows
/// (every row for the spectral variant).
///
/// # Safety
/// Handles must come from this library; `updated_rows` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dygcn_model_step(
    model: *const DygcnModel,
    seq: *const DygcnSequence,
    t: usize,
    emb: *mut DygcnEmbeddings,
    updated_rows: *mut usize,
) -> DygcnStatus {
    guard(|| {
        let params = &borrow(model, "model")?.checkpoint.params;
        let seq = borrow(seq, "sequence")?;
        let emb = borrow_mut(emb, "embeddings")?;
        let (prev, next) = (snapshot(seq, t)?, snapshot(seq, t + 1)?);
        let delta = compute_delta(prev, next)?;
        let count = match params {
            dygcn::trainer::VariantParams::DyGcn(p) => {
                dygcn::dygcn::dygcn_step_in_place(&mut emb.matrix, next, &delta, p)?.total()
            }
            dygcn::trainer::VariantParams::Spectral(_) => {
                params.step_in_place(&mut emb.matrix, next, &delta)?;
                emb.matrix.rows()
            }
        };
        if let Some(out) = updated_rows.as_mut() {
            *out = count;
        }
        Ok(())
    })
}
