//! Exercises the C ABI from Rust through raw pointers only.

use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use dygcn::cli::{GCN_FILE, PARAMS_FILE};
use dygcn::dygcn::{dygcn_step, DyGcnParams};
use dygcn::gcn::GcnModel;
use dygcn::graph::{FeatureKind, FeatureMatrix, GraphSnapshot};
use dygcn::io::{format_gcn, format_params, write_text};
use dygcn::linalg::{Activation, Matrix};
use dygcn::spectral::SpectralParams;
use dygcn::trainer::VariantParams;
use dygcn_ffi::*;

const PREV: &[usize] = &[1, 3, 1, 4, 2, 5, 2, 6, 3, 7, 6, 8];
const NEXT: &[usize] = &[1, 3, 1, 4, 2, 5, 2, 6, 3, 7, 6, 8, 1, 2];

fn last_error() -> String {
    let p = dygcn_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn write_model(dir: &Path, spectral: bool) -> (GcnModel, VariantParams) {
    let mut rng = dygcn::rng::stream(9, "ffi");
    let gcn = GcnModel::default_architecture(1, 3, &mut rng);
    let base = DyGcnParams::glorot(3, 2, Activation::Tanh, &mut rng);
    let params = if spectral {
        let ws = Matrix::from_fn(3, 3, |r, c| if r == c { 0.5 } else { 0.1 });
        VariantParams::Spectral(SpectralParams::new(base.with_max_order(1).unwrap(), ws).unwrap())
    } else {
        VariantParams::DyGcn(base)
    };
    write_text(&dir.join(PARAMS_FILE), &format_params(&params)).unwrap();
    write_text(&dir.join(GCN_FILE), &format_gcn(&gcn, FeatureKind::Degree)).unwrap();
    (gcn, params)
}

fn cpath(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

unsafe fn overview_sequence() -> *mut DygcnSequence {
    let mut seq = ptr::null_mut();
    assert_eq!(dygcn_sequence_new(9, &mut seq), DygcnStatus::Ok);
    assert_eq!(dygcn_sequence_push_snapshot(seq, PREV.as_ptr(), PREV.len() / 2), DygcnStatus::Ok);
    assert_eq!(dygcn_sequence_push_snapshot(seq, NEXT.as_ptr(), NEXT.len() / 2), DygcnStatus::Ok);
    seq
}

fn snapshots() -> (GraphSnapshot, GraphSnapshot) {
    let pairs = |s: &[usize]| s.chunks(2).map(|p| (p[0], p[1])).collect::<Vec<_>>();
    (
        GraphSnapshot::from_edges(9, 0, pairs(PREV)).unwrap(),
        GraphSnapshot::from_edges(9, 1, pairs(NEXT)).unwrap(),
    )
}

unsafe fn matrix_of(emb: *const DygcnEmbeddings) -> Matrix {
    let (r, c) = (dygcn_embeddings_rows(emb), dygcn_embeddings_cols(emb));
    Matrix::from_vec(r, c, std::slice::from_raw_parts(dygcn_embeddings_data(emb), r * c).to_vec()).unwrap()
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(dygcn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn null_handles_are_reported() {
    unsafe {
        assert_eq!(dygcn_sequence_new(3, ptr::null_mut()), DygcnStatus::NullPointer);
        assert!(last_error().contains("null"));
        assert_eq!(dygcn_sequence_push_snapshot(ptr::null_mut(), ptr::null(), 0), DygcnStatus::NullPointer);
        assert_eq!(dygcn_sequence_len(ptr::null()), 0);
        assert!(dygcn_embeddings_data(ptr::null()).is_null());
        let mut model = ptr::null_mut();
        assert_eq!(dygcn_model_load(ptr::null(), &mut model), DygcnStatus::NullPointer);
        assert!(model.is_null());
        dygcn_sequence_free(ptr::null_mut());
        dygcn_embeddings_free(ptr::null_mut());
        dygcn_model_free(ptr::null_mut());
    }
}

#[test]
fn bad_edges_are_graph_errors() {
    unsafe {
        let mut seq = ptr::null_mut();
        assert_eq!(dygcn_sequence_new(3, &mut seq), DygcnStatus::Ok);
        let out_of_range = [0usize, 7];
        assert_eq!(dygcn_sequence_push_snapshot(seq, out_of_range.as_ptr(), 1), DygcnStatus::Graph);
        assert_eq!(dygcn_sequence_len(seq), 0);
        assert_eq!(dygcn_sequence_push_snapshot(seq, ptr::null(), 0), DygcnStatus::Ok);
        assert_eq!(dygcn_sequence_len(seq), 1);
        dygcn_sequence_free(seq);
    }
}

#[test]
fn embeddings_round_trip() {
    let data: Vec<f64> = (0..6).map(|x| x as f64 * 0.25).collect();
    unsafe {
        let mut emb = ptr::null_mut();
        assert_eq!(dygcn_embeddings_new(2, 3, data.as_ptr(), &mut emb), DygcnStatus::Ok);
        assert_eq!((dygcn_embeddings_rows(emb), dygcn_embeddings_cols(emb)), (2, 3));
        assert_eq!(matrix_of(emb).as_slice(), &data[..]);
        dygcn_embeddings_free(emb);
        assert_eq!(dygcn_embeddings_new(2, 3, ptr::null(), &mut emb), DygcnStatus::NullPointer);
        assert_eq!(dygcn_embeddings_new(usize::MAX, 2, data.as_ptr(), &mut emb), DygcnStatus::InvalidArgument);
    }
}

#[test]
fn missing_checkpoint_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = cpath(&dir.path().join("absent"));
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { dygcn_model_load(path.as_ptr(), &mut model) }, DygcnStatus::Io);
    assert!(model.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn step_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let (gcn, params) = write_model(dir.path(), false);
    let (prev, next) = snapshots();
    let z0 = gcn.forward(&prev, &FeatureMatrix::build(FeatureKind::Degree, &prev)).unwrap();
    let VariantParams::DyGcn(p) = &params else { unreachable!() };
    let want = dygcn_step(&prev, &next, &z0, p).unwrap();
    unsafe {
        let seq = overview_sequence();
        let mut model = ptr::null_mut();
        assert_eq!(dygcn_model_load(cpath(dir.path()).as_ptr(), &mut model), DygcnStatus::Ok);
        assert_eq!(dygcn_model_dim(model), 3);
        let mut emb = ptr::null_mut();
        assert_eq!(dygcn_model_embed(model, seq, 0, &mut emb), DygcnStatus::Ok);
        assert_eq!(matrix_of(emb), z0);
        let mut updated = 0usize;
        assert_eq!(dygcn_model_step(model, seq, 0, emb, &mut updated), DygcnStatus::Ok);
        // Endpoints {1, 2} then their neighbours {3, 4, 5, 6}.
        assert_eq!(updated, 6);
        assert_eq!(matrix_of(emb), want);
        assert_eq!(dygcn_model_step(model, seq, 1, emb, ptr::null_mut()), DygcnStatus::InvalidArgument);
        assert!(last_error().contains("no snapshot 2"));
        dygcn_embeddings_free(emb);
        dygcn_model_free(model);
        dygcn_sequence_free(seq);
    }
}

#[test]
fn spectral_step_rewrites_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let (gcn, params) = write_model(dir.path(), true);
    let (prev, next) = snapshots();
    let mut want = gcn.forward(&prev, &FeatureMatrix::build(FeatureKind::Degree, &prev)).unwrap();
    params.step_in_place(&mut want, &next, &dygcn::graph::compute_delta(&prev, &next).unwrap()).unwrap();
    unsafe {
        let seq = overview_sequence();
        let mut model = ptr::null_mut();
        assert_eq!(dygcn_model_load(cpath(dir.path()).as_ptr(), &mut model), DygcnStatus::Ok);
        let mut emb = ptr::null_mut();
        assert_eq!(dygcn_model_embed(model, seq, 0, &mut emb), DygcnStatus::Ok);
        let mut updated = 0usize;
        assert_eq!(dygcn_model_step(model, seq, 0, emb, &mut updated), DygcnStatus::Ok);
        assert_eq!(updated, 9);
        assert_eq!(matrix_of(emb), want);
        dygcn_embeddings_free(emb);
        dygcn_model_free(model);
        dygcn_sequence_free(seq);
    }
}

#[test]
fn width_mismatch_is_a_shape_error() {
    let dir = tempfile::tempdir().unwrap();
    write_model(dir.path(), false);
    let data = [0.0; 18];
    unsafe {
        let seq = overview_sequence();
        let mut model = ptr::null_mut();
        assert_eq!(dygcn_model_load(cpath(dir.path()).as_ptr(), &mut model), DygcnStatus::Ok);
        let mut emb = ptr::null_mut();
        assert_eq!(dygcn_embeddings_new(9, 2, data.as_ptr(), &mut emb), DygcnStatus::Ok);
        assert_eq!(dygcn_model_step(model, seq, 0, emb, ptr::null_mut()), DygcnStatus::Shape);
        dygcn_embeddings_free(emb);
        dygcn_model_free(model);
        dygcn_sequence_free(seq);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dygcn.h")).unwrap();
    for name in [
        "dygcn_version",
        "dygcn_last_error_message",
        "dygcn_sequence_push_snapshot",
        "dygcn_model_step",
        "DYGCN_STATUS_NULL_POINTER",
        "typedef struct DygcnModel DygcnModel",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler found; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"dygcn.h\"\nint main(void) { DygcnSequence *s = 0; return dygcn_sequence_new(4, &s) == DYGCN_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}
