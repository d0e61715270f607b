//! Exercises the exported functions the way a foreign caller would.

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hadamard_ising_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hi_last_error_message()) }.to_string_lossy().into_owned()
}

fn build(problem: u32, order: usize, count: usize, known: &[i8], delta: u64) -> Result<*mut HiModel, HiStatus> {
    let mut out = ptr::null_mut();
    let kp = if known.is_empty() { ptr::null() } else { known.as_ptr() };
    match unsafe { hi_model_build(problem, order, count, kp, known.len(), delta, &mut out) } {
        HiStatus::Ok => Ok(out),
        s => Err(s),
    }
}

#[test]
fn build_anneal_verify() {
    unsafe {
        let raw = build(HI_PROBLEM_HSEARCH, 2, 0, &[], 16).unwrap();
        assert_eq!(hi_model_num_vars(raw), 6);
        let mut model = ptr::null_mut();
        assert_eq!(hi_model_normalize(raw, &mut model), HiStatus::Ok);

        let mut e = 0.0;
        assert_eq!(hi_model_energy(model, [1i8; 6].as_ptr(), 6, &mut e), HiStatus::Ok);
        assert!((e + 2.0).abs() < 1e-12);
        assert_eq!(hi_model_energy(model, [1i8; 5].as_ptr(), 5, &mut e), HiStatus::InvalidArgument);

        let mut cfg = hi_anneal_config_default();
        assert_eq!((cfg.sweeps, cfg.reads, cfg.beta_min, cfg.beta_max), (1000, 10, 0.1, 10.0));
        cfg.seed = 9;
        let mut results = ptr::null_mut();
        assert_eq!(hi_anneal(model, &cfg, &mut results), HiStatus::Ok);
        let n = hi_results_len(results);
        let mut total = 0;
        for i in 0..n {
            let mut spins = [0i8; 6];
            let (mut energy, mut occ) = (0.0, 0u64);
            assert_eq!(hi_results_sample(results, i, spins.as_mut_ptr(), 6, &mut energy, &mut occ), HiStatus::Ok);
            total += occ;
            let mut ok = false;
            assert_eq!(hi_verify_sample(model, spins.as_ptr(), 6, &mut ok), HiStatus::Ok);
            if (energy + 28.0 / 12.0).abs() < 1e-9 {
                assert!(ok);
            }
        }
        assert_eq!(total, 10);
        let mut spins = [0i8; 6];
        assert_eq!(
            hi_results_sample(results, n, spins.as_mut_ptr(), 6, ptr::null_mut(), ptr::null_mut()),
            HiStatus::InvalidArgument
        );

        cfg.schedule = 7;
        assert_eq!(hi_anneal(model, &cfg, &mut results), HiStatus::InvalidArgument);
        assert!(last_error().contains("schedule"));

        hi_results_free(results);
        hi_model_free(model);
        hi_model_free(raw);
    }
}

#[test]
fn completion_and_json_round_trip() {
    unsafe {
        let known: Vec<i8> = [1, 1].to_vec();
        let m = build(HI_PROBLEM_COMPLETION, 2, 0, &known, 0).unwrap();
        assert_eq!(hi_model_num_vars(m), 2);
        let mut text = ptr::null_mut();
        assert_eq!(hi_model_to_json(m, &mut text), HiStatus::Ok);
        let json = CStr::from_ptr(text).to_owned();
        hi_string_free(text);
        let mut back = ptr::null_mut();
        assert_eq!(hi_model_from_json(json.as_ptr(), &mut back), HiStatus::Ok);
        assert_eq!(hi_model_num_vars(back), 2);
        let mut ok = false;
        assert_eq!(hi_verify_sample(back, [1i8, -1].as_ptr(), 2, &mut ok), HiStatus::Ok);
        assert!(ok);
        assert_eq!(hi_verify_sample(back, [1i8, 1].as_ptr(), 2, &mut ok), HiStatus::Ok);
        assert!(!ok);
        hi_model_free(back);
        hi_model_free(m);

        let bad = CString::new("{not json").unwrap();
        assert_eq!(hi_model_from_json(bad.as_ptr(), &mut back), HiStatus::ParseError);
    }
}

#[test]
fn argument_errors() {
    assert_eq!(build(HI_PROBLEM_HSEARCH, 6, 0, &[], 0).unwrap_err(), HiStatus::InvalidArgument);
    assert!(last_error().contains("order 6"));
    assert_eq!(build(9, 2, 0, &[], 0).unwrap_err(), HiStatus::InvalidArgument);
    assert_eq!(build(HI_PROBLEM_ORTHOSET, 4, 5, &[], 0).unwrap_err(), HiStatus::InvalidArgument);
    assert_eq!(build(HI_PROBLEM_COMPLETION, 2, 0, &[1, 1, 1], 0).unwrap_err(), HiStatus::InvalidArgument);
    assert_eq!(build(HI_PROBLEM_COMPLETION, 2, 0, &[1, 0], 0).unwrap_err(), HiStatus::InvalidArgument);
    unsafe {
        assert_eq!(hi_model_build(0, 2, 0, ptr::null(), 0, 0, ptr::null_mut()), HiStatus::NullPointer);
        assert_eq!(hi_model_num_vars(ptr::null()), 0);
        assert_eq!(hi_results_len(ptr::null()), 0);
        hi_model_free(ptr::null_mut());
        hi_results_free(ptr::null_mut());
        hi_string_free(ptr::null_mut());
    }
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<this test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_owned()
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libhadamard_ising_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("c_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "c smoke ok\n");
}
