use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use pastent_ffi::*;

fn parse(spec: &str) -> *mut PastentDistribution {
    let c = CString::new(spec).unwrap();
    let mut d = ptr::null_mut();
    let status = unsafe { pastent_distribution_parse(c.as_ptr(), &mut d) };
    assert_eq!(status, PastentStatus::Ok, "{spec}");
    d
}

fn last_error() -> String {
    let p = pastent_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn distribution_round_trip() {
    let d = parse("power:c=2,b=1");
    let mut v = 0.0;
    unsafe {
        assert_eq!(pastent_cdf(d, 0.5, &mut v), PastentStatus::Ok);
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(pastent_pdf(d, 0.5, &mut v), PastentStatus::Ok);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(pastent_quantile(d, 0.25, &mut v), PastentStatus::Ok);
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(pastent_quantile(d, 1.5, &mut v), PastentStatus::Domain);

        let mut buf = [0 as std::ffi::c_char; 64];
        let n = pastent_distribution_spec(d, buf.as_mut_ptr(), buf.len());
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert_eq!(text, "power:c=2,b=1");
        assert_eq!(n, text.len());
        let mut small = [0 as std::ffi::c_char; 4];
        pastent_distribution_spec(d, small.as_mut_ptr(), small.len());
        assert_eq!(CStr::from_ptr(small.as_ptr()).to_str().unwrap(), "pow");
        pastent_distribution_free(d);
    }
}

#[test]
fn parse_errors_set_message() {
    let c = CString::new("gamma:k=1").unwrap();
    let mut d = ptr::null_mut();
    let status = unsafe { pastent_distribution_parse(c.as_ptr(), &mut d) };
    assert_ne!(status, PastentStatus::Ok);
    assert!(d.is_null());
    assert!(last_error().contains("gamma"));

    let status = unsafe { pastent_distribution_parse(ptr::null(), &mut d) };
    assert_eq!(status, PastentStatus::NullPointer);
}

#[test]
fn measures_through_the_abi() {
    let u = parse("uniform:b=1");
    let mut v = 0.0;
    unsafe {
        let s = pastent_measure_eval(u, PastentMeasure::PastDirect, 0.5, ptr::null(), &mut v);
        assert_eq!(s, PastentStatus::Ok);
        assert!((v - 0.5f64.ln()).abs() < 1e-9);

        let cfg = pastent_quad_config_default();
        let s = pastent_measure_eval(u, PastentMeasure::PastPit, 0.5, &cfg, &mut v);
        assert_eq!(s, PastentStatus::Ok);
        assert!((v - 0.5f64.ln()).abs() < 1e-9);

        let s = pastent_measure_eval(u, PastentMeasure::PastDirect, 0.0, ptr::null(), &mut v);
        assert_eq!(s, PastentStatus::Degenerate);

        let bad = PastentQuadConfig {
            tail_cut: 0.5,
            ..cfg
        };
        let s = pastent_measure_eval(u, PastentMeasure::Shannon, 0.5, &bad, &mut v);
        assert_ne!(s, PastentStatus::Ok);

        let s = pastent_measure_eval(
            u,
            PastentMeasure::Shannon,
            0.5,
            ptr::null(),
            ptr::null_mut(),
        );
        assert_eq!(s, PastentStatus::NullPointer);
        pastent_distribution_free(u);
    }
}

#[test]
fn theorem_check_counterexample() {
    let x = parse("power:c=0.5,b=1");
    let y = parse("power:c=2.46077681728415,b=0.5756196988711343");
    let mut out = PastentVerdict {
        t0: 0.0,
        cdf_gap: 0.0,
        entropy_gap: 0.0,
        mismatch: 0.0,
        conclusion_distance: 0.0,
        verdict: PastentVerdictKind::Consistent,
    };
    unsafe {
        let s = pastent_theorem_check(x, y, 0.5, 1e-6, 1e-2, ptr::null(), &mut out);
        assert_eq!(s, PastentStatus::Ok);
        pastent_distribution_free(x);
        pastent_distribution_free(y);
    }
    assert_eq!(out.verdict, PastentVerdictKind::CounterexampleCandidate);
    assert!(out.cdf_gap < 1e-6 && out.entropy_gap < 1e-6);
    assert!(out.conclusion_distance > 0.01);
}

#[test]
fn reconstruction_handle() {
    let n = 200;
    let t: Vec<f64> = (0..n)
        .map(|i| 0.1 + 0.89 * i as f64 / (n - 1) as f64)
        .collect();
    let h: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    let mut r = ptr::null_mut();
    unsafe {
        let s = pastent_reconstruct(t.as_ptr(), h.as_ptr(), n, t[n - 1], t[n - 1], &mut r);
        assert_eq!(s, PastentStatus::Ok, "{}", last_error());
        assert_eq!(pastent_reconstruction_len(r), n);
        assert!(pastent_reconstruction_selfcheck(r) <= 1e-3);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (mut ti, mut f) = (0.0, 0.0);
            assert_eq!(
                pastent_reconstruction_row(r, i, &mut ti, ptr::null_mut(), &mut f),
                PastentStatus::Ok
            );
            worst = worst.max((f - ti).abs());
        }
        assert!(worst <= 1e-3, "{worst}");
        assert_eq!(
            pastent_reconstruction_row(r, n, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            PastentStatus::Domain
        );
        pastent_reconstruction_free(r);

        let s = pastent_reconstruct(t.as_ptr(), h.as_ptr(), 2, t[1], 0.5, &mut r);
        assert_eq!(s, PastentStatus::Precondition);
        assert_eq!(pastent_reconstruction_len(ptr::null()), 0);
    }
}

#[test]
fn estimator_through_the_abi() {
    let xs: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
    let mut v = 0.0;
    unsafe {
        let s = pastent_estimate_past_entropy(xs.as_ptr(), xs.len(), 0.5, 0, &mut v);
        assert_eq!(s, PastentStatus::Ok);
        assert!((v - 0.5f64.ln()).abs() < 0.05, "{v}");
        let s = pastent_estimate_past_entropy(xs.as_ptr(), 5, 0.5, 0, &mut v);
        assert_eq!(s, PastentStatus::InsufficientData);
    }
}

#[test]
fn header_is_valid_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/pastent.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "pastent_distribution_parse",
        "pastent_measure_eval",
        "pastent_theorem_check",
        "pastent_reconstruct",
        "pastent_last_error_message",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let src = std::env::temp_dir().join("pastent_header_check.c");
    std::fs::write(
        &src,
        "#include \"pastent.h\"\nint main(void) { PastentQuadConfig c = pastent_quad_config_default(); return (int)c.max_depth; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .expect("C compiler");
    assert!(status.success());
}
