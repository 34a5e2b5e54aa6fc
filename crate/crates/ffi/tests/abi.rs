use std::ffi::{CStr, CString};
use std::ptr;

use nkverify_ffi::*;

unsafe fn report_json(r: *const NkReport) -> serde_json::Value {
    let mut s = ptr::null_mut();
    assert_eq!(nk_report_to_json(r, &mut s), NkStatus::Ok);
    let v = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
    nk_string_free(s);
    v
}

#[test]
fn structure_report_roundtrip() {
    unsafe {
        let mut opts = std::mem::zeroed();
        assert_eq!(nk_options_default(&mut opts), NkStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(nk_run_structure(&opts, 50, 5, &mut r), NkStatus::Ok);
        assert_eq!(nk_report_passed(r), 1);
        let v = report_json(r);
        assert_eq!(v["suite"], "structure");
        assert_eq!(v["status"], "pass");
        nk_report_free(r);
    }
}

#[test]
fn tolerance_override_fails_checks() {
    unsafe {
        let opts = NkOptions { seed: 3, tol: 1e-30, use_tol: 1, timings: 0 };
        let mut r = ptr::null_mut();
        assert_eq!(nk_run_structure(&opts, 20, 2, &mut r), NkStatus::Ok);
        assert_eq!(nk_report_passed(r), 0);
        nk_report_free(r);
        let bad = NkOptions { tol: f64::NAN, ..opts };
        assert_eq!(nk_run_structure(&bad, 20, 2, &mut r), NkStatus::InvalidArgument);
    }
}

#[test]
fn immersion_handles() {
    unsafe {
        let name = CString::new("diagonal").unwrap();
        let mut imm = ptr::null_mut();
        assert_eq!(nk_immersion_from_example(name.as_ptr(), &mut imm), NkStatus::Ok);
        let mut pt = [0.0; 8];
        assert_eq!(nk_immersion_point(imm, [0.0; 3].as_ptr(), pt.as_mut_ptr()), NkStatus::Ok);
        assert_eq!(pt, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let list = [imm as *const NkImmersion];
        let mut r = ptr::null_mut();
        assert_eq!(nk_run_lagrangian(list.as_ptr(), 1, 2, ptr::null(), &mut r), NkStatus::Ok);
        assert_eq!(nk_report_passed(r), 1);
        nk_report_free(r);
        nk_immersion_free(imm);

        let unknown = CString::new("no-such-example").unwrap();
        assert_eq!(nk_immersion_from_example(unknown.as_ptr(), &mut imm), NkStatus::UnknownExample);
        let msg = CStr::from_ptr(nk_last_error_message()).to_str().unwrap();
        assert!(msg.contains("no-such-example"), "{msg}");
        assert_eq!(nk_immersion_from_example(ptr::null(), &mut imm), NkStatus::NullPointer);

        let manifest = CString::new(r#"{"example":"factor-left","domain_rotation":[0.1,0.2,0.3]}"#).unwrap();
        assert_eq!(nk_immersion_from_manifest(manifest.as_ptr(), &mut imm), NkStatus::Ok);
        nk_immersion_free(imm);
        let broken = CString::new("{").unwrap();
        assert_eq!(nk_immersion_from_manifest(broken.as_ptr(), &mut imm), NkStatus::Parse);
    }
}

#[test]
fn fit_and_cubic() {
    unsafe {
        let mut c = [0.0; 10];
        assert_eq!(nk_cubic_from_v([1.0, 0.0, 0.0].as_ptr(), c.as_mut_ptr()), NkStatus::Ok);
        assert_eq!(c, [-2.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let keys = ["111", "112", "113", "122", "123", "133", "222", "223", "233", "333"];
        let comps: serde_json::Map<_, _> = keys.iter().zip(c).map(|(k, x)| (k.to_string(), x.into())).collect();
        let json = CString::new(serde_json::json!({ "n": 3, "components": comps }).to_string()).unwrap();
        let mut r = ptr::null_mut();
        assert_eq!(nk_run_fit(json.as_ptr(), ptr::null(), &mut r), NkStatus::Ok);
        let v = report_json(r);
        let fit = &v["checks"][0]["details"]["fit"];
        assert_eq!(v["checks"][0]["details"]["accepted"], true);
        assert!((fit["mu"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        nk_report_free(r);
        let missing = CString::new(r#"{"n":3,"components":{"111":1}}"#).unwrap();
        assert_eq!(nk_run_fit(missing.as_ptr(), ptr::null(), &mut r), NkStatus::Parse);
    }
}

#[test]
fn proof_mode_and_arguments() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(nk_run_proof(0, NkProofMode::All, ptr::null(), &mut r), NkStatus::InvalidArgument);
        assert_eq!(nk_run_proof(3, NkProofMode::Numeric, ptr::null(), ptr::null_mut()), NkStatus::NullPointer);
        assert_eq!(nk_run_proof(3, NkProofMode::Numeric, ptr::null(), &mut r), NkStatus::Ok);
        let v = report_json(r);
        let system1 = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == "codazzi.system1").unwrap();
        assert_eq!(system1["status"], "skip");
        nk_report_free(r);
        nk_report_free(ptr::null_mut());
        nk_string_free(ptr::null_mut());
        assert_eq!(nk_report_passed(ptr::null()), 0);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(nk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
