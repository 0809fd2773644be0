use std::ffi::CStr;
use std::ptr;

use coopmsr_ffi::*;

fn params(n: usize, k: usize) -> *mut CmsrParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cmsr_params_new(n, k, 65537, &mut p) }, CmsrStatus::Ok);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cmsr_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn info_and_bounds() {
    let p = params(4, 2);
    let (mut r, mut m, mut ell) = (0, 0, 0);
    let (mut g, mut ga) = (0, 0);
    unsafe {
        assert_eq!(cmsr_params_info(p, &mut r, &mut m, &mut ell), CmsrStatus::Ok);
        assert_eq!(cmsr_repair_bounds(p, &mut g, &mut ga), CmsrStatus::Ok);
        assert_eq!(cmsr_params_info(p, ptr::null_mut(), ptr::null_mut(), &mut ell), CmsrStatus::Ok);
        cmsr_params_free(p);
    }
    assert_eq!((r, m, ell), (2, 6, 64));
    assert_eq!((g, ga), (192, 128));
}

#[test]
fn parameter_errors_map_to_status() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(cmsr_params_new(4, 2, 15, &mut p), CmsrStatus::NotPrime);
        assert!(last_error().contains("not prime"));
        assert_eq!(cmsr_params_new(5, 2, 5, &mut p), CmsrStatus::FieldTooSmall);
        assert_eq!(cmsr_params_new(9, 6, 65537, &mut p), CmsrStatus::GuardExceeded);
        assert_eq!(cmsr_params_new(4, 4, 65537, &mut p), CmsrStatus::InvalidArgument);
        assert_eq!(cmsr_params_new(4, 2, 65537, ptr::null_mut()), CmsrStatus::NullPointer);
        assert_eq!(cmsr_params_info(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), CmsrStatus::NullPointer);
        cmsr_params_free(ptr::null_mut());
    }
    assert!(p.is_null());
}

#[test]
fn encode_decode_repair() {
    let p = params(5, 2);
    let ell = 6561usize;
    let data: Vec<u32> = (0..2 * ell as u32).map(|i| i.wrapping_mul(2654435761) % 65537).collect();
    let mut cw = vec![0u32; 5 * ell];
    unsafe {
        assert_eq!(cmsr_encode(p, data.as_ptr(), data.len(), cw.as_mut_ptr(), cw.len()), CmsrStatus::Ok);
    }
    assert_eq!(&cw[..2 * ell], &data[..]);

    let mut damaged = cw.clone();
    damaged[..ell].fill(0);
    damaged[4 * ell..].fill(7);
    let erased = [1usize, 5];
    unsafe {
        assert_eq!(cmsr_decode(p, damaged.as_mut_ptr(), damaged.len(), erased.as_ptr(), 2), CmsrStatus::Ok);
    }
    assert_eq!(damaged, cw);
    let four = [1usize, 2, 3, 5];
    unsafe {
        assert_eq!(cmsr_decode(p, damaged.as_mut_ptr(), damaged.len(), four.as_ptr(), 4), CmsrStatus::BeyondMdsRadius);
    }

    let (mut a, mut b) = (vec![0u32; ell], vec![0u32; ell]);
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(cmsr_repair(p, cw.as_ptr(), cw.len(), 2, 4, a.as_mut_ptr(), b.as_mut_ptr(), &mut t), CmsrStatus::Ok);
    }
    assert_eq!(&a[..], &cw[ell..2 * ell]);
    assert_eq!(&b[..], &cw[3 * ell..4 * ell]);
    let (mut g, mut ga, mut opt) = (0, 0, 0);
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(cmsr_transcript_counts(t, &mut g, &mut ga, &mut opt), CmsrStatus::Ok);
        assert_eq!(cmsr_transcript_to_json(t, &mut json), CmsrStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        cmsr_string_free(json);
        cmsr_transcript_free(t);
        cmsr_params_free(p);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["gamma"], g);
    }
    // 2(n-1) ell / r and 2(n-2) ell / r
    assert_eq!((g, ga, opt), (8 * 6561 / 3, 6 * 6561 / 3, 1));
}

#[test]
fn bad_buffers_rejected() {
    let p = params(4, 2);
    let data = [0u32; 10];
    let mut out = vec![0u32; 256];
    unsafe {
        assert_eq!(cmsr_encode(p, data.as_ptr(), data.len(), out.as_mut_ptr(), out.len()), CmsrStatus::InvalidArgument);
        assert!(last_error().contains("expected 128"));
        let big = vec![70000u32; 128];
        assert_eq!(cmsr_encode(p, big.as_ptr(), 128, out.as_mut_ptr(), 256), CmsrStatus::InvalidArgument);
        assert_eq!(cmsr_encode(p, ptr::null(), 128, out.as_mut_ptr(), 256), CmsrStatus::NullPointer);
        let (mut a, mut b) = (vec![0u32; 64], vec![0u32; 64]);
        assert_eq!(
            cmsr_repair(p, out.as_ptr(), 256, 3, 3, a.as_mut_ptr(), b.as_mut_ptr(), ptr::null_mut()),
            CmsrStatus::InvalidArgument
        );
        cmsr_params_free(p);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/coopmsr.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["cmsr_params_new", "cmsr_encode", "cmsr_decode", "cmsr_repair", "cmsr_transcript_to_json", "cmsr_last_error"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    if let Ok(status) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).status() {
        assert!(status.success());
    }
}
