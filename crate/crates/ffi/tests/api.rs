use std::ffi::CStr;
use std::ptr;

use trcalc_ffi::*;

unsafe fn cells(chart: *const TrcalcChart) -> Vec<(Vec<u64>, i64, Vec<u32>)> {
    (0..trcalc_chart_cell_count(chart))
        .map(|i| {
            let mut c = TrcalcCell { deg: ptr::null(), deg_len: 0, dim: 0, exps: ptr::null(), exps_len: 0 };
            assert_eq!(trcalc_chart_cell(chart, i, &mut c), TrcalcStatus::Ok);
            let deg = std::slice::from_raw_parts(c.deg, c.deg_len).to_vec();
            let exps =
                if c.exps_len == 0 { Vec::new() } else { std::slice::from_raw_parts(c.exps, c.exps_len).to_vec() };
            (deg, c.dim, exps)
        })
        .collect()
}

fn last_error() -> String {
    let e = trcalc_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn tr_chart_through_handles() {
    unsafe {
        let mut chart = ptr::null_mut();
        let s = trcalc_chart_compute(TrcalcTarget::Tr as u32, 2, 3, 1, 4, 6, 0, &mut chart);
        assert_eq!(s, TrcalcStatus::Ok);
        assert!(trcalc_last_error().is_null());
        let all = cells(chart);
        assert!(!all.is_empty());
        for (deg, dim, exps) in &all {
            let d = deg[0];
            let e = if d == 0 { 3 } else { (d.trailing_zeros() + 1).min(3) };
            assert_eq!(exps, &vec![e], "deg {d} dim {dim}");
        }
        let mut json = ptr::null_mut();
        assert_eq!(trcalc_chart_to_json(chart, &mut json), TrcalcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        trcalc_string_free(json);
        let file = trcalc::cli::ChartFile::from_json(&text).unwrap();
        assert_eq!(file.cells.len(), all.len());

        let mut c = TrcalcCell { deg: ptr::null(), deg_len: 0, dim: 0, exps: ptr::null(), exps_len: 0 };
        assert_eq!(trcalc_chart_cell(chart, all.len(), &mut c), TrcalcStatus::Usage);
        assert!(last_error().contains("out of range"));
        trcalc_chart_free(chart);
    }
}

#[test]
fn descent_verify_passes_and_returns_the_page() {
    unsafe {
        let deg = [1u64, 2];
        let mut chart = ptr::null_mut();
        let s = trcalc_descent_verify(2, 2, deg.as_ptr(), deg.len(), 4, 1, 0, 0, &mut chart);
        assert_eq!(s, TrcalcStatus::Ok);
        assert!(trcalc_chart_cell_count(chart) > 0);
        trcalc_chart_free(chart);
    }
}

#[test]
fn smash_homotopy_sizes_then_fills() {
    unsafe {
        let rot = [1u64];
        let mut n = 0;
        assert_eq!(trcalc_smash_homotopy(2, rot.as_ptr(), 1, 2, 3, ptr::null_mut(), 0, &mut n), TrcalcStatus::Ok);
        let mut buf = vec![0u32; n];
        assert_eq!(trcalc_smash_homotopy(2, rot.as_ptr(), 1, 2, 3, buf.as_mut_ptr(), n, &mut n), TrcalcStatus::Ok);
        let v = trcalc::reps::Rep::new(2, vec![1]).unwrap();
        assert_eq!(buf, trcalc::reps::smash_homotopy(&v, 2, 3).exponents());
        assert_eq!(trcalc_smash_homotopy(2, ptr::null(), 0, 3, 0, ptr::null_mut(), 0, &mut n), TrcalcStatus::Ok);
        assert_eq!(n, 1);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut chart = ptr::null_mut();
        assert_eq!(trcalc_chart_compute(0, 4, 1, 1, 1, 1, 0, &mut chart), TrcalcStatus::Usage);
        assert!(chart.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(trcalc_chart_compute(9, 2, 1, 1, 1, 1, 0, &mut chart), TrcalcStatus::Usage);
        assert!(last_error().contains("unknown target"));
        assert_eq!(trcalc_chart_compute(0, 2, 1, 1, 1, 1, 0, ptr::null_mut()), TrcalcStatus::NullPointer);
        assert_eq!(trcalc_descent_verify(2, 2, ptr::null(), 0, 4, 0, 0, 0, &mut chart), TrcalcStatus::NullPointer);
        let deg = [2u64];
        assert_eq!(trcalc_descent_verify(2, 3, deg.as_ptr(), 1, 4, 0, 0, 1, &mut chart), TrcalcStatus::Usage);
        let mut n = 0;
        assert_eq!(trcalc_smash_homotopy(6, deg.as_ptr(), 1, 2, 0, ptr::null_mut(), 0, &mut n), TrcalcStatus::Usage);
        assert_eq!(
            trcalc_smash_homotopy(2, deg.as_ptr(), 1, 2, 0, ptr::null_mut(), 0, ptr::null_mut()),
            TrcalcStatus::NullPointer
        );
        assert_eq!(trcalc_chart_cell_count(ptr::null()), 0);
        trcalc_chart_free(ptr::null_mut());
        trcalc_string_free(ptr::null_mut());
    }
}
