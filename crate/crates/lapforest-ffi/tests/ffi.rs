//! Exercises the C ABI from Rust: handle lifecycle, buffer contracts,
//! error codes, and agreement of the exported routes on known graphs.

use lapforest_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

unsafe fn parse(text: &str) -> *mut LfDigraph {
    let text = CString::new(text).unwrap();
    let mut handle: *mut LfDigraph = ptr::null_mut();
    let status = lf_digraph_parse(text.as_ptr(), &mut handle);
    assert_eq!(status, LfStatus::Ok);
    assert!(!handle.is_null());
    handle
}

unsafe fn last_error() -> String {
    CStr::from_ptr(lf_last_error_message())
        .to_string_lossy()
        .into_owned()
}

#[test]
fn parse_analyze_and_free() {
    unsafe {
        let g = parse("2 2\n0 1 2.0\n1 0 1.0\n");
        assert_eq!(lf_digraph_vertex_count(g), 2);
        assert_eq!(lf_digraph_arc_count(g), 2);

        let mut l = [0.0f64; 4];
        assert_eq!(lf_digraph_laplacian(g, l.as_mut_ptr(), 4), LfStatus::Ok);
        assert_eq!(l, [2.0, -2.0, -1.0, 1.0]);

        let mut d = 0usize;
        assert_eq!(lf_forest_dimension(g, &mut d), LfStatus::Ok);
        assert_eq!(d, 1);

        let mut forest = [0.0f64; 4];
        assert_eq!(lf_forest_matrix(g, forest.as_mut_ptr(), 4), LfStatus::Ok);
        for row in forest.chunks(2) {
            assert!((row[0] - 1.0 / 3.0).abs() < 1e-15);
            assert!((row[1] - 2.0 / 3.0).abs() < 1e-15);
        }

        let mut resolvent = [0.0f64; 4];
        assert_eq!(
            lf_resolvent_projector(g, 0.0, resolvent.as_mut_ptr(), 4),
            LfStatus::Ok
        );
        let mut long_run = [0.0f64; 4];
        assert_eq!(
            lf_long_run_matrix(g, 0.0, LfLongRunMode::Power, long_run.as_mut_ptr(), 4),
            LfStatus::Ok
        );
        for i in 0..4 {
            assert!((resolvent[i] - forest[i]).abs() < 1e-6);
            assert!((long_run[i] - forest[i]).abs() < 1e-8);
        }

        let mut re = [0.0f64; 2];
        let mut im = [0.0f64; 2];
        assert_eq!(lf_spectrum(g, re.as_mut_ptr(), im.as_mut_ptr(), 2), LfStatus::Ok);
        assert!(re[0].abs() < 1e-12 && im[0].abs() < 1e-12);
        assert!((re[1] - 3.0).abs() < 1e-12 && im[1].abs() < 1e-12);

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(lf_analyze_json(g, 0.0, 0.0, &mut json), LfStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        let value: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(value["all_checks_pass"], serde_json::Value::Bool(true));
        assert_eq!(value["components"]["forest_dimension"], 1);
        lf_string_free(json);

        lf_digraph_free(g);
    }
}

#[test]
fn simulation_csv_round_trip() {
    unsafe {
        let g = parse("3 2\n2 1\n1 0\n");
        let x0 = [5.0f64, 0.0, 0.0];

        let mut csv: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            lf_simulate_discrete_csv(g, 0.0, x0.as_ptr(), 3, 200, &mut csv),
            LfStatus::Ok
        );
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        lf_string_free(csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x0,x1,x2");
        assert_eq!(lines.len(), 202);
        let last: Vec<f64> = lines[201].split(',').skip(1).map(|s| s.parse().unwrap()).collect();
        for value in last {
            assert!((value - 5.0).abs() < 1e-6);
        }

        let mut csv: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            lf_simulate_continuous_csv(g, x0.as_ptr(), 3, 20.0, 0.0, &mut csv),
            LfStatus::Ok
        );
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        lf_string_free(csv);
        let last: Vec<f64> = text
            .lines()
            .last()
            .unwrap()
            .split(',')
            .skip(1)
            .map(|s| s.parse().unwrap())
            .collect();
        for value in last {
            assert!((value - 5.0).abs() < 1e-6);
        }

        lf_digraph_free(g);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        // Null arguments.
        let mut handle: *mut LfDigraph = ptr::null_mut();
        assert_eq!(
            lf_digraph_parse(ptr::null(), &mut handle),
            LfStatus::InvalidArgument
        );

        // Parse failure carries the line number.
        let text = CString::new("2 1\n0 0 1.0\n").unwrap();
        assert_eq!(
            lf_digraph_parse(text.as_ptr(), &mut handle),
            LfStatus::ParseError
        );
        let message = last_error();
        assert!(message.contains("line 2"), "{message}");
        assert!(message.contains("self-loop"), "{message}");

        // Wrong buffer length.
        let g = parse("2 1\n1 0\n");
        let mut too_small = [0.0f64; 2];
        assert_eq!(
            lf_digraph_laplacian(g, too_small.as_mut_ptr(), 2),
            LfStatus::BadBufferLength
        );

        // Beyond the enumeration limit.
        let mut arcs = String::new();
        for v in 1..13 {
            arcs.push_str(&format!("{v} 0\n"));
        }
        let big = parse(&format!("13 12\n{arcs}"));
        let mut buf = vec![0.0f64; 13 * 13];
        assert_eq!(
            lf_forest_matrix(big, buf.as_mut_ptr(), buf.len()),
            LfStatus::TooLarge
        );

        // Power mode on a periodic matrix (epsilon = 1 on the 2-cycle).
        let cyc = parse("2 2\n0 1\n1 0\n");
        let mut out = [0.0f64; 4];
        assert_eq!(
            lf_long_run_matrix(cyc, 1.0, LfLongRunMode::Power, out.as_mut_ptr(), 4),
            LfStatus::PreconditionViolated
        );
        assert_eq!(
            lf_long_run_matrix(cyc, 1.0, LfLongRunMode::Cesaro, out.as_mut_ptr(), 4),
            LfStatus::Ok
        );
        for value in out {
            assert!((value - 0.5).abs() < 1e-4);
        }

        // Unstable continuous step.
        let mut csv: *mut std::ffi::c_char = ptr::null_mut();
        let x0 = [0.0f64, 1.0];
        assert_eq!(
            lf_simulate_continuous_csv(cyc, x0.as_ptr(), 2, 1.0, 0.9, &mut csv),
            LfStatus::PreconditionViolated
        );

        lf_digraph_free(g);
        lf_digraph_free(big);
        lf_digraph_free(cyc);
    }
}

#[test]
fn header_is_generated_with_the_exported_symbols() {
    let header = std::fs::read_to_string(format!(
        "{}/include/lapforest.h",
        env!("CARGO_MANIFEST_DIR")
    ))
    .expect("cbindgen wrote include/lapforest.h");
    for symbol in [
        "lf_digraph_parse",
        "lf_digraph_free",
        "lf_digraph_laplacian",
        "lf_forest_matrix",
        "lf_resolvent_projector",
        "lf_long_run_matrix",
        "lf_spectrum",
        "lf_analyze_json",
        "lf_simulate_discrete_csv",
        "lf_simulate_continuous_csv",
        "lf_string_free",
        "lf_last_error_message",
        "typedef struct LfDigraph LfDigraph",
    ] {
        assert!(header.contains(symbol), "header missing `{symbol}`");
    }
}
