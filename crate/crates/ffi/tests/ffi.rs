use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use feeder_ffi::*;

fn last_error() -> String {
    let p = feeder_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn generate_solve_and_report() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(feeder_instance_generate(4, 8, 6 * 3600, &mut inst), FeederStatus::Ok);
        assert_eq!(feeder_instance_riders(inst), 8);

        let mut rep = ptr::null_mut();
        let st = feeder_solve(inst, FeederProblem::MinDist, FeederAlgo::Exact, false, 0.0, &mut rep);
        assert_eq!(st, FeederStatus::Ok);
        assert!(feeder_report_objective(rep) > 0);
        assert!(feeder_report_assigned(rep) > 0);

        let mut csv = ptr::null_mut();
        assert_eq!(feeder_report_csv(rep, true, &mut csv), FeederStatus::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        assert!(text.starts_with("interval,algo,clustered,problem,objective"));
        assert_eq!(text.lines().count(), 3);
        feeder_string_free(csv);

        // JSON round trip gives the same optimum
        let mut json = ptr::null_mut();
        assert_eq!(feeder_instance_to_json(inst, &mut json), FeederStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(feeder_instance_from_json(json, &mut again), FeederStatus::Ok);
        let mut rep2 = ptr::null_mut();
        let st = feeder_solve(again, FeederProblem::MinDist, FeederAlgo::Exact, false, 0.0, &mut rep2);
        assert_eq!(st, FeederStatus::Ok);
        assert_eq!(feeder_report_objective(rep2), feeder_report_objective(rep));

        feeder_string_free(json);
        feeder_report_free(rep);
        feeder_report_free(rep2);
        feeder_instance_free(inst);
        feeder_instance_free(again);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut inst = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(feeder_instance_from_json(bad.as_ptr(), &mut inst), FeederStatus::Config);
        assert!(inst.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            feeder_instance_from_json(ptr::null(), &mut inst),
            FeederStatus::NullArgument
        );

        assert_eq!(feeder_instance_generate(1, 0, 0, &mut inst), FeederStatus::Config);

        assert_eq!(feeder_instance_generate(1, 6, 6 * 3600, &mut inst), FeederStatus::Ok);
        let mut rep = ptr::null_mut();
        let st = feeder_solve(inst, FeederProblem::MinDist, FeederAlgo::LocalSearch, false, 0.0, &mut rep);
        assert_eq!(st, FeederStatus::Config);
        assert!(rep.is_null());
        assert!(last_error().contains("local search"));
        feeder_instance_free(inst);

        assert_eq!(feeder_report_objective(ptr::null()), 0);
        feeder_report_free(ptr::null_mut());
        feeder_instance_free(ptr::null_mut());
        feeder_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/feeder.h")).unwrap();
    for name in [
        "feeder_last_error",
        "feeder_instance_from_json",
        "feeder_instance_generate",
        "feeder_instance_free",
        "feeder_solve",
        "feeder_report_csv",
        "feeder_report_free",
        "feeder_string_free",
        "FEEDER_STATUS_INFEASIBLE",
        "typedef struct FeederInstance FeederInstance",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"feeder.h\"\nint main(void) { FeederInstance *i = 0;\n\
         FeederStatus s = feeder_instance_generate(1, 5, 0, &i);\n\
         feeder_instance_free(i); return s == FEEDER_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    match Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .output()
    {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(e) => eprintln!("no C compiler available, skipping: {e}"),
    }
}
