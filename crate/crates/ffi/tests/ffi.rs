use std::ffi::{CStr, CString};
use std::ptr;

use jmgt_lab_ffi::*;

fn config_text(amplitude: f64) -> CString {
    CString::new(format!(
        "\
[model]
c2 = 1
delta = 0.2
tau = 0.05
k = 1
beta = 0.5

[signal]
amplitude = {amplitude}
omega = 4
power = 5
decay = 1

[discretization]
dt = 0.01
t_final = 0.5
n_modes = 6

[experiment]
bc = mixed
"
    ))
    .unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(jmgt_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn config(amplitude: f64) -> *mut JmgtConfig {
    let mut cfg = ptr::null_mut();
    let text = config_text(amplitude);
    assert_eq!(
        unsafe { jmgt_config_from_str(text.as_ptr(), &mut cfg) },
        JmgtStatus::Ok,
        "{}",
        last_error()
    );
    assert!(!cfg.is_null());
    cfg
}

#[test]
fn solve_and_read_back() {
    let cfg = config(0.3);
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(
            jmgt_solve(cfg, JmgtSolver::Full, &mut sol),
            JmgtStatus::Ok,
            "{}",
            last_error()
        );
        let steps = jmgt_solution_steps(sol);
        let modes = jmgt_solution_modes(sol);
        assert_eq!((steps, modes), (51, 6));
        assert!(jmgt_solution_picard_iterations(sol) >= 2);

        let mut times = vec![0.0; steps];
        assert_eq!(jmgt_solution_times(sol, times.as_mut_ptr(), steps), JmgtStatus::Ok);
        assert_eq!(times[0], 0.0);
        assert!((times[steps - 1] - 0.5).abs() < 1e-12);

        let mut xi = vec![0.0; modes];
        assert_eq!(
            jmgt_solution_coefficients(sol, steps - 1, JmgtSeries::Value, xi.as_mut_ptr(), modes),
            JmgtStatus::Ok
        );
        assert!(xi.iter().any(|v| *v != 0.0));

        // synthesis at x = 0 equals the cosine-basis sum
        let l = std::f64::consts::PI;
        let expected = xi[0] / l.sqrt() + xi[1..].iter().map(|c| c * (2.0 / l).sqrt()).sum::<f64>();
        let mut psi = 0.0;
        assert_eq!(jmgt_solution_eval(sol, steps - 1, 0.0, 0, &mut psi), JmgtStatus::Ok);
        assert!((psi - expected).abs() < 1e-12);

        jmgt_solution_free(sol);
        jmgt_config_free(cfg);
    }
}

#[test]
fn bounds_are_checked() {
    let cfg = config(0.3);
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(jmgt_solve(cfg, JmgtSolver::Linear, &mut sol), JmgtStatus::Ok);
        assert_eq!(jmgt_solution_picard_iterations(sol), 0);
        let mut buf = [0.0; 2];
        assert_eq!(
            jmgt_solution_coefficients(sol, 0, JmgtSeries::Velocity, buf.as_mut_ptr(), 2),
            JmgtStatus::InvalidArgument
        );
        assert!(last_error().contains("need 6"));
        let mut big = [0.0; 6];
        assert_eq!(
            jmgt_solution_coefficients(sol, 10_000, JmgtSeries::Value, big.as_mut_ptr(), 6),
            JmgtStatus::InvalidArgument
        );
        let mut v = 0.0;
        assert_eq!(jmgt_solution_eval(sol, 0, -1.0, 0, &mut v), JmgtStatus::InvalidArgument);
        assert_eq!(jmgt_solution_eval(sol, 0, 1.0, 3, &mut v), JmgtStatus::InvalidArgument);
        assert_eq!(jmgt_solution_times(sol, ptr::null_mut(), 0), JmgtStatus::NullPointer);
        jmgt_solution_free(sol);
        jmgt_config_free(cfg);
    }
}

#[test]
fn degenerate_data_reports_status() {
    let cfg = config(400.0);
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(jmgt_solve(cfg, JmgtSolver::Full, &mut sol), JmgtStatus::NonDegeneracy);
        assert!(sol.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(jmgt_solve(cfg, JmgtSolver::Relaxed, &mut sol), JmgtStatus::Ok);
        jmgt_solution_free(sol);
        jmgt_config_free(cfg);
    }
}

#[test]
fn config_errors_carry_the_line() {
    let text = CString::new(config_text(0.3).to_str().unwrap().replace("tau = 0.05", "tau = -1")).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { jmgt_config_from_str(text.as_ptr(), &mut cfg) },
        JmgtStatus::Config
    );
    assert!(cfg.is_null());
    assert!(last_error().contains("line 4"), "{}", last_error());

    let missing = CString::new("/nonexistent/run.cfg").unwrap();
    assert_eq!(
        unsafe { jmgt_config_from_file(missing.as_ptr(), &mut cfg) },
        JmgtStatus::Config
    );
}

#[test]
fn null_arguments() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(jmgt_config_from_str(ptr::null(), &mut cfg), JmgtStatus::NullPointer);
        assert_eq!(
            jmgt_config_from_str(c"".as_ptr(), ptr::null_mut()),
            JmgtStatus::NullPointer
        );
        let mut sol = ptr::null_mut();
        assert_eq!(
            jmgt_solve(ptr::null(), JmgtSolver::Linear, &mut sol),
            JmgtStatus::NullPointer
        );
        assert_eq!(jmgt_solution_steps(ptr::null()), 0);
        jmgt_config_free(ptr::null_mut());
        jmgt_solution_free(ptr::null_mut());
    }
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    let cfg = config(0.3);
    unsafe {
        assert_eq!(
            jmgt_run(c"solve-westervelt".as_ptr(), cfg, out.as_ptr()),
            JmgtStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(
            jmgt_run(c"nope".as_ptr(), cfg, out.as_ptr()),
            JmgtStatus::InvalidArgument
        );
        jmgt_config_free(cfg);
    }
    for f in ["trajectory.csv", "energy.csv", "report.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/jmgt_lab.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct JmgtConfig JmgtConfig;"));
    assert!(header.contains("JMGT_STATUS_NON_DEGENERACY = 6"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(jmgt_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
