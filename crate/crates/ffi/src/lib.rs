//! C ABI over `jmgt_lab`.
//!
//! Every fallible call returns a `JmgtStatus`. On anything but
//! `JMGT_STATUS_OK` a message is available from `jmgt_last_error_message`
//! on the same thread. Configs and solutions are opaque handles owned by the
//! caller and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use jmgt_lab::assembly::{CoefficientField, Source};
use jmgt_lab::basis::SpectralBasis;
use jmgt_lab::config::{parse_config, parse_config_str, ExperimentConfig};
use jmgt_lab::experiment::{run, Command, RunError};
use jmgt_lab::integrate::{solve_smgt_linear, Trajectory};
use jmgt_lab::nonlinear::{solve_jmgt, solve_westervelt_nonlinear, NonlinearVariant, SolveError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JmgtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    Io = 5,
    NonDegeneracy = 6,
    Divergence = 7,
    StepFailure = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JmgtSolver {
    Linear = 0,
    Full = 1,
    Relaxed = 2,
    Westervelt = 3,
}

/// Which time derivative of the modal coefficients to read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JmgtSeries {
    Value = 0,
    Velocity = 1,
    Acceleration = 2,
}

/// Parsed experiment config.
pub struct JmgtConfig {
    inner: ExperimentConfig,
}

/// Solved trajectory together with the basis it lives in.
pub struct JmgtSolution {
    traj: Trajectory,
    basis: SpectralBasis,
    picard_iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: JmgtStatus, msg: impl std::fmt::Display) -> JmgtStatus {
    set_error(msg.to_string());
    status
}

fn guard(f: impl FnOnce() -> JmgtStatus) -> JmgtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(JmgtStatus::Panic, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, JmgtStatus> {
    if p.is_null() {
        return Err(fail(JmgtStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(JmgtStatus::InvalidUtf8, e))
}

fn solve_status(e: &SolveError) -> JmgtStatus {
    match e {
        SolveError::NonDegeneracyViolated { .. } => JmgtStatus::NonDegeneracy,
        SolveError::Divergence { .. } => JmgtStatus::Divergence,
        SolveError::Step(jmgt_lab::Error::SingularStep { .. }) => JmgtStatus::StepFailure,
        SolveError::Step(_) => JmgtStatus::InvalidArgument,
    }
}

fn run_status(e: &RunError) -> JmgtStatus {
    match e {
        RunError::Config(_) => JmgtStatus::Config,
        RunError::Io(_) => JmgtStatus::Io,
        RunError::Solver(s) => solve_status(s),
    }
}

/// Message for the last failed call on this thread. Empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn jmgt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jmgt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn store_config(parsed: Result<ExperimentConfig, String>, out: *mut *mut JmgtConfig) -> JmgtStatus {
    match parsed {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(JmgtConfig { inner }));
            JmgtStatus::Ok
        }
        Err(msg) => fail(JmgtStatus::Config, msg),
    }
}

/// Parses config text. On success `*out` receives a handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn jmgt_config_from_str(text: *const c_char, out: *mut *mut JmgtConfig) -> JmgtStatus {
    guard(|| {
        if out.is_null() {
            return fail(JmgtStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        store_config(parse_config_str(text).map(|p| p.config).map_err(|e| e.to_string()), out)
    })
}

/// Reads and parses a config file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn jmgt_config_from_file(path: *const c_char, out: *mut *mut JmgtConfig) -> JmgtStatus {
    guard(|| {
        if out.is_null() {
            return fail(JmgtStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let path = match str_arg(path) {
            Ok(t) => t,
            Err(s) => return s,
        };
        store_config(
            parse_config(Path::new(path))
                .map(|p| p.config)
                .map_err(|e| e.to_string()),
            out,
        )
    })
}

/// # Safety
/// `cfg` must be null or a handle from `jmgt_config_from_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jmgt_config_free(cfg: *mut JmgtConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs one solver on the config's data. On success `*out` receives a
/// solution handle; on solver failure nothing is allocated.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solve(
    cfg: *const JmgtConfig,
    solver: JmgtSolver,
    out: *mut *mut JmgtSolution,
) -> JmgtStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            return fail(JmgtStatus::NullPointer, "null config or output pointer");
        }
        *out = ptr::null_mut();
        let c = &(*cfg).inner;
        let basis = match SpectralBasis::new(c.length, c.solver.n_modes) {
            Ok(b) => b,
            Err(e) => return fail(JmgtStatus::InvalidArgument, e),
        };
        let f = Source::zero();
        let result = match solver {
            JmgtSolver::Linear => solve_smgt_linear(
                &c.model,
                &basis,
                &CoefficientField::constant(1.0),
                &f,
                &c.signal,
                &c.solver,
                c.bc,
            )
            .map(|t| (t, 0))
            .map_err(SolveError::Step),
            JmgtSolver::Full => solve_jmgt(
                &c.model,
                &basis,
                &f,
                &c.signal,
                &c.solver,
                c.bc,
                NonlinearVariant::FullJmgt,
            )
            .map(|(t, r)| (t, r.iterations)),
            JmgtSolver::Relaxed => solve_jmgt(
                &c.model,
                &basis,
                &f,
                &c.signal,
                &c.solver,
                c.bc,
                NonlinearVariant::RelaxedJmgt,
            )
            .map(|(t, r)| (t, r.iterations)),
            JmgtSolver::Westervelt => solve_westervelt_nonlinear(&c.model, &basis, &f, &c.signal, &c.solver, c.bc)
                .map(|(t, r)| (t, r.iterations)),
        };
        match result {
            Ok((traj, picard_iterations)) => {
                *out = Box::into_raw(Box::new(JmgtSolution {
                    traj,
                    basis,
                    picard_iterations,
                }));
                JmgtStatus::Ok
            }
            Err(e) => fail(solve_status(&e), e),
        }
    })
}

/// # Safety
/// `sol` must be null or a handle from `jmgt_solve` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_free(sol: *mut JmgtSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of stored time levels, including `t = 0`. Zero for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_steps(sol: *const JmgtSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.traj.len())
}

/// Number of modes. Zero for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_modes(sol: *const JmgtSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.traj.modes())
}

/// Fixed-point iterations used; zero for the linear solver.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_picard_iterations(sol: *const JmgtSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.picard_iterations)
}

/// Copies the time grid into `buf`, which must hold `jmgt_solution_steps`
/// values.
///
/// # Safety
/// `sol` must be a live solution handle and `buf` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_times(sol: *const JmgtSolution, buf: *mut f64, len: usize) -> JmgtStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else {
            return fail(JmgtStatus::NullPointer, "null solution");
        };
        if buf.is_null() {
            return fail(JmgtStatus::NullPointer, "null buffer");
        }
        if len < s.traj.len() {
            return fail(
                JmgtStatus::InvalidArgument,
                format!("buffer holds {len}, need {}", s.traj.len()),
            );
        }
        ptr::copy_nonoverlapping(s.traj.times.as_ptr(), buf, s.traj.len());
        JmgtStatus::Ok
    })
}

/// Copies the modal coefficients of one series at time level `step` into
/// `buf`, which must hold `jmgt_solution_modes` values.
///
/// # Safety
/// `sol` must be a live solution handle and `buf` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_coefficients(
    sol: *const JmgtSolution,
    step: usize,
    series: JmgtSeries,
    buf: *mut f64,
    len: usize,
) -> JmgtStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else {
            return fail(JmgtStatus::NullPointer, "null solution");
        };
        if buf.is_null() {
            return fail(JmgtStatus::NullPointer, "null buffer");
        }
        if step >= s.traj.len() {
            return fail(
                JmgtStatus::InvalidArgument,
                format!("step {step} out of range ({} levels)", s.traj.len()),
            );
        }
        let n = s.traj.modes();
        if len < n {
            return fail(JmgtStatus::InvalidArgument, format!("buffer holds {len}, need {n}"));
        }
        let v = match series {
            JmgtSeries::Value => &s.traj.xi[step],
            JmgtSeries::Velocity => &s.traj.dxi[step],
            JmgtSeries::Acceleration => &s.traj.ddxi[step],
        };
        ptr::copy_nonoverlapping(v.as_ptr(), buf, n);
        JmgtStatus::Ok
    })
}

/// Evaluates `∂ₓ^deriv ψ(x)` at time level `step`.
///
/// # Safety
/// `sol` must be a live solution handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn jmgt_solution_eval(
    sol: *const JmgtSolution,
    step: usize,
    x: f64,
    deriv: usize,
    out: *mut f64,
) -> JmgtStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else {
            return fail(JmgtStatus::NullPointer, "null solution");
        };
        if out.is_null() {
            return fail(JmgtStatus::NullPointer, "null output pointer");
        }
        if step >= s.traj.len() {
            return fail(
                JmgtStatus::InvalidArgument,
                format!("step {step} out of range ({} levels)", s.traj.len()),
            );
        }
        let length = s.basis.length();
        if !(0.0..=length).contains(&x) {
            return fail(
                JmgtStatus::InvalidArgument,
                format!("position {x} outside [0, {length}]"),
            );
        }
        if deriv > 2 {
            return fail(
                JmgtStatus::InvalidArgument,
                format!("derivative order {deriv} not available (0, 1 or 2)"),
            );
        }
        *out = s.basis.synthesize(s.traj.xi[step].as_slice(), x, deriv);
        JmgtStatus::Ok
    })
}

/// Runs a named subcommand (`solve-linear`, `mms`, ...) and writes its CSV
/// artifacts into `out_dir`, as the command-line tool does.
///
/// # Safety
/// `command` and `out_dir` must be valid NUL-terminated strings and `cfg` a
/// live config handle.
#[no_mangle]
pub unsafe extern "C" fn jmgt_run(
    command: *const c_char,
    cfg: *const JmgtConfig,
    out_dir: *const c_char,
) -> JmgtStatus {
    guard(|| {
        let Some(c) = cfg.as_ref() else {
            return fail(JmgtStatus::NullPointer, "null config");
        };
        let (name, dir) = match (str_arg(command), str_arg(out_dir)) {
            (Ok(n), Ok(d)) => (n, d),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let cmd: Command = match name.parse() {
            Ok(c) => c,
            Err(e) => return fail(JmgtStatus::InvalidArgument, e),
        };
        match run(cmd, &c.inner, Path::new(dir)) {
            Ok(()) => JmgtStatus::Ok,
            Err(e) => fail(run_status(&e), e),
        }
    })
}
