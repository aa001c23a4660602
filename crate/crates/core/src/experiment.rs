//! Experiment drivers behind the command-line subcommands.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::assembly::{CoefficientField, Source};
use crate::basis::{QuadratureRule, SpectralBasis};
use crate::config::ExperimentConfig;
use crate::energy::{
    acoustic_energy, audit_estimate, coefficient_bounds, data_norms, discrete_energy, energy_record, judge_sweep,
    AuditMode, AuditReport, SweepVerdict,
};
use crate::error::Error;
use crate::integrate::{solve_smgt_linear, solve_westervelt_linearized, BoundaryMode, Trajectory};
use crate::model::ModelParams;
use crate::nonlinear::{
    energy_norm, solve_jmgt, solve_westervelt_nonlinear, NonlinearVariant, PicardReport, SolveError,
};
use crate::output::{fmt_float, write_energy, write_report, write_table, write_trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    SolveLinear,
    SolveJmgt,
    SolveRelaxed,
    SolveWestervelt,
    LimitStudy,
    EnergyAudit,
    Mms,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::SolveLinear,
        Command::SolveJmgt,
        Command::SolveRelaxed,
        Command::SolveWestervelt,
        Command::LimitStudy,
        Command::EnergyAudit,
        Command::Mms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SolveLinear => "solve-linear",
            Command::SolveJmgt => "solve-jmgt",
            Command::SolveRelaxed => "solve-relaxed",
            Command::SolveWestervelt => "solve-westervelt",
            Command::LimitStudy => "limit-study",
            Command::EnergyAudit => "energy-audit",
            Command::Mms => "mms",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown subcommand `{s}`"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a run failed, and which exit code that maps to.
#[derive(Debug)]
pub enum RunError {
    /// Inputs rejected before or while setting up a solve.
    Config(String),
    /// Output could not be written.
    Io(io::Error),
    /// The solver itself failed (degeneracy, divergence, singular step).
    Solver(SolveError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Solver(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Io(e) => write!(f, "output error: {e}"),
            RunError::Solver(e) => write!(f, "solver failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<SolveError> for RunError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Step(inner) => inner.into(),
            other => RunError::Solver(other),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::SingularStep { .. } => RunError::Solver(SolveError::Step(e)),
            other => RunError::Config(other.to_string()),
        }
    }
}

fn basis_for(cfg: &ExperimentConfig) -> Result<SpectralBasis, Error> {
    SpectralBasis::new(cfg.length, cfg.solver.n_modes)
}

/// `ψ* = t³ cos(πx/L)`, a pure first-mode solution with zero initial data.
pub struct Manufactured {
    pub length: f64,
}

impl Manufactured {
    /// Coefficient of `w_1`: `√(L/2) t³`.
    pub fn mode_coefficient(&self, t: f64) -> f64 {
        (self.length / 2.0).sqrt() * t.powi(3)
    }

    /// Forcing for `α ≡ 1`; `second_order` selects the `τ = 0`, `b = δ` form.
    pub fn forcing(&self, params: &ModelParams, second_order: bool) -> Source {
        let (tau, b) = if second_order {
            (0.0, params.delta())
        } else {
            (params.tau(), params.b())
        };
        let c2 = params.c2();
        let kappa = std::f64::consts::PI / self.length;
        let lam = kappa * kappa;
        Source::new(move |x, t| (6.0 * tau + 6.0 * t + lam * (3.0 * b * t * t + c2 * t.powi(3))) * (kappa * x).cos())
    }

    /// `max_m |ξ(t_m) - ξ*(t_m)|`, equal to the sup-in-time `L²` error.
    pub fn error(&self, traj: &Trajectory) -> f64 {
        traj.times
            .iter()
            .zip(&traj.xi)
            .map(|(&t, xi)| {
                let mut e = xi.clone();
                if e.len() > 1 {
                    e[1] -= self.mode_coefficient(t);
                }
                e.norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsRow {
    pub dt: f64,
    pub error: f64,
    pub observed_order: Option<f64>,
}

/// Manufactured-solution convergence over `mms_levels` halvings of `dt`.
/// Uses the second-order solver for the Westervelt variant and the
/// third-order one otherwise; both ends are homogeneous Neumann.
pub fn mms_study(cfg: &ExperimentConfig) -> Result<(Vec<MmsRow>, Trajectory), Error> {
    if cfg.solver.n_modes < 2 {
        return Err(Error::InvalidParameter {
            name: "n_modes",
            rule: ">= 2 for the manufactured solution",
            value: cfg.solver.n_modes as f64,
        });
    }
    let basis = basis_for(cfg)?;
    let second = cfg.variant == NonlinearVariant::Westervelt;
    let ms = Manufactured { length: cfg.length };
    let f = ms.forcing(&cfg.model, second);
    let one = CoefficientField::constant(1.0);
    let g = crate::model::WindowedSignal::zero();
    let runs: Vec<Result<(f64, Trajectory), Error>> = (0..cfg.mms_levels)
        .into_par_iter()
        .map(|level| {
            let dt = cfg.solver.dt / 2f64.powi(level as i32);
            let sc = cfg.solver.with_dt(dt)?;
            let tr = if second {
                solve_westervelt_linearized(&cfg.model, &basis, &one, &f, &g, &sc, BoundaryMode::PureNeumann)?
            } else {
                solve_smgt_linear(&cfg.model, &basis, &one, &f, &g, &sc, BoundaryMode::PureNeumann)?
            };
            Ok((dt, tr))
        })
        .collect();
    let mut rows = Vec::new();
    let mut finest = None;
    for run in runs {
        let (dt, tr) = run?;
        let error = ms.error(&tr);
        let observed_order = rows.last().map(|prev: &MmsRow| (prev.error / error).log2());
        rows.push(MmsRow {
            dt,
            error,
            observed_order,
        });
        finest = Some(tr);
    }
    Ok((rows, finest.expect("at least two levels")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub tau: f64,
    /// `max_m ‖ψ^τ_t - ψ̄_t‖_{L²}`.
    pub e_t: f64,
    /// `τ`-free part of the energy norm of `ψ^τ - ψ̄`.
    pub e_energy: f64,
    pub picard_iterations: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitStudyResult {
    pub rows: Vec<LimitRow>,
    pub reference_iterations: usize,
    pub reference_margin: f64,
}

#[derive(Debug)]
pub struct LimitStudyError {
    /// `None` when the reference solve failed.
    pub tau: Option<f64>,
    pub error: SolveError,
}

impl fmt::Display for LimitStudyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tau {
            Some(t) => write!(f, "member tau = {t:e}: {}", self.error),
            None => write!(f, "reference solve: {}", self.error),
        }
    }
}

pub struct LimitStudyRun {
    pub result: LimitStudyResult,
    pub reference: Trajectory,
    pub members: Vec<Trajectory>,
}

#[allow(clippy::too_many_arguments)]
/// Nonlinear third-order solutions for every `τ` in the sweep against the
/// nonlinear second-order reference. Members run concurrently; rows keep
/// sweep order.
pub fn limit_study(
    params: &ModelParams,
    basis: &SpectralBasis,
    f: &Source,
    g: &crate::model::WindowedSignal,
    config: &crate::model::SolverConfig,
    bc: BoundaryMode,
    variant: NonlinearVariant,
    taus: &[f64],
) -> Result<LimitStudyRun, LimitStudyError> {
    if taus.iter().any(|&t| !(t > 0.0)) || taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LimitStudyError {
            tau: None,
            error: SolveError::Step(Error::InvalidParameter {
                name: "tau_sweep",
                rule: "strictly decreasing and > 0",
                value: f64::NAN,
            }),
        });
    }
    let (reference, members) = rayon::join(
        || solve_westervelt_nonlinear(params, basis, f, g, config, bc),
        || {
            taus.par_iter()
                .map(|&tau| {
                    let p = params.with_tau(tau).map_err(|e| LimitStudyError {
                        tau: Some(tau),
                        error: e.into(),
                    })?;
                    solve_jmgt(&p, basis, f, g, config, bc, variant)
                        .map_err(|error| LimitStudyError { tau: Some(tau), error })
                })
                .collect::<Vec<_>>()
        },
    );
    let (reference, ref_report) = reference.map_err(|error| LimitStudyError { tau: None, error })?;
    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    for (member, &tau) in members.into_iter().zip(taus) {
        let (tr, rep) = member?;
        let diff = tr.difference(&reference).map_err(|e| LimitStudyError {
            tau: Some(tau),
            error: e.into(),
        })?;
        let e_t = diff.dxi.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let e_energy = energy_norm(&diff, basis, 0.0).map_err(|e| LimitStudyError {
            tau: Some(tau),
            error: e.into(),
        })?;
        rows.push(LimitRow {
            tau,
            e_t,
            e_energy,
            picard_iterations: rep.iterations,
            margin: rep.margin(),
        });
        trajectories.push(tr);
    }
    Ok(LimitStudyRun {
        result: LimitStudyResult {
            rows,
            reference_iterations: ref_report.iterations,
            reference_margin: ref_report.margin(),
        },
        reference,
        members: trajectories,
    })
}

/// Audit reports for every `τ` in the sweep (largest first), per mode.
pub struct AuditStudy {
    pub reports: Vec<(AuditMode, Vec<AuditReport>)>,
    pub verdicts: Vec<(AuditMode, SweepVerdict)>,
    pub first: Trajectory,
}

/// Linear third-order runs with `α ≡ 1` across the sweep, audited in all
/// three accountings.
pub fn energy_audit(
    params: &ModelParams,
    basis: &SpectralBasis,
    f: &Source,
    g: &crate::model::WindowedSignal,
    config: &crate::model::SolverConfig,
    bc: BoundaryMode,
    taus: &[f64],
) -> Result<AuditStudy, Error> {
    let one = CoefficientField::constant(1.0);
    let data = data_norms(g, f, basis.length(), config, crate::model::MAX_SIGNAL_ORDER)?;
    let quad = QuadratureRule::with_count(basis.length(), config.quad_points);
    let runs: Vec<Result<Trajectory, Error>> = taus
        .par_iter()
        .map(|&tau| solve_smgt_linear(&params.with_tau(tau)?, basis, &one, f, g, config, bc))
        .collect();
    let runs: Vec<Trajectory> = runs.into_iter().collect::<Result<_, _>>()?;
    let bounds = coefficient_bounds(&one, &quad, &runs[0].times);
    let mut reports = Vec::new();
    let mut verdicts = Vec::new();
    for mode in [AuditMode::TauDependent, AuditMode::TauUniform, AuditMode::Higher] {
        let reps = runs
            .iter()
            .map(|tr| audit_estimate(&energy_record(tr, basis)?, &data, mode, Some(bounds)))
            .collect::<Result<Vec<_>, _>>()?;
        verdicts.push((mode, judge_sweep(&reps)));
        reports.push((mode, reps));
    }
    Ok(AuditStudy {
        reports,
        verdicts,
        first: runs.into_iter().next().expect("non-empty sweep"),
    })
}

fn picard_entries(rep: &PicardReport) -> Vec<(String, String)> {
    let mut e = vec![
        ("iterations".to_string(), rep.iterations.to_string()),
        ("converged".to_string(), rep.converged.to_string()),
    ];
    if let Some(d) = rep.degeneracy {
        e.push(("margin".into(), fmt_float(d.margin)));
        e.push(("margin_time".into(), fmt_float(d.time)));
        e.push(("margin_position".into(), fmt_float(d.position)));
        e.push(("peak_2k_velocity".into(), fmt_float(d.peak)));
    }
    if let Some(q) = rep.max_factor() {
        e.push(("max_factor".into(), fmt_float(q)));
    }
    for (i, d) in rep.differences.iter().enumerate() {
        e.push((format!("difference_{i}"), fmt_float(*d)));
    }
    for (i, q) in rep.factors.iter().enumerate() {
        e.push((format!("factor_{}", i + 1), fmt_float(*q)));
    }
    for (i, w) in rep.warnings.iter().enumerate() {
        e.push((format!("warning_{i}"), w.clone()));
    }
    e
}

fn write_solution(dir: &Path, traj: &Trajectory, basis: &SpectralBasis) -> Result<(), RunError> {
    let rec = energy_record(traj, basis)?;
    let diss = discrete_energy(traj, basis);
    let acoustic = acoustic_energy(traj, basis);
    write_trajectory(&dir.join("trajectory.csv"), traj)?;
    write_energy(
        &dir.join("energy.csv"),
        &rec,
        &[("dissipation_functional", &diss), ("acoustic_energy", &acoustic)],
    )?;
    Ok(())
}

const ARTIFACTS: [&str; 3] = ["trajectory.csv", "energy.csv", "report.csv"];

fn clear_artifacts(dir: &Path) {
    for name in ARTIFACTS {
        let _ = fs::remove_file(dir.join(name));
    }
}

fn fail_with_report(dir: &Path, err: SolveError) -> RunError {
    clear_artifacts(dir);
    let mut entries = vec![
        ("status".to_string(), status_of(&err).to_string()),
        ("message".to_string(), err.to_string()),
    ];
    if let Some(rep) = err.report() {
        entries.extend(picard_entries(rep));
    }
    if let SolveError::NonDegeneracyViolated { margin, .. } = &err {
        entries.retain(|(k, _)| !k.starts_with("margin"));
        entries.push(("margin".into(), fmt_float(margin.margin)));
        entries.push(("margin_time".into(), fmt_float(margin.time)));
        entries.push(("margin_position".into(), fmt_float(margin.position)));
    }
    if let Err(io) = write_report(&dir.join("report.csv"), &entries) {
        return RunError::Io(io);
    }
    RunError::Solver(err)
}

fn status_of(err: &SolveError) -> &'static str {
    match err {
        SolveError::NonDegeneracyViolated { .. } => "non_degeneracy_violated",
        SolveError::Divergence { .. } => "divergence",
        SolveError::Step(_) => "step_failure",
    }
}

/// Runs one subcommand, writing its artifacts into `out`.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<(), RunError> {
    fs::create_dir_all(out)?;
    let basis = basis_for(cfg)?;
    let f = Source::zero();
    let g = &cfg.signal;
    let sc = &cfg.solver;
    let p = &cfg.model;
    match command {
        Command::SolveLinear => {
            let tr =
                solve_smgt_linear(p, &basis, &CoefficientField::constant(1.0), &f, g, sc, cfg.bc).map_err(|e| {
                    match RunError::from(e) {
                        RunError::Solver(s) => fail_with_report(out, s),
                        other => other,
                    }
                })?;
            write_solution(out, &tr, &basis)?;
            let entries = vec![
                ("status".to_string(), "ok".to_string()),
                ("energy_norm".to_string(), fmt_float(energy_norm(&tr, &basis, p.tau())?)),
                ("max_coefficient".to_string(), fmt_float(tr.max_abs())),
            ];
            write_report(&out.join("report.csv"), &entries)?;
        }
        Command::SolveJmgt | Command::SolveRelaxed | Command::SolveWestervelt => {
            let result = match command {
                Command::SolveJmgt => solve_jmgt(p, &basis, &f, g, sc, cfg.bc, NonlinearVariant::FullJmgt),
                Command::SolveRelaxed => solve_jmgt(p, &basis, &f, g, sc, cfg.bc, NonlinearVariant::RelaxedJmgt),
                _ => solve_westervelt_nonlinear(p, &basis, &f, g, sc, cfg.bc),
            };
            let (tr, rep) = match result {
                Ok(v) => v,
                Err(e) => {
                    return Err(match RunError::from(e) {
                        RunError::Solver(s) => fail_with_report(out, s),
                        other => other,
                    })
                }
            };
            write_solution(out, &tr, &basis)?;
            let mut entries = vec![("status".to_string(), "ok".to_string())];
            entries.extend(picard_entries(&rep));
            write_report(&out.join("report.csv"), &entries)?;
        }
        Command::LimitStudy => {
            if cfg.tau_sweep.is_empty() {
                return Err(RunError::Config("limit-study needs a non-empty tau_sweep".into()));
            }
            if cfg.variant == NonlinearVariant::Westervelt {
                return Err(RunError::Config(
                    "limit-study compares a third-order variant (full or relaxed) against the reference".into(),
                ));
            }
            let run = limit_study(p, &basis, &f, g, sc, cfg.bc, cfg.variant, &cfg.tau_sweep).map_err(|e| {
                let tau = e.tau;
                match RunError::from(e.error) {
                    RunError::Solver(s) => {
                        let err = fail_with_report(out, s);
                        if let Some(t) = tau {
                            log::error!("limit-study member tau = {t:e} failed");
                        }
                        err
                    }
                    other => other,
                }
            })?;
            write_solution(out, &run.reference, &basis)?;
            for (i, tr) in run.members.iter().enumerate() {
                let dir = out.join(format!("member_{i:02}"));
                fs::create_dir_all(&dir)?;
                write_solution(&dir, tr, &basis)?;
            }
            let rows: Vec<Vec<String>> = run
                .result
                .rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_float(r.tau),
                        fmt_float(r.e_t),
                        fmt_float(r.e_energy),
                        r.picard_iterations.to_string(),
                        fmt_float(r.margin),
                    ]
                })
                .collect();
            write_table(
                &out.join("report.csv"),
                &["tau", "e_t", "e_energy", "picard_iterations", "margin"],
                &rows,
            )?;
        }
        Command::EnergyAudit => {
            let taus = if cfg.tau_sweep.is_empty() {
                vec![p.tau()]
            } else {
                cfg.tau_sweep.clone()
            };
            let study = energy_audit(p, &basis, &f, g, sc, cfg.bc, &taus)?;
            write_solution(out, &study.first, &basis)?;
            let mut rows = Vec::new();
            for ((mode, reps), (_, verdict)) in study.reports.iter().zip(&study.verdicts) {
                let base = reps[0].ratio;
                for r in reps {
                    let growth = if base > 0.0 { r.ratio / base } else { 1.0 };
                    rows.push(vec![
                        mode.to_string(),
                        fmt_float(r.tau),
                        fmt_float(r.lhs),
                        fmt_float(r.rhs),
                        fmt_float(r.ratio),
                        r.log_constant.map(fmt_float).unwrap_or_default(),
                        fmt_float(growth),
                        verdict
                            .flags
                            .iter()
                            .filter(|fl| fl.contains(&format!("{:e}", r.tau)))
                            .cloned()
                            .collect::<Vec<_>>()
                            .join("; "),
                    ]);
                }
            }
            write_table(
                &out.join("report.csv"),
                &[
                    "mode",
                    "tau",
                    "lhs",
                    "rhs",
                    "ratio",
                    "ln_constant",
                    "ratio_growth",
                    "flag",
                ],
                &rows,
            )?;
        }
        Command::Mms => {
            let (rows, finest) = mms_study(cfg)?;
            write_solution(out, &finest, &basis)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_float(r.dt),
                        fmt_float(r.error),
                        r.observed_order.map(fmt_float).unwrap_or_default(),
                    ]
                })
                .collect();
            write_table(&out.join("report.csv"), &["dt", "error", "observed_order"], &table)?;
        }
    }
    Ok(())
}
