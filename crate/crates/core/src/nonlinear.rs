//! Fixed-point solvers for the nonlinear models.
//!
//! Each Picard iterate freezes the coefficient `α = map(ψ_t)` from the
//! previous whole-horizon trajectory and re-solves the linear problem. The
//! loop starts from `ψ ≡ 0` (`α ≡ 1`) and stops once successive iterates
//! differ by less than `picard_tol` in the energy norm
//!
//! ```text
//! |||v|||² = τ²‖v_ttt‖²_{L²(H¹)*} + τ‖v_tt‖²_{L∞L²} + ‖v_tt‖²_{L²L²} + ‖v_t‖²_{L∞H¹}
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::assembly::{CoefficientField, CoefficientMap, Source};
use crate::basis::{norm_sq, Space, SpectralBasis};
use crate::error::Error;
use crate::integrate::{solve_smgt_linear, solve_westervelt_linearized, BoundaryMode, Trajectory};
use crate::model::{validate_compatibility, ModelParams, SolverConfig, WindowedSignal};

/// Margin below which a run is flagged as close to degenerate.
pub const DEGENERACY_WARN_MARGIN: f64 = 0.1;

/// `h(s) = 1 - clamp(2ks, -1, 1)`, with range `[0, 2]`.
pub fn clamp_h(s: f64, k: f64) -> f64 {
    1.0 - (2.0 * k * s).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonlinearVariant {
    /// `α = 1 - 2kψ_t`, third order.
    FullJmgt,
    /// `α = h(ψ_t)`, third order.
    RelaxedJmgt,
    /// `α = 1 - 2kψ_t`, `τ = 0`.
    Westervelt,
}

impl NonlinearVariant {
    pub fn coefficient_map(self, k: f64) -> CoefficientMap {
        match self {
            NonlinearVariant::RelaxedJmgt => CoefficientMap::Clamped { k },
            _ => CoefficientMap::Linear { k },
        }
    }

    /// Whether a non-positive coefficient aborts the run.
    pub fn guards_degeneracy(self) -> bool {
        !matches!(self, NonlinearVariant::RelaxedJmgt)
    }
}

impl FromStr for NonlinearVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "jmgt" | "fulljmgt" => Ok(NonlinearVariant::FullJmgt),
            "relaxed" | "relaxedjmgt" => Ok(NonlinearVariant::RelaxedJmgt),
            "westervelt" => Ok(NonlinearVariant::Westervelt),
            other => Err(format!(
                "unknown variant `{other}` (expected full, relaxed or westervelt)"
            )),
        }
    }
}

impl fmt::Display for NonlinearVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonlinearVariant::FullJmgt => "full",
            NonlinearVariant::RelaxedJmgt => "relaxed",
            NonlinearVariant::Westervelt => "westervelt",
        })
    }
}

/// Minimum of `1 - 2kψ_t` over the evaluation grid and all stored steps,
/// with its location, plus the peak of `|2kψ_t|` (the clamp saturates once
/// this reaches 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyMargin {
    pub margin: f64,
    pub time: f64,
    pub position: f64,
    pub peak: f64,
}

/// Evaluates `1 - 2kψ_t(x, t_m)` on `eval_grid` equispaced points (ends
/// included) at every stored step.
pub fn degeneracy_check(traj: &Trajectory, basis: &SpectralBasis, k: f64, eval_grid: usize) -> DegeneracyMargin {
    let mut worst = DegeneracyMargin {
        margin: 1.0,
        time: 0.0,
        position: 0.0,
        peak: 0.0,
    };
    if k == 0.0 {
        return worst;
    }
    let pts = eval_grid.max(2);
    let xs: Vec<f64> = (0..pts).map(|j| basis.length() * j as f64 / (pts - 1) as f64).collect();
    let table: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| (0..basis.len()).map(|i| basis.value(i, x, 0)).collect())
        .collect();
    for (m, v) in traj.dxi.iter().enumerate() {
        for (row, &x) in table.iter().zip(&xs) {
            let psi_t: f64 = row.iter().zip(v.iter()).map(|(w, c)| w * c).sum();
            let margin = 1.0 - 2.0 * k * psi_t;
            worst.peak = worst.peak.max((2.0 * k * psi_t).abs());
            if margin < worst.margin {
                worst.margin = margin;
                worst.time = traj.times[m];
                worst.position = x;
            }
        }
    }
    worst
}

/// Per-iteration history of the fixed-point loop.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PicardReport {
    pub iterations: usize,
    /// `d_m = |||ψ^{m+1} - ψ^m|||`.
    pub differences: Vec<f64>,
    /// `q_m = d_m / d_{m-1}` for `m >= 1` with `d_{m-1} > 0`.
    pub factors: Vec<f64>,
    /// `|||ψ^{m+1}|||` for every iterate produced.
    pub iterate_norms: Vec<f64>,
    pub converged: bool,
    pub degeneracy: Option<DegeneracyMargin>,
    pub warnings: Vec<String>,
}

impl PicardReport {
    pub fn max_factor(&self) -> Option<f64> {
        self.factors.iter().copied().reduce(f64::max)
    }

    pub fn margin(&self) -> f64 {
        self.degeneracy.map_or(1.0, |d| d.margin)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("coefficient 1 - 2kψ_t degenerates: margin {} at t = {}, x = {}", .margin.margin, .margin.time, .margin.position)]
    NonDegeneracyViolated {
        margin: DegeneracyMargin,
        report: PicardReport,
    },

    #[error("fixed-point iteration did not converge in {} iterations (last difference {:e})", .report.iterations, .report.differences.last().copied().unwrap_or(f64::NAN))]
    Divergence { report: PicardReport },

    #[error(transparent)]
    Step(#[from] Error),
}

impl SolveError {
    pub fn report(&self) -> Option<&PicardReport> {
        match self {
            SolveError::NonDegeneracyViolated { report, .. } | SolveError::Divergence { report } => Some(report),
            SolveError::Step(_) => None,
        }
    }
}

/// Squared `|||·|||` norm of a trajectory; `τ`-weighted terms are dropped
/// when `τ = 0`. Time integrals by trapezoid, sup norms by max over steps.
pub fn energy_norm_sq(traj: &Trajectory, basis: &SpectralBasis, tau: f64) -> Result<f64, Error> {
    let dt = traj.dt;
    let trap = |vals: &[f64]| -> f64 {
        if vals.len() < 2 {
            return 0.0;
        }
        dt * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]))
    };
    let tt_l2: Vec<f64> = traj
        .ddxi
        .iter()
        .map(|v| norm_sq(v.as_slice(), basis, Space::L2))
        .collect();
    let t_h1 = traj
        .dxi
        .iter()
        .map(|v| norm_sq(v.as_slice(), basis, Space::H1))
        .fold(0.0, f64::max);
    let mut total = trap(&tt_l2) + t_h1;
    if tau > 0.0 {
        let third = traj.dddxi.as_ref().ok_or(Error::MissingThirdDerivative)?;
        let dual: Vec<f64> = third
            .iter()
            .map(|v| norm_sq(v.as_slice(), basis, Space::H1Dual))
            .collect();
        total += tau * tau * trap(&dual) + tau * tt_l2.iter().copied().fold(0.0, f64::max);
    }
    Ok(total)
}

pub fn energy_norm(traj: &Trajectory, basis: &SpectralBasis, tau: f64) -> Result<f64, Error> {
    energy_norm_sq(traj, basis, tau).map(f64::sqrt)
}

fn linear_solve(
    variant: NonlinearVariant,
    params: &ModelParams,
    basis: &SpectralBasis,
    field: &CoefficientField,
    f: &Source,
    g: &WindowedSignal,
    config: &SolverConfig,
    bc: BoundaryMode,
) -> Result<Trajectory, Error> {
    match variant {
        NonlinearVariant::Westervelt => solve_westervelt_linearized(params, basis, field, f, g, config, bc),
        _ => solve_smgt_linear(params, basis, field, f, g, config, bc),
    }
}

fn picard(
    params: &ModelParams,
    basis: &SpectralBasis,
    f: &Source,
    g: &WindowedSignal,
    config: &SolverConfig,
    bc: BoundaryMode,
    variant: NonlinearVariant,
) -> Result<(Trajectory, PicardReport), SolveError> {
    let tau = if variant == NonlinearVariant::Westervelt {
        0.0
    } else {
        params.tau()
    };
    if variant != NonlinearVariant::Westervelt && params.tau() <= 0.0 {
        return Err(Error::NonPositiveTau(params.tau()).into());
    }
    let required = if variant == NonlinearVariant::Westervelt { 2 } else { 3 };
    let violations = validate_compatibility(g, required);
    if !violations.is_empty() {
        return Err(Error::Compatibility { orders: violations }.into());
    }
    let map = variant.coefficient_map(params.k());
    let mut report = PicardReport::default();

    let mut previous: Option<Trajectory> = None;
    loop {
        let field = match &previous {
            None => CoefficientField::constant(1.0),
            Some(tr) => {
                if variant.guards_degeneracy() {
                    let margin = degeneracy_check(tr, basis, params.k(), config.eval_grid);
                    if margin.margin <= 0.0 {
                        report.degeneracy = Some(margin);
                        return Err(SolveError::NonDegeneracyViolated { margin, report });
                    }
                }
                CoefficientField::from_trajectory(tr, basis, map)
            }
        };
        let next = linear_solve(variant, params, basis, &field, f, g, config, bc)?;
        report.iterations += 1;
        report.iterate_norms.push(energy_norm(&next, basis, tau)?);

        let diff = match &previous {
            None => energy_norm(&next, basis, tau)?,
            Some(prev) => energy_norm(&next.difference(prev)?, basis, tau)?,
        };
        if let Some(&last) = report.differences.last() {
            if last > 0.0 {
                report.factors.push(diff / last);
            }
        }
        report.differences.push(diff);

        if !diff.is_finite() {
            return Err(SolveError::Divergence { report });
        }
        if diff < config.picard_tol {
            report.converged = true;
            let margin = degeneracy_check(&next, basis, params.k(), config.eval_grid);
            report.degeneracy = Some(margin);
            if variant.guards_degeneracy() && margin.margin <= 0.0 {
                return Err(SolveError::NonDegeneracyViolated { margin, report });
            }
            if margin.margin < DEGENERACY_WARN_MARGIN {
                report.warnings.push(format!(
                    "degeneracy margin {:.3e} below {DEGENERACY_WARN_MARGIN} at t = {}",
                    margin.margin, margin.time
                ));
                log::warn!("{}", report.warnings.last().unwrap());
            }
            return Ok((next, report));
        }
        if report.iterations >= config.picard_max {
            report.degeneracy = Some(degeneracy_check(&next, basis, params.k(), config.eval_grid));
            return Err(SolveError::Divergence { report });
        }
        previous = Some(next);
    }
}

/// Third-order nonlinear solve (full or relaxed coefficient).
#[allow(clippy::too_many_arguments)]
pub fn solve_jmgt(
    params: &ModelParams,
    basis: &SpectralBasis,
    f: &Source,
    g: &WindowedSignal,
    config: &SolverConfig,
    bc: BoundaryMode,
    variant: NonlinearVariant,
) -> Result<(Trajectory, PicardReport), SolveError> {
    picard(params, basis, f, g, config, bc, variant)
}

/// Nonlinear second-order reference solve; the `τ`-weighted parts of the
/// energy norm are dropped.
pub fn solve_westervelt_nonlinear(
    params: &ModelParams,
    basis: &SpectralBasis,
    f: &Source,
    g: &WindowedSignal,
    config: &SolverConfig,
    bc: BoundaryMode,
) -> Result<(Trajectory, PicardReport), SolveError> {
    picard(params, basis, f, g, config, bc, NonlinearVariant::Westervelt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_h(0.0, 3.0), 1.0);
        assert_abs_diff_eq!(clamp_h(0.2, 1.0), 0.6, epsilon = 1e-15);
        assert_eq!(clamp_h(10.0, 1.0), 0.0);
        assert_eq!(clamp_h(-10.0, 1.0), 2.0);
    }

    #[test]
    fn margin_of_zero_and_linear_cases() {
        let basis = SpectralBasis::new(PI, 3).unwrap();
        let p = ModelParams::new(1.0, 0.1, 0.1, 0.5, 0.0).unwrap();
        let z = vec![DVector::zeros(3); 4];
        let tr = Trajectory::from_series(0.1, z.clone(), z.clone(), z.clone(), BoundaryMode::PureNeumann, p).unwrap();
        assert_eq!(degeneracy_check(&tr, &basis, 0.5, 25).margin, 1.0);

        let v: Vec<_> = (0..4).map(|m| DVector::from_vec(vec![0.0, m as f64, 0.0])).collect();
        let tr = Trajectory::from_series(0.1, z.clone(), v, z, BoundaryMode::PureNeumann, p).unwrap();
        assert_eq!(degeneracy_check(&tr, &basis, 0.0, 25).margin, 1.0);
    }

    #[test]
    fn margin_of_single_mode() {
        // ψ_t = a w_1(x) peaks at |a|√(2/L) at the ends.
        let basis = SpectralBasis::new(PI, 2).unwrap();
        let p = ModelParams::new(1.0, 0.1, 0.1, 0.0, 0.0).unwrap();
        let a = 0.3;
        let z = vec![DVector::zeros(2); 3];
        let v: Vec<_> = (0..3)
            .map(|m| DVector::from_vec(vec![0.0, a * m as f64 / 2.0]))
            .collect();
        let tr = Trajectory::from_series(0.1, z.clone(), v, z, BoundaryMode::PureNeumann, p).unwrap();
        for k in [0.7, -0.7] {
            let m = degeneracy_check(&tr, &basis, k, 17);
            assert_abs_diff_eq!(m.margin, 1.0 - 2.0 * 0.7 * a * (2.0 / PI).sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(m.time, 0.2, epsilon = 1e-15);
            assert_abs_diff_eq!(m.peak, 2.0 * 0.7 * a * (2.0 / PI).sqrt(), epsilon = 1e-12);
        }
    }

    fn setup(k: f64) -> (ModelParams, SpectralBasis, SolverConfig) {
        let p = ModelParams::new(1.0, 0.2, 0.05, k, 0.0).unwrap();
        let basis = SpectralBasis::new(PI, 6).unwrap();
        let cfg = SolverConfig::new(0.02, 1.0, 6).unwrap().with_picard(1e-10, 40).unwrap();
        (p, basis, cfg)
    }

    #[test]
    fn zero_data_converges_immediately() {
        let (p, basis, cfg) = setup(1.0);
        let g = WindowedSignal::zero();
        for variant in [NonlinearVariant::FullJmgt, NonlinearVariant::RelaxedJmgt] {
            let (tr, rep) = solve_jmgt(
                &p,
                &basis,
                &Source::zero(),
                &g,
                &cfg,
                BoundaryMode::PureNeumann,
                variant,
            )
            .unwrap();
            assert_eq!(rep.iterations, 1);
            assert_eq!(rep.differences, vec![0.0]);
            assert_eq!(tr.max_abs(), 0.0);
        }
        let (_, rep) = solve_westervelt_nonlinear(&p, &basis, &Source::zero(), &g, &cfg, BoundaryMode::Mixed).unwrap();
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn linear_westervelt_needs_two_iterations() {
        let (p, basis, cfg) = setup(0.0);
        let g = WindowedSignal::new(1.0, 4.0, 5, 1.0).unwrap();
        let (_, rep) =
            solve_westervelt_nonlinear(&p, &basis, &Source::zero(), &g, &cfg, BoundaryMode::PureNeumann).unwrap();
        assert_eq!(rep.iterations, 2);
        assert!(rep.differences[0] > 0.0);
        assert_eq!(rep.differences[1], 0.0);
    }

    #[test]
    fn small_data_contracts() {
        let (p, basis, cfg) = setup(1.0);
        let g = WindowedSignal::new(0.5, 4.0, 5, 1.0).unwrap();
        let (_, rep) = solve_jmgt(
            &p,
            &basis,
            &Source::zero(),
            &g,
            &cfg,
            BoundaryMode::PureNeumann,
            NonlinearVariant::FullJmgt,
        )
        .unwrap();
        assert!(rep.converged);
        assert!(rep.iterations > 2);
        assert!(rep.factors.iter().all(|&q| q < 1.0), "{:?}", rep.factors);
        assert!(rep.margin() > 0.0);
    }

    #[test]
    fn large_data_trips_guard_but_not_relaxed() {
        let (p, basis, cfg) = setup(1.0);
        let cfg = cfg.with_picard(1e-8, 8).unwrap();
        let g = WindowedSignal::new(400.0, 4.0, 5, 1.0).unwrap();
        let err = solve_jmgt(
            &p,
            &basis,
            &Source::zero(),
            &g,
            &cfg,
            BoundaryMode::PureNeumann,
            NonlinearVariant::FullJmgt,
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::NonDegeneracyViolated { .. }), "{err}");
        assert!(err.report().unwrap().margin() <= 0.0);

        match solve_jmgt(
            &p,
            &basis,
            &Source::zero(),
            &g,
            &cfg,
            BoundaryMode::PureNeumann,
            NonlinearVariant::RelaxedJmgt,
        ) {
            Ok(_) | Err(SolveError::Divergence { .. }) => {}
            Err(other) => panic!("relaxed run must not hit the guard: {other}"),
        }
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let (p, basis, cfg) = setup(1.0);
        let cfg = cfg.with_picard(1e-30, 3).unwrap();
        let g = WindowedSignal::new(0.5, 4.0, 5, 1.0).unwrap();
        let err = solve_jmgt(
            &p,
            &basis,
            &Source::zero(),
            &g,
            &cfg,
            BoundaryMode::PureNeumann,
            NonlinearVariant::FullJmgt,
        )
        .unwrap_err();
        match err {
            SolveError::Divergence { report } => assert_eq!(report.iterations, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn variant_parse_roundtrip() {
        for v in [
            NonlinearVariant::FullJmgt,
            NonlinearVariant::RelaxedJmgt,
            NonlinearVariant::Westervelt,
        ] {
            assert_eq!(v.to_string().parse::<NonlinearVariant>().unwrap(), v);
        }
        assert!("burgers".parse::<NonlinearVariant>().is_err());
    }
}
