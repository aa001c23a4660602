//! Implicit time integration of the Galerkin system
//!
//! ```text
//! τ ξ''' + (M(t) + bβ B_Σ) ξ'' + (b K + c²β B_Σ) ξ' + c² K ξ = F(t)
//! ```
//!
//! written as a first-order system in `u = (ξ, ξ', ξ'')` with mass matrix
//! `E = diag(I, I, τ I)`. The scheme is BDF2 with an implicit-Euler start.
//! For `τ = 0` the last block row becomes algebraic, which is exactly the
//! second-order (Westervelt-type) system with `ξ''` solved as a stage
//! variable, so both paths share one integrator.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::assembly::{assemble_load, CoefficientField, Source, SystemMatrices, TimeVaryingMass};
use crate::basis::{QuadratureRule, SpectralBasis};
use crate::error::{Error, Result};
use crate::model::{validate_compatibility, ModelParams, SolverConfig, WindowedSignal};

/// Boundary configuration. The Neumann datum always acts at `x = 0`; the
/// right end is homogeneous Neumann or absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    PureNeumann,
    Mixed,
}

impl FromStr for BoundaryMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neumann" | "pure-neumann" | "pureneumann" => Ok(BoundaryMode::PureNeumann),
            "mixed" | "absorbing" => Ok(BoundaryMode::Mixed),
            other => Err(format!("unknown boundary mode `{other}` (expected neumann or mixed)")),
        }
    }
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::PureNeumann => "neumann",
            BoundaryMode::Mixed => "mixed",
        })
    }
}

/// Galerkin coefficients `ξ, ξ', ξ''` (and `ξ'''` when recovered) on the
/// uniform grid `t_m = m dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub xi: Vec<DVector<f64>>,
    pub dxi: Vec<DVector<f64>>,
    pub ddxi: Vec<DVector<f64>>,
    pub dddxi: Option<Vec<DVector<f64>>>,
    pub bc: BoundaryMode,
    /// Coefficients the trajectory was computed with; `tau = 0` for the
    /// second-order solvers.
    pub params: ModelParams,
}

impl Trajectory {
    /// Assembles a trajectory from sampled series. Initial data are not forced
    /// to vanish so analytic test trajectories can be wrapped as well.
    pub fn from_series(
        dt: f64,
        xi: Vec<DVector<f64>>,
        dxi: Vec<DVector<f64>>,
        ddxi: Vec<DVector<f64>>,
        bc: BoundaryMode,
        params: ModelParams,
    ) -> Result<Self> {
        let len = xi.len();
        if len == 0 || dxi.len() != len || ddxi.len() != len {
            return Err(Error::Shape(format!(
                "series lengths {} / {} / {}",
                xi.len(),
                dxi.len(),
                ddxi.len()
            )));
        }
        let n = xi[0].len();
        if xi.iter().chain(&dxi).chain(&ddxi).any(|v| v.len() != n) {
            return Err(Error::Shape("inconsistent mode counts".into()));
        }
        let times = (0..len).map(|m| m as f64 * dt).collect();
        Ok(Trajectory {
            dt,
            times,
            xi,
            dxi,
            ddxi,
            dddxi: None,
            bc,
            params,
        })
    }

    pub fn with_third(mut self, dddxi: Vec<DVector<f64>>) -> Result<Self> {
        if dddxi.len() != self.len() {
            return Err(Error::Shape("third-derivative series length".into()));
        }
        self.dddxi = Some(dddxi);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.xi.first().map_or(0, DVector::len)
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Largest coefficient magnitude over all stored series.
    pub fn max_abs(&self) -> f64 {
        self.xi
            .iter()
            .chain(&self.dxi)
            .chain(&self.ddxi)
            .chain(self.dddxi.iter().flatten())
            .fold(0.0f64, |a, v| a.max(v.amax()))
    }

    /// Elementwise `self - other`; both must share grid and mode count.
    pub fn difference(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.len() != other.len() || self.modes() != other.modes() {
            return Err(Error::Shape("trajectories on different grids".into()));
        }
        let sub = |a: &[DVector<f64>], b: &[DVector<f64>]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        let dddxi = match (&self.dddxi, &other.dddxi) {
            (Some(a), Some(b)) => Some(sub(a, b)),
            _ => None,
        };
        Ok(Trajectory {
            dt: self.dt,
            times: self.times.clone(),
            xi: sub(&self.xi, &other.xi),
            dxi: sub(&self.dxi, &other.dxi),
            ddxi: sub(&self.ddxi, &other.ddxi),
            dddxi,
            bc: self.bc,
            params: self.params,
        })
    }

    /// `Σ_i ξ'_i(t_m) w_i(x)`.
    pub fn velocity_at(&self, basis: &SpectralBasis, m: usize, x: f64) -> f64 {
        basis.synthesize(self.dxi[m].as_slice(), x, 0)
    }
}

/// Time-independent operators of one step plus the mass at that step.
pub struct StepOperators<'a> {
    pub mass: &'a DMatrix<f64>,
    pub stiffness: &'a DMatrix<f64>,
    /// `B_Σ`, zero in pure Neumann mode.
    pub absorbing: &'a DMatrix<f64>,
    pub params: &'a ModelParams,
}

/// `ξ''' = (F - (M + bβB)ξ'' - (bK + c²βB)ξ' - c²Kξ) / τ`.
pub fn recover_third(
    ops: &StepOperators<'_>,
    load: &DVector<f64>,
    xi: &DVector<f64>,
    dxi: &DVector<f64>,
    ddxi: &DVector<f64>,
) -> Result<DVector<f64>> {
    let p = ops.params;
    if p.tau() <= 0.0 {
        return Err(Error::NonPositiveTau(p.tau()));
    }
    let (b, c2, beta) = (p.b(), p.c2(), p.beta());
    let mut r = load.clone();
    r -= ops.mass * ddxi + ops.absorbing * ddxi * (b * beta);
    r -= ops.stiffness * dxi * b + ops.absorbing * dxi * (c2 * beta);
    r -= ops.stiffness * xi * c2;
    Ok(r / p.tau())
}

/// `ξ'''` at every stored step of a trajectory, from the equation.
pub fn recover_third_series(
    traj: &Trajectory,
    basis: &SpectralBasis,
    quad: &QuadratureRule,
    field: &CoefficientField,
    f: &Source,
    g: &WindowedSignal,
) -> Result<Vec<DVector<f64>>> {
    let mats = SystemMatrices::new(basis, quad);
    let absorbing = absorbing_matrix(&mats, traj.bc);
    let mass = TimeVaryingMass::new(basis, quad, field);
    (0..traj.len())
        .map(|m| {
            let t = traj.times[m];
            let mm = mass.at_step(m, t);
            let load = assemble_load(basis, quad, f, g, &traj.params, t);
            let ops = StepOperators {
                mass: &mm,
                stiffness: &mats.stiffness,
                absorbing: &absorbing,
                params: &traj.params,
            };
            recover_third(&ops, &load, &traj.xi[m], &traj.dxi[m], &traj.ddxi[m])
        })
        .collect()
}

fn absorbing_matrix(mats: &SystemMatrices, bc: BoundaryMode) -> DMatrix<f64> {
    match bc {
        BoundaryMode::PureNeumann => DMatrix::zeros(mats.stiffness.nrows(), mats.stiffness.ncols()),
        BoundaryMode::Mixed => mats.boundary_right.clone(),
    }
}

struct Integrator<'a> {
    basis: &'a SpectralBasis,
    quad: QuadratureRule,
    field: &'a CoefficientField,
    source: &'a Source,
    signal: &'a WindowedSignal,
    params: ModelParams,
    bc: BoundaryMode,
}

impl Integrator<'_> {
    fn run(&self, config: &SolverConfig) -> Result<Trajectory> {
        let n = self.basis.len();
        let steps = config.steps();
        let dt = config.dt;
        let p = &self.params;
        let (tau, b, c2, beta) = (p.tau(), p.b(), p.c2(), p.beta());

        let mats = SystemMatrices::new(self.basis, &self.quad);
        let k = &mats.stiffness;
        let bs = absorbing_matrix(&mats, self.bc);
        let damping = k * b + &bs * (c2 * beta);
        let boundary_inertia = &bs * (b * beta);
        let elastic = k * c2;
        let mass = TimeVaryingMass::new(self.basis, &self.quad, self.field);

        let zero = DVector::zeros(n);
        let mut xi = vec![zero.clone()];
        let mut dxi = vec![zero.clone()];
        let mut ddxi = vec![zero.clone()];
        let mut third = Vec::new();
        if tau > 0.0 {
            let m0 = mass.at_step(0, 0.0);
            let f0 = assemble_load(self.basis, &self.quad, self.source, self.signal, p, 0.0);
            let ops = StepOperators {
                mass: &m0,
                stiffness: k,
                absorbing: &bs,
                params: p,
            };
            third.push(recover_third(&ops, &f0, &zero, &zero, &zero)?);
        }

        let mut a = DMatrix::zeros(3 * n, 3 * n);
        let mut rhs = DVector::zeros(3 * n);
        for step in 1..=steps {
            let t = step as f64 * dt;
            let m_t = mass.at_step(step, t);
            mass.evict_before(step);
            let load = assemble_load(self.basis, &self.quad, self.source, self.signal, p, t);

            // Implicit Euler for the first step, BDF2 afterwards:
            //   (c0 E - h J) u_{m+1} = E hist + h G.
            let (c0, h) = if step == 1 { (1.0, dt) } else { (3.0, 2.0 * dt) };
            a.fill(0.0);
            for i in 0..n {
                a[(i, i)] = c0;
                a[(i, n + i)] = -h;
                a[(n + i, n + i)] = c0;
                a[(n + i, 2 * n + i)] = -h;
                a[(2 * n + i, 2 * n + i)] = c0 * tau;
            }
            for i in 0..n {
                for j in 0..n {
                    a[(2 * n + i, j)] += h * elastic[(i, j)];
                    a[(2 * n + i, n + j)] += h * damping[(i, j)];
                    a[(2 * n + i, 2 * n + j)] += h * (m_t[(i, j)] + boundary_inertia[(i, j)]);
                }
            }
            let last = step - 1;
            for i in 0..n {
                let hist = |s: &[DVector<f64>]| {
                    if step == 1 {
                        s[last][i]
                    } else {
                        4.0 * s[last][i] - s[last - 1][i]
                    }
                };
                rhs[i] = hist(&xi);
                rhs[n + i] = hist(&dxi);
                rhs[2 * n + i] = tau * hist(&ddxi) + h * load[i];
            }

            let u = a
                .clone()
                .lu()
                .solve(&rhs)
                .filter(|u| u.iter().all(|v| v.is_finite()))
                .ok_or(Error::SingularStep { step, time: t })?;
            let x_new = u.rows(0, n).into_owned();
            let v_new = u.rows(n, n).into_owned();
            let a_new = u.rows(2 * n, n).into_owned();
            if tau > 0.0 {
                let ops = StepOperators {
                    mass: &m_t,
                    stiffness: k,
                    absorbing: &bs,
                    params: p,
                };
                third.push(recover_third(&ops, &load, &x_new, &v_new, &a_new)?);
            }
            xi.push(x_new);
            dxi.push(v_new);
            ddxi.push(a_new);
        }

        let traj = Trajectory::from_series(dt, xi, dxi, ddxi, self.bc, *p)?;
        if tau > 0.0 {
            traj.with_third(third)
        } else {
            Ok(traj)
        }
    }
}

fn require_compatible(g: &WindowedSignal, order: usize) -> Result<()> {
    let violations = validate_compatibility(g, order);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Compatibility { orders: violations })
    }
}

/// Linear third-order (SMGT) solve with prescribed coefficient `α`.
#[allow(clippy::too_many_arguments)]
pub fn solve_smgt_linear(
    params: &ModelParams,
    basis: &SpectralBasis,
    field: &CoefficientField,
    f: &Source,
    g: &WindowedSignal,
    config: &SolverConfig,
    bc: BoundaryMode,
) -> Result<Trajectory> {
    if params.tau() <= 0.0 {
        return Err(Error::NonPositiveTau(params.tau()));
    }
    config.validate()?;
    require_compatible(g, 3)?;
    Integrator {
        basis,
        quad: QuadratureRule::with_count(basis.length(), config.quad_points),
        field,
        source: f,
        signal: g,
        params: *params,
        bc,
    }
    .run(config)
}

/// Linear second-order strongly damped solve: `τ` is ignored and `δ` takes
/// the place of `b` everywhere, including the load.
#[allow(clippy::too_many_arguments)]
pub fn solve_westervelt_linearized(
    params: &ModelParams,
    basis: &SpectralBasis,
    field: &CoefficientField,
    f: &Source,
    g: &WindowedSignal,
    config: &SolverConfig,
    bc: BoundaryMode,
) -> Result<Trajectory> {
    config.validate()?;
    require_compatible(g, 2)?;
    Integrator {
        basis,
        quad: QuadratureRule::with_count(basis.length(), config.quad_points),
        field,
        source: f,
        signal: g,
        params: params.with_tau(0.0)?,
        bc,
    }
    .run(config)
}
