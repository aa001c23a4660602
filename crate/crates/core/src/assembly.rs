//! Ingredients of the Galerkin ODE system: stiffness, time-varying mass,
//! boundary trace matrices, load vector, and the harmonic extension used to
//! homogenize Neumann data.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::basis::{End, QuadratureRule, SpectralBasis};
use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::model::{validate_compatibility, ModelParams, WindowedSignal};

/// Scalar space-time function `(x, t) -> value`.
pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Volume source `f(x, t)`.
#[derive(Clone, Default)]
pub struct Source(Option<ScalarField>);

impl Source {
    pub fn zero() -> Self {
        Source(None)
    }

    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Source(Some(Arc::new(f)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.0.as_ref().map_or(0.0, |f| f(x, t))
    }

    /// `(f(·, t), w_i)` for every mode.
    pub fn project(&self, basis: &SpectralBasis, quad: &QuadratureRule, t: f64) -> DVector<f64> {
        match &self.0 {
            None => DVector::zeros(basis.len()),
            Some(f) => DVector::from_vec(crate::basis::project(basis, quad, |x| f(x, t))),
        }
    }
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if self.0.is_some() {
            "Source(field)"
        } else {
            "Source(zero)"
        })
    }
}

/// How a coefficient field was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Reconstructed,
}

/// Map from the velocity `ψ_t` to the coefficient of `ψ_tt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientMap {
    /// `1 - 2 k s`.
    Linear { k: f64 },
    /// `h(s) = 1 - clamp(2 k s, -1, 1)`.
    Clamped { k: f64 },
}

impl CoefficientMap {
    pub fn apply(self, s: f64) -> f64 {
        match self {
            CoefficientMap::Linear { k } => 1.0 - 2.0 * k * s,
            CoefficientMap::Clamped { k } => crate::nonlinear::clamp_h(s, k),
        }
    }

    /// Derivative with respect to `s` (zero on the saturated branches).
    pub fn slope(self, s: f64) -> f64 {
        match self {
            CoefficientMap::Linear { k } => -2.0 * k,
            CoefficientMap::Clamped { k } => {
                if (2.0 * k * s).abs() < 1.0 {
                    -2.0 * k
                } else {
                    0.0
                }
            }
        }
    }
}

/// Velocity history of a trajectory, linearly interpolated in time.
struct Reconstruction {
    basis: SpectralBasis,
    dt: f64,
    velocity: Vec<Vec<f64>>,
    acceleration: Vec<Vec<f64>>,
    map: CoefficientMap,
}

impl Reconstruction {
    fn bracket(&self, t: f64) -> (usize, usize, f64) {
        let last = self.velocity.len() - 1;
        let s = (t / self.dt).max(0.0);
        let j = (s.floor() as usize).min(last);
        if j == last {
            return (last, last, 0.0);
        }
        let theta = s - j as f64;
        // Snap to grid points so step-time evaluations are exact.
        if theta < 1e-12 {
            (j, j, 0.0)
        } else if theta > 1.0 - 1e-12 {
            (j + 1, j + 1, 0.0)
        } else {
            (j, j + 1, theta)
        }
    }

    fn interp(&self, series: &[Vec<f64>], x: f64, t: f64, deriv: usize) -> f64 {
        let (a, b, th) = self.bracket(t);
        let va = self.basis.synthesize(&series[a], x, deriv);
        if a == b {
            return va;
        }
        let vb = self.basis.synthesize(&series[b], x, deriv);
        (1.0 - th) * va + th * vb
    }
}

#[derive(Clone)]
enum FieldKind {
    Constant(f64),
    Analytic {
        value: ScalarField,
        dx: Option<ScalarField>,
        dt: Option<ScalarField>,
    },
    Reconstructed(Arc<Reconstruction>),
}

/// The coefficient `α(x, t)` multiplying `ψ_tt`, with its space and time
/// derivatives.
#[derive(Clone)]
pub struct CoefficientField {
    kind: FieldKind,
}

impl std::fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            FieldKind::Constant(c) => write!(f, "CoefficientField::Constant({c})"),
            FieldKind::Analytic { .. } => f.write_str("CoefficientField::Analytic"),
            FieldKind::Reconstructed(r) => write!(f, "CoefficientField::Reconstructed({:?})", r.map),
        }
    }
}

impl CoefficientField {
    pub fn constant(value: f64) -> Self {
        CoefficientField {
            kind: FieldKind::Constant(value),
        }
    }

    pub fn analytic(value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        CoefficientField {
            kind: FieldKind::Analytic {
                value: Arc::new(value),
                dx: None,
                dt: None,
            },
        }
    }

    /// Attaches exact derivatives to an analytic field.
    pub fn with_derivatives(
        self,
        dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dt: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        match self.kind {
            FieldKind::Analytic { value, .. } => CoefficientField {
                kind: FieldKind::Analytic {
                    value,
                    dx: Some(Arc::new(dx)),
                    dt: Some(Arc::new(dt)),
                },
            },
            other => CoefficientField { kind: other },
        }
    }

    /// `α = map(ψ_t)` with `ψ_t` taken from the trajectory's `ξ'`, linearly
    /// interpolated between stored steps (first order in `dt`).
    pub fn from_trajectory(traj: &Trajectory, basis: &SpectralBasis, map: CoefficientMap) -> Self {
        let velocity = traj.dxi.iter().map(|v| v.as_slice().to_vec()).collect();
        let acceleration = traj.ddxi.iter().map(|v| v.as_slice().to_vec()).collect();
        CoefficientField {
            kind: FieldKind::Reconstructed(Arc::new(Reconstruction {
                basis: basis.clone(),
                dt: traj.dt,
                velocity,
                acceleration,
                map,
            })),
        }
    }

    pub fn provenance(&self) -> Provenance {
        match self.kind {
            FieldKind::Reconstructed(_) => Provenance::Reconstructed,
            _ => Provenance::Analytic,
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            FieldKind::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        match &self.kind {
            FieldKind::Constant(c) => *c,
            FieldKind::Analytic { value, .. } => value(x, t),
            FieldKind::Reconstructed(r) => r.map.apply(r.interp(&r.velocity, x, t, 0)),
        }
    }

    /// `∂α/∂x`; central differences when an analytic field has no derivative attached.
    pub fn dx(&self, x: f64, t: f64) -> f64 {
        match &self.kind {
            FieldKind::Constant(_) => 0.0,
            FieldKind::Analytic { dx: Some(d), .. } => d(x, t),
            FieldKind::Analytic { value, dx: None, .. } => {
                let h = 1e-6;
                (value(x + h, t) - value(x - h, t)) / (2.0 * h)
            }
            FieldKind::Reconstructed(r) => {
                let s = r.interp(&r.velocity, x, t, 0);
                r.map.slope(s) * r.interp(&r.velocity, x, t, 1)
            }
        }
    }

    /// `∂α/∂t`; central differences when an analytic field has no derivative attached.
    pub fn dt(&self, x: f64, t: f64) -> f64 {
        match &self.kind {
            FieldKind::Constant(_) => 0.0,
            FieldKind::Analytic { dt: Some(d), .. } => d(x, t),
            FieldKind::Analytic { value, dt: None, .. } => {
                let h = 1e-6;
                (value(x, t + h) - value(x, (t - h).max(0.0))) / (t + h - (t - h).max(0.0))
            }
            FieldKind::Reconstructed(r) => {
                let s = r.interp(&r.velocity, x, t, 0);
                r.map.slope(s) * r.interp(&r.acceleration, x, t, 0)
            }
        }
    }
}

/// Stiffness and boundary trace matrices of the Galerkin system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub stiffness: DMatrix<f64>,
    pub boundary_left: DMatrix<f64>,
    pub boundary_right: DMatrix<f64>,
}

impl SystemMatrices {
    pub fn new(basis: &SpectralBasis, quad: &QuadratureRule) -> Self {
        SystemMatrices {
            stiffness: assemble_stiffness(basis, quad),
            boundary_left: assemble_boundary(basis, End::Left),
            boundary_right: assemble_boundary(basis, End::Right),
        }
    }
}

/// `K_ij = ∫ w_i' w_j'` by quadrature.
pub fn assemble_stiffness(basis: &SpectralBasis, quad: &QuadratureRule) -> DMatrix<f64> {
    let table = basis.mode_table(quad, 1);
    weighted_gram(&table, quad.weights(), |_| 1.0)
}

/// `Σ_q ρ_q c_q φ_i(x_q) φ_j(x_q)`, symmetric by construction.
fn weighted_gram(table: &[Vec<f64>], weights: &[f64], coeff: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let n = table.first().map_or(0, Vec::len);
    let mut m = DMatrix::zeros(n, n);
    for (q, row) in table.iter().enumerate() {
        let w = weights[q] * coeff(q);
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let wi = w * row[i];
            for j in i..n {
                m[(i, j)] += wi * row[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

/// `M(t)_ij = ∫ α(x, t) w_i w_j` by quadrature.
pub fn assemble_mass(basis: &SpectralBasis, quad: &QuadratureRule, field: &CoefficientField, t: f64) -> DMatrix<f64> {
    if let Some(c) = field.constant_value() {
        // Orthonormal basis: exact up to quadrature of w_i w_j.
        let table = basis.mode_table(quad, 0);
        return weighted_gram(&table, quad.weights(), |_| c);
    }
    let table = basis.mode_table(quad, 0);
    let alpha: Vec<f64> = quad.nodes().iter().map(|&x| field.value(x, t)).collect();
    weighted_gram(&table, quad.weights(), |q| alpha[q])
}

/// Mass sampler with the mode table and per-step coefficient values cached.
/// Confined to a single run.
pub struct TimeVaryingMass<'a> {
    field: &'a CoefficientField,
    table: Vec<Vec<f64>>,
    weights: Vec<f64>,
    nodes: Vec<f64>,
    constant: Option<DMatrix<f64>>,
    alpha_cache: RefCell<HashMap<usize, Vec<f64>>>,
}

impl<'a> TimeVaryingMass<'a> {
    pub fn new(basis: &SpectralBasis, quad: &QuadratureRule, field: &'a CoefficientField) -> Self {
        let table = basis.mode_table(quad, 0);
        let constant = field
            .constant_value()
            .map(|c| weighted_gram(&table, quad.weights(), |_| c));
        TimeVaryingMass {
            field,
            table,
            weights: quad.weights().to_vec(),
            nodes: quad.nodes().to_vec(),
            constant,
            alpha_cache: RefCell::new(HashMap::new()),
        }
    }

    /// `α` at the quadrature nodes for time step `step` at time `t`.
    pub fn alpha_at_step(&self, step: usize, t: f64) -> Vec<f64> {
        self.alpha_cache
            .borrow_mut()
            .entry(step)
            .or_insert_with(|| self.nodes.iter().map(|&x| self.field.value(x, t)).collect())
            .clone()
    }

    pub fn at_step(&self, step: usize, t: f64) -> DMatrix<f64> {
        if let Some(m) = &self.constant {
            return m.clone();
        }
        let alpha = self.alpha_at_step(step, t);
        weighted_gram(&self.table, &self.weights, |q| alpha[q])
    }

    /// Drops cached coefficient values for steps before `step`.
    pub fn evict_before(&self, step: usize) {
        self.alpha_cache.borrow_mut().retain(|&s, _| s >= step);
    }
}

/// Rank-one trace matrix `B_ij = w_i(a) w_j(a)`.
pub fn assemble_boundary(basis: &SpectralBasis, end: End) -> DMatrix<f64> {
    let tr = DVector::from_vec(basis.traces(end));
    &tr * tr.transpose()
}

/// `F_i(t) = (f(·, t), w_i) + (c² g(t) + b g_t(t)) w_i(0)`.
///
/// The Neumann datum acts on `Γ = {0}`; the right end is either homogeneous
/// Neumann or absorbing, and the absorbing terms live in the system matrices.
pub fn assemble_load(
    basis: &SpectralBasis,
    quad: &QuadratureRule,
    f: &Source,
    g: &WindowedSignal,
    params: &ModelParams,
    t: f64,
) -> DVector<f64> {
    let mut load = f.project(basis, quad, t);
    let d = g.derivatives(t);
    let flux = params.c2() * d[0] + params.b() * d[1];
    if flux != 0.0 {
        for i in 0..basis.len() {
            load[i] += flux * basis.trace(i, End::Left);
        }
    }
    load
}

/// The lift `v = N h` solving `-v'' + v = 0` on `(0, L)` with `-v'(0) = h`
/// and `v'(L) = 0`, i.e. `v(x) = h cosh(L - x) / sinh(L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicExtension {
    length: f64,
    h: f64,
}

impl HarmonicExtension {
    pub fn new(length: f64, h: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::ZeroLength(length));
        }
        Ok(HarmonicExtension { length, h })
    }

    /// Profile `cosh(L - x) / sinh(L)` of the unit datum, in overflow-free form.
    pub fn profile(length: f64, x: f64) -> f64 {
        ((-x).exp() + (x - 2.0 * length).exp()) / (1.0 - (-2.0 * length).exp())
    }

    fn profile_dx(length: f64, x: f64) -> f64 {
        (-(-x).exp() + (x - 2.0 * length).exp()) / (1.0 - (-2.0 * length).exp())
    }

    pub fn value(&self, x: f64) -> f64 {
        self.h * Self::profile(self.length, x)
    }

    pub fn dx(&self, x: f64) -> f64 {
        self.h * Self::profile_dx(self.length, x)
    }

    /// `v'' = v`.
    pub fn dxx(&self, x: f64) -> f64 {
        self.value(x)
    }

    pub fn coefficients(&self, basis: &SpectralBasis, quad: &QuadratureRule) -> Vec<f64> {
        crate::basis::project(basis, quad, |x| self.value(x))
    }
}

pub fn harmonic_extension(length: f64, h: f64) -> Result<HarmonicExtension> {
    HarmonicExtension::new(length, h)
}

/// Source of the homogenized problem for `ψ̄ = ψ - N g`:
/// `f̃ = f - τ N g_ttt - α N g_tt + c² N g + b N g_t`, using `ΔNg = Ng`.
pub fn lift_forcing(
    f: &Source,
    g: &WindowedSignal,
    field: &CoefficientField,
    params: &ModelParams,
    length: f64,
) -> Result<Source> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::ZeroLength(length));
    }
    let violations = validate_compatibility(g, 3);
    if !violations.is_empty() {
        return Err(Error::Compatibility { orders: violations });
    }
    if g.is_zero() {
        return Ok(f.clone());
    }
    let (f, g, field, p) = (f.clone(), *g, field.clone(), *params);
    Ok(Source::new(move |x, t| {
        let d = g.derivatives(t);
        let n1 = HarmonicExtension::profile(length, x);
        let lift = -p.tau() * d[3] - field.value(x, t) * d[2] + p.c2() * d[0] + p.b() * d[1];
        f.eval(x, t) + n1 * lift
    }))
}
