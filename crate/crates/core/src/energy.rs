//! Energy functionals, boundary flux, data norms and estimate audits.
//!
//! All spatial norms are diagonal in the eigenbasis. Time integrals use the
//! composite trapezoid rule on the trajectory grid and sup norms take the
//! maximum over stored steps.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::assembly::{CoefficientField, Source, TimeVaryingMass};
use crate::basis::{norm_sq, End, QuadratureRule, Space, SpectralBasis};
use crate::error::{Error, Result};
use crate::integrate::{BoundaryMode, Trajectory};
use crate::model::{SolverConfig, WindowedSignal, MAX_SIGNAL_ORDER};

/// Running trapezoid integral of `vals` with step `dt`, starting at 0.
fn accumulate(vals: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(vals.len());
    let mut acc = 0.0;
    for (m, v) in vals.iter().enumerate() {
        if m > 0 {
            acc += 0.5 * dt * (vals[m - 1] + v);
        }
        out.push(acc);
    }
    out
}

fn running_max(vals: &[f64]) -> Vec<f64> {
    let mut best = 0.0f64;
    vals.iter()
        .map(|&v| {
            best = best.max(v);
            best
        })
        .collect()
}

fn sup(vals: &[f64]) -> f64 {
    vals.iter().copied().fold(0.0, f64::max)
}

fn last(vals: &[f64]) -> f64 {
    vals.last().copied().unwrap_or(0.0)
}

fn series(vs: &[DVector<f64>], basis: &SpectralBasis, space: Space) -> Vec<f64> {
    vs.iter().map(|v| norm_sq(v.as_slice(), basis, space)).collect()
}

/// Lower-order energy series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LowerEnergy {
    /// `|ψ_tt(t)|²_{L²}`.
    pub tt_l2: Vec<f64>,
    /// `|ψ_t(t)|²_{H¹}`.
    pub t_h1: Vec<f64>,
    /// `τ|ψ_tt|² + |ψ_t|²_{H¹}`.
    pub e_low: Vec<f64>,
    /// `τ² ∫ |ψ_ttt|²_{(H¹)*}`.
    pub a_dual: Vec<f64>,
    /// `∫ |ψ_tt|²_{L²}`.
    pub a_tt: Vec<f64>,
}

/// Higher-order energy series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HigherEnergy {
    /// `|∇ψ_tt(t)|²`.
    pub tt_grad: Vec<f64>,
    /// `|Δψ_t(t)|²`.
    pub t_lap: Vec<f64>,
    /// `τ|∇ψ_tt|² + |Δψ_t|²`.
    pub e_high: Vec<f64>,
    /// `∫ |ψ_tt|²_{H¹}`.
    pub a_tt_h1: Vec<f64>,
    /// `τ² ∫ |ψ_ttt|²_{L²}`.
    pub a_ttt_l2: Vec<f64>,
}

/// Traces at the absorbing end and the two flux terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FluxSeries {
    pub trace_t: Vec<f64>,
    pub trace_tt: Vec<f64>,
    /// `c²β ∫ |tr ψ_tt|²`.
    pub accumulated: Vec<f64>,
    /// `max_{s ≤ t} bβ |tr ψ_t(s)|²`.
    pub running_max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRecord {
    pub times: Vec<f64>,
    pub tau: f64,
    pub lower: LowerEnergy,
    pub higher: HigherEnergy,
    pub flux: Option<FluxSeries>,
}

impl EnergyRecord {
    /// Named series, every one a squared quantity.
    pub fn columns(&self) -> Vec<(&'static str, &[f64])> {
        let mut cols: Vec<(&'static str, &[f64])> = vec![
            ("tt_l2", &self.lower.tt_l2),
            ("t_h1", &self.lower.t_h1),
            ("e_low", &self.lower.e_low),
            ("a_dual", &self.lower.a_dual),
            ("a_tt", &self.lower.a_tt),
            ("tt_grad", &self.higher.tt_grad),
            ("t_lap", &self.higher.t_lap),
            ("e_high", &self.higher.e_high),
            ("a_tt_h1", &self.higher.a_tt_h1),
            ("a_ttt_l2", &self.higher.a_ttt_l2),
        ];
        if let Some(fl) = &self.flux {
            cols.push(("flux_tt", &fl.accumulated));
            cols.push(("flux_t_max", &fl.running_max));
        }
        cols
    }

    /// `τ²‖ψ_ttt‖²_{L²(H¹)*} + ‖τψ_tt² + |ψ_t|²_{H¹}‖_{L∞}`.
    pub fn tau_dependent_total(&self) -> f64 {
        sup(&self.lower.e_low) + last(&self.lower.a_dual)
    }

    /// `‖ψ_tt‖²_{L²L²} + max|ψ_t|²_{H¹} + A_dual + τ max|ψ_tt|²`.
    pub fn tau_uniform_total(&self) -> f64 {
        last(&self.lower.a_tt) + sup(&self.lower.t_h1) + last(&self.lower.a_dual) + self.tau * sup(&self.lower.tt_l2)
    }

    /// `τ max|∇ψ_tt|² + max|Δψ_t|² + ‖ψ_tt‖²_{L²H¹} + τ²‖ψ_ttt‖²_{L²L²}`.
    pub fn higher_total(&self) -> f64 {
        self.tau * sup(&self.higher.tt_grad)
            + sup(&self.higher.t_lap)
            + last(&self.higher.a_tt_h1)
            + last(&self.higher.a_ttt_l2)
    }
}

fn third_or_zero(traj: &Trajectory) -> Result<Vec<DVector<f64>>> {
    if traj.params.tau() > 0.0 {
        traj.dddxi.clone().ok_or(Error::MissingThirdDerivative)
    } else {
        Ok(vec![DVector::zeros(traj.modes()); traj.len()])
    }
}

/// Lower-order fields; requires `ξ'''` when `τ > 0`.
pub fn energy_lower(traj: &Trajectory, basis: &SpectralBasis) -> Result<LowerEnergy> {
    let tau = traj.params.tau();
    let third = third_or_zero(traj)?;
    let tt_l2 = series(&traj.ddxi, basis, Space::L2);
    let t_h1 = series(&traj.dxi, basis, Space::H1);
    let e_low = tt_l2.iter().zip(&t_h1).map(|(a, v)| tau * a + v).collect();
    let dual: Vec<f64> = series(&third, basis, Space::H1Dual)
        .iter()
        .map(|v| tau * tau * v)
        .collect();
    Ok(LowerEnergy {
        a_dual: accumulate(&dual, traj.dt),
        a_tt: accumulate(&tt_l2, traj.dt),
        tt_l2,
        t_h1,
        e_low,
    })
}

/// Higher-order fields; requires `ξ'''` when `τ > 0`.
pub fn energy_higher(traj: &Trajectory, basis: &SpectralBasis) -> Result<HigherEnergy> {
    let tau = traj.params.tau();
    let third = third_or_zero(traj)?;
    let lam = basis.eigenvalues();
    let tt_grad: Vec<f64> = traj
        .ddxi
        .iter()
        .map(|v| v.iter().zip(lam).map(|(c, l)| l * c * c).sum())
        .collect();
    let t_lap = series(&traj.dxi, basis, Space::LaplacianL2);
    let e_high = tt_grad.iter().zip(&t_lap).map(|(g, l)| tau * g + l).collect();
    let tt_h1 = series(&traj.ddxi, basis, Space::H1);
    let ttt: Vec<f64> = series(&third, basis, Space::L2).iter().map(|v| tau * tau * v).collect();
    Ok(HigherEnergy {
        a_tt_h1: accumulate(&tt_h1, traj.dt),
        a_ttt_l2: accumulate(&ttt, traj.dt),
        tt_grad,
        t_lap,
        e_high,
    })
}

/// Flux through the absorbing end `x = L`.
pub fn boundary_flux(traj: &Trajectory, basis: &SpectralBasis) -> Result<FluxSeries> {
    if traj.bc != BoundaryMode::Mixed {
        return Err(Error::NoAbsorbingBoundary);
    }
    let p = &traj.params;
    let tr = basis.traces(End::Right);
    let trace = |v: &DVector<f64>| v.iter().zip(&tr).map(|(c, w)| c * w).sum::<f64>();
    let trace_t: Vec<f64> = traj.dxi.iter().map(trace).collect();
    let trace_tt: Vec<f64> = traj.ddxi.iter().map(trace).collect();
    let sq_tt: Vec<f64> = trace_tt.iter().map(|v| p.c2() * p.beta() * v * v).collect();
    let sq_t: Vec<f64> = trace_t.iter().map(|v| p.b() * p.beta() * v * v).collect();
    Ok(FluxSeries {
        accumulated: accumulate(&sq_tt, traj.dt),
        running_max: running_max(&sq_t),
        trace_t,
        trace_tt,
    })
}

/// All fields; the flux is present for absorbing trajectories only.
pub fn energy_record(traj: &Trajectory, basis: &SpectralBasis) -> Result<EnergyRecord> {
    Ok(EnergyRecord {
        times: traj.times.clone(),
        tau: traj.params.tau(),
        lower: energy_lower(traj, basis)?,
        higher: energy_higher(traj, basis)?,
        flux: match traj.bc {
            BoundaryMode::Mixed => Some(boundary_flux(traj, basis)?),
            BoundaryMode::PureNeumann => None,
        },
    })
}

/// `τ/2 |ξ''|² + b/2 ξ'ᵀKξ' + |ξ'|²` at every step.
pub fn discrete_energy(traj: &Trajectory, basis: &SpectralBasis) -> Vec<f64> {
    let p = &traj.params;
    let lam = basis.eigenvalues();
    traj.ddxi
        .iter()
        .zip(&traj.dxi)
        .map(|(a, v)| {
            let kin: f64 = v.iter().zip(lam).map(|(c, l)| l * c * c).sum();
            0.5 * p.tau() * a.norm_squared() + 0.5 * p.b() * kin + v.norm_squared()
        })
        .collect()
}

/// `τ/2 |W|² + b/2 VᵀKV + (δ/b)(c²/b)/2 |ξ'|²` with `γ = c²/b`,
/// `V = ξ' + γξ`, `W = ξ'' + γξ'`. For `α ≡ 1`, zero forcing and zero
/// boundary datum this is dissipated by the Galerkin system at rate
/// `(δ/b)|ξ''|² + bβ|tr W|²`.
pub fn acoustic_energy(traj: &Trajectory, basis: &SpectralBasis) -> Vec<f64> {
    let p = &traj.params;
    let (tau, b) = (p.tau(), p.b());
    let gamma = p.c2() / b;
    let lam = basis.eigenvalues();
    (0..traj.len())
        .map(|m| {
            let (x, v, a) = (&traj.xi[m], &traj.dxi[m], &traj.ddxi[m]);
            let w = a + v * gamma;
            let vv = v + x * gamma;
            let stiff: f64 = vv.iter().zip(lam).map(|(c, l)| l * c * c).sum();
            0.5 * tau * w.norm_squared() + 0.5 * b * stiff + 0.5 * (1.0 - tau * gamma) * gamma * v.norm_squared()
        })
        .collect()
}

/// Norms of the boundary signal and the source. Boundary norms are
/// absolute values in one dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataNorms {
    /// `sup_t |g^{(m)}|` for `m = 0..=orders`.
    pub g_sup: Vec<f64>,
    /// `‖g^{(m)}‖_{L²(0,T)}`.
    pub g_l2: Vec<f64>,
    /// `‖f‖_{L²(0,T;L²)}`.
    pub f_l2: f64,
    /// `‖f‖_{H¹(0,T;L²)}`.
    pub f_h1: f64,
}

impl DataNorms {
    fn g(&self, v: &[f64], m: usize) -> f64 {
        v.get(m).copied().unwrap_or(0.0)
    }

    /// `‖g‖²_{W^{1,∞}} + ‖g_t‖²_{H¹} + ‖f‖²_{L²L²}`.
    pub fn lower_total(&self) -> f64 {
        let s = |m| self.g(&self.g_sup, m).powi(2);
        let l = |m| self.g(&self.g_l2, m).powi(2);
        s(0) + s(1) + l(1) + l(2) + self.f_l2.powi(2)
    }

    /// Adds `g_tt` in `L∞`, `g_ttt` in `L²` and `f` in `H¹L²`.
    pub fn higher_total(&self) -> f64 {
        let s = |m| self.g(&self.g_sup, m).powi(2);
        let l = |m| self.g(&self.g_l2, m).powi(2);
        s(0) + s(1) + s(2) + l(1) + l(2) + l(3) + self.f_h1.powi(2)
    }

    pub fn is_zero(&self) -> bool {
        self.g_sup.iter().chain(&self.g_l2).all(|&v| v == 0.0) && self.f_l2 == 0.0 && self.f_h1 == 0.0
    }
}

const SUP_SAMPLES_PER_STEP: usize = 32;
const TIME_GAUSS_POINTS: usize = 5;

/// Data norms up to signal order `orders` on `[0, T]`. The signal is known
/// in closed form, so each solver step is oversampled: Gauss–Legendre per
/// interval for integrals, 32 samples per interval refined around local
/// maxima for sup norms. `f_t`
/// comes from a fourth-order central difference.
pub fn data_norms(
    g: &WindowedSignal,
    f: &Source,
    length: f64,
    config: &SolverConfig,
    orders: usize,
) -> Result<DataNorms> {
    if orders > MAX_SIGNAL_ORDER {
        return Err(Error::UnsupportedOrder {
            order: orders,
            max: MAX_SIGNAL_ORDER,
        });
    }
    let steps = config.steps();
    let dt = config.dt;
    let (gn, gw) = crate::basis::gauss_legendre(TIME_GAUSS_POINTS);
    let mut g_sup = vec![0.0f64; orders + 1];
    let mut g_l2 = vec![0.0f64; orders + 1];
    let mut f_l2 = 0.0;
    let mut ft_l2 = 0.0;
    let quad = QuadratureRule::with_count(length, config.quad_points);
    let fd = 1e-3 * dt;
    let space_sq = |t: f64| quad.integrate(|x| f.eval(x, t).powi(2));
    let dt_sq = |t: f64| {
        quad.integrate(|x| {
            let d = (f.eval(x, t - 2.0 * fd) - 8.0 * f.eval(x, t - fd) + 8.0 * f.eval(x, t + fd)
                - f.eval(x, t + 2.0 * fd))
                / (12.0 * fd);
            d * d
        })
    };
    let h = dt / SUP_SAMPLES_PER_STEP as f64;
    for (order, slot) in g_sup.iter_mut().enumerate() {
        *slot = sup_abs(|t| g.derivatives(t)[order], h, steps * SUP_SAMPLES_PER_STEP);
    }
    for m in 0..steps {
        let t0 = m as f64 * dt;
        for (x, w) in gn.iter().zip(&gw) {
            let t = t0 + 0.5 * dt * (x + 1.0);
            let wt = 0.5 * dt * w;
            let d = g.derivatives(t);
            for (s, v) in g_l2.iter_mut().zip(d) {
                *s += wt * v * v;
            }
            if !f.is_zero() {
                f_l2 += wt * space_sq(t);
                ft_l2 += wt * dt_sq(t);
            }
        }
    }
    Ok(DataNorms {
        g_sup,
        g_l2: g_l2.into_iter().map(f64::sqrt).collect(),
        f_l2: f_l2.sqrt(),
        f_h1: (f_l2 + ft_l2).sqrt(),
    })
}

/// `max |u|` over `[0, count·h]`: sampled with spacing `h`, then every
/// sampled local maximum is refined by golden-section search.
fn sup_abs(u: impl Fn(f64) -> f64, h: f64, count: usize) -> f64 {
    let vals: Vec<f64> = (0..=count).map(|j| u(j as f64 * h).abs()).collect();
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for j in 1..count {
        if vals[j] < vals[j - 1] || vals[j] < vals[j + 1] || vals[j] == 0.0 {
            continue;
        }
        let (mut a, mut b) = ((j - 1) as f64 * h, (j + 1) as f64 * h);
        for _ in 0..60 {
            let c = b - inv_phi * (b - a);
            let d = a + inv_phi * (b - a);
            if u(c).abs() > u(d).abs() {
                b = d;
            } else {
                a = c;
            }
        }
        best = best.max(u(0.5 * (a + b)).abs());
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuditMode {
    TauDependent,
    TauUniform,
    Higher,
}

impl FromStr for AuditMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tau-dependent" | "taudependent" => Ok(AuditMode::TauDependent),
            "tau-uniform" | "tauuniform" => Ok(AuditMode::TauUniform),
            "higher" => Ok(AuditMode::Higher),
            other => Err(format!("unknown audit mode `{other}`")),
        }
    }
}

impl fmt::Display for AuditMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditMode::TauDependent => "tau-dependent",
            AuditMode::TauUniform => "tau-uniform",
            AuditMode::Higher => "higher",
        })
    }
}

/// Range of `α` and the size of its gradient, reported alongside audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// `sup_t ‖∂_x α(t)‖_{L³}`.
    pub grad_l3: f64,
}

pub fn coefficient_bounds(field: &CoefficientField, quad: &QuadratureRule, times: &[f64]) -> CoefficientBounds {
    let mut out = CoefficientBounds {
        alpha_min: f64::INFINITY,
        alpha_max: f64::NEG_INFINITY,
        grad_l3: 0.0,
    };
    for &t in times {
        for &x in quad.nodes() {
            let a = field.value(x, t);
            out.alpha_min = out.alpha_min.min(a);
            out.alpha_max = out.alpha_max.max(a);
        }
        let l3 = quad.integrate(|x| field.dx(x, t).abs().powi(3)).cbrt();
        out.grad_l3 = out.grad_l3.max(l3);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, defined as 0 when both vanish.
    pub ratio: f64,
    /// `ln C(α, τ, T) = ln C₁ + C₂ (1/τ + ‖α‖_∞ + 1) T` with `C₁ = C₂ = 1`,
    /// tracked in the τ-dependent accounting only.
    pub log_constant: Option<f64>,
    pub coefficient: Option<CoefficientBounds>,
}

/// Ratio of the selected estimate's left side to its data side.
pub fn audit_estimate(
    energy: &EnergyRecord,
    data: &DataNorms,
    mode: AuditMode,
    coefficient: Option<CoefficientBounds>,
) -> Result<AuditReport> {
    let (lhs, rhs) = match mode {
        AuditMode::TauDependent => (energy.tau_dependent_total(), data.lower_total()),
        AuditMode::TauUniform => (energy.tau_uniform_total(), data.lower_total()),
        AuditMode::Higher => (energy.higher_total(), data.higher_total()),
    };
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        return Err(Error::InconsistentAudit { energy: lhs });
    };
    let log_constant = match mode {
        AuditMode::TauDependent if energy.tau > 0.0 => {
            let alpha_sup = coefficient.map_or(1.0, |c| c.alpha_max.abs().max(c.alpha_min.abs()));
            let horizon = energy.times.last().copied().unwrap_or(0.0);
            Some((1.0 / energy.tau + alpha_sup + 1.0) * horizon)
        }
        _ => None,
    };
    Ok(AuditReport {
        mode,
        tau: energy.tau,
        lhs,
        rhs,
        ratio,
        log_constant,
        coefficient,
    })
}

/// Growth factor above which a sweep quantity counts as not τ-robust.
pub const SWEEP_GROWTH_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepVerdict {
    /// `max_τ R(τ) / R(τ_max)`.
    pub max_ratio_growth: f64,
    /// `max_τ / min_τ` of the left-side totals.
    pub lhs_spread: f64,
    pub robust: bool,
    pub flags: Vec<String>,
}

/// Judges reports ordered from the largest `τ` down.
pub fn judge_sweep(reports: &[AuditReport]) -> SweepVerdict {
    let mut flags = Vec::new();
    let Some(first) = reports.first() else {
        return SweepVerdict {
            max_ratio_growth: 1.0,
            lhs_spread: 1.0,
            robust: true,
            flags,
        };
    };
    let mut growth = 1.0f64;
    for r in reports {
        if first.ratio > 0.0 {
            let q = r.ratio / first.ratio;
            growth = growth.max(q);
            if r.mode != AuditMode::TauDependent && q > SWEEP_GROWTH_LIMIT {
                flags.push(format!("ratio grows by {q:.3} at tau = {:e}", r.tau));
            }
        }
        if let (Some(c), Some(c0)) = (r.log_constant, first.log_constant) {
            if c - c0 > SWEEP_GROWTH_LIMIT.ln() {
                flags.push(format!("constant not tau-robust at tau = {:e} (ln C = {c:.3e})", r.tau));
            }
        }
    }
    let lo = reports.iter().map(|r| r.lhs).fold(f64::INFINITY, f64::min);
    let hi = reports.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let lhs_spread = if lo > 0.0 {
        hi / lo
    } else if hi == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    SweepVerdict {
        max_ratio_growth: growth,
        lhs_spread,
        robust: flags.is_empty(),
        flags,
    }
}

/// Least-squares fit of `ln(E_low(t) / D) ≈ ln C + γ t` over the positive
/// samples, with `C` then raised so the bound holds at every sample.
pub fn gronwall_fit(times: &[f64], e_low: &[f64], data_total: f64) -> Option<(f64, f64)> {
    if data_total <= 0.0 {
        return None;
    }
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(e_low)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&t, &e)| (t, (e / data_total).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let gamma = sxy / sxx;
    let log_c = pts.iter().map(|(t, y)| y - gamma * t).fold(f64::NEG_INFINITY, f64::max);
    Some((log_c.exp(), gamma))
}

/// Coefficients of `z = -Δψ + ψ` tested against the basis, including the
/// boundary contributions of the Neumann datum and the absorbing end.
fn z_coefficients(
    traj: &Trajectory,
    basis: &SpectralBasis,
    g: &WindowedSignal,
    m: usize,
    left: &[f64],
    right: &[f64],
) -> (DVector<f64>, DVector<f64>) {
    let p = &traj.params;
    let lam = basis.eigenvalues();
    let t = traj.times[m];
    let d = g.derivatives(t);
    let absorbing = traj.bc == BoundaryMode::Mixed;
    let tr = |v: &DVector<f64>| v.iter().zip(right).map(|(c, w)| c * w).sum::<f64>();
    let (tv, ta) = (tr(&traj.dxi[m]), tr(&traj.ddxi[m]));
    let n = traj.modes();
    let mut z = DVector::zeros(n);
    let mut zt = DVector::zeros(n);
    for i in 0..n {
        z[i] = (1.0 + lam[i]) * traj.xi[m][i] - d[0] * left[i];
        zt[i] = (1.0 + lam[i]) * traj.dxi[m][i] - d[1] * left[i];
        if absorbing {
            z[i] += p.beta() * tv * right[i];
            zt[i] += p.beta() * ta * right[i];
        }
    }
    (z, zt)
}

/// Residual of `b z_t + c² z = f - τψ_ttt - αψ_tt + bψ_t + c²ψ`, divided by
/// `b`, with `z_t` a backward difference. Returns the Euclidean norm of the
/// coefficient residual at every step (0 at `t = 0`).
pub fn ode_residual_z(
    traj: &Trajectory,
    basis: &SpectralBasis,
    quad: &QuadratureRule,
    field: &CoefficientField,
    f: &Source,
    g: &WindowedSignal,
) -> Result<Vec<f64>> {
    let p = traj.params;
    if p.tau() <= 0.0 {
        return Err(Error::NonPositiveTau(p.tau()));
    }
    let third = traj.dddxi.as_ref().ok_or(Error::MissingThirdDerivative)?;
    let (b, c2) = (p.b(), p.c2());
    let left = basis.traces(End::Left);
    let right = basis.traces(End::Right);
    let mass = TimeVaryingMass::new(basis, quad, field);
    let mut out = vec![0.0];
    let mut prev = z_coefficients(traj, basis, g, 0, &left, &right).0;
    for m in 1..traj.len() {
        let t = traj.times[m];
        let (z, _) = z_coefficients(traj, basis, g, m, &left, &right);
        let zt = (&z - &prev) / traj.dt;
        let rhs = f.project(basis, quad, t) - &third[m] * p.tau() - mass.at_step(m, t) * &traj.ddxi[m]
            + &traj.dxi[m] * b
            + &traj.xi[m] * c2;
        let r = zt + &z * (c2 / b) - rhs / b;
        out.push(r.norm());
        mass.evict_before(m);
        prev = z;
    }
    Ok(out)
}

/// Same as [`ode_residual_z`] with `z_t` taken from the stored `ξ'`, `ξ''`
/// rather than differenced; vanishes up to round-off for any trajectory
/// that satisfies the Galerkin system at the grid points.
pub fn ode_residual_z_exact(
    traj: &Trajectory,
    basis: &SpectralBasis,
    quad: &QuadratureRule,
    field: &CoefficientField,
    f: &Source,
    g: &WindowedSignal,
) -> Result<Vec<f64>> {
    let p = traj.params;
    if p.tau() <= 0.0 {
        return Err(Error::NonPositiveTau(p.tau()));
    }
    let third = traj.dddxi.as_ref().ok_or(Error::MissingThirdDerivative)?;
    let (b, c2) = (p.b(), p.c2());
    let left = basis.traces(End::Left);
    let right = basis.traces(End::Right);
    let mass = TimeVaryingMass::new(basis, quad, field);
    (0..traj.len())
        .map(|m| {
            let t = traj.times[m];
            let (z, zt) = z_coefficients(traj, basis, g, m, &left, &right);
            let rhs = f.project(basis, quad, t) - &third[m] * p.tau() - mass.at_step(m, t) * &traj.ddxi[m]
                + &traj.dxi[m] * b
                + &traj.xi[m] * c2;
            Ok((zt + &z * (c2 / b) - rhs / b).norm())
        })
        .collect()
}
