//! Physical coefficients, boundary-data signals and solver configuration.

use crate::error::{Error, Result};

/// Coefficients of the third-order acoustic model.
///
/// The damping coefficient `b = delta + tau * c2` is derived and kept in sync
/// by every setter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    c2: f64,
    delta: f64,
    tau: f64,
    k: f64,
    beta: f64,
    b: f64,
}

impl ModelParams {
    pub fn new(c2: f64, delta: f64, tau: f64, k: f64, beta: f64) -> Result<Self> {
        let mut p = ModelParams {
            c2,
            delta,
            tau,
            k,
            beta,
            b: 0.0,
        };
        p.validate()?;
        p.b = derived_b(&p);
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let check = |ok: bool, name: &'static str, rule: &'static str, value: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, rule, value })
            }
        };
        check(self.c2.is_finite() && self.c2 > 0.0, "c2", "> 0", self.c2)?;
        check(self.delta.is_finite() && self.delta > 0.0, "delta", "> 0", self.delta)?;
        check(self.tau.is_finite() && self.tau >= 0.0, "tau", ">= 0", self.tau)?;
        check(self.k.is_finite(), "k", "finite", self.k)?;
        check(self.beta.is_finite() && self.beta >= 0.0, "beta", ">= 0", self.beta)?;
        Ok(())
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.c2, self.delta, tau, self.k, self.beta)
    }
    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.c2, self.delta, self.tau, k, self.beta)
    }
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.c2, self.delta, self.tau, self.k, beta)
    }
    pub fn with_c2(&self, c2: f64) -> Result<Self> {
        Self::new(c2, self.delta, self.tau, self.k, self.beta)
    }
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.c2, delta, self.tau, self.k, self.beta)
    }
}

/// `b = delta + tau * c2`.
pub fn derived_b(params: &ModelParams) -> f64 {
    params.delta + params.tau * params.c2
}

/// Highest time derivative a [`WindowedSignal`] can evaluate.
pub const MAX_SIGNAL_ORDER: usize = 4;

/// Boundary datum `g(t) = A t^p e^{-σt} sin(ωt)` for `t >= 0`.
///
/// With an optional cutoff `t_c` the signal is additionally tapered by
/// `(1 - t/t_c)^p` and vanishes for `t >= t_c`; for `p >= 5` this keeps the
/// first four derivatives continuous across the switch-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedSignal {
    pub amplitude: f64,
    pub omega: f64,
    pub power: u32,
    pub decay: f64,
    pub cutoff: Option<f64>,
}

/// Minimum onset power for which `g` and its first four derivatives vanish at
/// `t = 0`.
pub const MIN_ONSET_POWER: u32 = 5;

impl WindowedSignal {
    pub fn new(amplitude: f64, omega: f64, power: u32, decay: f64) -> Result<Self> {
        let sig = WindowedSignal {
            amplitude,
            omega,
            power,
            decay,
            cutoff: None,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Builds a signal without the onset-power check. Useful for probing
    /// compatibility of signals that start too abruptly.
    pub fn unchecked(amplitude: f64, omega: f64, power: u32, decay: f64) -> Self {
        WindowedSignal {
            amplitude,
            omega,
            power,
            decay,
            cutoff: None,
        }
    }

    pub fn zero() -> Self {
        WindowedSignal {
            amplitude: 0.0,
            omega: 0.0,
            power: MIN_ONSET_POWER,
            decay: 0.0,
            cutoff: None,
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                rule: "> 0",
                value: cutoff,
            });
        }
        self.cutoff = Some(cutoff);
        Ok(self)
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                rule: "finite",
                value: self.amplitude,
            });
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                rule: "finite",
                value: self.omega,
            });
        }
        if self.power < MIN_ONSET_POWER {
            return Err(Error::InvalidParameter {
                name: "power",
                rule: ">= 5",
                value: self.power as f64,
            });
        }
        if !(self.decay.is_finite() && self.decay >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "decay",
                rule: ">= 0",
                value: self.decay,
            });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.omega == 0.0
    }

    pub fn eval(&self, t: f64, order: usize) -> Result<f64> {
        signal_eval(self, t, order)
    }

    /// `[g, g', g'', g''', g'''']` at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; MAX_SIGNAL_ORDER + 1] {
        let mut out = [0.0; MAX_SIGNAL_ORDER + 1];
        if self.is_zero() || t < 0.0 {
            return out;
        }
        if let Some(tc) = self.cutoff {
            if t >= tc {
                return out;
            }
        }
        let p = self.power as i32;

        // Derivative tables of each factor.
        let mut mono = [0.0; MAX_SIGNAL_ORDER + 1];
        let mut coef = 1.0;
        for (m, slot) in mono.iter_mut().enumerate() {
            let e = p - m as i32;
            if e < 0 {
                break;
            }
            *slot = coef * t.powi(e);
            coef *= e as f64;
        }
        let mut expo = [0.0; MAX_SIGNAL_ORDER + 1];
        let damp = (-self.decay * t).exp();
        for (m, slot) in expo.iter_mut().enumerate() {
            *slot = (-self.decay).powi(m as i32) * damp;
        }
        let mut wave = [0.0; MAX_SIGNAL_ORDER + 1];
        let (sin, cos) = (self.omega * t).sin_cos();
        for (m, slot) in wave.iter_mut().enumerate() {
            let rotated = [sin, cos, -sin, -cos][m % 4];
            *slot = self.omega.powi(m as i32) * rotated;
        }

        let mut prod = leibniz(&leibniz(&mono, &expo), &wave);
        if let Some(tc) = self.cutoff {
            let mut taper = [0.0; MAX_SIGNAL_ORDER + 1];
            let s = 1.0 - t / tc;
            let mut coef = 1.0;
            for (m, slot) in taper.iter_mut().enumerate() {
                let e = p - m as i32;
                if e < 0 {
                    break;
                }
                *slot = coef * s.powi(e);
                coef *= -(e as f64) / tc;
            }
            prod = leibniz(&prod, &taper);
        }
        for (o, v) in out.iter_mut().zip(prod.iter()) {
            *o = self.amplitude * v;
        }
        out
    }
}

/// Derivative table of a product from the tables of its factors.
fn leibniz(a: &[f64; MAX_SIGNAL_ORDER + 1], b: &[f64; MAX_SIGNAL_ORDER + 1]) -> [f64; MAX_SIGNAL_ORDER + 1] {
    const BINOM: [[f64; 5]; 5] = [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0],
        [1.0, 3.0, 3.0, 1.0, 0.0],
        [1.0, 4.0, 6.0, 4.0, 1.0],
    ];
    let mut out = [0.0; MAX_SIGNAL_ORDER + 1];
    for m in 0..=MAX_SIGNAL_ORDER {
        out[m] = (0..=m).map(|j| BINOM[m][j] * a[j] * b[m - j]).sum();
    }
    out
}

/// Exact `order`-th time derivative of the signal at `t`.
pub fn signal_eval(sig: &WindowedSignal, t: f64, order: usize) -> Result<f64> {
    if order > MAX_SIGNAL_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_SIGNAL_ORDER,
        });
    }
    Ok(sig.derivatives(t)[order])
}

/// Orders `m < required_order` whose derivative fails to vanish at `t = 0`.
/// An empty list means the signal is compatible with homogeneous initial data.
pub fn validate_compatibility(sig: &WindowedSignal, required_order: usize) -> Vec<usize> {
    let d = sig.derivatives(0.0);
    (0..required_order.min(MAX_SIGNAL_ORDER + 1))
        .filter(|&m| d[m] != 0.0)
        .collect()
}

/// Discretization and iteration controls shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub n_modes: usize,
    pub quad_points: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub eval_grid: usize,
}

/// Gauss points per panel of the composite rule used throughout.
pub const QUAD_PANEL_ORDER: usize = 12;

impl SolverConfig {
    /// Config with default quadrature (`12 (n + 1)` nodes) and evaluation grid
    /// (`8 n + 1` points).
    pub fn new(dt: f64, t_final: f64, n_modes: usize) -> Result<Self> {
        let cfg = SolverConfig {
            dt,
            t_final,
            n_modes,
            quad_points: default_quad_points(n_modes),
            picard_tol: 1e-10,
            picard_max: 50,
            eval_grid: default_eval_grid(n_modes),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_picard(mut self, tol: f64, max: usize) -> Result<Self> {
        self.picard_tol = tol;
        self.picard_max = max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, rule, value| Err(Error::InvalidParameter { name, rule, value });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", "> 0", self.dt);
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad("t_final", "> 0", self.t_final);
        }
        if self.dt >= self.t_final {
            return bad("dt", "< t_final", self.dt);
        }
        if self.n_modes == 0 {
            return bad("n_modes", ">= 1", 0.0);
        }
        if self.quad_points < 4 * self.n_modes {
            return bad("quad_points", ">= 4 n_modes", self.quad_points as f64);
        }
        if !(self.picard_tol.is_finite() && self.picard_tol > 0.0) {
            return bad("picard_tol", "> 0", self.picard_tol);
        }
        if self.picard_max == 0 {
            return bad("picard_max", ">= 1", 0.0);
        }
        if self.eval_grid < 2 {
            return bad("eval_grid", ">= 2", self.eval_grid as f64);
        }
        Ok(())
    }

    /// Number of time steps; `t_final` is rounded to the nearest multiple of `dt`.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }
}

pub fn default_quad_points(n_modes: usize) -> usize {
    QUAD_PANEL_ORDER * (n_modes + 1)
}

pub fn default_eval_grid(n_modes: usize) -> usize {
    8 * n_modes + 1
}
