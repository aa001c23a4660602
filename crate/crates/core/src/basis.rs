//! Neumann-Laplacian eigenbasis on `[0, L]`, composite Gauss–Legendre
//! quadrature, and the Sobolev-scale norms that are diagonal in this basis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Composite Gauss–Legendre rule on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree: usize,
}

impl QuadratureRule {
    /// `panels` equal panels with an `order`-point Gauss rule on each. Exact for
    /// polynomials of degree `2 order - 1`.
    pub fn composite(length: f64, panels: usize, order: usize) -> Self {
        let (ref_nodes, ref_weights) = gauss_legendre(order);
        let h = length / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = p as f64 * h;
            for (x, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(a + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            degree: 2 * order - 1,
        }
    }

    /// Rule with at least `count` nodes built from 12-point panels.
    pub fn with_count(length: f64, count: usize) -> Self {
        let order = crate::model::QUAD_PANEL_ORDER;
        let panels = count.div_ceil(order).max(1);
        Self::composite(length, panels, order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    /// Polynomial degree integrated exactly on each panel.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Boundary point of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

/// L²-orthonormal cosine eigenfunctions of the Neumann Laplacian on `[0, L]`:
/// `w_0 = 1/√L`, `w_i(x) = √(2/L) cos(iπx/L)`, with `λ_i = (iπ/L)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    length: f64,
    eigenvalues: Vec<f64>,
    norms: Vec<f64>,
}

impl SpectralBasis {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::ZeroLength(length));
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n_modes",
                rule: ">= 1",
                value: 0.0,
            });
        }
        let eigenvalues = (0..n).map(|i| (i as f64 * PI / length).powi(2)).collect();
        let norms = (0..n)
            .map(|i| {
                if i == 0 {
                    1.0 / length.sqrt()
                } else {
                    (2.0 / length).sqrt()
                }
            })
            .collect();
        Ok(SpectralBasis {
            length,
            eigenvalues,
            norms,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Default quadrature for this basis (12-point panels, one more panel than modes).
    pub fn default_quadrature(&self) -> QuadratureRule {
        QuadratureRule::with_count(self.length, crate::model::default_quad_points(self.len()))
    }

    fn wavenumber(&self, i: usize) -> f64 {
        i as f64 * PI / self.length
    }

    /// Unchecked evaluation of `w_i^{(deriv)}(x)` for `deriv <= 2`.
    #[inline]
    pub(crate) fn value(&self, i: usize, x: f64, deriv: usize) -> f64 {
        let kx = self.wavenumber(i);
        let c = self.norms[i];
        match deriv {
            0 => c * (kx * x).cos(),
            1 => -c * kx * (kx * x).sin(),
            _ => -c * kx * kx * (kx * x).cos(),
        }
    }

    pub fn eval_mode(&self, i: usize, x: f64, deriv: usize) -> Result<f64> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.len(),
            });
        }
        if !(0.0..=self.length).contains(&x) {
            return Err(Error::PositionOutOfRange { x, length: self.length });
        }
        if deriv > 2 {
            return Err(Error::DerivativeOrder(deriv));
        }
        Ok(self.value(i, x, deriv))
    }

    /// Dirichlet trace `w_i(0)` or `w_i(L)`.
    pub fn trace(&self, i: usize, end: End) -> f64 {
        match end {
            End::Left => self.norms[i],
            End::Right => {
                if i.is_multiple_of(2) {
                    self.norms[i]
                } else {
                    -self.norms[i]
                }
            }
        }
    }

    /// Trace vector `(w_0(a), ..., w_{n-1}(a))`.
    pub fn traces(&self, end: End) -> Vec<f64> {
        (0..self.len()).map(|i| self.trace(i, end)).collect()
    }

    /// `Σ_i c_i w_i^{(deriv)}(x)`.
    pub fn synthesize(&self, coeffs: &[f64], x: f64, deriv: usize) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.value(i, x, deriv))
            .sum()
    }

    /// Table `[q][i] = w_i(x_q)` on the quadrature nodes.
    pub fn mode_table(&self, quad: &QuadratureRule, deriv: usize) -> Vec<Vec<f64>> {
        quad.nodes()
            .iter()
            .map(|&x| (0..self.len()).map(|i| self.value(i, x, deriv)).collect())
            .collect()
    }
}

/// Convenience constructor mirroring [`SpectralBasis::new`].
pub fn build_basis(length: f64, n: usize) -> Result<SpectralBasis> {
    SpectralBasis::new(length, n)
}

/// L² projection `c_i = Σ_q ρ_q f(x_q) w_i(x_q)`.
pub fn project(basis: &SpectralBasis, quad: &QuadratureRule, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut c = vec![0.0; basis.len()];
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let fx = f(x);
        if fx == 0.0 {
            continue;
        }
        for (i, ci) in c.iter_mut().enumerate() {
            *ci += w * fx * basis.value(i, x, 0);
        }
    }
    c
}

/// Sobolev-scale norms that are diagonal in the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    L2,
    H1,
    H1Dual,
    LaplacianL2,
}

impl Space {
    /// Diagonal weight applied to `ξ_i²` for mode with eigenvalue `λ`.
    #[inline]
    pub fn weight(self, lambda: f64) -> f64 {
        match self {
            Space::L2 => 1.0,
            Space::H1 => 1.0 + lambda,
            Space::H1Dual => 1.0 / (1.0 + lambda),
            Space::LaplacianL2 => lambda * lambda,
        }
    }
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Space::L2),
            "h1" => Ok(Space::H1),
            "h1dual" | "h1*" => Ok(Space::H1Dual),
            "laplacianl2" | "laplacian" => Ok(Space::LaplacianL2),
            _ => Err(Error::UnknownSpace(s.to_string())),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::L2 => "L2",
            Space::H1 => "H1",
            Space::H1Dual => "H1dual",
            Space::LaplacianL2 => "LaplacianL2",
        };
        f.write_str(s)
    }
}

/// Squared norm `Σ weight(λ_i) ξ_i²`.
pub fn norm_sq(coeffs: &[f64], basis: &SpectralBasis, space: Space) -> f64 {
    coeffs
        .iter()
        .zip(basis.eigenvalues())
        .map(|(c, &l)| space.weight(l) * c * c)
        .sum()
}

pub fn norms(coeffs: &[f64], basis: &SpectralBasis, space: Space) -> Result<f64> {
    if coeffs.len() != basis.len() {
        return Err(Error::Shape(format!(
            "{} coefficients for {} modes",
            coeffs.len(),
            basis.len()
        )));
    }
    Ok(norm_sq(coeffs, basis, space).sqrt())
}
