//! Conformal factors φ on the closed unit ball, `g̃ = φ^{-2} |dx|^2`.
//!
//! Analytic fields evaluate themselves in [`Jet`] arithmetic, so their
//! derivative data is exact up to rounding. [`FiniteDifference`] adapts any
//! field through its values only.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::jet::{squared_distance, Jet, MAX_DIM};

/// Slack allowed on `|x| <= 1`.
pub const BALL_SLACK: f64 = 1e-12;

/// A point of the closed unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 || coords.len() > MAX_DIM {
            return arg(format!("point dimension {} outside 2..={MAX_DIM}", coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("point coordinates must be finite".into()));
        }
        let norm = norm(&coords);
        if norm > 1.0 + BALL_SLACK {
            return Err(Error::Domain(format!("|x| = {norm} lies outside the closed unit ball")));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Analytic,
    FiniteDifference { step: f64 },
}

/// A conformal factor with derivatives through order three.
///
/// `value` and `jet` accept any point where the underlying formula is
/// defined, including stencil points just outside the ball; geometric
/// operations check membership themselves.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn jet(&self, x: &[f64]) -> Jet;
    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
    fn label(&self) -> String;
}

pub type SharedField = Arc<dyn ScalarField>;

#[derive(Debug, Clone, PartialEq)]
pub struct Constant {
    pub dim: usize,
    pub c: f64,
}

impl ScalarField for Constant {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        self.c
    }
    fn jet(&self, _x: &[f64]) -> Jet {
        Jet::constant(self.c, self.dim)
    }
    fn label(&self) -> String {
        format!("constant({})", self.c)
    }
}

/// `φ(x) = a |x - y|^2 + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFactor {
    pub a: f64,
    pub c: f64,
    pub y: Vec<f64>,
}

impl QuadraticFactor {
    pub fn new(a: f64, c: f64, y: Vec<f64>) -> Self {
        Self { a, c, y }
    }

    pub fn centered(a: f64, c: f64, dim: usize) -> Self {
        Self::new(a, c, vec![0.0; dim])
    }

    /// `(1 + |x|^2)/2`, whose metric is the round hemisphere.
    pub fn round(dim: usize) -> Self {
        Self::centered(0.5, 0.5, dim)
    }

    pub fn center_norm(&self) -> f64 {
        norm(&self.y)
    }
}

impl ScalarField for QuadraticFactor {
    fn dim(&self) -> usize {
        self.y.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(&self.y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.a * d2 + self.c
    }
    fn jet(&self, x: &[f64]) -> Jet {
        squared_distance(&Jet::coordinates(x), &self.y) * self.a + self.c
    }
    fn label(&self) -> String {
        format!("quadratic(a={}, c={}, y={:?})", self.a, self.c, self.y)
    }
}

/// Non-quadratic perturbation shapes added to a base factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// `sin(x_1)`
    SinX1,
    /// `x_1 x_2`
    ProductX1X2,
    /// `x_1^3`
    CubicX1,
    /// `exp(-2 |x - p|^2)` around a fixed off-center point
    Gaussian,
    /// `|x|^4`, rotationally symmetric
    RadialQuartic,
    /// `cos(x_1 + 2 x_2) sin(x_m)`
    Wave,
}

impl Perturbation {
    pub const ALL: [Perturbation; 6] = [
        Perturbation::SinX1,
        Perturbation::ProductX1X2,
        Perturbation::CubicX1,
        Perturbation::Gaussian,
        Perturbation::RadialQuartic,
        Perturbation::Wave,
    ];

    fn center(dim: usize) -> Vec<f64> {
        [0.3, -0.2, 0.25, -0.1, 0.15][..dim].to_vec()
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Jet {
        let m = x.len();
        match self {
            Perturbation::SinX1 => x[0].sin(),
            Perturbation::ProductX1X2 => x[0] * x[1],
            Perturbation::CubicX1 => x[0] * x[0] * x[0],
            Perturbation::Gaussian => (squared_distance(x, &Self::center(m)) * -2.0).exp(),
            Perturbation::RadialQuartic => {
                let r2 = squared_distance(x, &vec![0.0; m]);
                r2 * r2
            }
            Perturbation::Wave => (x[0] + x[1] * 2.0).cos() * x[m - 1].sin(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let m = x.len();
        match self {
            Perturbation::SinX1 => x[0].sin(),
            Perturbation::ProductX1X2 => x[0] * x[1],
            Perturbation::CubicX1 => x[0].powi(3),
            Perturbation::Gaussian => {
                let c = Self::center(m);
                let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                (-2.0 * d2).exp()
            }
            Perturbation::RadialQuartic => dot(x, x).powi(2),
            Perturbation::Wave => (x[0] + 2.0 * x[1]).cos() * x[m - 1].sin(),
        }
    }
}

/// `base + amplitude * shape`.
#[derive(Debug, Clone)]
pub struct Perturbed {
    pub base: SharedField,
    pub shape: Perturbation,
    pub amplitude: f64,
}

impl Perturbed {
    pub fn new(base: SharedField, shape: Perturbation, amplitude: f64) -> Self {
        Self { base, shape, amplitude }
    }
}

impl ScalarField for Perturbed {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.base.value(x) + self.amplitude * self.shape.eval(x)
    }
    fn jet(&self, x: &[f64]) -> Jet {
        self.base.jet(x) + self.shape.eval_jet(&Jet::coordinates(x)) * self.amplitude
    }
    fn provenance(&self) -> Provenance {
        self.base.provenance()
    }
    fn label(&self) -> String {
        format!("{} + {}*{:?}", self.base.label(), self.amplitude, self.shape)
    }
}

/// The inversion `φ_y(z) = y + (|y|^2 - 1)(z - y)/|z - y|^2`.
pub fn mobius_map(y: &[f64], z: &[f64]) -> Vec<f64> {
    let d = dot(y, y) - 1.0;
    let w: Vec<f64> = z.iter().zip(y).map(|(a, b)| a - b).collect();
    let s = dot(&w, &w);
    y.iter().zip(&w).map(|(yi, wi)| yi + d * wi / s).collect()
}

fn mobius_map_jet(y: &[f64], z: &[Jet]) -> Vec<Jet> {
    let d = dot(y, y) - 1.0;
    let inv = squared_distance(z, y).recip() * d;
    z.iter().zip(y).map(|(zi, yi)| (*zi + (-yi)) * inv + *yi).collect()
}

/// Conformal factor of `φ_y^*(φ^{-2}|dx|^2)`:
/// `ψ(z) = φ(φ_y(z)) |z - y|^2 / (|y|^2 - 1)`.
#[derive(Debug, Clone)]
pub struct MobiusPullback {
    pub inner: SharedField,
    pub y: Vec<f64>,
}

pub fn mobius_pullback(inner: SharedField, y: &[f64]) -> Result<MobiusPullback> {
    if y.len() != inner.dim() {
        return arg("center dimension does not match the field");
    }
    if !(norm(y) > 1.0) {
        return arg(format!("Möbius center needs |y| > 1, got {}", norm(y)));
    }
    Ok(MobiusPullback { inner, y: y.to_vec() })
}

impl ScalarField for MobiusPullback {
    fn dim(&self) -> usize {
        self.y.len()
    }
    fn value(&self, z: &[f64]) -> f64 {
        let d = dot(&self.y, &self.y) - 1.0;
        let s: f64 = z.iter().zip(&self.y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.inner.value(&mobius_map(&self.y, z)) * s / d
    }
    fn jet(&self, z: &[f64]) -> Jet {
        let zj = Jet::coordinates(z);
        let xj = mobius_map_jet(&self.y, &zj);
        let x: Vec<f64> = xj.iter().map(|j| j.value).collect();
        let outer = self.inner.jet(&x).compose(&xj);
        let d = dot(&self.y, &self.y) - 1.0;
        outer * squared_distance(&zj, &self.y) * (1.0 / d)
    }
    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
    fn label(&self) -> String {
        format!("mobius_pullback({}, y={:?})", self.inner.label(), self.y)
    }
}

/// Step policy for [`FiniteDifference`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdStep {
    /// One absolute step for every derivative order.
    Fixed(f64),
    /// `1e-4 (1 + |x|)` for orders one and two, `5e-3 (1 + |x|)` for order
    /// three, where rounding in the 8-point stencil dominates sooner.
    Default,
}

/// Derivative jets by nested central differences of `inner`'s values,
/// optionally Richardson-extrapolated once (steps `h` and `2h`).
#[derive(Debug, Clone)]
pub struct FiniteDifference {
    pub inner: SharedField,
    pub step: FdStep,
    pub richardson: bool,
}

impl FiniteDifference {
    /// Plain second-order central differences with a fixed step.
    pub fn plain(inner: SharedField, h: f64) -> Self {
        Self { inner, step: FdStep::Fixed(h), richardson: false }
    }

    /// Default steps with one Richardson pass.
    pub fn trusted(inner: SharedField) -> Self {
        Self { inner, step: FdStep::Default, richardson: true }
    }

    fn steps(&self, x: &[f64]) -> [f64; 3] {
        match self.step {
            FdStep::Fixed(h) => [h; 3],
            FdStep::Default => {
                let s = 1.0 + norm(x);
                [1e-4 * s, 1e-4 * s, 5e-3 * s]
            }
        }
    }

    /// `D_{dirs[0]} .. D_{dirs[p-1]} f(x)` with central differences of step h.
    fn nested(&self, x: &[f64], dirs: &[usize], h: f64) -> f64 {
        let p = dirs.len();
        let mut acc = 0.0;
        let mut y = x.to_vec();
        for mask in 0u32..(1 << p) {
            y.copy_from_slice(x);
            let mut sign = 1.0;
            for (t, &d) in dirs.iter().enumerate() {
                if mask & (1 << t) != 0 {
                    y[d] -= h;
                    sign = -sign;
                } else {
                    y[d] += h;
                }
            }
            acc += sign * self.inner.value(&y);
        }
        acc / (2.0 * h).powi(p as i32)
    }

    fn derivative(&self, x: &[f64], dirs: &[usize], h: f64) -> f64 {
        if self.richardson {
            (4.0 * self.nested(x, dirs, h) - self.nested(x, dirs, 2.0 * h)) / 3.0
        } else {
            self.nested(x, dirs, h)
        }
    }

    /// Jet with every entry computed at the given fixed step.
    fn jet_with(&self, x: &[f64], steps: [f64; 3]) -> Jet {
        let m = x.len();
        let mut j = Jet::constant(self.inner.value(x), m);
        for i in 0..m {
            j.grad[i] = self.derivative(x, &[i], steps[0]);
            for k in i..m {
                let v = self.derivative(x, &[i, k], steps[1]);
                j.hess[i][k] = v;
                j.hess[k][i] = v;
                for l in k..m {
                    let v = self.derivative(x, &[i, k, l], steps[2]);
                    for (a, b, c) in [(i, k, l), (i, l, k), (k, i, l), (k, l, i), (l, i, k), (l, k, i)] {
                        j.third[a][b][c] = v;
                    }
                }
            }
        }
        j
    }

    /// Observed convergence ratio `|J(h) - J(h/2)| / |J(h/2) - J(h/4)|` of
    /// the plain central-difference jet (max norm over all entries). Close to
    /// 4 when the stencil is truncation-limited.
    pub fn order_ratio(inner: &SharedField, x: &[f64], h: f64) -> f64 {
        let fd = |s: f64| FiniteDifference::plain(inner.clone(), s).jet(x);
        let (a, b, c) = (fd(h), fd(h / 2.0), fd(h / 4.0));
        jet_max_abs(&(a - b)) / jet_max_abs(&(b - c))
    }
}

fn jet_max_abs(j: &Jet) -> f64 {
    let m = j.dim();
    let mut out: f64 = 0.0;
    for i in 0..m {
        out = out.max(j.grad[i].abs());
        for k in 0..m {
            out = out.max(j.hess[i][k].abs());
            for l in 0..m {
                out = out.max(j.third[i][k][l].abs());
            }
        }
    }
    out
}

impl ScalarField for FiniteDifference {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }
    fn jet(&self, x: &[f64]) -> Jet {
        self.jet_with(x, self.steps(x))
    }
    fn provenance(&self) -> Provenance {
        Provenance::FiniteDifference { step: self.steps(&[])[0] }
    }
    fn label(&self) -> String {
        format!("fd({}, {:?}, richardson={})", self.inner.label(), self.step, self.richardson)
    }
}
