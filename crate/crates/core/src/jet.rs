//! Forward-mode derivative jets in at most [`MAX_DIM`] variables.
//!
//! [`Jet`] carries all partial derivatives through order three and is the
//! derivative data attached to a conformal factor at a point. [`Dual`] is
//! the first-order truncation used to differentiate matrix expressions
//! (Schouten tensor, Newton transforms) along coordinate directions.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Scalar};

pub const MAX_DIM: usize = 5;

type Vec5 = [f64; MAX_DIM];
type Mat5 = [[f64; MAX_DIM]; MAX_DIM];
type Ten5 = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Value, gradient, Hessian and third derivatives of a scalar function.
///
/// Entries beyond `dim` are zero. Hessian and third-derivative arrays are
/// fully symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    dim: usize,
    pub value: f64,
    pub grad: Vec5,
    pub hess: Mat5,
    pub third: Ten5,
}

impl Jet {
    pub fn constant(value: f64, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds {MAX_DIM}");
        Self {
            dim,
            value,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
            third: [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `x_idx` evaluated at `value`.
    pub fn variable(value: f64, idx: usize, dim: usize) -> Self {
        let mut j = Self::constant(value, dim);
        j.grad[idx] = 1.0;
        j
    }

    /// Coordinate jets `(x_0, .., x_{m-1})` at the point `x`.
    pub fn coordinates(x: &[f64]) -> Vec<Jet> {
        (0..x.len()).map(|i| Jet::variable(x[i], i, x.len())).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gradient(&self) -> Vec<f64> {
        self.grad[..self.dim].to_vec()
    }

    pub fn laplacian(&self) -> f64 {
        (0..self.dim).map(|i| self.hess[i][i]).sum()
    }

    /// Applies a scalar function given its value and first three
    /// derivatives at `self.value`.
    pub fn chain(&self, f: [f64; 4]) -> Jet {
        let m = self.dim;
        let g = &self.grad;
        let h = &self.hess;
        let mut out = Jet::constant(f[0], m);
        for i in 0..m {
            out.grad[i] = f[1] * g[i];
            for j in 0..m {
                out.hess[i][j] = f[2] * g[i] * g[j] + f[1] * h[i][j];
                for k in 0..m {
                    out.third[i][j][k] = f[3] * g[i] * g[j] * g[k]
                        + f[2] * (h[i][j] * g[k] + h[i][k] * g[j] + h[j][k] * g[i])
                        + f[1] * self.third[i][j][k];
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let v = self.value;
        let r = 1.0 / v;
        self.chain([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain([e; 4])
    }

    pub fn ln(&self) -> Jet {
        let r = 1.0 / self.value;
        self.chain([self.value.ln(), r, -r * r, 2.0 * r * r * r])
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.value.sqrt();
        let r = 1.0 / self.value;
        self.chain([s, 0.5 / s, -0.25 * r / s, 0.375 * r * r / s])
    }

    pub fn powi(&self, p: i32) -> Jet {
        let v = self.value;
        let pf = p as f64;
        self.chain([
            v.powi(p),
            pf * v.powi(p - 1),
            pf * (pf - 1.0) * v.powi(p - 2),
            pf * (pf - 1.0) * (pf - 2.0) * v.powi(p - 3),
        ])
    }

    /// Multivariate chain rule: `self` is the jet of `F` at `G(z)` and
    /// `inner[i]` the jet of `G^i` at `z`; returns the jet of `F ∘ G`.
    pub fn compose(&self, inner: &[Jet]) -> Jet {
        let m_out = self.dim;
        assert_eq!(inner.len(), m_out, "inner map must have one component per outer variable");
        let m = inner.first().map_or(0, |j| j.dim);
        let mut out = Jet::constant(self.value, m);
        for a in 0..m {
            for i in 0..m_out {
                out.grad[a] += self.grad[i] * inner[i].grad[a];
            }
        }
        for a in 0..m {
            for b in 0..m {
                let mut acc = 0.0;
                for i in 0..m_out {
                    acc += self.grad[i] * inner[i].hess[a][b];
                    for j in 0..m_out {
                        acc += self.hess[i][j] * inner[i].grad[a] * inner[j].grad[b];
                    }
                }
                out.hess[a][b] = acc;
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let mut acc = 0.0;
                    for i in 0..m_out {
                        let gi = &inner[i];
                        acc += self.grad[i] * gi.third[a][b][c];
                        for j in 0..m_out {
                            let gj = &inner[j];
                            acc += self.hess[i][j]
                                * (gi.hess[a][b] * gj.grad[c] + gi.hess[a][c] * gj.grad[b] + gi.hess[b][c] * gj.grad[a]);
                            for k in 0..m_out {
                                acc += self.third[i][j][k] * gi.grad[a] * gj.grad[b] * inner[k].grad[c];
                            }
                        }
                    }
                    out.third[a][b][c] = acc;
                }
            }
        }
        out
    }

    /// First-order truncation of the directional data: the dual number
    /// whose value is `∂_i f` and whose gradient is `∂_i ∂_j f`.
    pub fn grad_dual(&self, i: usize) -> Dual {
        let mut d = Dual::constant(self.grad[i], self.dim);
        d.grad[..self.dim].copy_from_slice(&self.hess[i][..self.dim]);
        d
    }

    pub fn hess_dual(&self, i: usize, j: usize) -> Dual {
        let mut d = Dual::constant(self.hess[i][j], self.dim);
        d.grad[..self.dim].copy_from_slice(&self.third[i][j][..self.dim]);
        d
    }

    pub fn value_dual(&self) -> Dual {
        let mut d = Dual::constant(self.value, self.dim);
        d.grad[..self.dim].copy_from_slice(&self.grad[..self.dim]);
        d
    }

    pub fn is_finite(&self) -> bool {
        let m = self.dim;
        self.value.is_finite()
            && (0..m).all(|i| {
                self.grad[i].is_finite()
                    && (0..m).all(|j| self.hess[i][j].is_finite() && (0..m).all(|k| self.third[i][j][k].is_finite()))
            })
    }

    fn zip(self, rhs: Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert_eq!(self.dim, rhs.dim);
        let m = self.dim;
        let mut out = Jet::constant(f(self.value, rhs.value), m);
        for i in 0..m {
            out.grad[i] = f(self.grad[i], rhs.grad[i]);
            for j in 0..m {
                out.hess[i][j] = f(self.hess[i][j], rhs.hess[i][j]);
                for k in 0..m {
                    out.third[i][j][k] = f(self.third[i][j][k], rhs.third[i][j][k]);
                }
            }
        }
        out
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Jet {
        let m = self.dim;
        let mut out = self;
        out.value = f(self.value);
        for i in 0..m {
            out.grad[i] = f(self.grad[i]);
            for j in 0..m {
                out.hess[i][j] = f(self.hess[i][j]);
                for k in 0..m {
                    out.third[i][j][k] = f(self.third[i][j][k]);
                }
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|a| -a)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.map(|a| a * rhs)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        debug_assert_eq!(self.dim, rhs.dim);
        let m = self.dim;
        let (f, g) = (&self, &rhs);
        let mut out = Jet::constant(f.value * g.value, m);
        for i in 0..m {
            out.grad[i] = f.grad[i] * g.value + f.value * g.grad[i];
            for j in 0..m {
                out.hess[i][j] =
                    f.hess[i][j] * g.value + f.grad[i] * g.grad[j] + f.grad[j] * g.grad[i] + f.value * g.hess[i][j];
                for k in 0..m {
                    out.third[i][j][k] = f.third[i][j][k] * g.value
                        + f.hess[i][j] * g.grad[k]
                        + f.hess[i][k] * g.grad[j]
                        + f.hess[j][k] * g.grad[i]
                        + f.grad[i] * g.hess[j][k]
                        + f.grad[j] * g.hess[i][k]
                        + f.grad[k] * g.hess[i][j]
                        + f.value * g.third[i][j][k];
                }
            }
        }
        out
    }
}

/// `Σ (x_i - y_i)^2` as a jet.
pub fn squared_distance(x: &[Jet], y: &[f64]) -> Jet {
    let m = x.first().map_or(0, |j| j.dim());
    x.iter()
        .zip(y)
        .fold(Jet::constant(0.0, m), |acc, (xi, yi)| {
            let d = *xi + (-yi);
            acc + d * d
        })
}

/// Value and gradient; a first-order jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    dim: usize,
    pub value: f64,
    pub grad: Vec5,
}

impl Dual {
    pub fn constant(value: f64, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dual dimension {dim} exceeds {MAX_DIM}");
        Self { dim, value, grad: [0.0; MAX_DIM] }
    }

    pub fn variable(value: f64, idx: usize, dim: usize) -> Self {
        let mut d = Self::constant(value, dim);
        d.grad[idx] = 1.0;
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn recip(self) -> Dual {
        let r = 1.0 / self.value;
        let mut out = Dual::constant(r, self.dim);
        for i in 0..self.dim {
            out.grad[i] = -r * r * self.grad[i];
        }
        out
    }

    fn zip(self, rhs: Dual, f: impl Fn(f64, f64) -> f64) -> Dual {
        // dimension 0 marks a dimensionless constant from Scalar::zero/one
        let dim = self.dim.max(rhs.dim);
        let mut out = Dual::constant(f(self.value, rhs.value), dim);
        for i in 0..dim {
            out.grad[i] = f(self.grad[i], rhs.grad[i]);
        }
        out
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(mut self) -> Dual {
        self.value = -self.value;
        for g in &mut self.grad {
            *g = -*g;
        }
        self
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let dim = self.dim.max(rhs.dim);
        let mut out = Dual::constant(self.value * rhs.value, dim);
        for i in 0..dim {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        out
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(mut self, rhs: f64) -> Dual {
        self.value *= rhs;
        for g in &mut self.grad {
            *g *= rhs;
        }
        self
    }
}

impl Scalar for Dual {
    fn zero() -> Self {
        Dual::constant(0.0, 0)
    }
    fn one() -> Self {
        Dual::constant(1.0, 0)
    }
    fn from_int(v: i64) -> Self {
        Dual::constant(v as f64, 0)
    }
    fn div_int(self, d: i64) -> Self {
        self * (1.0 / d as f64)
    }
}

impl Field for Dual {
    fn quot(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Nested central differences of a value function; independent of the
    /// jet arithmetic.
    fn fd_third(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, j: usize, k: usize, h: f64) -> f64 {
        let d1 = |y: &[f64], a: usize, g: &dyn Fn(&[f64]) -> f64| {
            let mut p = y.to_vec();
            let mut q = y.to_vec();
            p[a] += h;
            q[a] -= h;
            (g(&p) - g(&q)) / (2.0 * h)
        };
        let fi = |y: &[f64]| d1(y, i, f);
        let fij = |y: &[f64]| d1(y, j, &fi);
        d1(x, k, &fij)
    }

    fn sample(x: &[Jet]) -> Jet {
        let s = (x[0] * x[1]).sin();
        let e = (x[2] * x[2] * (-0.5)).exp();
        (s + e * x[0]) * (x[1] * x[1] + 2.0).recip() + (x[0] * x[0] + 1.0).sqrt().ln()
    }

    fn sample_value(x: &[f64]) -> f64 {
        let s = (x[0] * x[1]).sin();
        let e = (-0.5 * x[2] * x[2]).exp();
        (s + e * x[0]) / (x[1] * x[1] + 2.0) + (x[0] * x[0] + 1.0).sqrt().ln()
    }

    #[test]
    fn jet_matches_finite_differences() {
        let x = [0.3, -0.7, 0.45];
        let j = sample(&Jet::coordinates(&x));
        assert!((j.value - sample_value(&x)).abs() < 1e-15);
        let h = 1e-3;
        for i in 0..3 {
            for jj in 0..3 {
                for k in 0..3 {
                    let fd = fd_third(&sample_value, &x, i, jj, k, h);
                    assert!((fd - j.third[i][jj][k]).abs() < 1e-4, "third {i}{jj}{k}: {fd} vs {}", j.third[i][jj][k]);
                }
            }
        }
    }

    #[test]
    fn compose_matches_direct_evaluation() {
        // G(z) = (z0 + z1^2, sin z2, z0 z2); F evaluated through G equals
        // the jet of F∘G built directly.
        let z = [0.2, 0.5, -0.3];
        let zj = Jet::coordinates(&z);
        let g = [zj[0] + zj[1] * zj[1], zj[2].sin(), zj[0] * zj[2]];
        let direct = sample(&g);
        let gz: Vec<f64> = g.iter().map(|j| j.value).collect();
        let outer = sample(&Jet::coordinates(&gz));
        let composed = outer.compose(&g);
        let diff = direct - composed;
        assert!(diff.value.abs() < 1e-14);
        for i in 0..3 {
            assert!(diff.grad[i].abs() < 1e-13);
            for j in 0..3 {
                assert!(diff.hess[i][j].abs() < 1e-12);
                for k in 0..3 {
                    assert!(diff.third[i][j][k].abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn powi_and_sqrt_agree() {
        let x = Jet::coordinates(&[1.3, 0.4]);
        let r = x[0] * x[0] + x[1] * x[1];
        let a = r.powi(3);
        let b = r * r * r;
        let c = r.sqrt().powi(6);
        for (p, q) in [(a, b), (a, c)] {
            let d = p - q;
            assert!(d.value.abs() < 1e-12 && d.third[0][1][1].abs() < 1e-10);
        }
    }

    #[test]
    fn dual_constants_broadcast() {
        let x = Dual::variable(2.0, 1, 3);
        let y = x * Dual::from_int(3) + Dual::one();
        assert_eq!(y.value, 7.0);
        assert_eq!(y.grad[1], 3.0);
        assert_eq!(y.dim(), 3);
        let q = Dual::one().quot(x);
        assert!((q.grad[1] + 0.25).abs() < 1e-16);
    }
}
