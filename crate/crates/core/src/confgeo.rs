//! Curvature of `g̃ = φ^{-2} |dx|^2` on the ball.
//!
//! In the g̃-orthonormal frame `φ ∂_i` the Schouten endomorphism is
//! `S_ij = φ φ_ij - |∇φ|^2 δ_ij / 2`; its coordinate (0,2) components are
//! `Ã_ij = S_ij / φ^2`. σ_k is always taken of `S`, the endomorphism
//! `g̃^{-1} Ã`. Derivatives of `S` and of the Newton transforms come from
//! running the matrix kernel on [`Dual`] entries.

use crate::error::{arg, Error, Result};
use crate::field::{dot, norm, Point, ScalarField};
use crate::jet::{Dual, Jet};
use crate::symfun::{newton_sequence, sigma_k, Spectrum, SymEndo};

/// Jet of φ at `x`, rejecting non-positive or non-finite values.
pub fn positive_jet(phi: &dyn ScalarField, x: &[f64]) -> Result<Jet> {
    if x.len() != phi.dim() {
        return arg(format!("point has dimension {}, field has {}", x.len(), phi.dim()));
    }
    let j = phi.jet(x);
    if !(j.value > 0.0) {
        return Err(Error::Domain(format!("conformal factor {} is not positive at {x:?}", j.value)));
    }
    if !j.is_finite() {
        return Err(Error::Domain(format!("conformal factor jet is not finite at {x:?}")));
    }
    Ok(j)
}

/// `S = φ Hess φ - |∇φ|^2/2 I`.
pub fn frame_schouten_from_jet(j: &Jet) -> SymEndo {
    let m = j.dim();
    let g2: f64 = (0..m).map(|p| j.grad[p] * j.grad[p]).sum();
    SymEndo::from_fn(m, |a, b| {
        let d = if a == b { 0.5 * g2 } else { 0.0 };
        j.value * j.hess[a][b] - d
    })
    .expect("jet dimension >= 2")
}

/// `S` with first derivatives attached; needs the order-3 jet.
pub fn frame_schouten_dual(j: &Jet) -> SymEndo<Dual> {
    let m = j.dim();
    let phi = j.value_dual();
    let grads: Vec<Dual> = (0..m).map(|p| j.grad_dual(p)).collect();
    let g2 = grads.iter().fold(Dual::constant(0.0, m), |acc, g| acc + *g * *g) * 0.5;
    SymEndo::from_fn(m, |a, b| {
        let base = phi * j.hess_dual(a, b);
        if a == b {
            base - g2
        } else {
            base
        }
    })
    .expect("jet dimension >= 2")
}

/// The g̃-orthonormal-frame Schouten endomorphism at `x`.
pub fn frame_schouten(phi: &dyn ScalarField, x: &Point) -> Result<SymEndo> {
    Ok(frame_schouten_from_jet(&positive_jet(phi, x.coords())?))
}

/// Coordinate components `Ã_ij` of the Schouten tensor of g̃.
pub fn schouten(phi: &dyn ScalarField, x: &Point) -> Result<SymEndo> {
    let j = positive_jet(phi, x.coords())?;
    Ok(frame_schouten_from_jet(&j).scale(&(1.0 / (j.value * j.value))))
}

/// Eigenvalues of `g̃^{-1} Ã`, ascending.
pub fn schouten_spectrum(phi: &dyn ScalarField, x: &Point) -> Result<Spectrum> {
    Ok(frame_schouten(phi, x)?.eigenvalues())
}

fn check_k(k: usize, m: usize) -> Result<()> {
    if k == 0 || k >= m {
        return arg(format!("curvature index k = {k} outside 1..={}", m - 1));
    }
    Ok(())
}

/// `σ_k(sign · S)`; `sign = -1` measures the negative cone.
pub fn sigma_k_curvature(phi: &dyn ScalarField, x: &Point, k: usize, sign: f64) -> Result<f64> {
    check_k(k, x.dim())?;
    if sign != 1.0 && sign != -1.0 {
        return arg("sign must be +1 or -1");
    }
    sigma_k(&frame_schouten(phi, x)?.scale(&sign), k)
}

/// Frobenius norm of `Ẽ = (n-1) φ^{-1} (Hess φ - Δφ/(n+1) δ)`.
pub fn einstein_deviation(phi: &dyn ScalarField, x: &Point) -> Result<f64> {
    let j = positive_jet(phi, x.coords())?;
    let m = j.dim();
    let mean = j.laplacian() / m as f64;
    let mut acc = 0.0;
    for a in 0..m {
        for b in 0..m {
            let t = j.hess[a][b] - if a == b { mean } else { 0.0 };
            acc += t * t;
        }
    }
    Ok((m as f64 - 2.0) * acc.sqrt() / j.value)
}

/// Christoffel symbols `Γ^i_{jk}` stored as `[i][j][k]`.
pub type Christoffel = Vec<Vec<Vec<f64>>>;

/// `Γ^i_{jk} = w_k δ_ij + w_j δ_ik - w_i δ_jk` with `w = -log φ`.
pub fn christoffel_from_jet(j: &Jet) -> Christoffel {
    let m = j.dim();
    let w: Vec<f64> = (0..m).map(|i| -j.grad[i] / j.value).collect();
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    (0..m)
        .map(|i| {
            (0..m)
                .map(|a| (0..m).map(|b| w[b] * d(i, a) + w[a] * d(i, b) - w[i] * d(a, b)).collect())
                .collect()
        })
        .collect()
}

pub fn christoffel(phi: &dyn ScalarField, x: &Point) -> Result<Christoffel> {
    Ok(christoffel_from_jet(&positive_jet(phi, x.coords())?))
}

/// g̃-divergence of a vector field given by dual-number components:
/// `∂_j V^j + m w_l V^l`.
fn divergence(v: &[Dual], w: &[f64]) -> f64 {
    let m = v.len();
    (0..m).map(|j| v[j].grad[j] + m as f64 * w[j] * v[j].value).sum()
}

/// Covariant divergence `∇_i T_k(Ã)^i_j` in coordinate components.
pub fn div_newton(phi: &dyn ScalarField, x: &Point, k: usize) -> Result<Vec<f64>> {
    let j = positive_jet(phi, x.coords())?;
    let m = j.dim();
    if k > m {
        return arg(format!("k = {k} exceeds dimension {m}"));
    }
    let seq = newton_sequence(&frame_schouten_dual(&j), k)?;
    let t = &seq.transforms[k];
    let w: Vec<f64> = (0..m).map(|i| -j.grad[i] / j.value).collect();
    let tr = t.trace().value;
    Ok((0..m)
        .map(|c| {
            let partial: f64 = (0..m).map(|i| t.get(i, c).grad[i]).sum();
            let contracted: f64 = (0..m).map(|l| w[l] * t.get(l, c).value).sum();
            partial + m as f64 * contracted - w[c] * tr
        })
        .collect())
}

/// `|X(σ_k) - [-(m/(m-k)) ∇_j(T_k^j_i X^i) + ∇_j(σ_k X^j)]|` for the Euler
/// field `X = x`, the ball-coordinate form of the hemisphere's conformal
/// Killing field `-∇_{g_0} x_{n+2}`.
pub fn han_residual(phi: &dyn ScalarField, x: &Point, k: usize) -> Result<f64> {
    let j = positive_jet(phi, x.coords())?;
    let m = j.dim();
    check_k(k, m)?;
    let seq = newton_sequence(&frame_schouten_dual(&j), k)?;
    let t = &seq.transforms[k];
    let sigma = seq.sigmas[k];
    let xs: Vec<Dual> = (0..m).map(|i| Dual::variable(x.coords()[i], i, m)).collect();
    let w: Vec<f64> = (0..m).map(|i| -j.grad[i] / j.value).collect();

    let lhs: f64 = (0..m).map(|l| xs[l].value * sigma.grad[l]).sum();
    let tx: Vec<Dual> = (0..m)
        .map(|r| (0..m).fold(Dual::constant(0.0, m), |acc, i| acc + *t.get(r, i) * xs[i]))
        .collect();
    let sx: Vec<Dual> = xs.iter().map(|xi| sigma * *xi).collect();
    let coeff = m as f64 / (m - k) as f64;
    let rhs = -coeff * divergence(&tx, &w) + divergence(&sx, &w);
    Ok((lhs - rhs).abs())
}

fn frame_newton(phi: &dyn ScalarField, y: &[f64], k: usize) -> Result<(SymEndo, f64)> {
    let seq = newton_sequence(&frame_schouten_from_jet(&positive_jet(phi, y)?), k)?;
    Ok((seq.transforms[k].clone(), seq.sigmas[k]))
}

/// Central difference of a vector-valued function along every axis:
/// `out[l][i] = ∂_l f_i`.
fn central_jacobian<F>(x: &[f64], h: f64, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut out = Vec::with_capacity(x.len());
    for l in 0..x.len() {
        let mut p = x.to_vec();
        let mut q = x.to_vec();
        p[l] += h;
        q[l] -= h;
        let (fp, fq) = (f(&p)?, f(&q)?);
        out.push(fp.iter().zip(&fq).map(|(a, b)| (a - b) / (2.0 * h)).collect());
    }
    Ok(out)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return arg(format!("difference step {h} must be positive"));
    }
    Ok(())
}

/// [`div_newton`] for fields trusted only to second order: derivatives of
/// `T_k` come from central differences of the tensor at step `h`.
pub fn div_newton_fd(phi: &dyn ScalarField, x: &Point, k: usize, h: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    let m = x.dim();
    if k > m {
        return arg(format!("k = {k} exceeds dimension {m}"));
    }
    let j = positive_jet(phi, x.coords())?;
    let (t, _) = frame_newton(phi, x.coords(), k)?;
    let dt = central_jacobian(x.coords(), h, |y| {
        Ok(frame_newton(phi, y, k)?.0.entries().to_vec())
    })?;
    let w: Vec<f64> = (0..m).map(|i| -j.grad[i] / j.value).collect();
    let tr = t.trace();
    Ok((0..m)
        .map(|c| {
            let partial: f64 = (0..m).map(|i| dt[i][i * m + c]).sum();
            let contracted: f64 = (0..m).map(|l| w[l] * t.get(l, c)).sum();
            partial + m as f64 * contracted - w[c] * tr
        })
        .collect())
}

/// [`han_residual`] with every derivative of `σ_k` and of the vector
/// fields taken by central differences at step `h`.
pub fn han_residual_fd(phi: &dyn ScalarField, x: &Point, k: usize, h: f64) -> Result<f64> {
    check_step(h)?;
    let m = x.dim();
    check_k(k, m)?;
    let j = positive_jet(phi, x.coords())?;
    let w: Vec<f64> = (0..m).map(|i| -j.grad[i] / j.value).collect();
    let fields = |y: &[f64]| -> Result<Vec<f64>> {
        let (t, sigma) = frame_newton(phi, y, k)?;
        let mut out = vec![sigma];
        out.extend(t.apply(y));
        out.extend(y.iter().map(|v| sigma * v));
        Ok(out)
    };
    let at = fields(x.coords())?;
    let d = central_jacobian(x.coords(), h, fields)?;
    let xs = x.coords();
    let lhs: f64 = (0..m).map(|l| xs[l] * d[l][0]).sum();
    let div = |off: usize| -> f64 { (0..m).map(|l| d[l][off + l] + m as f64 * w[l] * at[off + l]).sum() };
    let coeff = m as f64 / (m - k) as f64;
    Ok((lhs - (-coeff * div(1) + div(1 + m))).abs())
}

/// The round-metric factor `ρ = 2/(1+|x|^2)` of stereographic coordinates:
/// the hemisphere metric is `ρ^2 |dx|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StereographicMap {
    pub dim: usize,
}

impl StereographicMap {
    pub fn rho(&self, x: &[f64]) -> f64 {
        2.0 / (1.0 + dot(x, x))
    }

    pub fn rho_jet(&self, x: &[f64]) -> Jet {
        let xs = Jet::coordinates(x);
        let r2 = crate::jet::squared_distance(&xs, &vec![0.0; self.dim]);
        (r2 + 1.0).recip() * 2.0
    }

    /// Height `x_{n+2} = (1 - |x|^2)/(1 + |x|^2)` of the hemisphere point.
    pub fn height(&self, x: &[f64]) -> f64 {
        let r2 = dot(x, x);
        (1.0 - r2) / (1.0 + r2)
    }

    /// Hemisphere factor `u = 1/(φρ)` with `g̃ = u^2 g_0`.
    pub fn hemisphere_factor(&self, phi: &Jet, x: &[f64]) -> Jet {
        (*phi * self.rho_jet(x)).recip()
    }

    /// Radial derivative of ρ on the unit sphere.
    pub const BOUNDARY_RADIAL_DERIVATIVE: f64 = -1.0;
}

/// Euclidean length of a coordinate covector.
pub fn covector_norm(v: &[f64]) -> f64 {
    norm(v)
}
