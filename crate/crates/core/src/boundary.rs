//! Boundary calculus on the unit sphere for `g̃ = φ^{-2} |dx|^2`.
//!
//! Frames are Euclidean orthonormal tangents `e_α` at a point `x` with
//! `|x| = 1`; the g̃-orthonormal frame is `t_α = φ e_α`, `ν̃ = φ x`. In
//! frame components the Schouten endomorphism restricted to this basis is
//! `F = Qᵀ S Q` with `Q = [e_1 .. e_n, x]`, so the normal direction is the
//! last index.

use crate::confgeo::{frame_schouten_from_jet, positive_jet, StereographicMap};
use crate::error::{arg, Result};
use crate::field::{dot, norm, Point, ScalarField};
use crate::symfun::{newton_sequence, sigma_k, SymEndo};

/// Tolerance on `|x| = 1` for boundary points.
pub const SPHERE_TOLERANCE: f64 = 1e-12;
/// Great-circle step used to differentiate H tangentially.
pub const DEFAULT_TANGENTIAL_STEP: f64 = 1e-4;
const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

fn on_sphere(x: &Point) -> Result<()> {
    let r = x.norm();
    if (r - 1.0).abs() > SPHERE_TOLERANCE {
        return arg(format!("boundary point has |x| = {r}, expected 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFrame {
    base: Point,
    tangents: Vec<Vec<f64>>,
}

impl BoundaryFrame {
    /// Gram–Schmidt on the coordinate axes least aligned with `x`; ties go to
    /// the lower index.
    pub fn new(x: &Point) -> Result<Self> {
        on_sphere(x)?;
        let m = x.dim();
        let xs = x.coords();
        let mut axes: Vec<usize> = (0..m).collect();
        axes.sort_by(|&a, &b| xs[a].abs().total_cmp(&xs[b].abs()).then(a.cmp(&b)));
        let mut basis: Vec<Vec<f64>> = vec![xs.to_vec()];
        for &ax in axes.iter().take(m - 1) {
            let mut v = vec![0.0; m];
            v[ax] = 1.0;
            for b in &basis {
                let p = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= p * bi);
            }
            let l = norm(&v);
            if l < 1e-8 {
                return arg("coordinate axes do not span the tangent space");
            }
            v.iter_mut().for_each(|vi| *vi /= l);
            basis.push(v);
        }
        basis.remove(0);
        Ok(Self { base: x.clone(), tangents: basis })
    }

    /// Frame from caller-supplied Euclidean tangents, which must be
    /// orthonormal and orthogonal to `x`.
    pub fn from_tangents(x: &Point, tangents: Vec<Vec<f64>>) -> Result<Self> {
        on_sphere(x)?;
        let m = x.dim();
        if tangents.len() != m - 1 || tangents.iter().any(|t| t.len() != m) {
            return arg(format!("need {} tangents of length {m}", m - 1));
        }
        for (a, ta) in tangents.iter().enumerate() {
            if !ta.iter().all(|v| v.is_finite()) {
                return arg("tangent has non-finite entries");
            }
            if dot(ta, x.coords()).abs() > ORTHONORMAL_TOLERANCE {
                return arg(format!("tangent {a} is not orthogonal to the normal"));
            }
            for (b, tb) in tangents.iter().enumerate().take(a + 1) {
                let want = if a == b { 1.0 } else { 0.0 };
                if (dot(ta, tb) - want).abs() > ORTHONORMAL_TOLERANCE {
                    return arg(format!("tangents {a} and {b} are not orthonormal"));
                }
            }
        }
        Ok(Self { base: x.clone(), tangents })
    }

    /// Tangents `Σ_β r[α][β] e_β` for an orthogonal `r`.
    pub fn rotated(&self, r: &[Vec<f64>]) -> Result<Self> {
        let n = self.tangents.len();
        if r.len() != n || r.iter().any(|row| row.len() != n) {
            return arg(format!("rotation must be {n}x{n}"));
        }
        let m = self.base.dim();
        let t = (0..n)
            .map(|a| (0..m).map(|i| (0..n).map(|b| r[a][b] * self.tangents[b][i]).sum()).collect())
            .collect();
        Self::from_tangents(&self.base, t)
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    /// Euclidean unit tangents `e_α`.
    pub fn tangents(&self) -> &[Vec<f64>] {
        &self.tangents
    }

    /// `[e_1 .. e_n, x]` as columns.
    fn column(&self, a: usize) -> &[f64] {
        if a < self.tangents.len() {
            &self.tangents[a]
        } else {
            self.base.coords()
        }
    }

    /// g̃-orthonormal vectors `φ e_α` followed by `ν̃ = φ x`, as coordinate
    /// vectors.
    pub fn conformal_frame(&self, phi: f64) -> Vec<Vec<f64>> {
        (0..self.base.dim()).map(|a| self.column(a).iter().map(|v| phi * v).collect()).collect()
    }
}

/// Mean curvature `H = φ - x·∇φ` of the unit sphere in g̃, outward normal.
pub fn mean_curv(phi: &dyn ScalarField, x: &Point) -> Result<f64> {
    on_sphere(x)?;
    let j = positive_jet(phi, x.coords())?;
    Ok(j.value - dot(&j.gradient(), x.coords()))
}

/// How the difference quotients inside [`BoundaryState`] are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySteps {
    /// Great-circle step for the tangential derivative of H.
    pub tangential: f64,
    /// When set, `u_ν` is a central difference of `u = 1/(φρ)` along the
    /// radius at this step instead of the closed form.
    pub normal: Option<f64>,
}

impl Default for BoundarySteps {
    fn default() -> Self {
        Self { tangential: DEFAULT_TANGENTIAL_STEP, normal: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryState {
    pub frame: BoundaryFrame,
    pub phi: f64,
    pub h: f64,
    /// Full Schouten endomorphism in the frame `(t_1 .. t_n, ν̃)`.
    pub full: SymEndo,
    pub a_top: SymEndo,
    pub a_mixed: Vec<f64>,
    pub grad_h: Vec<f64>,
    /// `t_α(u)` with `u = 1/φ` on the sphere.
    pub grad_u: Vec<f64>,
    pub u: f64,
    pub u_nu: f64,
}

pub fn boundary_state(phi: &dyn ScalarField, frame: &BoundaryFrame) -> Result<BoundaryState> {
    boundary_state_with(phi, frame, BoundarySteps::default())
}

pub fn boundary_state_with(phi: &dyn ScalarField, frame: &BoundaryFrame, steps: BoundarySteps) -> Result<BoundaryState> {
    if !(steps.tangential > 0.0) || steps.normal.is_some_and(|h| !(h > 0.0)) {
        return arg("difference steps must be positive");
    }
    let x = frame.base();
    let xs = x.coords();
    let m = x.dim();
    let n = m - 1;
    let j = positive_jet(phi, xs)?;
    let s = frame_schouten_from_jet(&j);
    let full = SymEndo::from_fn(m, |a, b| s.bilinear(frame.column(a), frame.column(b)))?;
    let a_top = full.principal(&(0..n).collect::<Vec<_>>())?;
    let a_mixed: Vec<f64> = (0..n).map(|a| *full.get(a, n)).collect();

    let grad = j.gradient();
    let h = j.value - dot(&grad, xs);
    let ds = steps.tangential;
    let mut grad_h = Vec::with_capacity(n);
    for e in frame.tangents() {
        let along = |t: f64| -> Result<f64> {
            let p: Vec<f64> = xs.iter().zip(e).map(|(xi, ei)| xi * t.cos() + ei * t.sin()).collect();
            mean_curv(phi, &Point::new(p)?)
        };
        grad_h.push(j.value * (along(ds)? - along(-ds)?) / (2.0 * ds));
    }
    let grad_u: Vec<f64> = frame.tangents().iter().map(|e| -dot(e, &grad) / j.value).collect();

    let u = 1.0 / j.value;
    let dr_phi = dot(&grad, xs);
    let u_nu = match steps.normal {
        // ν̃(1/(φρ)) at ρ = 1
        None => -(dr_phi + j.value * StereographicMap::BOUNDARY_RADIAL_DERIVATIVE) / j.value,
        Some(dh) => {
            let st = StereographicMap { dim: m };
            let u_at = |t: f64| {
                let p: Vec<f64> = xs.iter().map(|v| v * t).collect();
                1.0 / (phi.value(&p) * st.rho(&p))
            };
            j.value * (u_at(1.0 + dh) - u_at(1.0 - dh)) / (2.0 * dh)
        }
    };
    let state = BoundaryState { frame: frame.clone(), phi: j.value, h, full, a_top, a_mixed, grad_h, grad_u, u, u_nu };
    if !state.is_finite() {
        return arg(format!("boundary quantities are not finite at {xs:?}"));
    }
    Ok(state)
}

impl BoundaryState {
    fn is_finite(&self) -> bool {
        self.h.is_finite()
            && self.u.is_finite()
            && self.u_nu.is_finite()
            && self.full.entries().iter().all(|v| v.is_finite())
            && self.grad_h.iter().chain(&self.grad_u).all(|v| v.is_finite())
    }
}

/// `max_α |A(t_α, ν̃) + t_α(H)|`. With the outward normal the Codazzi
/// equation reads `A(t_α, ν̃) = -t_α(H)` on an umbilic boundary of a
/// conformally flat metric.
pub fn codazzi_residual(state: &BoundaryState) -> f64 {
    state.a_mixed.iter().zip(&state.grad_h).map(|(a, g)| (a + g).abs()).fold(0.0, f64::max)
}

/// `|T_k(F)(ν̃, ν̃) - σ_k(A^⊤)|`.
pub fn nn_residual(state: &BoundaryState, k: usize) -> Result<f64> {
    let n = state.a_top.dim();
    if k > n {
        return arg(format!("k = {k} exceeds boundary dimension {n}"));
    }
    let seq = newton_sequence(&state.full, k)?;
    Ok((seq.transforms[k].get(n, n) - sigma_k(&state.a_top, k)?).abs())
}

/// `|T_k(F)(∇̄u, ν̃) - T_{k-1}(A^⊤)(∇̄H, ∇̄u)|`, with `∇̄u` recomputed from φ.
pub fn mixed_identity_residual(state: &BoundaryState, phi: &dyn ScalarField, k: usize) -> Result<f64> {
    let n = state.a_top.dim();
    if k == 0 || k > n {
        return arg(format!("k = {k} outside 1..={n}"));
    }
    let j = positive_jet(phi, state.frame.base().coords())?;
    let grad = j.gradient();
    let du: Vec<f64> = state.frame.tangents().iter().map(|e| -dot(e, &grad) / j.value).collect();
    let tk = &newton_sequence(&state.full, k)?.transforms[k];
    let lhs: f64 = (0..n).map(|a| du[a] * tk.get(a, n)).sum();
    let tk1 = &newton_sequence(&state.a_top, k - 1)?.transforms[k - 1];
    Ok((lhs - tk1.bilinear(&state.grad_h, &du)).abs())
}

/// `|u_ν - H u|`.
pub fn normal_derivative_residual(state: &BoundaryState) -> f64 {
    (state.u_nu - state.h * state.u).abs()
}
