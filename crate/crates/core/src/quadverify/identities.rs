//! Integral identities for `g̃ = φ^{-2}|dx|^2` evaluated by quadrature.
//!
//! Measures in ball coordinates: `dσ_g = φ^{-n} dσ`, `dv_g = φ^{-(n+1)} dx`.
//! The hemisphere factor is `u = 1/(φρ)`, which is `1/φ` on the sphere.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::rules::{BallRule, SphereRule};
use crate::boundary::{boundary_state, BoundaryFrame, BoundaryState};
use crate::confgeo::{frame_schouten_dual, frame_schouten_from_jet, positive_jet, StereographicMap};
use crate::error::{arg, Error, Result};
use crate::field::{dot, Point, ScalarField};
use crate::jet::Dual;
use crate::symfun::{lk_pairing, newton_sequence, sigma_k, SymEndo};

/// Relative spread allowed when an identity needs constant σ_k or H.
pub const CONSTANCY_TOLERANCE: f64 = 1e-8;
/// Convergence ratio that marks a gap as quadrature-limited.
pub const CONVERGED_RATIO: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityReport {
    pub identity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_gap: f64,
    /// `abs_gap / max(1, largest term)`.
    pub rel_gap: f64,
    pub resolution: usize,
    /// `gap(N) / gap(2N)` when a refinement was run and the finer gap is
    /// non-zero.
    pub ratio: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Named intermediate values, e.g. individual boundary and volume terms.
    pub terms: BTreeMap<String, f64>,
}

impl IdentityReport {
    pub fn new(identity: &str, lhs: f64, rhs: f64, resolution: usize, tolerance: f64, terms: BTreeMap<String, f64>) -> Self {
        let scale = terms.values().chain([&lhs, &rhs]).fold(1.0f64, |acc, v| acc.max(v.abs()));
        let abs_gap = (lhs - rhs).abs();
        let mut r = Self {
            identity: identity.to_string(),
            lhs,
            rhs,
            abs_gap,
            rel_gap: abs_gap / scale,
            resolution,
            ratio: None,
            tolerance,
            pass: false,
            terms,
        };
        r.pass = r.verdict();
        r
    }

    fn verdict(&self) -> bool {
        self.rel_gap.is_finite() && (self.rel_gap <= self.tolerance || self.ratio.is_some_and(|q| q >= CONVERGED_RATIO))
    }

    /// Attaches `gap(N)/gap(2N)` from a run at twice the resolution.
    pub fn with_refinement(mut self, fine: &IdentityReport) -> Self {
        self.ratio = (fine.abs_gap > 0.0).then(|| self.abs_gap / fine.abs_gap);
        self.pass = self.verdict();
        self
    }
}

/// Residuals below this are treated as exact when judging difference order.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;
/// Accepted distance of an observed step-halving ratio from 4.
pub const ORDER_RATIO_SLACK: f64 = 0.5;

impl IdentityReport {
    /// Verdict for a second-order difference scheme: `ratio` is the residual
    /// at step `h` over the residual at `h/2`.
    pub fn with_order_ratio(mut self, ratio: Option<f64>) -> Self {
        self.ratio = ratio;
        self.pass = self.abs_gap <= ROUNDOFF_FLOOR || ratio.is_some_and(|q| (q - 4.0).abs() <= ORDER_RATIO_SLACK);
        self
    }
}

/// Runs `f` at `N` and `2N` and returns the coarse report with the ratio.
pub fn refine<F>(resolution: usize, f: F) -> Result<IdentityReport>
where
    F: Fn(usize) -> Result<IdentityReport>,
{
    let coarse = f(resolution)?;
    let fine = f(2 * resolution)?;
    Ok(coarse.with_refinement(&fine))
}

fn check_rules(phi: &dyn ScalarField, srule: &SphereRule, brule: Option<&BallRule>) -> Result<()> {
    if srule.n + 1 != phi.dim() {
        return arg(format!("sphere rule is for S^{}, field lives in dimension {}", srule.n, phi.dim()));
    }
    if let Some(b) = brule {
        if b.dim != phi.dim() {
            return arg(format!("ball rule has dimension {}, field {}", b.dim, phi.dim()));
        }
    }
    Ok(())
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return arg(format!("k = {k} outside 1..={n}"));
    }
    Ok(())
}

fn state_at(phi: &dyn ScalarField, x: &Point) -> Result<BoundaryState> {
    boundary_state(phi, &BoundaryFrame::new(x)?)
}

fn spread_check(name: &str, values: &[f64]) -> Result<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if hi - lo > CONSTANCY_TOLERANCE * mean.abs().max(1.0) {
        return Err(Error::Hypothesis(format!("{name} is not constant: ranges over [{lo}, {hi}]")));
    }
    Ok(mean)
}

/// σ_k(S) over the sphere nodes and a few interior points; errors unless
/// constant.
fn constant_sigma(phi: &dyn ScalarField, k: usize, srule: &SphereRule) -> Result<f64> {
    let m = phi.dim();
    let mut values = Vec::with_capacity(srule.nodes.len() + 8);
    for p in &srule.nodes {
        values.push(sigma_k(&frame_schouten_from_jet(&positive_jet(phi, p.coords())?), k)?);
    }
    for i in 0..8 {
        let r = i as f64 / 8.0;
        let x: Vec<f64> = (0..m).map(|j| if j == i % m { r } else { 0.1 * r }).collect();
        values.push(sigma_k(&frame_schouten_from_jet(&positive_jet(phi, &x)?), k)?);
    }
    spread_check("sigma_k", &values)
}

fn terms(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `∫ u σ_k(A^⊤) dσ_g` against `((n+1-k)/(n+1)) σ_k ∫ u dσ_g`, for φ with
/// constant σ_k.
pub fn kw_identity(phi: &dyn ScalarField, k: usize, srule: &SphereRule, tolerance: f64) -> Result<IdentityReport> {
    check_rules(phi, srule, None)?;
    let (m, n) = (phi.dim(), srule.n);
    check_k(k, n)?;
    let sigma = constant_sigma(phi, k, srule)?;
    let sums = srule.integrate_many(2, |x| {
        let s = state_at(phi, x)?;
        let dsig = s.phi.powi(-(n as i32));
        Ok(vec![s.u * sigma_k(&s.a_top, k)? * dsig, s.u * dsig])
    })?;
    let c = (m - k) as f64 / m as f64;
    let rhs = c * sigma * sums[1];
    Ok(IdentityReport::new(
        "kazdan_warner",
        sums[0],
        rhs,
        srule.resolution,
        tolerance,
        terms(&[("sigma_k", sigma), ("int_u", sums[1])]),
    ))
}

/// g̃-frame components of the full gradient of `u` at a boundary node.
fn frame_grad_u(s: &BoundaryState) -> Vec<f64> {
    let mut g = s.grad_u.clone();
    g.push(s.u_nu);
    g
}

/// `∫ T_k(∇u, ν) dσ_g` against `((n+1-k)/(n+1)) σ_k H ∫ u dσ_g`, for φ with
/// constant σ_k and H.
pub fn lemma25_identity(phi: &dyn ScalarField, k: usize, srule: &SphereRule, tolerance: f64) -> Result<IdentityReport> {
    check_rules(phi, srule, None)?;
    let (m, n) = (phi.dim(), srule.n);
    check_k(k, n)?;
    let sigma = constant_sigma(phi, k, srule)?;
    let hs: Vec<f64> = srule.nodes.iter().map(|x| crate::boundary::mean_curv(phi, x)).collect::<Result<_>>()?;
    let h = spread_check("mean curvature", &hs)?;
    let sums = srule.integrate_many(2, |x| {
        let s = state_at(phi, x)?;
        let dsig = s.phi.powi(-(n as i32));
        let tk = &newton_sequence(&s.full, k)?.transforms[k];
        let du = frame_grad_u(&s);
        let t_nu: f64 = (0..m).map(|a| tk.get(a, n) * du[a]).sum();
        Ok(vec![t_nu * dsig, s.u * dsig])
    })?;
    let c = (m - k) as f64 / m as f64;
    Ok(IdentityReport::new(
        "boundary_newton_flux",
        sums[0],
        c * sigma * h * sums[1],
        srule.resolution,
        tolerance,
        terms(&[("sigma_k", sigma), ("mean_curvature", h), ("int_u", sums[1])]),
    ))
}

/// Integrated form of the conformal Killing identity for the Euler field:
/// `(n+1-k) ∫ X(σ_k) dv_g = -(n+1) ∫ T_k(X, ν) dσ_g + (n+1-k) ∫ σ_k ⟨X, ν⟩ dσ_g`.
/// Holds for any admissible φ.
pub fn han_integral_identity(
    phi: &dyn ScalarField,
    k: usize,
    brule: &BallRule,
    srule: &SphereRule,
    tolerance: f64,
) -> Result<IdentityReport> {
    check_rules(phi, srule, Some(brule))?;
    let (m, n) = (phi.dim(), srule.n);
    check_k(k, n)?;
    let volume = brule.integrate(|x| {
        let j = positive_jet(phi, x.coords())?;
        let sig = newton_sequence(&frame_schouten_dual(&j), k)?.sigmas[k];
        Ok(dot(x.coords(), &sig.grad[..m]) * j.value.powi(-(m as i32)))
    })?;
    let bnd = srule.integrate_many(2, |x| {
        let s = state_at(phi, x)?;
        let dsig = s.phi.powi(-(n as i32));
        // X = x is normal on the sphere with g̃-length 1/φ = u
        let seq = newton_sequence(&s.full, k)?;
        Ok(vec![seq.transforms[k].get(n, n) * s.u * dsig, seq.sigmas[k] * s.u * dsig])
    })?;
    let mk = (m - k) as f64;
    let lhs = mk * volume;
    let t_term = -(m as f64) * bnd[0];
    let s_term = mk * bnd[1];
    Ok(IdentityReport::new(
        "conformal_killing",
        lhs,
        t_term + s_term,
        brule.resolution,
        tolerance,
        terms(&[("volume", lhs), ("newton_flux", t_term), ("sigma_flux", s_term)]),
    ))
}

/// Which cone the energy is built for: `+1` uses `S`, `-1` uses `-S`.
fn check_sign(sign: f64) -> Result<()> {
    if sign != 1.0 && sign != -1.0 {
        return arg("sign must be +1 or -1");
    }
    Ok(())
}

/// `∫ ⟨L_k(W), E(W)⟩ u dv_g` with `W = sign·S`, against the boundary
/// expression obtained by integrating by parts:
/// `sign (n-1) [∫ T_k(W)(∇u,ν) - c ∫ σ_k(W) H u] dσ_g + sign (n-1) c ∫ ⟨∇σ_k(W), ∇u⟩ dv_g`
/// with `c = (n+1-k)/(n+1)`. The last term vanishes when σ_k is constant.
pub fn obata_energy(
    phi: &dyn ScalarField,
    k: usize,
    sign: f64,
    brule: &BallRule,
    srule: &SphereRule,
    tolerance: f64,
) -> Result<IdentityReport> {
    check_rules(phi, srule, Some(brule))?;
    check_sign(sign)?;
    let (m, n) = (phi.dim(), srule.n);
    check_k(k, n)?;
    let st = StereographicMap { dim: m };
    let c = (m - k) as f64 / m as f64;
    let vol = brule.integrate_many(2, |x| {
        let j = positive_jet(phi, x.coords())?;
        let dv = j.value.powi(-(m as i32));
        let u = st.hemisphere_factor(&j, x.coords());
        let w = frame_schouten_dual(&j).scale(&Dual::constant(sign, m));
        let values = SymEndo::from_fn(m, |a, b| w.get(a, b).value)?;
        let density = lk_pairing(&values, k)? * u.value;
        let dsig = newton_sequence(&w, k)?.sigmas[k];
        let grad_term = j.value * j.value * dot(&dsig.grad[..m], &u.gradient());
        Ok(vec![density * dv, grad_term * dv])
    })?;
    let bnd = srule.integrate_many(2, |x| {
        let s = state_at(phi, x)?;
        let dsig = s.phi.powi(-(n as i32));
        let w = s.full.scale(&sign);
        let seq = newton_sequence(&w, k)?;
        let du = frame_grad_u(&s);
        let t_nu: f64 = (0..m).map(|a| seq.transforms[k].get(a, n) * du[a]).sum();
        Ok(vec![t_nu * dsig, seq.sigmas[k] * s.h * s.u * dsig])
    })?;
    let f = sign * (n as f64 - 1.0);
    let flux = f * bnd[0];
    let mean = -f * c * bnd[1];
    let gradient = f * c * vol[1];
    Ok(IdentityReport::new(
        "obata_energy",
        vol[0],
        flux + mean + gradient,
        brule.resolution,
        tolerance,
        terms(&[("newton_flux", flux), ("mean_curvature_term", mean), ("sigma_gradient_term", gradient)]),
    ))
}

/// Smallest value of `⟨L_k(W), E(W)⟩ u` over the ball nodes.
pub fn min_energy_density(phi: &dyn ScalarField, k: usize, sign: f64, brule: &BallRule) -> Result<f64> {
    check_sign(sign)?;
    let st = StereographicMap { dim: phi.dim() };
    let mut lo = f64::INFINITY;
    for x in &brule.nodes {
        let j = positive_jet(phi, x.coords())?;
        let w = frame_schouten_from_jet(&j).scale(&sign);
        lo = lo.min(lk_pairing(&w, k)? * st.hemisphere_factor(&j, x.coords()).value);
    }
    Ok(lo)
}
