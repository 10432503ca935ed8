//! The subcommands, as library functions from a configuration to a report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use super::cone_input::{answer_cone_query, parse_cone_queries};
use super::config::{Command, FieldSpec, JetMode, RunConfig};
use super::report::{CanonicalParams, RunReport, SweepCell};
use crate::boundary::{
    boundary_state, boundary_state_with, codazzi_residual, mixed_identity_residual, nn_residual,
    normal_derivative_residual, BoundaryFrame, BoundarySteps,
};
use crate::canonical::{
    binomial, build_canonical, derived_threshold, measure_quadratic, printed_threshold, CanonicalCase, CanonicalSpec,
};
use crate::confgeo::{
    div_newton, div_newton_fd, einstein_deviation, han_residual, han_residual_fd, schouten_spectrum, sigma_k_curvature,
};
use crate::error::{Error, Result};
use crate::field::{norm, FiniteDifference, Perturbed, Point, QuadraticFactor, SharedField};
use crate::quadverify::{
    ball_rule, han_integral_identity, kw_identity, lemma25_identity, min_energy_density, obata_energy, refine,
    sphere_rule, IdentityReport,
};
use crate::symfun::{cone_status, ConeKind, DEFAULT_CONE_TOLERANCE};

/// Round-trip tolerance for canonical targets.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-10;
/// Largest ambient dimension for which integral suites run.
pub const MAX_INTEGRAL_DIM: usize = 4;

pub fn run(command: Command, config: RunConfig) -> Result<RunReport> {
    config.validate_for(command)?;
    let mut report = RunReport::new(command, config);
    match command {
        Command::Canonical => cmd_canonical(&mut report)?,
        Command::Identities => cmd_identities(&mut report)?,
        Command::Sweep => cmd_sweep(&mut report)?,
        Command::Cone => cmd_cone(&mut report)?,
    }
    report.finish();
    Ok(report)
}

fn timed<T>(report: &mut RunReport, section: &str, f: impl FnOnce(&mut RunReport) -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f(report)?;
    report.timings.insert(section.to_string(), t.elapsed().as_secs_f64());
    Ok(out)
}

fn no_terms() -> BTreeMap<String, f64> {
    BTreeMap::new()
}

/// A check whose left side is a worst-case residual that should vanish.
fn residual_check(name: &str, worst: f64, samples: usize, tolerance: f64) -> IdentityReport {
    IdentityReport::new(name, worst, 0.0, samples, tolerance, no_terms())
}

fn interior_points(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if norm(&v) < 1.0 {
            out.push(Point::new(v)?);
        }
    }
    Ok(out)
}

fn sphere_points(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 0.1 && r < 1.0 {
            out.push(Point::new(v.iter().map(|c| c / r).collect())?);
        }
    }
    Ok(out)
}

fn metric_display(spec: &CanonicalSpec) -> String {
    let (n, k, e) = (spec.n, spec.k, spec.epsilon);
    let pre = format!("({}/(2^{k}*{}))^(1/{k})", binomial(n + 1, k), spec.sigma);
    match spec.case {
        CanonicalCase::ZeroSigma => format!("g_c = {}^-2 |dx|^2", spec.h),
        CanonicalCase::PositiveCone => format!("g_c = {pre} * (2*{e}/(|x|^2 + {e}^2))^2 |dx|^2"),
        CanonicalCase::NegativeCone => format!("g_c = {pre} * (2*{e}/({e}^2 - |x|^2))^2 |dx|^2"),
    }
}

fn solve_spec(cfg: &RunConfig) -> Result<CanonicalSpec> {
    let dim = cfg.require_dimension()?;
    let k = cfg.require_k()?;
    let (case, sigma, h) = cfg.require_targets()?;
    CanonicalSpec::solve(case, dim - 1, k, sigma, h).map_err(|e| match e {
        Error::Infeasible(msg) if case == CanonicalCase::NegativeCone => Error::Infeasible(format!(
            "{msg}; derived threshold {}, alternative expression {}",
            derived_threshold(dim - 1, k, sigma),
            printed_threshold(dim - 1, k, sigma)
        )),
        other => other,
    })
}

fn canonical_params(spec: &CanonicalSpec, q: &QuadraticFactor) -> CanonicalParams {
    let threshold = derived_threshold(spec.n, spec.k, spec.sigma);
    let alt = printed_threshold(spec.n, spec.k, spec.sigma);
    CanonicalParams {
        case: spec.case,
        a: q.a,
        c: q.c,
        y: q.y.clone(),
        epsilon: spec.epsilon,
        scale: spec.scale,
        threshold,
        alternative_threshold: (alt != threshold).then_some(alt),
        extrapolated: spec.is_extrapolation(),
        metric: metric_display(spec),
    }
}

fn cmd_canonical(report: &mut RunReport) -> Result<()> {
    let cfg = report.config.clone();
    let spec = solve_spec(&cfg)?;
    let q = build_canonical(&spec)?;
    let params = canonical_params(&spec, &q);
    if params.extrapolated {
        report.notes.push("negative cone with k = 1 is outside the established classification range".into());
    }
    report.canonical = Some(params);
    let (n, k) = (spec.n, spec.k);
    let dim = n + 1;

    timed(report, "algebraic", |r| {
        let m = measure_quadratic(&q, n, k)?;
        let mut sigma = IdentityReport::new("round_trip_sigma", m.sigma, spec.sigma, 1, ROUND_TRIP_TOLERANCE, no_terms());
        if m.case != spec.case {
            sigma.pass = false;
            r.notes.push(format!("measured case {:?} differs from {:?}", m.case, spec.case));
        }
        r.checks.push(sigma);
        r.checks.push(IdentityReport::new("round_trip_h", m.h, spec.h, 1, ROUND_TRIP_TOLERANCE, no_terms()));
        Ok(())
    })?;

    timed(report, "pointwise", |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let pts = interior_points(&mut rng, dim, cfg.sample_points)?;
        let sign = if spec.case == CanonicalCase::NegativeCone { -1.0 } else { 1.0 };
        let mut worst_e: f64 = 0.0;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut misplaced = 0usize;
        for p in &pts {
            worst_e = worst_e.max(einstein_deviation(&q, p)?);
            let s = sigma_k_curvature(&q, p, k, sign)?;
            lo = lo.min(s);
            hi = hi.max(s);
            let spectrum = schouten_spectrum(&q, p)?;
            let (probe, want) = match spec.case {
                CanonicalCase::ZeroSigma => (spectrum, ConeKind::Closure),
                CanonicalCase::PositiveCone => (spectrum, ConeKind::Interior),
                CanonicalCase::NegativeCone => (spectrum.negated(), ConeKind::Interior),
            };
            if cone_status(&probe, k, DEFAULT_CONE_TOLERANCE)?.kind != want {
                misplaced += 1;
            }
        }
        let samples = pts.len();
        r.checks.push(residual_check("einstein_deviation", worst_e, samples, cfg.tolerances.pointwise));
        r.checks.push(residual_check("sigma_spread", (hi - lo) / spec.sigma.max(1.0), samples, ROUND_TRIP_TOLERANCE));
        r.checks.push(residual_check("cone_misplaced_points", misplaced as f64, samples, 0.0));
        Ok(())
    })?;

    timed(report, "quadrature", |r| {
        let s = sphere_rule(n, cfg.quadrature_n)?;
        r.checks.push(kw_identity(&q, k, &s, cfg.tolerances.quadrature)?);
        r.checks.push(lemma25_identity(&q, k, &s, cfg.tolerances.quadrature)?);
        Ok(())
    })
}

/// The field a configuration selects, and its canonical spec if any.
pub fn build_field(cfg: &RunConfig) -> Result<(SharedField, Option<CanonicalSpec>)> {
    let dim = cfg.require_dimension()?;
    Ok(match &cfg.field {
        FieldSpec::Canonical => {
            let spec = solve_spec(cfg)?;
            (Arc::new(build_canonical(&spec)?), Some(spec))
        }
        FieldSpec::Quadratic { a, c, y } => (Arc::new(QuadraticFactor::new(*a, *c, y.clone())), None),
        FieldSpec::Perturbed { shape, amplitude, base } => {
            let base = base.clone().unwrap_or_else(|| QuadraticFactor::round(dim));
            (Arc::new(Perturbed::new(Arc::new(base), *shape, *amplitude)), None)
        }
    })
}

fn constant_curvature(cfg: &RunConfig) -> Option<QuadraticFactor> {
    match &cfg.field {
        FieldSpec::Perturbed { .. } => None,
        FieldSpec::Quadratic { a, c, y } => Some(QuadraticFactor::new(*a, *c, y.clone())),
        FieldSpec::Canonical => solve_spec(cfg).and_then(|s| build_canonical(&s)).ok(),
    }
}

fn cmd_identities(report: &mut RunReport) -> Result<()> {
    let cfg = report.config.clone();
    let dim = cfg.require_dimension()?;
    let k = cfg.require_k()?;
    let n = dim - 1;
    let (field, spec) = build_field(&cfg)?;
    if let Some(spec) = &spec {
        report.canonical = Some(canonical_params(spec, &build_canonical(spec)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inner = interior_points(&mut rng, dim, cfg.sample_points)?;
    let outer = sphere_points(&mut rng, dim, cfg.sample_points)?;
    let tol = cfg.tolerances;

    timed(report, "pointwise", |r| {
        match cfg.jets {
            JetMode::Analytic => {
                let (mut div, mut han) = (0.0f64, 0.0f64);
                for p in &inner {
                    div = div.max(norm(&div_newton(field.as_ref(), p, k)?));
                    han = han.max(han_residual(field.as_ref(), p, k)?);
                }
                let (mut cod, mut nn, mut mixed, mut unu) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
                for p in &outer {
                    let s = boundary_state(field.as_ref(), &BoundaryFrame::new(p)?)?;
                    cod = cod.max(codazzi_residual(&s));
                    nn = nn.max(nn_residual(&s, k)?);
                    mixed = mixed.max(mixed_identity_residual(&s, field.as_ref(), k)?);
                    unu = unu.max(normal_derivative_residual(&s));
                }
                let (ni, nb) = (inner.len(), outer.len());
                r.checks.push(residual_check("div_newton", div, ni, tol.pointwise));
                r.checks.push(residual_check("han_pointwise", han, ni, tol.pointwise));
                r.checks.push(residual_check("codazzi", cod, nb, tol.boundary));
                r.checks.push(residual_check("newton_normal_normal", nn, nb, tol.boundary));
                r.checks.push(residual_check("newton_mixed", mixed, nb, tol.boundary));
                r.checks.push(residual_check("normal_derivative", unu, nb, tol.boundary));
            }
            JetMode::FiniteDifference { step } => {
                let at = |h: f64| -> Result<[f64; 6]> { fd_residuals(&field, k, h, &inner, &outer) };
                let (a, b) = (at(step)?, at(step / 2.0)?);
                let names = ["div_newton", "han_pointwise", "codazzi", "newton_normal_normal", "newton_mixed", "normal_derivative"];
                for (i, name) in names.iter().enumerate() {
                    let terms: BTreeMap<String, f64> =
                        [("step".to_string(), step), ("residual_half_step".to_string(), b[i])].into_iter().collect();
                    let ratio = (b[i] > 0.0).then(|| a[i] / b[i]);
                    let samples = if i < 2 { inner.len() } else { outer.len() };
                    let rep = IdentityReport::new(&format!("{name}_fd"), a[i], 0.0, samples, tol.pointwise, terms);
                    r.checks.push(rep.with_order_ratio(ratio));
                }
            }
        }
        Ok(())
    })?;

    if dim > MAX_INTEGRAL_DIM {
        report.notes.push(format!("integral suites run for dimension <= {MAX_INTEGRAL_DIM}; skipped"));
        return Ok(());
    }
    let resolution = cfg.quadrature_n;
    let srule = sphere_rule(n, resolution)?;
    match constant_curvature(&cfg) {
        Some(q) => timed(report, "quadrature", |r| {
            let brule = ball_rule(dim, resolution)?;
            let sign = if measure_quadratic(&q, n, k)?.case == CanonicalCase::NegativeCone { -1.0 } else { 1.0 };
            r.checks.push(kw_identity(&q, k, &srule, tol.quadrature)?);
            r.checks.push(lemma25_identity(&q, k, &srule, tol.quadrature)?);
            r.checks.push(han_integral_identity(&q, k, &brule, &srule, tol.quadrature)?);
            r.checks.push(obata_energy(&q, k, sign, &brule, &srule, tol.quadrature)?);
            Ok(())
        }),
        None => timed(report, "quadrature", |r| {
            let han = refine(resolution, |res| {
                han_integral_identity(field.as_ref(), k, &ball_rule(dim, res)?, &sphere_rule(n, res)?, tol.quadrature)
            })?;
            r.checks.push(han);
            let brule = ball_rule(dim, resolution)?;
            let energy = refine(resolution, |res| {
                obata_energy(field.as_ref(), k, 1.0, &ball_rule(dim, res)?, &sphere_rule(n, res)?, tol.quadrature)
            })?;
            r.checks.push(energy);
            let lo = min_energy_density(field.as_ref(), k, 1.0, &brule)?;
            r.notes.push(format!("minimum pointwise energy density {lo:e}"));
            Ok(())
        }),
    }
}

/// Sums over sample points of each pointwise residual, with every
/// derivative taken by differences at step `h`.
fn fd_residuals(field: &SharedField, k: usize, h: f64, inner: &[Point], outer: &[Point]) -> Result<[f64; 6]> {
    let fd = FiniteDifference::plain(field.clone(), h);
    let mut out = [0.0; 6];
    for p in inner {
        out[0] += norm(&div_newton_fd(&fd, p, k, h)?);
        out[1] += han_residual_fd(&fd, p, k, h)?;
    }
    let steps = BoundarySteps { tangential: h, normal: Some(h) };
    for p in outer {
        let s = boundary_state_with(&fd, &BoundaryFrame::new(p)?, steps)?;
        out[2] += codazzi_residual(&s);
        out[3] += nn_residual(&s, k)?;
        out[4] += mixed_identity_residual(&s, &fd, k)?;
        out[5] += normal_derivative_residual(&s);
    }
    Ok(out)
}

fn expected_feasible(case: CanonicalCase, n: usize, k: usize, sigma: f64, h: f64) -> bool {
    match case {
        CanonicalCase::ZeroSigma => h > 0.0,
        CanonicalCase::PositiveCone => sigma > 0.0,
        CanonicalCase::NegativeCone => sigma > 0.0 && h > derived_threshold(n, k, sigma),
    }
}

fn sweep_cell(case: CanonicalCase, n: usize, k: usize, sigma: f64, h: f64) -> SweepCell {
    let mut cell = SweepCell {
        case,
        k,
        sigma,
        h,
        feasible: false,
        expected_feasible: expected_feasible(case, n, k, sigma, h),
        round_trip_error: None,
        error: None,
    };
    let built = CanonicalSpec::solve(case, n, k, sigma, h).and_then(|s| build_canonical(&s));
    match built.and_then(|q| measure_quadratic(&q, n, k)) {
        Ok(m) => {
            cell.feasible = true;
            if m.case != case {
                cell.error = Some(format!("measured case {:?}", m.case));
            }
            let es = (m.sigma - sigma).abs() / sigma.abs().max(1.0);
            let eh = (m.h - h).abs() / h.abs().max(1.0);
            cell.round_trip_error = Some(es.max(eh));
        }
        Err(Error::Infeasible(_)) => {}
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

fn cmd_sweep(report: &mut RunReport) -> Result<()> {
    let cfg = report.config.clone();
    let n = cfg.require_dimension()? - 1;
    let sweep = cfg.sweep.clone().ok_or_else(|| Error::Argument("sweep section is required".into()))?;
    let ks = match &sweep.ks {
        Some(v) => v.clone(),
        None => vec![cfg.require_k()?],
    };
    timed(report, "sweep", |r| {
        for &case in &sweep.cases {
            for &k in &ks {
                let sigmas = if case == CanonicalCase::ZeroSigma { vec![0.0] } else { sweep.sigma.values() };
                for &sigma in &sigmas {
                    for h in sweep.h.values() {
                        r.sweep.push(sweep_cell(case, n, k, sigma, h));
                    }
                }
                if case == CanonicalCase::NegativeCone && k > 1 {
                    r.notes.push(format!(
                        "k = {k}: feasibility threshold (2^k sigma/C)^(1/2k) differs from (2 sigma/C)^(1/2k)"
                    ));
                }
            }
        }
        let cells = r.sweep.len();
        let worst = r.sweep.iter().filter_map(|c| c.round_trip_error).fold(0.0, f64::max);
        let mismatched = r.sweep.iter().filter(|c| c.feasible != c.expected_feasible || c.error.is_some()).count();
        r.checks.push(residual_check("sweep_round_trip", worst, cells, ROUND_TRIP_TOLERANCE));
        r.checks.push(residual_check("sweep_feasibility_mismatches", mismatched as f64, cells, 0.0));
        Ok(())
    })
}

fn cmd_cone(report: &mut RunReport) -> Result<()> {
    let text = report.config.cone.as_ref().map(|c| c.queries.clone()).unwrap_or_default();
    timed(report, "cone", |r| {
        for q in parse_cone_queries(&text)? {
            r.cone.push(answer_cone_query(&q)?);
        }
        Ok(())
    })
}
