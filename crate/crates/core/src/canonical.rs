//! Classification of metrics `g̃ = φ^{-2}|dx|^2` with φ in the quadratic
//! family `a|x - y|^2 + c`: constant σ_k of the Schouten tensor and constant
//! boundary mean curvature.
//!
//! For such φ, `S = 2ac I`, so `σ_k = C(n+1,k) (2ac)^k` and
//! `H = a(|y|^2 - 1) + c`. With `s = (2^k σ / C(n+1,k))^{1/(2k)}` the
//! centered canonical factors are `φ = s(|x|^2 ± ε^2)/(2ε)` up to sign of
//! the quadratic term.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::field::QuadraticFactor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CanonicalCase {
    /// σ_k ≡ 0, flat metric, `H > 0`.
    ZeroSigma,
    /// Spectrum in the open positive cone.
    PositiveCone,
    /// Negated spectrum in the open positive cone.
    NegativeCone,
}

impl CanonicalCase {
    pub const ALL: [CanonicalCase; 3] = [Self::ZeroSigma, Self::PositiveCone, Self::NegativeCone];
}

/// `C(n, k)` as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return arg(format!("boundary dimension n = {n} must be at least 2"));
    }
    if k == 0 || k > n {
        return arg(format!("k = {k} outside 1..={n}"));
    }
    Ok(())
}

/// `(2^k σ / C(n+1,k))^{1/(2k)}`: the value `2√(|ac|)` of any quadratic
/// factor with that σ, and the mean-curvature threshold of the negative case.
pub fn derived_threshold(n: usize, k: usize, sigma: f64) -> f64 {
    (2f64.powi(k as i32) * sigma / binomial(n + 1, k)).powf(1.0 / (2 * k) as f64)
}

/// `(2σ / C(n+1,k))^{1/(2k)}`, the alternative threshold expression; it
/// agrees with [`derived_threshold`] only for `k = 1`.
pub fn printed_threshold(n: usize, k: usize, sigma: f64) -> f64 {
    (2.0 * sigma / binomial(n + 1, k)).powf(1.0 / (2 * k) as f64)
}

fn check_targets(case: CanonicalCase, sigma: f64, h: f64) -> Result<()> {
    if !sigma.is_finite() || !h.is_finite() {
        return arg("targets must be finite");
    }
    match case {
        CanonicalCase::ZeroSigma => {
            if sigma != 0.0 {
                return arg(format!("zero-sigma case needs sigma = 0, got {sigma}"));
            }
            if !(h > 0.0) {
                return Err(Error::Infeasible(format!("zero-sigma case needs H > 0, got {h}")));
            }
        }
        CanonicalCase::PositiveCone | CanonicalCase::NegativeCone => {
            if !(sigma > 0.0) {
                return arg(format!("{case:?} needs sigma > 0, got {sigma}"));
            }
        }
    }
    Ok(())
}

/// ε of the canonical factor with the given targets.
pub fn solve_epsilon(case: CanonicalCase, n: usize, k: usize, sigma: f64, h: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_targets(case, sigma, h)?;
    let s = derived_threshold(n, k, sigma);
    match case {
        CanonicalCase::ZeroSigma => arg("zero-sigma case has no epsilon"),
        CanonicalCase::PositiveCone => Ok((h + h.hypot(s)) / s),
        CanonicalCase::NegativeCone => {
            if !(h > s) {
                return Err(Error::Infeasible(format!(
                    "negative cone needs H > {s} (threshold for n={n}, k={k}, sigma={sigma}), got {h}"
                )));
            }
            Ok((h + ((h - s) * (h + s)).sqrt()) / s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSpec {
    pub case: CanonicalCase,
    pub n: usize,
    pub k: usize,
    pub sigma: f64,
    pub h: f64,
    pub epsilon: f64,
    /// `(C(n+1,k) / (2^k σ))^{1/(2k)}`, zero in the flat case.
    pub scale: f64,
}

impl CanonicalSpec {
    pub fn solve(case: CanonicalCase, n: usize, k: usize, sigma: f64, h: f64) -> Result<Self> {
        check_nk(n, k)?;
        check_targets(case, sigma, h)?;
        let (epsilon, scale) = match case {
            CanonicalCase::ZeroSigma => (0.0, 0.0),
            _ => (solve_epsilon(case, n, k, sigma, h)?, 1.0 / derived_threshold(n, k, sigma)),
        };
        Ok(Self { case, n, k, sigma, h, epsilon, scale })
    }

    pub fn validate(&self) -> Result<()> {
        check_nk(self.n, self.k)?;
        check_targets(self.case, self.sigma, self.h)?;
        match self.case {
            CanonicalCase::ZeroSigma => Ok(()),
            CanonicalCase::PositiveCone if !(self.epsilon > 0.0) => arg("positive cone needs epsilon > 0"),
            CanonicalCase::NegativeCone if !(self.epsilon > 1.0) => arg("negative cone needs epsilon > 1"),
            _ if !(self.scale > 0.0 && self.scale.is_finite()) => arg("scale must be positive"),
            _ => Ok(()),
        }
    }

    /// Negative-cone results for `k = 1` lie outside the range where the
    /// classification is established.
    pub fn is_extrapolation(&self) -> bool {
        self.case == CanonicalCase::NegativeCone && self.k == 1
    }
}

/// The centered quadratic factor of a spec.
pub fn build_canonical(spec: &CanonicalSpec) -> Result<QuadraticFactor> {
    spec.validate()?;
    let dim = spec.n + 1;
    let q = match spec.case {
        CanonicalCase::ZeroSigma => QuadraticFactor::centered(0.0, spec.h, dim),
        CanonicalCase::PositiveCone | CanonicalCase::NegativeCone => {
            let s = 1.0 / spec.scale;
            let a = s / (2.0 * spec.epsilon);
            let a = if spec.case == CanonicalCase::NegativeCone { -a } else { a };
            QuadraticFactor::centered(a, s * spec.epsilon / 2.0, dim)
        }
    };
    debug_assert!(min_phi(&q) > 0.0);
    Ok(q)
}

/// Exact minimum of `a|x - y|^2 + c` over the closed unit ball.
pub fn min_phi(q: &QuadraticFactor) -> f64 {
    let r = q.center_norm();
    if q.a >= 0.0 {
        let d = (r - 1.0).max(0.0);
        q.a * d * d + q.c
    } else {
        q.a * (r + 1.0) * (r + 1.0) + q.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub case: CanonicalCase,
    pub sigma: f64,
    pub h: f64,
}

/// Case, σ_k (of `±S`) and H of a quadratic factor positive on the ball.
pub fn measure_quadratic(q: &QuadraticFactor, n: usize, k: usize) -> Result<Measured> {
    check_nk(n, k)?;
    if q.y.len() != n + 1 {
        return arg(format!("center has {} coordinates, expected {}", q.y.len(), n + 1));
    }
    let m = min_phi(q);
    if !(m > 0.0) {
        return Err(Error::Domain(format!("quadratic factor has minimum {m} on the closed ball")));
    }
    let ac = q.a * q.c;
    let r2: f64 = q.y.iter().map(|v| v * v).sum();
    let h = q.a * (r2 - 1.0) + q.c;
    let c = binomial(n + 1, k);
    let (case, sigma) = if ac == 0.0 {
        (CanonicalCase::ZeroSigma, 0.0)
    } else if ac > 0.0 {
        (CanonicalCase::PositiveCone, c * (2.0 * ac).powi(k as i32))
    } else {
        (CanonicalCase::NegativeCone, c * (-2.0 * ac).powi(k as i32))
    };
    Ok(Measured { case, sigma, h })
}

/// Rewrites a factor with `a > 0 > c`, `|y| > 1` as the equivalent one with
/// `a' = c/(|y|^2 - 1) < 0`, `c' = a(|y|^2 - 1) > 0`, same center. The two
/// metrics differ by the inversion through the sphere centered at `y`.
pub fn equivalence_b2_to_b1(q: &QuadraticFactor) -> Result<QuadraticFactor> {
    let r2: f64 = q.y.iter().map(|v| v * v).sum();
    if !(q.a > 0.0 && q.c < 0.0) {
        return arg(format!("need a > 0 > c, got a = {}, c = {}", q.a, q.c));
    }
    if !(r2 > 1.0) {
        return arg(format!("need |y| > 1, got {}", r2.sqrt()));
    }
    if !(min_phi(q) > 0.0) {
        return arg(format!("factor is not positive on the closed ball (minimum {})", min_phi(q)));
    }
    let d = r2 - 1.0;
    Ok(QuadraticFactor::new(q.c / d, q.a * d, q.y.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confgeo::{einstein_deviation, schouten_spectrum};
    use crate::field::{mobius_pullback, Point, ScalarField};
    use crate::symfun::{cone_status, ConeKind, DEFAULT_CONE_TOLERANCE};
    use proptest::prelude::*;
    use std::sync::Arc;

    use CanonicalCase::*;

    #[test]
    fn threshold_identity() {
        // σ = C(-2ac)^k  ⇒  (2^k σ / C)^{1/(2k)} = 2√(-ac)
        for n in 2..6 {
            for k in 1..=n {
                for (a, c) in [(-0.25f64, 1.0f64), (-3.0, 0.5), (-0.01, 7.0)] {
                    let sigma = binomial(n + 1, k) * (-2.0 * a * c).powi(k as i32);
                    let t = derived_threshold(n, k, sigma);
                    assert!((t - 2.0 * (-a * c).sqrt()).abs() < 1e-12 * t);
                }
            }
        }
        assert_eq!(derived_threshold(3, 1, 2.0), printed_threshold(3, 1, 2.0));
        assert!((derived_threshold(3, 2, 1.5) - printed_threshold(3, 2, 1.5)).abs() > 0.1);
    }

    #[test]
    fn epsilon_examples() {
        assert!((solve_epsilon(PositiveCone, 3, 2, 1.5, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((solve_epsilon(NegativeCone, 3, 2, 1.5, 1.25).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(solve_epsilon(NegativeCone, 3, 2, 1.5, 1.0), Err(Error::Infeasible(_))));
        assert!(matches!(solve_epsilon(NegativeCone, 3, 2, 1.5, 0.5), Err(Error::Infeasible(_))));
        assert!(solve_epsilon(ZeroSigma, 3, 2, 0.0, 1.0).is_err());
        assert!(solve_epsilon(PositiveCone, 3, 4, 1.0, 1.0).is_err());
        assert!(solve_epsilon(PositiveCone, 3, 2, -1.0, 1.0).is_err());
    }

    #[test]
    fn build_examples() {
        let round = build_canonical(&CanonicalSpec::solve(PositiveCone, 3, 2, 1.5, 0.0).unwrap()).unwrap();
        assert!((round.a - 0.5).abs() < 1e-15 && (round.c - 0.5).abs() < 1e-15);
        let neg = build_canonical(&CanonicalSpec::solve(NegativeCone, 3, 2, 1.5, 1.25).unwrap()).unwrap();
        assert!((neg.a + 0.25).abs() < 1e-15 && (neg.c - 1.0).abs() < 1e-15);
        assert!((min_phi(&neg) - 0.75).abs() < 1e-15);
        let flat = build_canonical(&CanonicalSpec::solve(ZeroSigma, 3, 2, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!((flat.a, flat.c), (0.0, 2.0));
        assert!(CanonicalSpec::solve(ZeroSigma, 3, 2, 0.0, -1.0).is_err());
        let mut bad = CanonicalSpec::solve(NegativeCone, 3, 2, 1.5, 1.25).unwrap();
        bad.epsilon = 0.5;
        assert!(build_canonical(&bad).is_err());
    }

    #[test]
    fn non_unit_scale_reproduces_targets() {
        let spec = CanonicalSpec::solve(PositiveCone, 3, 2, 7.0, 0.4).unwrap();
        assert!((spec.scale - 1.0).abs() > 0.1);
        let q = build_canonical(&spec).unwrap();
        let m = measure_quadratic(&q, 3, 2).unwrap();
        assert!((m.sigma - 7.0).abs() < 1e-12 && (m.h - 0.4).abs() < 1e-12);
    }

    #[test]
    fn measure_examples() {
        let m = measure_quadratic(&QuadraticFactor::round(4), 3, 2).unwrap();
        assert_eq!(m, Measured { case: PositiveCone, sigma: 1.5, h: 0.0 });
        let m = measure_quadratic(&QuadraticFactor::centered(0.0, 2.0, 4), 3, 2).unwrap();
        assert_eq!(m, Measured { case: ZeroSigma, sigma: 0.0, h: 2.0 });
        let m = measure_quadratic(&QuadraticFactor::new(1.0, 0.0, vec![2.0, 0.0, 0.0, 0.0]), 3, 2).unwrap();
        assert_eq!(m, Measured { case: ZeroSigma, sigma: 0.0, h: 3.0 });
        assert!(matches!(
            measure_quadratic(&QuadraticFactor::centered(-1.0, 0.5, 4), 3, 2),
            Err(Error::Domain(_))
        ));
        assert!(measure_quadratic(&QuadraticFactor::round(3), 3, 2).is_err());
    }

    #[test]
    fn min_phi_examples() {
        assert_eq!(min_phi(&QuadraticFactor::centered(-0.25, 1.0, 3)), 0.75);
        assert_eq!(min_phi(&QuadraticFactor::round(3)), 0.5);
        assert_eq!(min_phi(&QuadraticFactor::new(1.0, 0.0, vec![2.0, 0.0, 0.0])), 1.0);
        assert_eq!(min_phi(&QuadraticFactor::new(1.0, 0.0, vec![0.5, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn equivalence_example() {
        let q = QuadraticFactor::new(1.0, -1.0, vec![3.0, 0.0, 0.0, 0.0]);
        let p = equivalence_b2_to_b1(&q).unwrap();
        assert_eq!((p.a, p.c), (-0.125, 8.0));
        assert_eq!(measure_quadratic(&q, 3, 2).unwrap(), measure_quadratic(&p, 3, 2).unwrap());
        // |y| = 2 touches zero on the boundary
        let edge = QuadraticFactor::new(1.0, -1.0, vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(min_phi(&edge), 0.0);
        assert!(equivalence_b2_to_b1(&edge).is_err());
        assert!(equivalence_b2_to_b1(&QuadraticFactor::new(1.0, 1.0, vec![3.0, 0.0, 0.0, 0.0])).is_err());
        assert!(equivalence_b2_to_b1(&QuadraticFactor::new(1.0, -0.1, vec![0.5, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn equivalence_is_the_inversion_pullback() {
        let y = vec![0.0, 2.0, 1.0];
        let q = QuadraticFactor::new(0.7, -0.6, y.clone());
        let p = equivalence_b2_to_b1(&q).unwrap();
        let pb = mobius_pullback(Arc::new(q), &y).unwrap();
        for z in [[0.1, 0.2, 0.3], [0.0, 0.0, 0.0], [-0.5, 0.5, -0.5], [0.0, 1.0, 0.0]] {
            assert!((pb.value(&z) - p.value(&z)).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_metrics_are_einstein_with_constant_spectrum() {
        for (case, sigma, h) in [(PositiveCone, 2.0, 0.3), (NegativeCone, 0.7, 1.5), (ZeroSigma, 0.0, 0.8)] {
            let spec = CanonicalSpec::solve(case, 3, 2, sigma, h).unwrap();
            let q = build_canonical(&spec).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..50 {
                let t = i as f64 / 50.0;
                let x = Point::new(vec![0.9 * t, -0.3 * t, 0.2 * (1.0 - t), 0.1]).unwrap();
                assert!(einstein_deviation(&q, &x).unwrap() < 1e-12);
                let spec = schouten_spectrum(&q, &x).unwrap();
                lo = lo.min(spec.values()[0]);
                hi = hi.max(spec.values()[3]);
                let kind = match case {
                    PositiveCone => cone_status(&spec, 2, DEFAULT_CONE_TOLERANCE).unwrap().kind,
                    NegativeCone => cone_status(&spec.negated(), 2, DEFAULT_CONE_TOLERANCE).unwrap().kind,
                    ZeroSigma => {
                        assert!(spec.values().iter().all(|v| *v == 0.0));
                        ConeKind::Interior
                    }
                };
                assert_eq!(kind, ConeKind::Interior);
            }
            assert!(hi - lo < 1e-10);
        }
    }

    #[test]
    fn first_order_case_gives_scalar_curvature_caps() {
        // k = 1: σ_1 = (n+1) 2ac, the constant scalar curvature spherical caps
        let spec = CanonicalSpec::solve(PositiveCone, 3, 1, 4.0, 0.5).unwrap();
        let q = build_canonical(&spec).unwrap();
        assert!((4.0 * 2.0 * q.a * q.c - 4.0).abs() < 1e-12);
        assert!((q.c - q.a - 0.5).abs() < 1e-12);
        assert!(!spec.is_extrapolation());
        assert!(CanonicalSpec::solve(NegativeCone, 3, 1, 1.0, 2.0).unwrap().is_extrapolation());
    }

    fn case_strategy() -> impl Strategy<Value = (CanonicalCase, usize, usize, f64, f64)> {
        (2usize..=5, 0.05f64..20.0, -3.0f64..3.0, 0usize..3).prop_flat_map(|(n, sigma, h, c)| {
            (1..=n).prop_map(move |k| {
                let case = CanonicalCase::ALL[c];
                match case {
                    ZeroSigma => (case, n, k, 0.0, h.abs() + 0.1),
                    PositiveCone => (case, n, k, sigma, h),
                    NegativeCone => (case, n, k, sigma, derived_threshold(n, k, sigma) + h.abs() + 1e-3),
                }
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip((case, n, k, sigma, h) in case_strategy()) {
            let spec = CanonicalSpec::solve(case, n, k, sigma, h).unwrap();
            let q = build_canonical(&spec).unwrap();
            prop_assert!(min_phi(&q) > 0.0);
            let m = measure_quadratic(&q, n, k).unwrap();
            prop_assert_eq!(m.case, case);
            prop_assert!((m.sigma - sigma).abs() <= 1e-10 * sigma.max(1.0));
            prop_assert!((m.h - h).abs() <= 1e-10 * h.abs().max(1.0));
        }

        #[test]
        fn epsilon_solves_defining_relation((case, n, k, sigma, h) in case_strategy()) {
            prop_assume!(case != ZeroSigma);
            let e = solve_epsilon(case, n, k, sigma, h).unwrap();
            let s = derived_threshold(n, k, sigma);
            let lhs = match case {
                PositiveCone => s * (e * e - 1.0) / (2.0 * e),
                _ => {
                    prop_assert!(e > 1.0);
                    s * (e * e + 1.0) / (2.0 * e)
                }
            };
            prop_assert!((lhs - h).abs() <= 1e-12 * h.abs().max(1.0) * e.max(1.0));
        }

        #[test]
        fn negative_feasibility_flips_at_threshold(n in 2usize..=5, sigma in 0.05f64..20.0, off in -1.0f64..1.0) {
            for k in 1..=n {
                let t = derived_threshold(n, k, sigma);
                let h = t + off;
                prop_assert_eq!(solve_epsilon(NegativeCone, n, k, sigma, h).is_ok(), h > t);
            }
        }

        #[test]
        fn equivalence_preserves_measurement(a in 0.1f64..3.0, c in -3.0f64..-0.01, r in 1.01f64..4.0, n in 2usize..=4) {
            let mut y = vec![0.0; n + 1];
            y[n] = r;
            let q = QuadraticFactor::new(a, c, y);
            prop_assume!(min_phi(&q) > 0.0);
            let p = equivalence_b2_to_b1(&q).unwrap();
            prop_assert!(p.a < 0.0 && p.c > 0.0);
            for k in 1..=n {
                let (mq, mp) = (measure_quadratic(&q, n, k).unwrap(), measure_quadratic(&p, n, k).unwrap());
                prop_assert_eq!(mq.case, mp.case);
                prop_assert!((mq.sigma - mp.sigma).abs() <= 1e-12 * mq.sigma);
                prop_assert!((mq.h - mp.h).abs() <= 1e-12 * mq.h.abs().max(1.0));
            }
        }
    }
}
