//! Quadrature on the sphere and ball, and the integral identities checked
//! with it.

mod identities;
mod rules;

pub use identities::{
    han_integral_identity, kw_identity, lemma25_identity, min_energy_density, obata_energy, refine, IdentityReport,
    CONSTANCY_TOLERANCE, CONVERGED_RATIO, ORDER_RATIO_SLACK, ROUNDOFF_FLOOR,
};
pub use rules::{
    ball_rule, ball_volume, gauss_jacobi, integrate_many, pairwise_sum, sphere_area, sphere_rule, BallRule, SphereRule,
    MIN_RESOLUTION, SPHERE_DIMS,
};
