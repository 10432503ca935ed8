//! Product Gauss rules on the unit sphere and ball.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{arg, Result};
use crate::field::Point;

/// Γ at a positive multiple of 1/2.
fn half_integer_gamma(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!(twice >= 1.0 && (2.0 * x - twice).abs() < 1e-12, "gamma argument {x} is not a positive half-integer");
    let (mut g, mut t) = if twice as i64 % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while t < x - 0.25 {
        g *= t;
        t += 1.0;
    }
    g
}

/// Gauss–Jacobi rule for weight `(1-t)^α (1+t)^β` on `[-1, 1]`, nodes
/// ascending. `α, β` must be non-negative half-integers.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return arg("rule needs at least one node");
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return arg("Jacobi exponents must be non-negative");
    }
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let jf = j as f64;
        let s = 2.0 * jf + ab;
        jac[(j, j)] = if j == 0 { (beta - alpha) / (ab + 2.0) } else { (beta * beta - alpha * alpha) / (s * (s + 2.0)) };
        if j + 1 < n {
            let i = jf + 1.0;
            let s = 2.0 * i + ab;
            let b = (4.0 * i * (i + alpha) * (i + beta) * (i + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jac[(j, j + 1)] = b;
            jac[(j + 1, j)] = b;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * half_integer_gamma(alpha + 1.0) * half_integer_gamma(beta + 1.0)
        / half_integer_gamma(ab + 2.0);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetric weights give exactly symmetric nodes
    if alpha == beta {
        for i in 0..n / 2 {
            let (l, r) = (pairs[i], pairs[n - 1 - i]);
            let t = 0.5 * (r.0 - l.0);
            let w = 0.5 * (l.1 + r.1);
            pairs[i] = (-t, w);
            pairs[n - 1 - i] = (t, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
    }
    Ok(pairs.into_iter().unzip())
}

/// Sum of a slice by recursive halving, in a fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Weighted sums of several integrands over the same nodes. Evaluation runs
/// in parallel; the reduction does not depend on the thread count.
pub fn integrate_many<F>(nodes: &[Point], weights: &[f64], width: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Point) -> Result<Vec<f64>> + Sync,
{
    let values: Vec<Vec<f64>> = nodes.par_iter().map(&f).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(width);
    let mut column = vec![0.0; values.len()];
    for c in 0..width {
        for (slot, (row, w)) in column.iter_mut().zip(values.iter().zip(weights)) {
            if row.len() != width {
                return arg(format!("integrand returned {} values, expected {width}", row.len()));
            }
            *slot = w * row[c];
        }
        out.push(pairwise_sum(&column));
    }
    Ok(out)
}

pub const SPHERE_DIMS: [usize; 3] = [2, 3, 4];
pub const MIN_RESOLUTION: usize = 4;

/// `|S^n|`.
pub fn sphere_area(n: usize) -> f64 {
    let h = (n + 1) as f64 / 2.0;
    2.0 * PI.powf(h) / half_integer_gamma(h)
}

/// Volume of the unit ball in `R^d`.
pub fn ball_volume(d: usize) -> f64 {
    sphere_area(d - 1) / d as f64
}

#[derive(Debug, Clone)]
pub struct SphereRule {
    pub n: usize,
    pub resolution: usize,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

/// Hyperspherical-angle product rule on `S^n ⊂ R^{n+1}`: `N` Gauss–Jacobi
/// nodes in `cos θ_j` for each polar angle (weight `sin^{n-j} θ_j`) and `2N`
/// equally spaced azimuths.
pub fn sphere_rule(n: usize, resolution: usize) -> Result<SphereRule> {
    if !SPHERE_DIMS.contains(&n) {
        return arg(format!("sphere dimension {n} unsupported (use 2, 3 or 4)"));
    }
    if resolution < MIN_RESOLUTION {
        return arg(format!("resolution {resolution} below {MIN_RESOLUTION}"));
    }
    let polar: Vec<(Vec<f64>, Vec<f64>)> = (1..n)
        .map(|j| {
            let p = (n - j) as f64;
            gauss_jacobi(resolution, (p - 1.0) / 2.0, (p - 1.0) / 2.0)
        })
        .collect::<Result<_>>()?;
    let az = 2 * resolution;
    let dpsi = 2.0 * PI / az as f64;

    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut idx = vec![0usize; n - 1];
    loop {
        let mut x = Vec::with_capacity(n + 1);
        let mut radius = 1.0;
        let mut w = dpsi;
        for (j, &i) in idx.iter().enumerate() {
            let t = polar[j].0[i];
            let s = ((1.0 - t) * (1.0 + t)).sqrt();
            x.push(radius * t);
            radius *= s;
            w *= polar[j].1[i];
        }
        for a in 0..az {
            let psi = a as f64 * dpsi;
            let mut p = x.clone();
            p.push(radius * psi.cos());
            p.push(radius * psi.sin());
            nodes.push(Point::new(p)?);
            weights.push(w);
        }
        let mut j = n - 1;
        loop {
            if j == 0 {
                return Ok(SphereRule { n, resolution, nodes, weights });
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < resolution {
                break;
            }
            idx[j] = 0;
        }
    }
}

impl SphereRule {
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Point) -> Result<f64> + Sync,
    {
        Ok(self.integrate_many(1, |x| Ok(vec![f(x)?]))?[0])
    }

    pub fn integrate_many<F>(&self, width: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&Point) -> Result<Vec<f64>> + Sync,
    {
        integrate_many(&self.nodes, &self.weights, width, f)
    }
}

#[derive(Debug, Clone)]
pub struct BallRule {
    pub dim: usize,
    pub resolution: usize,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

/// Radial Gauss–Jacobi nodes (weight `r^{d-1}`) times [`sphere_rule`].
pub fn ball_rule(dim: usize, resolution: usize) -> Result<BallRule> {
    if dim < 1 || !SPHERE_DIMS.contains(&(dim - 1)) {
        return arg(format!("ball dimension {dim} unsupported (use 3, 4 or 5)"));
    }
    let sphere = sphere_rule(dim - 1, resolution)?;
    let (t, wt) = gauss_jacobi(resolution, 0.0, (dim - 1) as f64)?;
    let scale = 0.5f64.powi(dim as i32);
    let mut nodes = Vec::with_capacity(t.len() * sphere.nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (ti, wi) in t.iter().zip(&wt) {
        let r = 0.5 * (1.0 + ti);
        for (p, ws) in sphere.nodes.iter().zip(&sphere.weights) {
            nodes.push(Point::new(p.coords().iter().map(|c| r * c).collect())?);
            weights.push(scale * wi * ws);
        }
    }
    Ok(BallRule { dim, resolution, nodes, weights })
}

impl BallRule {
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Point) -> Result<f64> + Sync,
    {
        Ok(self.integrate_many(1, |x| Ok(vec![f(x)?]))?[0])
    }

    pub fn integrate_many<F>(&self, width: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&Point) -> Result<Vec<f64>> + Sync,
    {
        integrate_many(&self.nodes, &self.weights, width, f)
    }
}
