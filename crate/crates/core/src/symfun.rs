//! Elementary symmetric functions, Newton transformations and the
//! Gårding-cone tests built on them.
//!
//! Matrix-level σ_k always goes through the Newton recursion
//! `T_k = σ_k I - T_{k-1} W` with `k σ_k = tr(T_{k-1} W)`, so nothing here
//! needs an eigen-decomposition and integer input stays exact.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::scalar::{Field, Scalar};

/// Ordered list of real eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return arg(format!("spectrum needs at least 2 entries, got {}", values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spectrum entries must be finite".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Spectrum {
        Spectrum(self.0.iter().map(|v| -v).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// σ_0..σ_m of the entries.
    pub fn elem_sym_all(&self) -> Vec<f64> {
        elementary_symmetric(&self.0)
    }
}

/// σ_0..σ_m by the one-pass recurrence `σ_j += λ_i σ_{j-1}`.
pub fn elementary_symmetric<T: Scalar>(values: &[T]) -> Vec<T> {
    let m = values.len();
    let mut sig = vec![T::zero(); m + 1];
    sig[0] = T::one();
    for (i, lam) in values.iter().enumerate() {
        // descending j so sig[j-1] is still the previous row
        for j in (1..=i + 1).rev() {
            sig[j] = sig[j].clone() + lam.clone() * sig[j - 1].clone();
        }
    }
    sig
}

/// Symmetric endomorphism stored densely in an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEndo<T = f64> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> SymEndo<T> {
    /// Builds from the upper triangle of `f`; the lower triangle is mirrored.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        if dim < 2 {
            return arg(format!("dimension must be >= 2, got {dim}"));
        }
        let mut entries = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                entries[i * dim + j] = v.clone();
                entries[j * dim + i] = v;
            }
        }
        Ok(Self { dim, entries })
    }

    /// Rejects rows that are ragged or not exactly symmetric.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return arg("matrix rows must form a square array");
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return arg(format!("matrix is not symmetric at ({i},{j})"));
                }
            }
        }
        Self::from_fn(dim, |i, j| rows[i][j].clone())
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::scaled_identity(dim, T::one())
    }

    pub fn scaled_identity(dim: usize, c: T) -> Result<Self> {
        Self::from_fn(dim, |i, j| if i == j { c.clone() } else { T::zero() })
    }

    pub fn diagonal(values: &[T]) -> Result<Self> {
        Self::from_fn(values.len(), |i, j| if i == j { values[i].clone() } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.dim + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| c.clone() * v.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    /// `tr(A B)`, the frame inner product of two symmetric endomorphisms.
    pub fn pairing(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// `u^T A v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + u[i].clone() * self.get(i, j).clone() * v[j].clone();
            }
        }
        acc
    }

    /// `A v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(T::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone()))
            .collect()
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Result<Self> {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]).clone())
    }

    /// Symmetric part of `self * other`. For commuting arguments (the only
    /// case the recursion produces) this is the product itself.
    fn product_sym(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut prod = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = T::zero();
                for l in 0..d {
                    acc = acc + self.get(i, l).clone() * other.get(l, j).clone();
                }
                prod[i * d + j] = acc;
            }
        }
        let mut entries = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[i * d + j] = (prod[i * d + j].clone() + prod[j * d + i].clone()).div_int(2);
            }
        }
        Self { dim: d, entries }
    }
}

impl SymEndo<f64> {
    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Spectrum {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Spectrum(ev)
    }
}

/// `T_0..T_k` together with `σ_0..σ_k`.
pub struct NewtonSequence<T> {
    pub transforms: Vec<SymEndo<T>>,
    pub sigmas: Vec<T>,
}

pub fn newton_sequence<T: Scalar>(w: &SymEndo<T>, k: usize) -> Result<NewtonSequence<T>> {
    if k > w.dim() {
        return arg(format!("k = {k} exceeds dimension {}", w.dim()));
    }
    let mut transforms = vec![SymEndo::identity(w.dim())?];
    let mut sigmas = vec![T::one()];
    for j in 1..=k {
        let tw = transforms[j - 1].product_sym(w);
        let sigma = tw.trace().div_int(j as i64);
        let next = SymEndo::scaled_identity(w.dim(), sigma.clone())?.sub(&tw);
        transforms.push(next);
        sigmas.push(sigma);
    }
    Ok(NewtonSequence { transforms, sigmas })
}

/// k-th Newton transformation by the Reilly recursion.
pub fn newton_transform<T: Scalar>(w: &SymEndo<T>, k: usize) -> Result<SymEndo<T>> {
    let mut seq = newton_sequence(w, k)?;
    Ok(seq.transforms.pop().expect("sequence holds T_0"))
}

/// σ_k of the eigenvalues of `w`, from the trace identity.
pub fn sigma_k<T: Scalar>(w: &SymEndo<T>, k: usize) -> Result<T> {
    let mut seq = newton_sequence(w, k)?;
    Ok(seq.sigmas.pop().expect("sequence holds sigma_0"))
}

pub const ORACLE_MAX_DIM: usize = 6;

/// Newton transformation from its generalized-Kronecker permutation sum.
///
/// Cost grows like `dim! * dim^2`, hence the dimension cap.
pub fn newton_oracle<T: Scalar>(w: &SymEndo<T>, k: usize) -> Result<SymEndo<T>> {
    let m = w.dim();
    if m > ORACLE_MAX_DIM {
        return arg(format!("oracle refuses dimension {m} > {ORACLE_MAX_DIM}"));
    }
    if k > m {
        return arg(format!("k = {k} exceeds dimension {m}"));
    }
    let perms = signed_permutations(k + 1);
    let factorial: i64 = (1..=k as i64).product();
    let mut out = vec![T::zero(); m * m];
    let mut upper = vec![0usize; k + 1];
    for i in 0..m {
        upper[k] = i;
        let mut acc_row = vec![T::zero(); m];
        for_each_injective(m, k, i, &mut upper, &mut |upper| {
            for (perm, sign) in &perms {
                let j = upper[perm[k]];
                let mut term = T::from_int(*sign);
                for t in 0..k {
                    term = term * w.get(upper[t], upper[perm[t]]).clone();
                }
                acc_row[j] = acc_row[j].clone() + term;
            }
        });
        for j in 0..m {
            out[i * m + j] = acc_row[j].clone().div_int(factorial);
        }
    }
    SymEndo::from_fn(m, |i, j| out[i * m + j].clone())
}

/// Calls `f` for every ordered tuple of `len` distinct indices in `0..m`
/// avoiding `skip`, written into `buf[..len]`.
fn for_each_injective(m: usize, len: usize, skip: usize, buf: &mut [usize], f: &mut impl FnMut(&[usize])) {
    fn rec(
        pos: usize,
        m: usize,
        len: usize,
        skip: usize,
        buf: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if pos == len {
            f(buf);
            return;
        }
        for cand in 0..m {
            if cand == skip || buf[..pos].contains(&cand) {
                continue;
            }
            buf[pos] = cand;
            rec(pos + 1, m, len, skip, buf, f);
        }
    }
    rec(0, m, len, skip, buf, f);
}

/// All permutations of `0..n` with their signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(pos: usize, cur: &mut Vec<usize>, sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if pos + 1 >= cur.len() {
            out.push((cur.clone(), sign));
            return;
        }
        for i in pos..cur.len() {
            cur.swap(pos, i);
            rec(pos + 1, cur, if i == pos { sign } else { -sign }, out);
            cur.swap(pos, i);
        }
    }
    rec(0, &mut cur, 1, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeKind {
    Interior,
    Closure,
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeStatus {
    pub kind: ConeKind,
    /// σ_1..σ_k.
    pub sigmas: Vec<f64>,
    pub tolerance: f64,
}

pub const DEFAULT_CONE_TOLERANCE: f64 = 1e-9;

/// Classifies `λ` against Γ_k^+ with the σ_j threshold scaled by
/// `(1 + |λ|_∞)^j`.
pub fn cone_status(lambda: &Spectrum, k: usize, tau: f64) -> Result<ConeStatus> {
    let m = lambda.len();
    if k == 0 || k > m {
        return arg(format!("cone index k = {k} outside 1..={m}"));
    }
    if !(tau > 0.0) {
        return arg("cone tolerance must be positive");
    }
    let all = lambda.elem_sym_all();
    let sigmas = all[1..=k].to_vec();
    let base = 1.0 + lambda.max_abs();
    let mut interior = true;
    let mut closure = true;
    for (idx, s) in sigmas.iter().enumerate() {
        let scale = base.powi(idx as i32 + 1);
        if !(*s > tau * scale) {
            interior = false;
        }
        if !(*s >= -tau * scale) {
            closure = false;
        }
    }
    let kind = if interior {
        ConeKind::Interior
    } else if closure {
        ConeKind::Closure
    } else {
        ConeKind::Outside
    };
    Ok(ConeStatus { kind, sigmas, tolerance: tau })
}

/// `((m-k)/m) σ_k I - T_k`, the traceless companion of `T_k`.
pub fn l_k<T: Field>(w: &SymEndo<T>, k: usize) -> Result<SymEndo<T>> {
    let m = w.dim();
    if k == 0 || k >= m {
        return arg(format!("L_k needs 1 <= k <= {}, got {k}", m - 1));
    }
    let seq = newton_sequence(w, k)?;
    let coeff = (T::from_int((m - k) as i64) * seq.sigmas[k].clone()).div_int(m as i64);
    Ok(SymEndo::scaled_identity(m, coeff)?.sub(&seq.transforms[k]))
}

/// Trace-free Ricci tensor from the Schouten tensor of an (n+1)-manifold:
/// `E = (n-1) (W - σ_1(W)/(n+1) I)`.
pub fn einstein_from_schouten<T: Field>(w: &SymEndo<T>) -> Result<SymEndo<T>> {
    let m = w.dim();
    if m < 3 {
        return arg("Einstein tensor needs dimension n+1 with n >= 2");
    }
    let mean = w.trace().div_int(m as i64);
    let traceless = w.sub(&SymEndo::scaled_identity(m, mean)?);
    Ok(traceless.scale(&T::from_int(m as i64 - 2)))
}

/// `tr(L_k(W) E(W))`.
pub fn lk_pairing<T: Field>(w: &SymEndo<T>, k: usize) -> Result<T> {
    let m = w.dim();
    if k == 0 || k >= m {
        return arg(format!("pairing needs 1 <= k <= n = {}, got {k}", m - 1));
    }
    Ok(l_k(w, k)?.pairing(&einstein_from_schouten(w)?))
}

/// `(n-1) [((n+1-k)/(n+1)) σ_k σ_1 - (k+1) σ_{k+1}]`.
pub fn lk_pairing_closed_form<T: Field>(w: &SymEndo<T>, k: usize) -> Result<T> {
    let m = w.dim();
    if k == 0 || k >= m {
        return arg(format!("pairing needs 1 <= k <= n = {}, got {k}", m - 1));
    }
    let s = newton_sequence(w, k + 1)?.sigmas;
    let lead = (T::from_int((m - k) as i64) * s[k].clone() * s[1].clone()).div_int(m as i64);
    let tail = T::from_int(k as i64 + 1) * s[k + 1].clone();
    Ok(T::from_int(m as i64 - 2) * (lead - tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Subset-sum oracle for σ_j.
    fn sigma_brute(vals: &[i64], j: usize) -> i64 {
        let m = vals.len();
        (0u32..1 << m)
            .filter(|mask| mask.count_ones() as usize == j)
            .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).map(|i| vals[i]).product::<i64>())
            .sum()
    }

    fn diag(v: &[f64]) -> SymEndo {
        SymEndo::diagonal(v).unwrap()
    }

    #[test]
    fn elem_sym_examples() {
        let s = Spectrum::new(vec![1.0, 2.0, 3.0]).unwrap().elem_sym_all();
        assert_eq!(s, vec![1.0, 6.0, 11.0, 6.0]);
        let s = Spectrum::new(vec![1.0; 4]).unwrap().elem_sym_all();
        assert_eq!(s[2], 6.0);
        let vals = [3i64, 1, 1, -1];
        assert_eq!(sigma_brute(&vals, 2), 2);
        assert_eq!(sigma_brute(&vals, 3), -4);
        let s = elementary_symmetric(&vals);
        assert_eq!((s[2], s[3]), (2, -4));
    }

    #[test]
    fn elem_sym_matches_subset_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = rng.gen_range(2..=7);
            let vals: Vec<i64> = (0..m).map(|_| rng.gen_range(-5..=5)).collect();
            let s = elementary_symmetric(&vals);
            for j in 0..=m {
                assert_eq!(s[j], sigma_brute(&vals, j));
            }
        }
    }

    #[test]
    fn spectrum_validation() {
        assert!(matches!(Spectrum::new(vec![1.0]), Err(Error::Argument(_))));
        assert!(matches!(Spectrum::new(vec![1.0, f64::NAN]), Err(Error::Domain(_))));
    }

    #[test]
    fn newton_examples() {
        assert_eq!(newton_transform(&diag(&[1.0, 2.0, 3.0]), 1).unwrap(), diag(&[5.0, 4.0, 3.0]));
        assert_eq!(newton_transform(&diag(&[1.0, 2.0, 3.0]), 2).unwrap(), diag(&[6.0, 3.0, 2.0]));
        let id4 = SymEndo::<i64>::identity(4).unwrap();
        assert_eq!(newton_transform(&id4, 2).unwrap(), SymEndo::scaled_identity(4, 3).unwrap());
        assert!(matches!(newton_transform(&id4, 5), Err(Error::Argument(_))));
    }

    #[test]
    fn oracle_examples() {
        let w = SymEndo::<i64>::diagonal(&[1, 2, 3]).unwrap();
        assert_eq!(newton_oracle(&w, 2).unwrap(), SymEndo::diagonal(&[6, 3, 2]).unwrap());
        assert_eq!(newton_oracle(&w, 0).unwrap(), SymEndo::identity(3).unwrap());
        let id3 = SymEndo::<i64>::identity(3).unwrap();
        assert_eq!(newton_oracle(&id3, 1).unwrap(), SymEndo::scaled_identity(3, 2).unwrap());
        let big = SymEndo::<i64>::identity(7).unwrap();
        assert!(newton_oracle(&big, 1).is_err());
    }

    #[test]
    fn newton_of_identity_is_binomial() {
        for m in 2..=6usize {
            let id = SymEndo::<i64>::identity(m).unwrap();
            for k in 0..=m {
                let binom = (0..k).fold(1i64, |acc, i| acc * (m - 1 - i) as i64 / (i as i64 + 1));
                assert_eq!(newton_transform(&id, k).unwrap(), SymEndo::scaled_identity(m, binom).unwrap());
            }
        }
    }

    #[test]
    fn cone_examples() {
        let ones = Spectrum::new(vec![1.0; 4]).unwrap();
        assert_eq!(cone_status(&ones, 4, 1e-9).unwrap().kind, ConeKind::Interior);
        let l = Spectrum::new(vec![3.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(cone_status(&l, 2, 1e-9).unwrap().kind, ConeKind::Interior);
        let st = cone_status(&l, 3, 1e-9).unwrap();
        assert_eq!(st.kind, ConeKind::Outside);
        assert_eq!(st.sigmas, vec![4.0, 2.0, -4.0]);
        let z = Spectrum::new(vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(cone_status(&z, 1, 1e-9).unwrap().kind, ConeKind::Interior);
        assert_eq!(cone_status(&z, 3, 1e-9).unwrap().kind, ConeKind::Closure);
        assert!(cone_status(&z, 4, 1e-9).is_err());
        assert!(cone_status(&z, 1, 0.0).is_err());
    }

    #[test]
    fn l_k_examples() {
        let l = l_k(&diag(&[1.0, 2.0, 3.0]), 1).unwrap();
        assert_eq!(l, diag(&[-1.0, 0.0, 1.0]));
        let c = SymEndo::scaled_identity(5, 0.7).unwrap();
        for k in 1..5 {
            assert!(l_k(&c, k).unwrap().max_abs() < 1e-14);
        }
        assert!(l_k(&c, 5).is_err());
        assert!(l_k(&c, 0).is_err());
    }

    #[test]
    fn einstein_examples() {
        let e = einstein_from_schouten(&diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(e, diag(&[-1.0, 0.0, 1.0]));
        let c = SymEndo::scaled_identity(4, 2.5).unwrap();
        assert_eq!(einstein_from_schouten(&c).unwrap().max_abs(), 0.0);
        assert!(einstein_from_schouten(&diag(&[1.0, 2.0])).is_err());
    }

    /// Eliminates Ric and R symbolically: from an arbitrary rational Ricci
    /// tensor build A = (Ric - R/(2n) g)/(n-1) and E = Ric - R/(n+1) g, then
    /// compare E with the matrix formula applied to A, exactly.
    #[test]
    fn einstein_formula_by_exact_elimination() {
        type Q = Ratio<i128>;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in 3..=5usize {
            let n = (dim - 1) as i128;
            for _ in 0..50 {
                let ric = SymEndo::<Q>::from_fn(dim, |_, _| {
                    Q::new(rng.gen_range(-20..=20), rng.gen_range(1..=7))
                })
                .unwrap();
                let r = ric.trace();
                let a = ric
                    .sub(&SymEndo::scaled_identity(dim, r / Q::from_integer(2 * n)).unwrap())
                    .scale(&Q::new(1, n - 1));
                let e_def = ric.sub(&SymEndo::scaled_identity(dim, r / Q::from_integer(n + 1)).unwrap());
                assert_eq!(einstein_from_schouten(&a).unwrap(), e_def);
                for k in 1..dim {
                    assert_eq!(lk_pairing(&a, k).unwrap(), lk_pairing_closed_form(&a, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let w = diag(&[1.0, 2.0, 3.0]);
        assert!((lk_pairing(&w, 1).unwrap() - 2.0).abs() < 1e-14);
        assert!((lk_pairing_closed_form(&w, 1).unwrap() - 2.0).abs() < 1e-14);
        let c = SymEndo::scaled_identity(4, 1.25).unwrap();
        for k in 1..4 {
            assert_eq!(lk_pairing(&c, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn sign_flip_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let dim = rng.gen_range(2..=6);
            let w = SymEndo::<i128>::from_fn(dim, |_, _| rng.gen_range(-6..=6)).unwrap();
            let neg = w.scale(&-1);
            for k in 0..=dim {
                let s = sigma_k(&w, k).unwrap();
                let sn = sigma_k(&neg, k).unwrap();
                assert_eq!(sn, if k % 2 == 0 { s } else { -s });
            }
        }
    }

    #[test]
    fn permutation_signs() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i64>(), 0);
        let id = p.iter().find(|(q, _)| q == &vec![0, 1, 2]).unwrap();
        assert_eq!(id.1, 1);
        let swap = p.iter().find(|(q, _)| q == &vec![1, 0, 2]).unwrap();
        assert_eq!(swap.1, -1);
        let cyc = p.iter().find(|(q, _)| q == &vec![1, 2, 0]).unwrap();
        assert_eq!(cyc.1, 1);
    }
}
