//! Symmetric-function engine over multisets of complex local parameters.
//!
//! Everything downstream reduces to four families evaluated on a Satake
//! multiset `{α_1, ..., α_n}`:
//!
//! * elementary `e_l`, with `μ(p^l) = (-1)^l e_l`,
//! * power sums `p_k`, the log-derivative coefficients `a(p^k)`,
//! * complete homogeneous `h_k`, the standard coefficients `λ(p^k)`,
//! * Schur `s_λ`, whose squared moduli sum to the Rankin–Selberg
//!   coefficients.
//!
//! Schur values are computed through the Jacobi–Trudi determinant in the
//! `h_k`, which stays finite when parameters repeat (the ratio of
//! alternants does not).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on partition weight for enumeration.
pub const MAX_PARTITION_WEIGHT: u32 = 64;

/// A partition: nonincreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Build from parts, validating the nonincreasing-positive invariant.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(Error::contract(format!(
                    "partition parts must be nonincreasing, got {parts:?}"
                )));
            }
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::contract("partition parts must be positive"));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Hook shape `(a, 1^m)`: one row of length `a` and `m` rows of 1.
    pub fn hook(a: u32, ones: usize) -> Result<Self> {
        let mut parts = vec![a];
        parts.extend(std::iter::repeat(1).take(ones));
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Weight `|λ|`.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Length `ℓ(λ)`: number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// A canonicalized multiset of complex values. Order is fixed (by real
/// part, then imaginary) so equality and hashing of derived data are
/// well-defined.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMultiset {
    values: Vec<Complex64>,
}

impl ComplexMultiset {
    pub fn new(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        ComplexMultiset { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The multiset of complex conjugates.
    pub fn conj(&self) -> ComplexMultiset {
        ComplexMultiset::new(self.values.iter().map(|z| z.conj()).collect())
    }
}

/// All partitions of `k` with at most `max_length` parts, in
/// lexicographically decreasing order.
pub fn enum_partitions(k: u32, max_length: usize) -> Result<Vec<Partition>> {
    if k > MAX_PARTITION_WEIGHT {
        return Err(Error::SizeLimit {
            what: "partition weight",
            limit: MAX_PARTITION_WEIGHT as u64,
            got: k as u64,
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    descend(k, k, max_length, &mut current, &mut out);
    Ok(out)
}

fn descend(remaining: u32, max_part: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    if slots == 0 {
        return;
    }
    let hi = remaining.min(max_part);
    // Largest next part first gives lexicographically decreasing output.
    for part in (1..=hi).rev() {
        // Feasibility: the rest must fit in the remaining slots.
        if (remaining - part) > part * (slots as u32 - 1) {
            continue;
        }
        current.push(part);
        descend(remaining - part, part, slots - 1, current, out);
        current.pop();
    }
}

/// `e_l(α_1,...,α_n)`; 1 for l = 0, 0 for l > n.
pub fn elementary(l: usize, a: &ComplexMultiset) -> Complex64 {
    let table = elementary_all(l, a);
    table[l]
}

/// All of `e_0..e_l` at once via the product recurrence for `∏(1 + α x)`.
pub fn elementary_all(lmax: usize, a: &ComplexMultiset) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); lmax + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for &alpha in a.values() {
        for j in (1..=lmax).rev() {
            let prev = e[j - 1];
            e[j] += alpha * prev;
        }
    }
    e
}

/// `p_k(α) = Σ α_j^k` for k ≥ 1.
pub fn power_sum(k: u32, a: &ComplexMultiset) -> Complex64 {
    a.values().iter().map(|&z| z.powu(k)).sum()
}

/// `h_k(α)`; 1 for k = 0.
pub fn complete_homogeneous(k: usize, a: &ComplexMultiset) -> Complex64 {
    complete_homogeneous_all(k, a)[k]
}

/// All of `h_0..h_k` via the series recurrence for `∏ 1/(1 - α x)`.
pub fn complete_homogeneous_all(kmax: usize, a: &ComplexMultiset) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); kmax + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &alpha in a.values() {
        // Multiply the running series by 1/(1 - αx): prefix accumulation.
        for j in 1..=kmax {
            let prev = h[j - 1];
            h[j] += alpha * prev;
        }
    }
    h
}

/// Schur polynomial `s_λ(α)` by the Jacobi–Trudi determinant
/// `det(h_{λ_i - i + j})`, well-defined for repeated parameters.
/// Returns 0 when `ℓ(λ)` exceeds the multiset size.
pub fn schur(lambda: &Partition, a: &ComplexMultiset) -> Complex64 {
    let ell = lambda.len();
    if ell == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if ell > a.len() {
        return Complex64::new(0.0, 0.0);
    }
    let hmax = lambda.parts()[0] as usize + ell;
    let h = complete_homogeneous_all(hmax, a);
    let mut m = vec![Complex64::new(0.0, 0.0); ell * ell];
    for i in 0..ell {
        for j in 0..ell {
            let idx = lambda.parts()[i] as i64 - i as i64 + j as i64;
            m[i * ell + j] = if idx < 0 {
                Complex64::new(0.0, 0.0)
            } else {
                h[idx as usize]
            };
        }
    }
    det_complex(&mut m, ell)
}

/// Schur value by the ratio of alternants. Only valid when all values are
/// pairwise distinct; used as the independent cross-check route.
pub fn schur_alternant(lambda: &Partition, a: &ComplexMultiset) -> Complex64 {
    let n = a.len();
    if lambda.len() > n {
        return Complex64::new(0.0, 0.0);
    }
    let mut lam = vec![0u32; n];
    lam[..lambda.len()].copy_from_slice(lambda.parts());
    let v = a.values();
    let mut num = vec![Complex64::new(0.0, 0.0); n * n];
    let mut den = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let exp_num = lam[j] + (n - 1 - j) as u32;
            num[i * n + j] = v[i].powu(exp_num);
            den[i * n + j] = v[i].powu((n - 1 - j) as u32);
        }
    }
    det_complex(&mut num, n) / det_complex(&mut den, n)
}

/// Dual Pieri rule: `e_l · h_m = s_{(m+1,1^{l-1})} + s_{(m,1^l)}`.
/// Returns true iff both sides agree within `tol` in absolute value.
pub fn dual_pieri_check(l: usize, m: u32, a: &ComplexMultiset, tol: f64) -> bool {
    assert!(l >= 1 && m >= 1, "dual Pieri requires l >= 1, m >= 1");
    let lhs = elementary(l, a) * complete_homogeneous(m as usize, a);
    let first = Partition::hook(m + 1, l - 1).expect("valid hook");
    let second = Partition::hook(m, l).expect("valid hook");
    let rhs = schur(&first, a) + schur(&second, a);
    (lhs - rhs).norm() <= tol
}

/// Determinant by partial-pivot Gaussian elimination; consumes the buffer.
fn det_complex(m: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].norm_sqr();
        for row in col + 1..n {
            let mag = m[row * n + col].norm_sqr();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let diag = m[col * n + col];
        det *= diag;
        for row in col + 1..n {
            let factor = m[row * n + col] / diag;
            for j in col..n {
                let sub = factor * m[col * n + j];
                m[row * n + j] -= sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_unit_multiset(rng: &mut ChaCha8Rng, n: usize) -> ComplexMultiset {
        let vals = (0..n)
            .map(|_| {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(1.0, theta)
            })
            .collect();
        ComplexMultiset::new(vals)
    }

    #[test]
    fn partitions_of_zero() {
        let ps = enum_partitions(0, 3).unwrap();
        assert_eq!(ps, vec![Partition::empty()]);
    }

    #[test]
    fn partitions_of_three_length_two() {
        // Brute-force oracle: all weak compositions of 3 into <= 2 parts,
        // sorted and deduplicated.
        let mut oracle = std::collections::HashSet::new();
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                if a + b == 3 {
                    let mut v: Vec<u32> = [a, b].into_iter().filter(|&x| x > 0).collect();
                    v.sort_unstable_by(|x, y| y.cmp(x));
                    oracle.insert(v);
                }
            }
        }
        let got = enum_partitions(3, 2).unwrap();
        let got_parts: Vec<Vec<u32>> = got.iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(got_parts, vec![vec![3], vec![2, 1]]);
        assert_eq!(oracle.len(), got.len());
        for p in &got_parts {
            assert!(oracle.contains(p));
        }
    }

    #[test]
    fn partitions_single_row() {
        let ps = enum_partitions(4, 1).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].parts(), &[4]);
    }

    #[test]
    fn partitions_weight_guard() {
        assert!(enum_partitions(65, 4).is_err());
    }

    #[test]
    fn elementary_conventions() {
        let a = ComplexMultiset::new(vec![c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(elementary(0, &a), c(1.0, 0.0));
        assert_eq!(elementary(3, &a), c(0.0, 0.0));
        // Brute force over index subsets: e_2({2,3}) = 2*3 = 6.
        assert!((elementary(2, &a) - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn power_sum_basics() {
        let single = ComplexMultiset::new(vec![c(0.3, 0.7)]);
        assert!((power_sum(1, &single) - c(0.3, 0.7)).norm() < 1e-15);
        let pm = ComplexMultiset::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!((power_sum(2, &pm) - c(2.0, 0.0)).norm() < 1e-15);
        let zeros = ComplexMultiset::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(power_sum(3, &zeros), c(0.0, 0.0));
    }

    #[test]
    fn homogeneous_basics() {
        let a = ComplexMultiset::new(vec![c(0.4, 0.2), c(-0.1, 0.9)]);
        assert_eq!(complete_homogeneous(0, &a), c(1.0, 0.0));
        // Brute force over monomials m1 + m2 = 2.
        let (x, y) = (a.values()[0], a.values()[1]);
        let brute = x * x + x * y + y * y;
        assert!((complete_homogeneous(2, &a) - brute).norm() < 1e-14);
        assert!((complete_homogeneous(1, &a) - elementary(1, &a)).norm() < 1e-15);
    }

    #[test]
    fn schur_single_row_is_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_unit_multiset(&mut rng, 3);
            for k in 1..=6u32 {
                let lam = Partition::new(vec![k]).unwrap();
                let diff = (schur(&lam, &a) - complete_homogeneous(k as usize, &a)).norm();
                assert!(diff < 1e-12);
            }
        }
    }

    #[test]
    fn schur_vanishes_when_too_long() {
        let a = ComplexMultiset::new(vec![c(1.0, 0.0), c(0.5, 0.5)]);
        let lam = Partition::new(vec![2, 1, 1]).unwrap();
        assert_eq!(schur(&lam, &a), c(0.0, 0.0));
    }

    #[test]
    fn schur_column_two() {
        // s_(1,1)(a, b) = a*b, from the tableau expansion.
        let a0 = c(2.0, 1.0);
        let b0 = c(1.0, -3.0);
        let a = ComplexMultiset::new(vec![a0, b0]);
        let lam = Partition::new(vec![1, 1]).unwrap();
        assert!((schur(&lam, &a) - a0 * b0).norm() < 1e-13);
    }

    #[test]
    fn schur_symmetric_under_permutation() {
        // Canonicalization makes permuted inputs identical, so this is exact.
        let v = vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.9, -0.4)];
        let mut w = v.clone();
        w.rotate_left(1);
        let lam = Partition::new(vec![3, 1]).unwrap();
        assert_eq!(
            schur(&lam, &ComplexMultiset::new(v)),
            schur(&lam, &ComplexMultiset::new(w))
        );
    }

    #[test]
    fn jacobi_trudi_matches_alternant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(2..=4usize);
            let a = random_unit_multiset(&mut rng, n);
            for k in 1..=8u32 {
                for lam in enum_partitions(k, n).unwrap() {
                    let jt = schur(&lam, &a);
                    let alt = schur_alternant(&lam, &a);
                    let denom = jt.norm().max(1e-12);
                    assert!(
                        (jt - alt).norm() / denom < 1e-9,
                        "mismatch for {:?}: {jt} vs {alt}",
                        lam.parts()
                    );
                }
            }
        }
    }

    #[test]
    fn newton_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=6usize);
            let a = random_unit_multiset(&mut rng, n);
            let e = elementary_all(n, &a);
            for k in 1..=n {
                let lhs = Complex64::new(k as f64, 0.0) * e[k];
                let mut rhs = Complex64::new(0.0, 0.0);
                for i in 1..=k {
                    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                    rhs += sign * e[k - i] * power_sum(i as u32, &a);
                }
                let denom = lhs.norm().max(1e-12);
                assert!((lhs - rhs).norm() / denom < 1e-9);
            }
        }
    }

    #[test]
    fn dual_pieri_low_cases() {
        let a = ComplexMultiset::new(vec![c(0.7, 0.3), c(-0.2, 0.6)]);
        assert!(dual_pieri_check(1, 1, &a, 1e-12));
        // Both sides vanish once l exceeds the multiset size.
        assert!(dual_pieri_check(5, 2, &a, 1e-15));
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let b = random_unit_multiset(&mut rng, 4);
            assert!(dual_pieri_check(2, 3, &b, 1e-11));
        }
    }
}
