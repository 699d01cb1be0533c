//! Local Dirichlet-coefficient generators from Satake data, plus the
//! concrete exemplars: the trivial representation, the weight-12 cusp form
//! Δ, and its symmetric-square / symmetric-cube lifts.
//!
//! All Δ-derived data flows from an exact integer table of τ(m). The table
//! is built from the eighth power of the sparse cube
//! `∏(1-q^n)^3 = Σ_k (-1)^k (2k+1) q^{k(k+1)/2}`, so the whole expansion
//! is seven dense-times-sparse multiplications in checked 128-bit
//! arithmetic.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symfunc::{
    complete_homogeneous, elementary, enum_partitions, power_sum, schur, ComplexMultiset,
};

/// Guard for the τ table length. |τ(n)| < 2.4e35 for n <= 1e6, which fits
/// a signed 128-bit integer with room to spare.
pub const MAX_TAU_N: usize = 1_000_000;

const TAU_MAGIC: &[u8; 4] = b"TAU1";

/// Exact table of Ramanujan τ(m) for 1 <= m <= n.
#[derive(Debug, Clone)]
pub struct TauTable {
    vals: Vec<i128>, // vals[m] = tau(m), vals[0] unused
}

impl TauTable {
    pub fn len(&self) -> usize {
        self.vals.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tau(&self, m: usize) -> Result<i128> {
        self.vals
            .get(m)
            .copied()
            .filter(|_| m >= 1)
            .ok_or_else(|| Error::range(format!("tau({m}) beyond table length {}", self.len())))
    }

    /// FNV-1a digest of the little-endian byte image; recorded in run
    /// manifests so outputs can be tied to the exact table that produced
    /// them.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.vals[1..] {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        }
        h
    }

    /// Serialize to the cache format: magic "TAU1", u64 length, then
    /// little-endian signed 128-bit values. Bit-exact across platforms.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(TAU_MAGIC)?;
        f.write_all(&(self.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.len() * 16);
        for v in &self.vals[1..] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<TauTable> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != TAU_MAGIC {
            return Err(Error::contract(format!(
                "bad tau cache magic {magic:?} in {}",
                path.display()
            )));
        }
        let mut lenb = [0u8; 8];
        f.read_exact(&mut lenb)?;
        let n = u64::from_le_bytes(lenb) as usize;
        if n > MAX_TAU_N {
            return Err(Error::SizeLimit {
                what: "tau cache length",
                limit: MAX_TAU_N as u64,
                got: n as u64,
            });
        }
        let mut buf = vec![0u8; n * 16];
        f.read_exact(&mut buf)?;
        let mut vals = Vec::with_capacity(n + 1);
        vals.push(0);
        for chunk in buf.chunks_exact(16) {
            vals.push(i128::from_le_bytes(chunk.try_into().unwrap()));
        }
        Ok(TauTable { vals })
    }
}

/// τ(m) for m <= n, exact.
pub fn compute_tau_table(n: usize) -> Result<TauTable> {
    if n == 0 {
        return Err(Error::contract("tau table length must be positive"));
    }
    if n > MAX_TAU_N {
        return Err(Error::SizeLimit {
            what: "tau table length",
            limit: MAX_TAU_N as u64,
            got: n as u64,
        });
    }
    // tau(m) is the coefficient of q^{m-1} in (eta^3)^8. Coefficients of
    // the cube: index k(k+1)/2, value (-1)^k (2k+1).
    let deg = n - 1;
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k * (k + 1) / 2;
        if t > deg {
            break;
        }
        let c = (2 * k + 1) as i128;
        sparse.push((t, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }

    let mut dense: Vec<i128> = vec![0; deg + 1];
    dense[0] = 1;
    for (t, c) in &sparse {
        if *t <= deg {
            dense[*t] = *c;
        }
    }
    for _ in 1..8 {
        dense = mul_dense_sparse(&dense, &sparse)?;
    }

    let mut vals = Vec::with_capacity(n + 1);
    vals.push(0);
    vals.extend_from_slice(&dense);
    Ok(TauTable { vals })
}

fn mul_dense_sparse(dense: &[i128], sparse: &[(usize, i128)]) -> Result<Vec<i128>> {
    // Overflow policy: prove once per pass that no product or partial sum
    // can leave i128 (max |dense| times the absolute coefficient sum),
    // then run without per-op checks; if the proof fails, fall back to
    // checked arithmetic. Either way overflow can never pass silently.
    let max_abs: u128 = dense.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let coeff_sum: u128 = sparse.iter().map(|(_, c)| c.unsigned_abs()).sum();
    let provably_safe =
        coeff_sum > 0 && max_abs <= (i128::MAX as u128) / coeff_sum;

    const BLOCK: usize = 1 << 15;
    let n = dense.len();
    let mut out = vec![0i128; n];
    if provably_safe {
        // Block the output so each (sparse term, block) pair reads a
        // contiguous window of the dense array.
        out.par_chunks_mut(BLOCK).enumerate().for_each(|(bi, chunk)| {
            let lo = bi * BLOCK;
            for &(t, c) in sparse {
                if t >= lo + chunk.len() {
                    break;
                }
                let start = lo.max(t);
                let src = &dense[start - t..lo + chunk.len() - t];
                let dst = &mut chunk[start - lo..];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += s * c;
                }
            }
        });
        return Ok(out);
    }
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for &(t, c) in sparse {
            if t > m {
                break;
            }
            let term = dense[m - t]
                .checked_mul(c)
                .ok_or(Error::Overflow("tau series multiplication"))?;
            acc = acc
                .checked_add(term)
                .ok_or(Error::Overflow("tau series accumulation"))?;
        }
        *slot = acc;
    }
    Ok(out)
}

/// Independent oracle: expand q * prod_{m<=n}(1-q^m)^24 by schoolbook
/// polynomial multiplication. Only for small n.
pub fn tau_direct_expansion(n: usize) -> Vec<i128> {
    let deg = n - 1;
    let mut poly: Vec<i128> = vec![0; deg + 1];
    poly[0] = 1;
    for m in 1..=deg.max(1) {
        for _ in 0..24 {
            // multiply by (1 - q^m)
            for i in (m..=deg).rev() {
                poly[i] -= poly[i - m];
            }
        }
    }
    let mut out = vec![0i128; n + 1];
    out[1..].copy_from_slice(&poly[..n]);
    out
}

/// Normalization mode a Satake multiset claims to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SatakeMode {
    /// Every |α_j| = 1 (the Ramanujan case).
    UnitCircle,
    /// |α_j| <= p^θ with θ <= 1/2 - 1/(n²+1), checked against the prime
    /// the set is attached to.
    RamanujanBounded { theta: f64, p: u64 },
    /// Satake data of a concrete exemplar; exact by construction.
    ExactExemplar,
}

/// A multiset of local parameters with its normalization mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeSet {
    params: ComplexMultiset,
    mode: SatakeMode,
}

impl SatakeSet {
    pub fn unit_circle(values: Vec<Complex64>) -> Result<SatakeSet> {
        for z in &values {
            if (z.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::contract(format!(
                    "unit-circle mode requires |alpha| = 1, got |{z}| = {}",
                    z.norm()
                )));
            }
        }
        Ok(SatakeSet {
            params: ComplexMultiset::new(values),
            mode: SatakeMode::UnitCircle,
        })
    }

    pub fn ramanujan_bounded(values: Vec<Complex64>, theta: f64, p: u64) -> Result<SatakeSet> {
        let n = values.len();
        let theta_cap = 0.5 - 1.0 / ((n * n + 1) as f64);
        if theta > theta_cap + 1e-12 {
            return Err(Error::contract(format!(
                "theta {theta} exceeds 1/2 - 1/(n^2+1) = {theta_cap} for n = {n}"
            )));
        }
        let bound = (p as f64).powf(theta) * (1.0 + 1e-12);
        for z in &values {
            if z.norm() > bound {
                return Err(Error::contract(format!(
                    "|alpha| = {} exceeds p^theta = {bound} at p = {p}",
                    z.norm()
                )));
            }
        }
        Ok(SatakeSet {
            params: ComplexMultiset::new(values),
            mode: SatakeMode::RamanujanBounded { theta, p },
        })
    }

    pub fn exemplar(values: Vec<Complex64>) -> SatakeSet {
        SatakeSet {
            params: ComplexMultiset::new(values),
            mode: SatakeMode::ExactExemplar,
        }
    }

    pub fn params(&self) -> &ComplexMultiset {
        &self.params
    }

    pub fn rank(&self) -> usize {
        self.params.len()
    }

    pub fn mode(&self) -> SatakeMode {
        self.mode
    }
}

/// Uniform angles on the unit circle.
pub fn random_unit_satake<R: Rng>(rng: &mut R, n: usize) -> SatakeSet {
    let vals = (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    SatakeSet::unit_circle(vals).expect("unit moduli by construction")
}

/// Stress mode: radii drawn up to p^{1/2 - 1/(n²+1)}.
pub fn random_stress_satake<R: Rng>(rng: &mut R, n: usize, p: u64) -> SatakeSet {
    let theta = 0.5 - 1.0 / ((n * n + 1) as f64);
    let rmax = (p as f64).powf(theta);
    let vals = (0..n)
        .map(|_| {
            let r = rng.gen_range(0.0..=rmax);
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    SatakeSet::ramanujan_bounded(vals, theta, p).expect("radii bounded by construction")
}

/// The four concrete representations the experiments run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExemplarName {
    Zeta,
    Delta,
    Sym2Delta,
    Sym3Delta,
}

impl ExemplarName {
    pub fn rank(self) -> usize {
        match self {
            ExemplarName::Zeta => 1,
            ExemplarName::Delta => 2,
            ExemplarName::Sym2Delta => 3,
            ExemplarName::Sym3Delta => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExemplarName::Zeta => "zeta",
            ExemplarName::Delta => "delta",
            ExemplarName::Sym2Delta => "sym2-delta",
            ExemplarName::Sym3Delta => "sym3-delta",
        }
    }
}

impl std::str::FromStr for ExemplarName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeta" => Ok(ExemplarName::Zeta),
            "delta" => Ok(ExemplarName::Delta),
            "sym2-delta" => Ok(ExemplarName::Sym2Delta),
            "sym3-delta" => Ok(ExemplarName::Sym3Delta),
            other => Err(Error::contract(format!(
                "unknown representation {other:?}; expected zeta|delta|sym2-delta|sym3-delta"
            ))),
        }
    }
}

/// A fixed representation together with the τ table its Satake data needs.
#[derive(Debug, Clone)]
pub struct ExemplarPi {
    name: ExemplarName,
    tau: Option<Arc<TauTable>>,
}

impl ExemplarPi {
    pub fn zeta() -> ExemplarPi {
        ExemplarPi {
            name: ExemplarName::Zeta,
            tau: None,
        }
    }

    /// Any Δ-derived exemplar.
    pub fn from_tau(name: ExemplarName, tau: Arc<TauTable>) -> ExemplarPi {
        match name {
            ExemplarName::Zeta => ExemplarPi::zeta(),
            _ => ExemplarPi {
                name,
                tau: Some(tau),
            },
        }
    }

    pub fn name(&self) -> ExemplarName {
        self.name
    }

    pub fn rank(&self) -> usize {
        self.name.rank()
    }

    pub fn tau_table(&self) -> Option<&TauTable> {
        self.tau.as_deref()
    }

    /// Hecke eigenvalue λ_Δ(p) = τ(p) / p^{11/2}.
    fn delta_lambda_p(&self, p: u64) -> Result<f64> {
        let tau = self
            .tau
            .as_ref()
            .ok_or_else(|| Error::contract("exemplar lacks a tau table"))?
            .tau(p as usize)?;
        Ok(tau as f64 / (p as f64).powf(5.5))
    }

    /// The Satake multiset of this exemplar at an (unramified) prime p.
    pub fn satake_at(&self, p: u64) -> Result<SatakeSet> {
        match self.name {
            ExemplarName::Zeta => Ok(SatakeSet::exemplar(vec![Complex64::new(1.0, 0.0)])),
            _ => {
                let lam = self.delta_lambda_p(p)?;
                // Roots of z^2 - lam z + 1 with |lam| <= 2 (Deligne):
                // conjugate pair on the unit circle, nonnegative imaginary
                // part listed first.
                let disc = (1.0 - lam * lam / 4.0).max(0.0).sqrt();
                let alpha = Complex64::new(lam / 2.0, disc);
                let beta = alpha.conj();
                let vals = match self.name {
                    ExemplarName::Delta => vec![alpha, beta],
                    ExemplarName::Sym2Delta => {
                        vec![alpha * alpha, Complex64::new(1.0, 0.0), beta * beta]
                    }
                    ExemplarName::Sym3Delta => {
                        vec![alpha.powu(3), alpha, beta, beta.powu(3)]
                    }
                    ExemplarName::Zeta => unreachable!(),
                };
                Ok(SatakeSet::exemplar(vals))
            }
        }
    }
}

/// λ(p^k) = h_k(A(p)); 1 for k = 0.
pub fn lambda_pk(s: &SatakeSet, k: u32) -> Complex64 {
    complete_homogeneous(k as usize, s.params())
}

/// a(p^k) = Σ_j α_j^k for k >= 1.
pub fn a_pk(s: &SatakeSet, k: u32) -> Complex64 {
    assert!(k >= 1, "a(p^k) requires k >= 1");
    power_sum(k, s.params())
}

/// μ(p^k) = (-1)^k e_k(A(p)); vanishes for k > n.
pub fn mu_pk(s: &SatakeSet, k: u32) -> Complex64 {
    if k as usize > s.rank() {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * elementary(k as usize, s.params())
}

/// Rankin–Selberg coefficient λ_{π×π̃}(p^k) = Σ_{|λ|=k} |s_λ(A(p))|².
/// Real and nonnegative by construction.
pub fn rs_lambda_pk(s: &SatakeSet, k: u32) -> f64 {
    let n = s.rank();
    let parts = enum_partitions(k, n).expect("partition weight within guard");
    parts
        .iter()
        .map(|lam| schur(lam, s.params()).norm_sqr())
        .sum()
}

/// Rankin–Selberg log-derivative coefficient a_{π×π̃}(p^k) = |a(p^k)|².
pub fn rs_a_pk(s: &SatakeSet, k: u32) -> f64 {
    a_pk(s, k).norm_sqr()
}

/// Brute-force oracle: coefficients (degree 0..kmax) of the local
/// Rankin–Selberg Euler factor `∏_{j,j'} (1 - α_j conj(α_{j'}) x)^{-1}`.
pub fn rs_euler_coeffs(a: &ComplexMultiset, kmax: usize) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); kmax + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for &aj in a.values() {
        for &ak in a.values() {
            let beta = aj * ak.conj();
            // Multiply by the geometric series for 1/(1 - beta x).
            for j in 1..=kmax {
                let prev = coeffs[j - 1];
                coeffs[j] += beta * prev;
            }
        }
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_tau() -> Arc<TauTable> {
        Arc::new(compute_tau_table(2000).unwrap())
    }

    #[test]
    fn tau_first_values() {
        let t = compute_tau_table(12).unwrap();
        let expected: [i128; 11] = [
            1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612,
        ];
        for (m, want) in expected.iter().enumerate() {
            assert_eq!(t.tau(m + 1).unwrap(), *want, "tau({})", m + 1);
        }
    }

    #[test]
    fn tau_matches_direct_expansion() {
        let t = compute_tau_table(24).unwrap();
        let oracle = tau_direct_expansion(24);
        for m in 1..=24 {
            assert_eq!(t.tau(m).unwrap(), oracle[m], "tau({m})");
        }
    }

    #[test]
    fn tau_multiplicative_spot() {
        let t = compute_tau_table(30).unwrap();
        assert_eq!(
            t.tau(6).unwrap(),
            t.tau(2).unwrap() * t.tau(3).unwrap(),
            "tau(6) = tau(2) tau(3)"
        );
        // Hecke relation at p^2: tau(p^2) = tau(p)^2 - p^11.
        let p11 = 2048i128 * 1024 * 1024; // 2^11 * ...
        let _ = p11;
        assert_eq!(t.tau(4).unwrap(), t.tau(2).unwrap().pow(2) - (1i128 << 11));
    }

    #[test]
    fn tau_cache_roundtrip() {
        let t = compute_tau_table(500).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tau.bin");
        t.write_cache(&path).unwrap();
        let back = TauTable::read_cache(&path).unwrap();
        assert_eq!(back.len(), 500);
        for m in 1..=500 {
            assert_eq!(t.tau(m).unwrap(), back.tau(m).unwrap());
        }
        assert_eq!(t.digest(), back.digest());
    }

    #[test]
    fn satake_exemplars() {
        let tau = small_tau();
        let zeta = ExemplarPi::zeta();
        let s = zeta.satake_at(97).unwrap();
        assert_eq!(s.params().values(), &[Complex64::new(1.0, 0.0)]);

        let delta = ExemplarPi::from_tau(ExemplarName::Delta, tau.clone());
        for p in [2u64, 3, 5, 7, 11, 101, 997] {
            let s = delta.satake_at(p).unwrap();
            let prod: Complex64 = s.params().values().iter().product();
            assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            let lam = lambda_pk(&s, 1);
            let want = tau.tau(p as usize).unwrap() as f64 / (p as f64).powf(5.5);
            assert!((lam.re - want).abs() < 1e-12 && lam.im.abs() < 1e-12);
            assert!(lam.norm() <= 2.0 + 1e-12, "Deligne at p = {p}");
        }

        let sym2 = ExemplarPi::from_tau(ExemplarName::Sym2Delta, tau.clone());
        for p in [2u64, 13, 151] {
            let s = sym2.satake_at(p).unwrap();
            let lam_delta = tau.tau(p as usize).unwrap() as f64 / (p as f64).powf(5.5);
            let got = a_pk(&s, 1);
            // alpha^2 + 1 + beta^2 = (alpha+beta)^2 - 1 since alpha beta = 1
            let want = lam_delta * lam_delta - 1.0;
            assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn satake_out_of_range() {
        let delta = ExemplarPi::from_tau(ExemplarName::Delta, small_tau());
        assert!(delta.satake_at(1_000_003).is_err());
    }

    #[test]
    fn local_coefficients_basics() {
        let tau = small_tau();
        let delta = ExemplarPi::from_tau(ExemplarName::Delta, tau.clone());
        let s = delta.satake_at(2).unwrap();
        assert_eq!(lambda_pk(&s, 0), Complex64::new(1.0, 0.0));
        assert_eq!(mu_pk(&s, 0), Complex64::new(1.0, 0.0));
        assert_eq!(mu_pk(&s, 3), Complex64::new(0.0, 0.0)); // k = n+1
        let lam = lambda_pk(&s, 1);
        assert!((mu_pk(&s, 1) + lam).norm() < 1e-12, "mu(p) = -lambda(p)");
        // a(p) = lambda(p); a(p^2) = lambda(p)^2 - 2 for delta.
        assert!((a_pk(&s, 1) - lam).norm() < 1e-12);
        assert!((a_pk(&s, 2) - (lam * lam - 2.0)).norm() < 1e-10);
    }

    #[test]
    fn zeta_rs_trivial() {
        let zeta = ExemplarPi::zeta();
        let s = zeta.satake_at(5).unwrap();
        for k in 0..6 {
            assert!((rs_lambda_pk(&s, k) - 1.0).abs() < 1e-12);
        }
        for k in 1..6 {
            assert!((rs_a_pk(&s, k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rs_matches_euler_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let n = rng.gen_range(1..=4usize);
            let s = random_unit_satake(&mut rng, n);
            let oracle = rs_euler_coeffs(s.params(), 8);
            for k in 0..=8u32 {
                let got = rs_lambda_pk(&s, k);
                let want = oracle[k as usize];
                assert!(want.im.abs() < 1e-9 * (1.0 + want.re.abs()));
                let denom = want.re.abs().max(1e-12);
                assert!(
                    (got - want.re).abs() / denom < 1e-9,
                    "k={k} got={got} want={}",
                    want.re
                );
            }
        }
    }

    #[test]
    fn local_euler_identity() {
        // (sum lambda x^k)(sum mu x^k) = 1 through order K = 12.
        let tau = small_tau();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut sets = vec![
            ExemplarPi::zeta().satake_at(7).unwrap(),
            ExemplarPi::from_tau(ExemplarName::Delta, tau.clone())
                .satake_at(11)
                .unwrap(),
            ExemplarPi::from_tau(ExemplarName::Sym3Delta, tau.clone())
                .satake_at(13)
                .unwrap(),
        ];
        for _ in 0..25 {
            let n = rng.gen_range(1..=4);
            sets.push(random_unit_satake(&mut rng, n));
        }
        const K: usize = 12;
        for s in &sets {
            let lam: Vec<Complex64> = (0..=K as u32).map(|k| lambda_pk(s, k)).collect();
            let mu: Vec<Complex64> = (0..=K as u32).map(|k| mu_pk(s, k)).collect();
            for m in 0..=K {
                let conv: Complex64 = (0..=m).map(|i| lam[i] * mu[m - i]).sum();
                let want = if m == 0 { 1.0 } else { 0.0 };
                assert!(
                    (conv - want).norm() < 1e-10,
                    "order {m} coefficient {conv}"
                );
            }
        }
    }

    #[test]
    fn exemplar_self_duality_real() {
        let tau = small_tau();
        for name in [
            ExemplarName::Zeta,
            ExemplarName::Delta,
            ExemplarName::Sym2Delta,
            ExemplarName::Sym3Delta,
        ] {
            let pi = ExemplarPi::from_tau(name, tau.clone());
            for p in [2u64, 3, 5, 101, 1009, 1999] {
                let s = pi.satake_at(p).unwrap();
                for k in 0..=8u32 {
                    assert!(lambda_pk(&s, k).im.abs() < 1e-10);
                    assert!(mu_pk(&s, k).im.abs() < 1e-10);
                    if k >= 1 {
                        assert!(a_pk(&s, k).im.abs() < 1e-10);
                    }
                }
                // Self-dual: closed under inversion-conjugation.
                let inv_conj = ComplexMultiset::new(
                    s.params()
                        .values()
                        .iter()
                        .map(|z| (1.0 / z).conj())
                        .collect(),
                );
                for (a, b) in s.params().values().iter().zip(inv_conj.values()) {
                    assert!((a - b).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rs_nonnegative_stress() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4usize);
            let s = random_stress_satake(&mut rng, n, 101);
            for k in 0..=6u32 {
                assert!(rs_lambda_pk(&s, k) >= 0.0);
            }
        }
    }
}
