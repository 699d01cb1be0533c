//! The generalized Vaughan identity and its S1..S4 decomposition of the
//! progression sum of Λ(n) a_π(n), together with the truncated
//! convolution coefficients the Type I/II analysis regroups into.
//!
//! The decomposition is pure algebra on truncated Dirichlet series, so
//! S1 + S2 - S3 + S4 must reproduce the direct progression sum exactly
//! (up to rounding); every run asserts that identity.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::{
    build_sieve, lambda_table, mu_table, von_mangoldt_a, CoefficientTable, FactorSieve, Role,
};
use crate::error::{Error, Result};
use crate::localcoeffs::{a_pk, lambda_pk, mu_pk, ExemplarPi};
use crate::util::{gcd, mod_inverse};

/// Truncation and progression parameters. The identity is applied with
/// X = Y < y; noninteger cutoffs avoid boundary ambiguity.
#[derive(Debug, Clone, Serialize)]
pub struct VaughanParams {
    pub x_cut: f64,
    pub y_cut: f64,
    pub y: f64,
    pub q: u64,
    pub a: u64,
}

impl VaughanParams {
    pub fn new(x_cut: f64, y_cut: f64, y: f64, q: u64, a: u64) -> Result<VaughanParams> {
        if !(x_cut > 1.0 && y_cut > 1.0 && y > 1.0) {
            return Err(Error::contract("cutoffs must exceed 1"));
        }
        if x_cut != y_cut {
            return Err(Error::contract("the decomposition assumes X = Y"));
        }
        if x_cut > y {
            return Err(Error::contract("cutoff X must not exceed y"));
        }
        if q == 0 || gcd(a % q.max(1), q) != 1 {
            return Err(Error::contract(format!("need gcd(a, q) = 1, got a={a}, q={q}")));
        }
        Ok(VaughanParams {
            x_cut,
            y_cut,
            y,
            q,
            a: a % q,
        })
    }
}

/// The four partial sums and the direct sum they must reassemble.
#[derive(Debug, Clone, Serialize)]
pub struct VaughanDecomposition {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub direct: f64,
}

impl VaughanDecomposition {
    pub fn recombined(&self) -> f64 {
        self.s1 + self.s2 - self.s3 + self.s4
    }

    /// |S1+S2-S3+S4 - direct| / (1 + |direct|)
    pub fn residual(&self) -> f64 {
        (self.recombined() - self.direct).abs() / (1.0 + self.direct.abs())
    }
}

/// JSON report for one decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub q: u64,
    pub a: u64,
    pub y: f64,
    pub x_cut: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub direct: f64,
    pub residual: f64,
}

impl DecompositionReport {
    pub fn new(params: &VaughanParams, d: &VaughanDecomposition) -> Self {
        DecompositionReport {
            q: params.q,
            a: params.a,
            y: params.y,
            x_cut: params.x_cut,
            s1: d.s1,
            s2: d.s2,
            s3: d.s3,
            s4: d.s4,
            direct: d.direct,
            residual: d.residual(),
        }
    }
}

/// The coefficient tables a decomposition reads. Real-valued because the
/// exemplars are self-dual.
pub struct VaughanTables {
    pub lambda: Vec<f64>,
    pub lambda_log: Vec<f64>,
    pub mu: Vec<f64>,
    pub von_mangoldt: Vec<f64>,
}

impl VaughanTables {
    pub fn build(pi: &ExemplarPi, n: usize, sieve: &FactorSieve) -> Result<VaughanTables> {
        let to_real = |t: CoefficientTable| -> Result<Vec<f64>> {
            t.to_real(1e-9)
                .ok_or_else(|| Error::numeric("exemplar table has a nonreal entry"))
        };
        let lambda = to_real(lambda_table(pi, n, sieve)?)?;
        let mu = to_real(mu_table(pi, n, sieve)?)?;
        let von_mangoldt = to_real(von_mangoldt_a(pi, n, sieve)?)?;
        let mut lambda_log = lambda.clone();
        for (m, v) in lambda_log.iter_mut().enumerate().skip(1) {
            *v *= (m as f64).ln();
        }
        Ok(VaughanTables {
            lambda,
            lambda_log,
            mu,
            von_mangoldt,
        })
    }

    pub fn len(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Σ_{lo < m <= hi, m ≡ r (mod q)} t[m], strict lower bound.
fn progression_sum_real(t: &[f64], lo: f64, hi: f64, q: u64, r: u64) -> f64 {
    let q = q as usize;
    let r = r as usize;
    let mut m = if r == 0 { q } else { r };
    if (m as f64) <= lo {
        let k = ((lo - m as f64) / q as f64).floor() as usize + 1;
        m += k * q;
        while (m as f64) <= lo {
            m += q;
        }
    }
    let hi_idx = hi.min((t.len() - 1) as f64);
    let mut acc = 0.0;
    while (m as f64) <= hi_idx {
        acc += t[m];
        m += q;
    }
    acc
}

/// α(m) = Σ_{bc=m, b<=X, c<=X} μ_π(b) Λ(c) a_π(c), on 1..=len.
fn alpha_from_tables(mu: &[f64], vm: &[f64], x_cut: f64, len: usize) -> Vec<f64> {
    let mut alpha = vec![0.0; len + 1];
    let bmax = x_cut.floor() as usize;
    for b in 1..=bmax.min(len) {
        let mub = mu[b];
        if mub == 0.0 {
            continue;
        }
        let cmax = (x_cut.floor() as usize).min(len / b);
        for c in 1..=cmax {
            let v = vm[c];
            if v != 0.0 {
                alpha[b * c] += mub * v;
            }
        }
    }
    alpha
}

/// β(m) = Σ_{bd=m, b>X} μ_π(b) λ_π(d), on 1..=len.
fn beta_from_tables(mu: &[f64], lam: &[f64], x_cut: f64, len: usize) -> Vec<f64> {
    let mut beta = vec![0.0; len + 1];
    let bstart = x_cut.floor() as usize + 1;
    for b in bstart..=len {
        if (b as f64) <= x_cut {
            continue;
        }
        let mub = mu[b];
        if mub == 0.0 {
            continue;
        }
        for d in 1..=len / b {
            beta[b * d] += mub * lam[d];
        }
    }
    beta
}

/// Evaluates S1..S4 for the progression a mod q up to y, with cutoff
/// X = Y, against the direct sum of Λ(n) a_π(n).
pub fn decompose(params: &VaughanParams, tables: &VaughanTables) -> Result<VaughanDecomposition> {
    let y = params.y;
    let x_cut = params.x_cut;
    if tables.len() < y.ceil() as usize {
        return Err(Error::contract(format!(
            "tables cover 1..{} but y = {y}",
            tables.len()
        )));
    }
    let q = params.q;
    let a = params.a;

    let direct = progression_sum_real(&tables.von_mangoldt, 0.0, y, q, a);
    let s1 = progression_sum_real(&tables.von_mangoldt, 0.0, x_cut, q, a);

    // S2 = sum over b <= X of mu(b) times a lambda*log progression sum.
    let mut s2 = 0.0;
    for b in 1..=(x_cut.floor() as usize) {
        let mub = tables.mu[b];
        if mub == 0.0 || gcd(b as u64 % q, q) != 1 {
            continue;
        }
        let r = a * mod_inverse(b as u64 % q, q).expect("unit") % q.max(1);
        s2 += mub * progression_sum_real(&tables.lambda_log, 0.0, y / b as f64, q, r % q.max(1));
    }

    // S3 = sum over m <= X^2 of alpha(m) times a lambda progression sum.
    let alpha_len = (x_cut * x_cut).floor().min(y) as usize;
    let alpha = alpha_from_tables(&tables.mu, &tables.von_mangoldt, x_cut, alpha_len);
    let mut s3 = 0.0;
    for (m, &am) in alpha.iter().enumerate().skip(1) {
        if am == 0.0 || gcd(m as u64 % q, q) != 1 {
            continue;
        }
        let r = a * mod_inverse(m as u64 % q, q).expect("unit") % q.max(1);
        s3 += am * progression_sum_real(&tables.lambda, 0.0, y / m as f64, q, r % q.max(1));
    }

    // S4 = sum over X < m < y/X of beta(m) times a von-Mangoldt
    // progression sum over (X, y/m].
    let mut s4 = 0.0;
    let beta_hi = y / x_cut;
    let beta_len = beta_hi.ceil().min(y) as usize;
    let beta = beta_from_tables(&tables.mu, &tables.lambda, x_cut, beta_len);
    for (m, &bm) in beta.iter().enumerate().skip(1) {
        let mf = m as f64;
        if bm == 0.0 || mf <= x_cut || mf >= beta_hi {
            continue;
        }
        if gcd(m as u64 % q, q) != 1 {
            continue;
        }
        let r = a * mod_inverse(m as u64 % q, q).expect("unit") % q.max(1);
        s4 += bm * progression_sum_real(&tables.von_mangoldt, x_cut, y / mf, q, r % q.max(1));
    }

    Ok(VaughanDecomposition {
        s1,
        s2,
        s3,
        s4,
        direct,
    })
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn divisors_of(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, k) in factor_u64(n) {
        let base = divs.clone();
        let mut pe = 1u64;
        for _ in 0..k {
            pe *= p;
            divs.extend(base.iter().map(|d| d * pe));
        }
    }
    divs.sort_unstable();
    divs
}

/// Exact local values for one integer, straight from the Satake data.
struct PointwisePi<'a> {
    pi: &'a ExemplarPi,
}

impl<'a> PointwisePi<'a> {
    fn lambda(&self, m: u64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, k) in factor_u64(m) {
            acc *= lambda_pk(&self.pi.satake_at(p)?, k);
        }
        Ok(acc)
    }

    fn mu(&self, m: u64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, k) in factor_u64(m) {
            acc *= mu_pk(&self.pi.satake_at(p)?, k);
        }
        Ok(acc)
    }

    /// Λ(m) a_π(m): nonzero only at prime powers.
    fn von_mangoldt(&self, m: u64) -> Result<Complex64> {
        let f = factor_u64(m);
        if f.len() != 1 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (p, k) = f[0];
        Ok(a_pk(&self.pi.satake_at(p)?, k) * (p as f64).ln())
    }
}

/// Checks the three-term identity behind the decomposition at a single
/// integer n0 > Y by exhaustive factorization enumeration:
/// `Λ(n0) a(n0) = Σ_{n0=ab, b<=X} μ(b) λ(a) log a
///               - Σ_{n0=abc, b<=X, c<=Y} λ(a) μ(b) Λ(c) a(c)
///               + Σ_{n0=abc, b>X, c>Y} λ(a) μ(b) Λ(c) a(c)`.
pub fn vaughan_identity_check(
    pi: &ExemplarPi,
    n0: u64,
    x_cut: f64,
    y_cut: f64,
    tol: f64,
) -> Result<bool> {
    if (n0 as f64) <= y_cut {
        return Err(Error::contract(format!(
            "the identity assumes n0 > Y, got n0 = {n0}, Y = {y_cut}"
        )));
    }
    let pw = PointwisePi { pi };
    let divs = divisors_of(n0);

    let mut t1 = Complex64::new(0.0, 0.0);
    for &b in &divs {
        if (b as f64) <= x_cut {
            let a = n0 / b;
            t1 += pw.mu(b)? * pw.lambda(a)? * (a as f64).ln();
        }
    }

    let mut t2 = Complex64::new(0.0, 0.0);
    let mut t3 = Complex64::new(0.0, 0.0);
    for &b in &divs {
        let rest = n0 / b;
        let mub = pw.mu(b)?;
        if mub.norm() == 0.0 {
            continue;
        }
        for &c in &divisors_of(rest) {
            let vc = pw.von_mangoldt(c)?;
            if vc.norm() == 0.0 {
                continue;
            }
            let a = rest / c;
            let term = pw.lambda(a)? * mub * vc;
            if (b as f64) <= x_cut && (c as f64) <= y_cut {
                t2 += term;
            } else if (b as f64) > x_cut && (c as f64) > y_cut {
                t3 += term;
            }
        }
    }

    let lhs = pw.von_mangoldt(n0)?;
    let rhs = t1 - t2 + t3;
    Ok((lhs - rhs).norm() <= tol * (1.0 + lhs.norm()))
}

/// α_{F,π} as a table on 1..=n: truncated convolution of μ_π (support
/// <= X) with Λ a_π (support <= X); vanishes above X².
pub fn alpha_coeff(
    pi: &ExemplarPi,
    x_cut: f64,
    n: usize,
    sieve: &FactorSieve,
) -> Result<CoefficientTable> {
    let t = VaughanTables::build(pi, n.max(2), sieve)?;
    let alpha = alpha_from_tables(&t.mu, &t.von_mangoldt, x_cut, n);
    let mut out = CoefficientTable::zeros(Role::AlphaFpi, n);
    for (m, &v) in alpha.iter().enumerate().skip(1) {
        out.values_mut()[m] = Complex64::new(v, 0.0);
    }
    Ok(out)
}

/// β_{F,π} as a table on 1..=n: Σ_{bd=m, b>X} μ_π(b) λ_π(d).
pub fn beta_coeff(
    pi: &ExemplarPi,
    x_cut: f64,
    n: usize,
    sieve: &FactorSieve,
) -> Result<CoefficientTable> {
    let t = VaughanTables::build(pi, n, sieve)?;
    let beta = beta_from_tables(&t.mu, &t.lambda, x_cut, n);
    let mut out = CoefficientTable::zeros(Role::BetaFpi, n);
    for (m, &v) in beta.iter().enumerate().skip(1) {
        out.values_mut()[m] = Complex64::new(v, 0.0);
    }
    Ok(out)
}

/// b_{F,π}(m) = Σ_{ab=m} |λ_π(a) μ_π(b)|; all entries nonnegative.
pub fn b_coeff(pi: &ExemplarPi, n: usize, sieve: &FactorSieve) -> Result<CoefficientTable> {
    let t = VaughanTables::build(pi, n, sieve)?;
    let mut out = CoefficientTable::zeros(Role::BFpi, n);
    for b in 1..=n {
        let mb = t.mu[b].abs();
        if mb == 0.0 {
            continue;
        }
        for d in 1..=n / b {
            out.values_mut()[b * d] += Complex64::new(mb * t.lambda[d].abs(), 0.0);
        }
    }
    Ok(out)
}

/// Second-moment ratios for Λa, α, β at one x (the growth shapes the
/// Type II analysis needs). X defaults to x^{1/3} + 1/2 to dodge integer
/// boundaries.
#[derive(Debug, Clone, Serialize)]
pub struct SecondMomentRow {
    pub x: f64,
    pub x_cut: f64,
    pub ratio_von_mangoldt: f64,
    pub ratio_alpha: f64,
    pub ratio_beta: f64,
}

pub fn second_moment_ratios(
    pi: &ExemplarPi,
    xs: &[f64],
    sieve: &FactorSieve,
) -> Result<Vec<SecondMomentRow>> {
    let n_max = xs.iter().cloned().fold(0.0f64, f64::max) as usize;
    let t = VaughanTables::build(pi, n_max, sieve)?;
    let deg = pi.rank() as f64;
    let mut rows = Vec::new();
    for &x in xs {
        let m = x as usize;
        let x_cut = x.powf(1.0 / 3.0) + 0.5;
        let alpha = alpha_from_tables(&t.mu, &t.von_mangoldt, x_cut, m);
        let beta = beta_from_tables(&t.mu, &t.lambda, x_cut, m);
        let mut vm2 = 0.0;
        let mut a2 = 0.0;
        let mut b2 = 0.0;
        for i in 1..=m {
            vm2 += t.von_mangoldt[i] * t.von_mangoldt[i];
            a2 += alpha[i] * alpha[i];
            b2 += beta[i] * beta[i];
        }
        let lx = x.ln();
        rows.push(SecondMomentRow {
            x,
            x_cut,
            ratio_von_mangoldt: vm2 / x,
            ratio_alpha: a2 / (x * lx.powf(deg + 2.0)),
            ratio_beta: b2 / (x * lx.powf(4.0 * deg + 3.0)),
        });
    }
    Ok(rows)
}

/// Convenience: sieve + tables + decomposition in one call (CLI path).
pub fn decompose_fresh(pi: &ExemplarPi, params: &VaughanParams) -> Result<VaughanDecomposition> {
    let n = params.y.ceil() as usize;
    let sieve = build_sieve(n.max(2))?;
    let tables = VaughanTables::build(pi, n.max(2), &sieve)?;
    decompose(params, &tables)
}
