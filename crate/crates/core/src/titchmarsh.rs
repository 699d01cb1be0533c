//! Shifted divisor sums Σ λ_π(p) d(p-1) (and the integer-indexed
//! variant), evaluated both directly and through divisor switching, with
//! Ramanujan sums verified against their exponential-sum definition.
//!
//! Divisor switching writes d(m) = 2 #{r | m : r² < m} + δ_□(m), turning
//! the shifted sum into progression sums over small moduli plus a square
//! term; the two routes agree exactly, and the report carries the split
//! of the switched form at the threshold √x / (log x)^B.

use serde::Serialize;

use crate::dirichlet::FactorSieve;
use crate::error::{Error, Result};
use crate::util::fmt_f64;

/// Which index set the shifted sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumKind {
    Primes,
    Integers,
}

/// One decomposition at one x.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftedSumReport {
    pub x: f64,
    pub kind: SumKind,
    pub direct: f64,
    pub switched: f64,
    pub t1: f64,
    pub t2: f64,
    pub square_term: f64,
    pub normalized: f64,
}

impl ShiftedSumReport {
    pub fn relative_gap(&self) -> f64 {
        (self.direct - self.switched).abs() / (1.0 + self.direct.abs())
    }
}

/// Inputs: λ_π values (real, index 1..=N) and the factor sieve that
/// locates primes and divisor counts.
pub struct ShiftedSumData<'a> {
    pub lambda: &'a [f64],
    pub sieve: &'a FactorSieve,
    pub divisor: &'a [u32],
}

fn is_square(m: usize) -> bool {
    if m == 0 {
        return false;
    }
    let r = (m as f64).sqrt().round() as usize;
    r * r == m || (r + 1) * (r + 1) == m || (r.saturating_sub(1)) * (r.saturating_sub(1)) == m
}

/// Direct evaluation of Σ λ_π(m) d(m-1) with d(0) := 0 (the m = 1 term
/// drops; for the prime sum m = 1 never arises).
pub fn shifted_sum_direct(data: &ShiftedSumData, x: f64, kind: SumKind) -> Result<f64> {
    let xi = x as usize;
    if xi >= data.lambda.len() || xi > data.sieve.len() {
        return Err(Error::range(format!("x = {x} beyond table reach")));
    }
    let mut acc = 0.0;
    for m in 2..=xi {
        if kind == SumKind::Primes && !data.sieve.is_prime(m) {
            continue;
        }
        acc += data.lambda[m] * data.divisor[m - 1] as f64;
    }
    Ok(acc)
}

/// The switched form: 2 Σ_{r} Σ_{m≡1 (r), m-1 > r²} λ_π(m) + square term,
/// with the T1/T2 split of the double sum at r = √x/(log x)^B.
pub fn divisor_switch_decompose(
    data: &ShiftedSumData,
    x: f64,
    kind: SumKind,
    b_log_power: f64,
) -> Result<ShiftedSumReport> {
    let xi = x as usize;
    if xi >= data.lambda.len() || xi > data.sieve.len() {
        return Err(Error::range(format!("x = {x} beyond table reach")));
    }
    let direct = shifted_sum_direct(data, x, kind)?;
    let threshold = x.sqrt() / x.ln().powf(b_log_power);

    let keep = |m: usize| kind == SumKind::Integers || data.sieve.is_prime(m);

    let mut t1 = 0.0;
    let mut t2 = 0.0;
    let mut r = 1usize;
    // r < sqrt(x-1), i.e. r^2 < x-1; each inner sum needs m - 1 > r^2.
    while ((r * r) as f64) < x - 1.0 {
        let mut inner = 0.0;
        let mut m = r * r + r + 1; // first m ≡ 1 (mod r) with m - 1 > r²
        debug_assert!(m % r == 1 % r);
        while m <= xi {
            if keep(m) {
                inner += data.lambda[m];
            }
            m += r;
        }
        if (r as f64) <= threshold {
            t1 += 2.0 * inner;
        } else {
            t2 += 2.0 * inner;
        }
        r += 1;
    }

    let mut square_term = 0.0;
    for m in 2..=xi {
        if keep(m) && is_square(m - 1) {
            square_term += data.lambda[m];
        }
    }

    let switched = t1 + t2 + square_term;
    let llx = x.ln().ln();
    let normalized = match kind {
        SumKind::Primes => direct / (x * llx.powf(1.5) / x.ln().sqrt()),
        SumKind::Integers => direct / (x * llx.powf(1.5)),
    };
    Ok(ShiftedSumReport {
        x,
        kind,
        direct,
        switched,
        t1,
        t2,
        square_term,
        normalized,
    })
}

/// Ramanujan sum c_q(n) = Σ_{d | (n, q)} d μ(q/d), exact.
pub fn ramanujan_sum(q: u64, n: i64) -> Result<i64> {
    if q == 0 {
        return Err(Error::contract("modulus must be positive"));
    }
    let n = n.unsigned_abs(); // c_q is even in n
    let g = crate::util::gcd(n % q, q); // gcd(0, q) = q covers q | n
    let mut acc: i64 = 0;
    let mut d = 1u64;
    while d * d <= g {
        if g % d == 0 {
            acc += d as i64 * mobius_u64(q / d);
            let e = g / d;
            if e != d {
                acc += e as i64 * mobius_u64(q / e);
            }
        }
        d += 1;
    }
    Ok(acc)
}

fn mobius_u64(mut n: u64) -> i64 {
    let mut sign = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Exponential-sum oracle: Σ_{a mod q, (a,q)=1} e(n a / q), rounded.
pub fn ramanujan_sum_exponential(q: u64, n: i64) -> i64 {
    use std::f64::consts::TAU;
    let mut acc = 0.0;
    for a in 1..=q {
        if crate::util::gcd(a % q, q) == 1 || q == 1 {
            acc += (TAU * (n as f64) * (a as f64) / q as f64).cos();
        }
    }
    acc.round() as i64
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedCurve {
    pub pi: String,
    pub kind: SumKind,
    pub rows: Vec<ShiftedSumReport>,
    /// set when the normalized value grows by more than 20% step-over-step
    pub flagged_growth: bool,
}

impl NormalizedCurve {
    /// CSV schema: `x,direct,switched,T1,T2,square_term,normalized`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,direct,switched,T1,T2,square_term,normalized\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_f64(r.x),
                fmt_f64(r.direct),
                fmt_f64(r.switched),
                fmt_f64(r.t1),
                fmt_f64(r.t2),
                fmt_f64(r.square_term),
                fmt_f64(r.normalized)
            ));
        }
        out
    }
}

/// Decompositions over a ladder of x values, flagging any step where the
/// normalized sum grows by more than 20%.
pub fn normalized_curve(
    pi_name: &str,
    data: &ShiftedSumData,
    xs: &[f64],
    kind: SumKind,
    b_log_power: f64,
) -> Result<NormalizedCurve> {
    let mut rows = Vec::new();
    for &x in xs {
        rows.push(divisor_switch_decompose(data, x, kind, b_log_power)?);
    }
    let flagged = rows
        .windows(2)
        .any(|w| w[1].normalized.abs() > 1.2 * w[0].normalized.abs());
    Ok(NormalizedCurve {
        pi: pi_name.to_string(),
        kind,
        rows,
        flagged_growth: flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::build_sieve;
    use crate::localcoeffs::{compute_tau_table, ExemplarName, ExemplarPi};
    use std::sync::Arc;

    fn zeta_data(n: usize) -> (Vec<f64>, FactorSieve, Vec<u32>) {
        let sieve = build_sieve(n).unwrap();
        let d = sieve.divisor_counts();
        (vec![1.0; n + 1], sieve, d)
    }

    #[test]
    fn direct_integer_hand_sum() {
        // zeta exemplar, integers, x = 10: sum of d(m-1) for m = 2..10.
        let (lambda, sieve, divisor) = zeta_data(64);
        let data = ShiftedSumData {
            lambda: &lambda,
            sieve: &sieve,
            divisor: &divisor,
        };
        let got = shifted_sum_direct(&data, 10.0, SumKind::Integers).unwrap();
        assert_eq!(got, 23.0);
        // x < 3, primes: single term lambda(2) d(1) = 1.
        let single = shifted_sum_direct(&data, 2.9, SumKind::Primes).unwrap();
        assert_eq!(single, 1.0);
    }

    #[test]
    fn switch_identity_small() {
        let (lambda, sieve, divisor) = zeta_data(4096);
        let data = ShiftedSumData {
            lambda: &lambda,
            sieve: &sieve,
            divisor: &divisor,
        };
        for kind in [SumKind::Primes, SumKind::Integers] {
            for &x in &[10.0, 100.0, 1000.0, 4000.0] {
                let rep = divisor_switch_decompose(&data, x, kind, 1.0).unwrap();
                assert!(
                    rep.relative_gap() < 1e-12,
                    "x = {x}, {kind:?}: direct {} vs switched {}",
                    rep.direct,
                    rep.switched
                );
            }
        }
    }

    #[test]
    fn square_term_is_square_shifts_only() {
        // For the all-ones table over primes, the square term counts
        // primes with p - 1 a perfect square: 2, 5, 17, 37, 101, ...
        let (lambda, sieve, divisor) = zeta_data(256);
        let data = ShiftedSumData {
            lambda: &lambda,
            sieve: &sieve,
            divisor: &divisor,
        };
        let rep = divisor_switch_decompose(&data, 200.0, SumKind::Primes, 1.0).unwrap();
        // p <= 200 with p-1 square: 2, 5, 17, 37, 101, 197
        assert_eq!(rep.square_term, 6.0);
    }

    #[test]
    fn switch_identity_delta() {
        let tau = Arc::new(compute_tau_table(100_000).unwrap());
        let pi = ExemplarPi::from_tau(ExemplarName::Delta, tau);
        let sieve = build_sieve(100_000).unwrap();
        let lambda = crate::dirichlet::lambda_table(&pi, 100_000, &sieve)
            .unwrap()
            .to_real(1e-9)
            .unwrap();
        let divisor = sieve.divisor_counts();
        let data = ShiftedSumData {
            lambda: &lambda,
            sieve: &sieve,
            divisor: &divisor,
        };
        let rep = divisor_switch_decompose(&data, 1e5, SumKind::Primes, 1.0).unwrap();
        assert!(
            (rep.direct - rep.switched).abs() <= 1e-9 * rep.direct.abs().max(1.0),
            "direct {} switched {}",
            rep.direct,
            rep.switched
        );
    }

    #[test]
    fn ramanujan_sum_basics() {
        // c_q(0) = phi(q)
        let sieve = build_sieve(200).unwrap();
        let phi = sieve.euler_phi();
        for q in 1..=100u64 {
            assert_eq!(ramanujan_sum(q, 0).unwrap(), phi[q as usize] as i64, "q={q}");
        }
        // c_q(1) = mu(q)
        let mu = sieve.mobius();
        for q in 1..=100u64 {
            assert_eq!(ramanujan_sum(q, 1).unwrap(), mu[q as usize] as i64, "q={q}");
        }
        // c_6(3) = 1*mu(6) + 3*mu(2) = 1 - 3 = -2
        assert_eq!(ramanujan_sum(6, 3).unwrap(), -2);
    }

    #[test]
    fn ramanujan_matches_exponential_sum() {
        for q in 1..=100u64 {
            for n in -100i64..=100 {
                assert_eq!(
                    ramanujan_sum(q, n).unwrap(),
                    ramanujan_sum_exponential(q, n),
                    "q = {q}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn divisor_switch_count_identity() {
        // 2 #{r | m : r² < m} + δ_□(m) = d(m), exact integers.
        let sieve = build_sieve(20_000).unwrap();
        let d = sieve.divisor_counts();
        let mut small = vec![0u32; 20_001];
        for r in 1..=141usize {
            let mut m = r * r + r;
            while m <= 20_000 {
                small[m] += 1;
                m += r;
            }
        }
        for m in 1..=20_000usize {
            let delta = u32::from(is_square(m));
            assert_eq!(2 * small[m] + delta, d[m], "m = {m}");
        }
    }

    #[test]
    fn curve_schema_and_flag() {
        let (lambda, sieve, divisor) = zeta_data(20_000);
        let data = ShiftedSumData {
            lambda: &lambda,
            sieve: &sieve,
            divisor: &divisor,
        };
        let curve =
            normalized_curve("zeta", &data, &[1e3, 1e4], SumKind::Integers, 1.0).unwrap();
        assert!(curve.to_csv().starts_with("x,direct,switched,T1,T2,square_term,normalized\n"));
        assert_eq!(curve.rows.len(), 2);
        // Single point can never flag.
        let single =
            normalized_curve("zeta", &data, &[1e3], SumKind::Integers, 1.0).unwrap();
        assert!(!single.flagged_growth);
    }
}
