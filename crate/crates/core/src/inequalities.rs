//! Executable form of the coefficient inequalities: the exp-series
//! majorant lemma, the local dominations between standard and
//! Rankin–Selberg coefficients, nonnegativity of the auxiliary isobaric
//! representation's coefficients, and the second-moment growth tripwires.
//!
//! These are all theorems; any violation beyond float slack is an
//! implementation bug and gets dumped as a machine-readable
//! counterexample.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::{
    build_sieve, dirichlet_convolve, lambda_table, mu_table, CoefficientTable, Role,
};
use crate::error::{Error, Result};
use crate::localcoeffs::{a_pk, lambda_pk, mu_pk, rs_lambda_pk, ExemplarPi, SatakeSet};

/// Slack allowed on every inequality to absorb rounding. A violation at
/// -1e-6 or worse is treated as a hard failure.
pub const INEQ_SLACK: f64 = 1e-10;
pub const HARD_VIOLATION: f64 = 1e-6;

/// Truncated power series with coeffs[0] normalized to 1 after exp.
#[derive(Debug, Clone)]
pub struct FormalSeries {
    coeffs: Vec<Complex64>,
}

impl FormalSeries {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// exp of `Σ_{k>=1} b(k)/k x^k` via the recurrence
/// `m c(m) = Σ_{k=1}^{m} b(k) c(m-k)`, c(0) = 1.
pub fn exp_series(logcoeffs: &[Complex64]) -> Result<FormalSeries> {
    let k = logcoeffs.len();
    if k > 64 {
        return Err(Error::SizeLimit {
            what: "exp series order",
            limit: 64,
            got: k as u64,
        });
    }
    let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
    c[0] = Complex64::new(1.0, 0.0);
    for m in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=m {
            acc += logcoeffs[j - 1] * c[m - j];
        }
        c[m] = acc / m as f64;
    }
    Ok(FormalSeries { coeffs: c })
}

/// Inverse of `exp_series`: recovers b(1..K) from c(0..K).
pub fn log_series(series: &FormalSeries) -> Vec<Complex64> {
    let k = series.order();
    let c = series.coeffs();
    let mut b = vec![Complex64::new(0.0, 0.0); k];
    for m in 1..=k {
        let mut acc = c[m] * m as f64;
        for j in 1..m {
            acc -= b[j - 1] * c[m - j];
        }
        b[m - 1] = acc; // c[0] = 1
    }
    b
}

/// The majorant lemma: with c from b and C from |b|², every |c(m)|² <= C(m).
pub fn soundararajan_check(b: &[Complex64], k: usize) -> Result<bool> {
    let b = &b[..k.min(b.len())];
    let c = exp_series(b)?;
    let bsq: Vec<Complex64> = b
        .iter()
        .map(|z| Complex64::new(z.norm_sqr(), 0.0))
        .collect();
    let cap = exp_series(&bsq)?;
    Ok(c.coeffs()
        .iter()
        .zip(cap.coeffs())
        .all(|(cm, cap_m)| cm.norm_sqr() <= cap_m.re * (1.0 + INEQ_SLACK) + INEQ_SLACK))
}

/// One verified local inequality instance.
#[derive(Debug, Clone, Serialize)]
pub struct DominationCheck {
    pub inequality_id: &'static str,
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Counterexample dump: everything needed to replay a failure.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub satake: Vec<[f64; 2]>,
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub inequality_id: String,
}

impl Violation {
    pub fn from_check(seed: u64, s: &SatakeSet, c: &DominationCheck) -> Violation {
        Violation {
            seed,
            satake: s.params().values().iter().map(|z| [z.re, z.im]).collect(),
            k: c.k,
            lhs: c.lhs,
            rhs: c.rhs,
            inequality_id: c.inequality_id.to_string(),
        }
    }
}

/// Local coefficient sequences of one Satake set, shared by the checks.
pub struct LocalSequences {
    pub n: usize,
    pub lam: Vec<Complex64>,
    pub mu: Vec<Complex64>,
    pub a: Vec<Complex64>,
    pub rs_lambda: Vec<f64>,
    pub rs_a: Vec<f64>,
}

pub fn local_sequences(s: &SatakeSet, kmax: u32) -> LocalSequences {
    let lam = (0..=kmax).map(|k| lambda_pk(s, k)).collect();
    let mu = (0..=kmax).map(|k| mu_pk(s, k)).collect();
    let mut a = vec![Complex64::new(0.0, 0.0)];
    a.extend((1..=kmax).map(|k| a_pk(s, k)));
    let rs_lambda = (0..=kmax).map(|k| rs_lambda_pk(s, k)).collect();
    let mut rs_a = vec![0.0];
    rs_a.extend((1..=kmax).map(|k| crate::localcoeffs::rs_a_pk(s, k)));
    LocalSequences {
        n: s.rank(),
        lam,
        mu,
        a,
        rs_lambda,
        rs_a,
    }
}

/// j-fold Dirichlet self-convolution of a local sequence, truncated.
fn self_convolve(seq: &[f64], folds: usize) -> Vec<f64> {
    let k = seq.len();
    let mut acc = vec![0.0; k];
    acc[0] = 1.0;
    for _ in 0..folds {
        let mut next = vec![0.0; k];
        for i in 0..k {
            if acc[i] == 0.0 {
                continue;
            }
            for j in 0..k - i {
                next[i + j] += acc[i] * seq[j];
            }
        }
        acc = next;
    }
    acc
}

/// Runs the four local dominations on precomputed sequences. Relative
/// slack `INEQ_SLACK` on every comparison.
pub fn check_dominations_on(seqs: &LocalSequences, kmax: u32) -> Vec<DominationCheck> {
    let n = seqs.n;
    let mut out = Vec::new();
    let pass = |lhs: f64, rhs: f64| lhs <= rhs * (1.0 + INEQ_SLACK) + INEQ_SLACK;

    // (n+1)-fold convolution of the Rankin-Selberg coefficients.
    let rs_conv = self_convolve(&seqs.rs_lambda, n + 1);

    for k in 0..=kmax {
        let ki = k as usize;
        // |a(p^k)|^2 equals the local Rankin-Selberg log coefficient.
        if k >= 1 {
            let lhs = seqs.a[ki].norm_sqr();
            let rhs = seqs.rs_a[ki];
            out.push(DominationCheck {
                inequality_id: "log-deriv-square",
                k,
                lhs,
                rhs,
                pass: (lhs - rhs).abs() <= INEQ_SLACK * (1.0 + rhs.abs()),
            });
        }
        // |lambda(p^k)|^2 <= rs_lambda(p^k)
        let lhs = seqs.lam[ki].norm_sqr();
        let rhs = seqs.rs_lambda[ki];
        out.push(DominationCheck {
            inequality_id: "lambda-square-le-rs",
            k,
            lhs,
            rhs,
            pass: pass(lhs, rhs),
        });
        // b(p^k)^2 <= 4(n+1) rs_lambda(p^k), b = |lambda| * |mu| locally
        let b: f64 = (0..=ki.min(n))
            .map(|l| seqs.mu[l].norm() * seqs.lam[ki - l].norm())
            .sum();
        let lhs = b * b;
        let rhs = 4.0 * (n as f64 + 1.0) * seqs.rs_lambda[ki];
        out.push(DominationCheck {
            inequality_id: "abs-conv-square-le-rs",
            k,
            lhs,
            rhs,
            pass: pass(lhs, rhs),
        });
        // |mu(p^k)|^2 <= rs_lambda(p^k)
        let lhs = seqs.mu[ki].norm_sqr();
        let rhs = seqs.rs_lambda[ki];
        out.push(DominationCheck {
            inequality_id: "mu-square-le-rs",
            k,
            lhs,
            rhs,
            pass: pass(lhs, rhs),
        });
        // (k+1)|mu(p^k)|^2 <= (n+1)-fold rs convolution at p^k
        let lhs = (k as f64 + 1.0) * seqs.mu[ki].norm_sqr();
        let rhs = rs_conv[ki];
        out.push(DominationCheck {
            inequality_id: "divisor-mu-square-le-rs-conv",
            k,
            lhs,
            rhs,
            pass: pass(lhs, rhs),
        });
    }
    out
}

/// All local dominations for one Satake set, k <= kmax (kmax <= 12).
pub fn check_coefficient_dominations(s: &SatakeSet, kmax: u32) -> Result<Vec<DominationCheck>> {
    if kmax > 12 {
        return Err(Error::SizeLimit {
            what: "domination check depth",
            limit: 12,
            got: kmax as u64,
        });
    }
    Ok(check_dominations_on(&local_sequences(s, kmax), kmax))
}

/// Local nonnegativity for the isobaric 1 ⊞ π construction twisted by two
/// quadratic characters: exponentiates
/// `b(k) = |1 + a(p^k)|² (1 + χ(p)^k)(1 + χ'(p)^k)` and requires every
/// series coefficient to be >= -slack.
pub fn pistar_nonneg_check(
    s: &SatakeSet,
    chi_p: i8,
    chiprime_p: i8,
    kmax: u32,
) -> Result<bool> {
    if kmax > 32 {
        return Err(Error::SizeLimit {
            what: "nonnegativity check depth",
            limit: 32,
            got: kmax as u64,
        });
    }
    assert!(matches!(chi_p, -1 | 0 | 1) && matches!(chiprime_p, -1 | 0 | 1));
    let b: Vec<Complex64> = (1..=kmax)
        .map(|k| {
            let one_plus_a = Complex64::new(1.0, 0.0) + a_pk(s, k);
            let chi_k = (chi_p as f64).powi(k as i32);
            let chiprime_k = (chiprime_p as f64).powi(k as i32);
            Complex64::new(
                one_plus_a.norm_sqr() * (1.0 + chi_k) * (1.0 + chiprime_k),
                0.0,
            )
        })
        .collect();
    let c = exp_series(&b)?;
    Ok(c.coeffs().iter().all(|z| z.re >= -INEQ_SLACK))
}

/// One row of the growth-tripwire report.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub x: f64,
    pub ratio_b_square: f64,
    pub ratio_mu_square: f64,
    pub ratio_divisor_mu_square: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub pi: String,
    pub tripwire: f64,
    pub rows: Vec<GrowthRow>,
}

/// Tripwire bound. Deliberately loose; the paper's implied constants are
/// ineffective, so this is a regression bound, not an estimate.
pub const GROWTH_TRIPWIRE: f64 = 50.0;

/// Normalized second-moment ratios of b², |μ|², d·|μ|² at each x.
pub fn growth_estimates_report(pi: &ExemplarPi, xs: &[f64]) -> Result<GrowthReport> {
    let max_x = xs.iter().cloned().fold(0.0f64, f64::max);
    let n_table = max_x as usize;
    let sieve = build_sieve(n_table)?;
    let n = pi.rank() as f64;
    let lam = lambda_table(pi, n_table, &sieve)?;
    let mu = mu_table(pi, n_table, &sieve)?;
    let abs_of = |t: &CoefficientTable| {
        CoefficientTable::from_values(
            Role::BFpi,
            t.values().iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
        )
    };
    let b = dirichlet_convolve(&abs_of(&lam), &abs_of(&mu))?;
    let d = sieve.divisor_counts();

    let mut rows = Vec::new();
    for &x in xs {
        let m = x as usize;
        let lx = x.ln();
        let mut b2 = 0.0;
        let mut mu2 = 0.0;
        let mut dmu2 = 0.0;
        for i in 1..=m {
            let bi = b.val(i).re;
            b2 += bi * bi;
            let mi = mu.val(i).norm_sqr();
            mu2 += mi;
            dmu2 += d[i] as f64 * mi;
        }
        let r1 = b2 / (x * lx.powf(4.0 * n + 3.0));
        let r2 = mu2 / x;
        let r3 = dmu2 / (x * lx.powf(n));
        rows.push(GrowthRow {
            x,
            ratio_b_square: r1,
            ratio_mu_square: r2,
            ratio_divisor_mu_square: r3,
            flagged: r1 > GROWTH_TRIPWIRE || r2 > GROWTH_TRIPWIRE || r3 > GROWTH_TRIPWIRE,
        });
    }
    Ok(GrowthReport {
        pi: pi.name().as_str().to_string(),
        tripwire: GROWTH_TRIPWIRE,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localcoeffs::{random_unit_satake, ExemplarName};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_series_conventions() {
        let zero = vec![c(0.0, 0.0); 6];
        let s = exp_series(&zero).unwrap();
        assert_eq!(s.coeffs()[0], c(1.0, 0.0));
        assert!(s.coeffs()[1..].iter().all(|z| z.norm() == 0.0));

        // b(k) = 1 for all k gives the geometric series: c(m) = 1.
        let ones = vec![c(1.0, 0.0); 10];
        let s = exp_series(&ones).unwrap();
        for z in s.coeffs() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-12);
        }

        // b(1) = beta only: c(m) = beta^m / m!.
        let beta = c(0.4, -0.3);
        let mut b = vec![c(0.0, 0.0); 8];
        b[0] = beta;
        let s = exp_series(&b).unwrap();
        let mut fact = 1.0;
        for m in 0..=8usize {
            if m > 0 {
                fact *= m as f64;
            }
            assert!((s.coeffs()[m] - beta.powu(m as u32) / fact).norm() < 1e-12);
        }
    }

    #[test]
    fn exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let b: Vec<Complex64> = (0..32)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let s = exp_series(&b).unwrap();
            let back = log_series(&s);
            for (orig, rec) in b.iter().zip(&back) {
                assert!((orig - rec).norm() < 1e-9 * (1.0 + orig.norm()));
            }
        }
    }

    #[test]
    fn soundararajan_trivial_and_random() {
        assert!(soundararajan_check(&[c(0.0, 0.0); 4], 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..2000 {
            let b: Vec<Complex64> = (0..20)
                .map(|_| {
                    let r = rng.gen_range(0.0..5.0);
                    let th = rng.gen_range(0.0..std::f64::consts::TAU);
                    Complex64::from_polar(r, th)
                })
                .collect();
            assert!(soundararajan_check(&b, 20).unwrap());
        }
    }

    #[test]
    fn soundararajan_reproduces_mu_domination() {
        // With b(k) = -a(p^k), the c(m) are mu(p^m) and the C(m) are the
        // Rankin-Selberg coefficients.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4usize);
            let s = random_unit_satake(&mut rng, n);
            let b: Vec<Complex64> = (1..=8).map(|k| -a_pk(&s, k)).collect();
            let cs = exp_series(&b).unwrap();
            for (m, cm) in cs.coeffs().iter().enumerate() {
                assert!((cm - mu_pk(&s, m as u32)).norm() < 1e-9);
                assert!(cm.norm_sqr() <= rs_lambda_pk(&s, m as u32) * (1.0 + 1e-9) + 1e-12);
            }
        }
    }

    #[test]
    fn dominations_zeta_trivial() {
        let zeta = ExemplarPi::zeta();
        let s = zeta.satake_at(13).unwrap();
        for chk in check_coefficient_dominations(&s, 8).unwrap() {
            assert!(chk.pass, "{chk:?}");
            if chk.inequality_id == "lambda-square-le-rs" {
                assert!((chk.rhs - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dominations_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..300 {
            let n = rng.gen_range(1..=4usize);
            let s = random_unit_satake(&mut rng, n);
            for chk in check_coefficient_dominations(&s, 8).unwrap() {
                assert!(chk.pass, "{chk:?} on {:?}", s.params().values());
            }
        }
    }

    #[test]
    fn dominations_delta_at_two() {
        let tau = Arc::new(crate::localcoeffs::compute_tau_table(100).unwrap());
        let delta = ExemplarPi::from_tau(ExemplarName::Delta, tau);
        let s = delta.satake_at(2).unwrap();
        let lam2 = lambda_pk(&s, 1).norm_sqr();
        assert!(lam2 <= rs_lambda_pk(&s, 1) + 1e-12);
        for chk in check_coefficient_dominations(&s, 12).unwrap() {
            assert!(chk.pass, "{chk:?}");
        }
    }

    #[test]
    fn mutation_is_caught() {
        // A sign error planted in mu must surface as an
        // abs-conv-square-le-rs violation through the raw-sequence entry.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let s = random_unit_satake(&mut rng, 3);
        let mut seqs = local_sequences(&s, 8);
        // Corrupt: replace mu(p) with something off the lawful manifold.
        seqs.mu[1] *= 4.0;
        let checks = check_dominations_on(&seqs, 8);
        let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        assert!(!failed.is_empty(), "corruption went unnoticed");
        assert!(failed
            .iter()
            .any(|c| c.inequality_id == "mu-square-le-rs"
                || c.inequality_id == "abs-conv-square-le-rs"));
        let v = Violation::from_check(61, &s, failed[0]);
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("inequality_id") && json.contains("satake"));
    }

    #[test]
    fn pistar_nonneg() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..300 {
            let n = rng.gen_range(1..=4usize);
            let s = random_unit_satake(&mut rng, n);
            for chi in [-1i8, 0, 1] {
                for chip in [-1i8, 0, 1] {
                    assert!(
                        pistar_nonneg_check(&s, chi, chip, 24).unwrap(),
                        "chi={chi} chi'={chip} on {:?}",
                        s.params().values()
                    );
                }
            }
        }
    }

    #[test]
    fn growth_report_schema_and_zeta_density() {
        let zeta = ExemplarPi::zeta();
        let rep = growth_estimates_report(&zeta, &[1e2, 1e5]).unwrap();
        assert_eq!(rep.rows.len(), 2);
        // For the trivial representation |mu|^2 is the squarefree
        // indicator; its density is 6/pi^2.
        let r = rep.rows[1].ratio_mu_square;
        assert!((r - 0.6079).abs() < 5e-3, "squarefree density {r}");
        assert!(!rep.rows[1].flagged);
    }
}
