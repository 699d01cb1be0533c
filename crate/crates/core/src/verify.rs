//! Named property suites behind the `verify` subcommand. Each check is a
//! randomized or exhaustive battery over one module's invariants; the
//! first failure is captured as a machine-readable counterexample.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::sync::Arc;

use crate::characters::{conductor_of, enumerate_characters, gauss_sum, kronecker, primitivize};
use crate::dirichlet::{build_sieve, dirichlet_convolve, lambda_table, mu_table, CoefficientTable, Role};
use crate::error::{Error, Result};
use crate::inequalities::{
    check_coefficient_dominations, exp_series, log_series, pistar_nonneg_check,
    soundararajan_check, Violation,
};
use crate::localcoeffs::{
    compute_tau_table, lambda_pk, mu_pk, random_stress_satake, random_unit_satake,
    rs_euler_coeffs, rs_lambda_pk, tau_direct_expansion, ExemplarName, ExemplarPi,
};
use crate::symfunc::{
    dual_pieri_check, elementary_all, enum_partitions, power_sum, schur,
    schur_alternant, ComplexMultiset,
};
use crate::util::{derive_seed, gcd};
use crate::vaughan::{decompose, VaughanParams, VaughanTables};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Symcore,
    Local,
    Vaughan,
    Inequalities,
    Characters,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "symcore" => Ok(Suite::Symcore),
            "local" => Ok(Suite::Local),
            "vaughan" => Ok(Suite::Vaughan),
            "inequalities" => Ok(Suite::Inequalities),
            "characters" => Ok(Suite::Characters),
            "all" => Ok(Suite::All),
            other => Err(Error::contract(format!(
                "unknown suite {other:?}; expected symcore|local|vaughan|inequalities|characters|all"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub check: &'static str,
    pub pass: bool,
    pub detail: String,
    pub counterexample: Option<serde_json::Value>,
}

impl CheckOutcome {
    fn ok(suite: &'static str, check: &'static str, detail: impl Into<String>) -> Self {
        CheckOutcome {
            suite,
            check,
            pass: true,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(
        suite: &'static str,
        check: &'static str,
        detail: impl Into<String>,
        dump: Option<serde_json::Value>,
    ) -> Self {
        CheckOutcome {
            suite,
            check,
            pass: false,
            detail: detail.into(),
            counterexample: dump,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            trials: 1000,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    match suite {
        Suite::Symcore => out.extend(symcore_suite(cfg)),
        Suite::Local => out.extend(local_suite(cfg)?),
        Suite::Vaughan => out.extend(vaughan_suite(cfg)?),
        Suite::Inequalities => out.extend(inequalities_suite(cfg)),
        Suite::Characters => out.extend(characters_suite(cfg)?),
        Suite::All => {
            out.extend(symcore_suite(cfg));
            out.extend(local_suite(cfg)?);
            out.extend(vaughan_suite(cfg)?);
            out.extend(inequalities_suite(cfg));
            out.extend(characters_suite(cfg)?);
        }
    }
    Ok(out)
}

fn rng_for(cfg: &VerifyConfig, salt: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed ^ salt, trial))
}

// ---------------------------------------------------------------- symcore

fn symcore_suite(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    const S: &str = "symcore";
    let mut out = Vec::new();

    // Newton's identity between e_k and power sums.
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x100, t);
        let n = rng.gen_range(1..=6usize);
        let s = random_unit_satake(&mut rng, n);
        let e = elementary_all(n, s.params());
        for k in 1..=n {
            let lhs = Complex64::new(k as f64, 0.0) * e[k];
            let mut rhs = Complex64::new(0.0, 0.0);
            for i in 1..=k {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                rhs += sign * e[k - i] * power_sum(i as u32, s.params());
            }
            if (lhs - rhs).norm() / lhs.norm().max(1e-12) > 1e-9 {
                return Some((t, k));
            }
        }
        None
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "newton-identity", format!("{} trials", cfg.trials)),
        Some((t, k)) => CheckOutcome::fail(
            S,
            "newton-identity",
            format!("violated at trial {t}, k = {k}"),
            None,
        ),
    });

    // Jacobi-Trudi vs ratio of alternants on distinct unit values.
    let jt_trials = (cfg.trials / 10).max(20) as u64;
    let bad = (0..jt_trials).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x101, t);
        let n = rng.gen_range(2..=4usize);
        let s = random_unit_satake(&mut rng, n);
        let k = rng.gen_range(1..=8u32);
        for lam in enum_partitions(k, n).unwrap() {
            let a = schur(&lam, s.params());
            let b = schur_alternant(&lam, s.params());
            if (a - b).norm() / a.norm().max(1e-12) > 1e-9 {
                return Some((t, lam.parts().to_vec()));
            }
        }
        None
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "jacobi-trudi-vs-alternant", format!("{jt_trials} trials")),
        Some((t, lam)) => CheckOutcome::fail(
            S,
            "jacobi-trudi-vs-alternant",
            format!("mismatch at trial {t}, partition {lam:?}"),
            None,
        ),
    });

    // Dual Pieri rule.
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x102, t);
        let n = rng.gen_range(1..=5usize);
        let s = random_unit_satake(&mut rng, n);
        let l = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=6u32);
        if !dual_pieri_check(l, m, s.params(), 1e-10) {
            Some((t, l, m))
        } else {
            None
        }
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "dual-pieri", format!("{} trials", cfg.trials)),
        Some((t, l, m)) => {
            CheckOutcome::fail(S, "dual-pieri", format!("failed at trial {t}: l={l} m={m}"), None)
        }
    });

    // Symmetry under permutation (canonicalization makes it exact).
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x103));
    let mut sym_ok = true;
    for _ in 0..(cfg.trials / 10).max(20) {
        let n = rng.gen_range(2..=4usize);
        let mut vals: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let a = ComplexMultiset::new(vals.clone());
        vals.rotate_left(1);
        let b = ComplexMultiset::new(vals);
        let k = rng.gen_range(1..=6u32);
        for lam in enum_partitions(k, n).unwrap() {
            if schur(&lam, &a) != schur(&lam, &b) {
                sym_ok = false;
            }
        }
    }
    out.push(if sym_ok {
        CheckOutcome::ok(S, "schur-permutation-symmetry", "exact after canonicalization")
    } else {
        CheckOutcome::fail(S, "schur-permutation-symmetry", "permutation changed a value", None)
    });

    out
}

// ------------------------------------------------------------------ local

fn local_suite(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    const S: &str = "local";
    let mut out = Vec::new();
    let tau = Arc::new(compute_tau_table(100_000)?);

    // Exact q-expansion oracle at the head of the table.
    let oracle = tau_direct_expansion(24);
    let head_ok = (1..=24).all(|m| tau.tau(m).unwrap() == oracle[m]);
    out.push(if head_ok {
        CheckOutcome::ok(S, "tau-direct-expansion", "first 24 coefficients exact")
    } else {
        CheckOutcome::fail(S, "tau-direct-expansion", "head mismatch", None)
    });

    // Multiplicativity on random coprime pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x200));
    let mut mult_ok = true;
    for _ in 0..200 {
        let m = rng.gen_range(2..=316u64);
        let n = rng.gen_range(2..=316u64);
        if gcd(m, n) != 1 || m * n > 100_000 {
            continue;
        }
        if tau.tau((m * n) as usize).unwrap()
            != tau.tau(m as usize).unwrap() * tau.tau(n as usize).unwrap()
        {
            mult_ok = false;
        }
    }
    out.push(if mult_ok {
        CheckOutcome::ok(S, "tau-multiplicativity", "random coprime pairs")
    } else {
        CheckOutcome::fail(S, "tau-multiplicativity", "multiplicativity violated", None)
    });

    // Hecke-eigenvalue bound at primes.
    let sieve = build_sieve(100_000)?;
    let delta = ExemplarPi::from_tau(ExemplarName::Delta, tau.clone());
    let mut deligne_ok = true;
    for &p in sieve.primes() {
        let s = delta.satake_at(p as u64)?;
        if lambda_pk(&s, 1).norm() > 2.0 + 1e-12 {
            deligne_ok = false;
            break;
        }
    }
    out.push(if deligne_ok {
        CheckOutcome::ok(S, "hecke-eigenvalue-bound", "|lambda(p)| <= 2 up to 1e5")
    } else {
        CheckOutcome::fail(S, "hecke-eigenvalue-bound", "bound exceeded", None)
    });

    // Local Euler identity lambda * mu = unit, order 12.
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x201, t);
        let n = rng.gen_range(1..=4usize);
        let s = if rng.gen_bool(0.5) {
            random_unit_satake(&mut rng, n)
        } else {
            let p = rng.gen_range(2..=997);
            random_stress_satake(&mut rng, n, p)
        };
        let lam: Vec<Complex64> = (0..=12u32).map(|k| lambda_pk(&s, k)).collect();
        let mu: Vec<Complex64> = (0..=12u32).map(|k| mu_pk(&s, k)).collect();
        for m in 1..=12usize {
            let conv: Complex64 = (0..=m).map(|i| lam[i] * mu[m - i]).sum();
            let scale: f64 = (0..=m).map(|i| (lam[i] * mu[m - i]).norm()).sum();
            if conv.norm() > 1e-10 * scale.max(1.0) {
                return Some(t);
            }
        }
        None
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "local-euler-identity", format!("{} trials", cfg.trials)),
        Some(t) => CheckOutcome::fail(S, "local-euler-identity", format!("trial {t}"), None),
    });

    // Rankin-Selberg Schur-sum form against the Euler-product oracle.
    let rs_trials = (cfg.trials / 10).max(20) as u64;
    let bad = (0..rs_trials).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x202, t);
        let n = rng.gen_range(1..=4usize);
        let s = random_unit_satake(&mut rng, n);
        let oracle = rs_euler_coeffs(s.params(), 8);
        for k in 0..=8u32 {
            let got = rs_lambda_pk(&s, k);
            let want = oracle[k as usize].re;
            if (got - want).abs() / want.abs().max(1e-12) > 1e-9 {
                return Some((t, k));
            }
        }
        None
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "rankin-selberg-oracle", format!("{rs_trials} trials")),
        Some((t, k)) => {
            CheckOutcome::fail(S, "rankin-selberg-oracle", format!("trial {t}, k = {k}"), None)
        }
    });

    // Self-duality: exemplar coefficients real.
    let mut real_ok = true;
    for name in [ExemplarName::Delta, ExemplarName::Sym2Delta, ExemplarName::Sym3Delta] {
        let pi = ExemplarPi::from_tau(name, tau.clone());
        for p in [2u64, 3, 5, 7, 1009, 99991] {
            let s = pi.satake_at(p)?;
            for k in 0..=8u32 {
                if lambda_pk(&s, k).im.abs() > 1e-10 || mu_pk(&s, k).im.abs() > 1e-10 {
                    real_ok = false;
                }
            }
        }
    }
    out.push(if real_ok {
        CheckOutcome::ok(S, "self-duality-real", "exemplar coefficients real")
    } else {
        CheckOutcome::fail(S, "self-duality-real", "nonreal coefficient", None)
    });

    Ok(out)
}

// ---------------------------------------------------------------- vaughan

fn vaughan_suite(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    const S: &str = "vaughan";
    let mut out = Vec::new();
    let tau = Arc::new(compute_tau_table(10_000)?);
    let sieve = build_sieve(10_000)?;

    let exemplars = [
        ExemplarPi::zeta(),
        ExemplarPi::from_tau(ExemplarName::Delta, tau.clone()),
        ExemplarPi::from_tau(ExemplarName::Sym2Delta, tau.clone()),
    ];
    let tables: Vec<VaughanTables> = exemplars
        .iter()
        .map(|pi| VaughanTables::build(pi, 10_000, &sieve))
        .collect::<Result<_>>()?;

    let configs = (cfg.trials / 10).max(20);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x300));
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for i in 0..configs {
        let q = rng.gen_range(1..=20u64);
        let a = loop {
            let a = rng.gen_range(0..q);
            if gcd(a, q) == 1 {
                break a;
            }
        };
        let xf: f64 = rng.gen_range(10.0..100.0);
        let x = xf.floor() + 0.5;
        let y = rng.gen_range((2.0 * x).max(200.0)..10_000.0);
        let which = i % tables.len();
        let params = VaughanParams::new(x, x, y, q, a)?;
        let dec = decompose(&params, &tables[which])?;
        let r = dec.residual();
        worst = worst.max(r);
        if r >= 1e-8 {
            failure = Some(json!({
                "seed": cfg.seed,
                "q": q, "a": a, "X": x, "y": y,
                "pi": which,
                "residual": r,
                "inequality_id": "vaughan-decomposition",
            }));
            break;
        }
    }
    out.push(match failure {
        None => CheckOutcome::ok(
            S,
            "decomposition-identity",
            format!("{configs} configs, worst residual {worst:.2e}"),
        ),
        Some(dump) => {
            CheckOutcome::fail(S, "decomposition-identity", "residual above 1e-8", Some(dump))
        }
    });

    // Single-integer identity on random points.
    let delta = &exemplars[1];
    let mut single_ok = true;
    for _ in 0..(cfg.trials / 10).max(20) {
        let n0 = rng.gen_range(100..10_000u64);
        let xf: f64 = rng.gen_range(5.0..60.0);
        let x = xf.floor() + 0.5;
        if !crate::vaughan::vaughan_identity_check(delta, n0, x, x, 1e-9)? {
            single_ok = false;
            break;
        }
    }
    out.push(if single_ok {
        CheckOutcome::ok(S, "single-point-identity", "factorization enumeration")
    } else {
        CheckOutcome::fail(S, "single-point-identity", "identity violated", None)
    });

    // beta complements the truncated direct convolution to the unit.
    let n = 10_000usize;
    let beta = crate::vaughan::beta_coeff(delta, 30.5, n, &sieve)?;
    let mut mu_low = CoefficientTable::zeros(Role::Custom, n);
    let mu_full = mu_table(delta, n, &sieve)?;
    for m in 1..=30usize {
        mu_low.values_mut()[m] = mu_full.val(m);
    }
    let lam = lambda_table(delta, n, &sieve)?;
    let conv = dirichlet_convolve(&mu_low, &lam)?;
    let mut beta_ok = true;
    for m in 1..=n {
        let total = beta.val(m).re + conv.val(m).re;
        let want = if m == 1 { 1.0 } else { 0.0 };
        if (total - want).abs() > 1e-9 {
            beta_ok = false;
            break;
        }
    }
    out.push(if beta_ok {
        CheckOutcome::ok(S, "beta-complement-identity", "beta + truncated conv = unit")
    } else {
        CheckOutcome::fail(S, "beta-complement-identity", "complement mismatch", None)
    });

    Ok(out)
}

// ----------------------------------------------------------- inequalities

fn inequalities_suite(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    const S: &str = "inequalities";
    let mut out = Vec::new();

    // exp-majorant lemma.
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x400, t);
        let b: Vec<Complex64> = (0..20)
            .map(|_| {
                Complex64::from_polar(
                    rng.gen_range(0.0..5.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        if !soundararajan_check(&b, 20).unwrap() {
            Some((t, b))
        } else {
            None
        }
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "exp-series-majorant", format!("{} trials", cfg.trials)),
        Some((t, b)) => CheckOutcome::fail(
            S,
            "exp-series-majorant",
            format!("violated at trial {t}"),
            Some(json!({
                "seed": cfg.seed,
                "trial": t,
                "b": b.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "inequality_id": "exp-series-majorant",
            })),
        ),
    });

    // The four local dominations on random Satake sets (both regimes).
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x401, t);
        let n = rng.gen_range(1..=4usize);
        let s = if rng.gen_bool(0.5) {
            random_unit_satake(&mut rng, n)
        } else {
            let p = rng.gen_range(2..=499);
            random_stress_satake(&mut rng, n, p)
        };
        let checks = check_coefficient_dominations(&s, 8).unwrap();
        checks
            .into_iter()
            .find(|c| !c.pass)
            .map(|c| (t, Violation::from_check(derive_seed(cfg.seed ^ 0x401, t), &s, &c)))
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "coefficient-dominations", format!("{} trials", cfg.trials)),
        Some((t, v)) => CheckOutcome::fail(
            S,
            "coefficient-dominations",
            format!("{} violated at trial {t}", v.inequality_id),
            Some(serde_json::to_value(&v).unwrap()),
        ),
    });

    // Nonnegativity of the twisted isobaric coefficients.
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x402, t);
        let n = rng.gen_range(1..=4usize);
        let s = random_unit_satake(&mut rng, n);
        let chi = [-1i8, 0, 1][rng.gen_range(0..3)];
        let chip = [-1i8, 0, 1][rng.gen_range(0..3)];
        if !pistar_nonneg_check(&s, chi, chip, 24).unwrap() {
            Some((t, chi, chip, s))
        } else {
            None
        }
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "aux-rep-nonneg", format!("{} trials", cfg.trials)),
        Some((t, chi, chip, s)) => CheckOutcome::fail(
            S,
            "aux-rep-nonneg",
            format!("negative coefficient at trial {t}, chi={chi}, chi'={chip}"),
            Some(json!({
                "seed": cfg.seed,
                "trial": t,
                "satake": s.params().values().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "chi_p": chi,
                "chiprime_p": chip,
                "inequality_id": "aux-rep-nonneg",
            })),
        ),
    });

    // exp/log round trip.
    let bad = (0..cfg.trials as u64).into_par_iter().find_map_any(|t| {
        let mut rng = rng_for(cfg, 0x403, t);
        let b: Vec<Complex64> = (0..32)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let c = exp_series(&b).unwrap();
        let back = log_series(&c);
        for (orig, rec) in b.iter().zip(&back) {
            if (orig - rec).norm() > 1e-9 * (1.0 + orig.norm()) {
                return Some(t);
            }
        }
        None
    });
    out.push(match bad {
        None => CheckOutcome::ok(S, "exp-log-roundtrip", format!("{} trials", cfg.trials)),
        Some(t) => CheckOutcome::fail(S, "exp-log-roundtrip", format!("trial {t}"), None),
    });

    out
}

// ------------------------------------------------------------- characters

fn characters_suite(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    const S: &str = "characters";
    let mut out = Vec::new();
    let _ = cfg;

    let sieve = build_sieve(300)?;
    let phi = sieve.euler_phi();
    let mut count_ok = true;
    for q in 1..=300u64 {
        if enumerate_characters(q)?.len() as u64 != phi[q as usize] {
            count_ok = false;
        }
    }
    out.push(if count_ok {
        CheckOutcome::ok(S, "character-count", "phi(q) characters for q <= 300")
    } else {
        CheckOutcome::fail(S, "character-count", "count mismatch", None)
    });

    let mut orth_ok = true;
    'orth: for q in 1..=200u64 {
        let chars = enumerate_characters(q)?;
        let phi_q = chars.len() as f64;
        for u in 0..q {
            if gcd(u, q) != 1 {
                continue;
            }
            let s: Complex64 = chars.iter().map(|c| c.eval(u)).sum();
            let want = if u == 1 % q { phi_q } else { 0.0 };
            if (s - want).norm() > 1e-10 {
                orth_ok = false;
                break 'orth;
            }
        }
    }
    out.push(if orth_ok {
        CheckOutcome::ok(S, "orthogonality", "exact to 1e-10 for q <= 200")
    } else {
        CheckOutcome::fail(S, "orthogonality", "orthogonality violated", None)
    });

    let mut cond_ok = true;
    for q in [4u64, 8, 9, 12, 16, 24, 36, 40, 45, 60] {
        for chi in enumerate_characters(q)? {
            if chi.conductor() != conductor_of(&chi) {
                cond_ok = false;
            }
        }
    }
    out.push(if cond_ok {
        CheckOutcome::ok(S, "conductor-oracle", "fast conductor matches brute force")
    } else {
        CheckOutcome::fail(S, "conductor-oracle", "conductor mismatch", None)
    });

    let mut gauss_ok = true;
    for q in 2..=50u64 {
        for chi in enumerate_characters(q)? {
            if chi.is_primitive() {
                let g = gauss_sum(&chi);
                if (g.norm() - (q as f64).sqrt()).abs() > 1e-9 {
                    gauss_ok = false;
                }
            }
        }
    }
    out.push(if gauss_ok {
        CheckOutcome::ok(S, "gauss-sum-magnitude", "|tau(chi)| = sqrt(q) for primitive chi")
    } else {
        CheckOutcome::fail(S, "gauss-sum-magnitude", "magnitude off", None)
    });

    let mut induce_ok = true;
    for q in [12u64, 20, 36, 60] {
        for chi in enumerate_characters(q)? {
            let prim = primitivize(&chi)?;
            for a in 0..q {
                if gcd(a, q) == 1 && (prim.eval(a) - chi.eval(a)).norm() > 1e-10 {
                    induce_ok = false;
                }
            }
        }
    }
    out.push(if induce_ok {
        CheckOutcome::ok(S, "induction-consistency", "primitivization agrees on units")
    } else {
        CheckOutcome::fail(S, "induction-consistency", "induced values differ", None)
    });

    let mut kron_ok = true;
    for &p in sieve.primes() {
        if p == 2 {
            continue;
        }
        for a in 1..(p as u64).min(40) {
            let symbol = kronecker(a as i64, p as i64);
            let acc = mod_pow(a, (p as u64 - 1) / 2, p as u64);
            let want = if acc == 1 {
                1
            } else if acc == p as u64 - 1 {
                -1
            } else {
                0
            };
            if symbol != want {
                kron_ok = false;
            }
        }
    }
    out.push(if kron_ok {
        CheckOutcome::ok(S, "kronecker-euler-criterion", "odd primes to 300")
    } else {
        CheckOutcome::fail(S, "kronecker-euler-criterion", "symbol mismatch", None)
    });

    Ok(out)
}

fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mm = m as u128;
    let mut bb = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_small() {
        let cfg = VerifyConfig {
            seed: 1,
            trials: 60,
        };
        let outcomes = run_suite(Suite::All, &cfg).unwrap();
        assert!(outcomes.len() >= 15);
        for o in &outcomes {
            assert!(o.pass, "{}/{}: {}", o.suite, o.check, o.detail);
        }
    }

    #[test]
    fn suite_names_parse() {
        for name in ["symcore", "local", "vaughan", "inequalities", "characters", "all"] {
            name.parse::<Suite>().unwrap();
        }
        assert!("bogus".parse::<Suite>().is_err());
    }
}
