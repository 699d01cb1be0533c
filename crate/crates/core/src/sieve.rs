//! Progression sums, the smoothed sums ψ_ρ, the deweighting integral
//! identity, discrepancy curves over moduli, the Siegel–Walfisz empirical
//! check, and the multiplicative large-sieve ratio.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::enumerate_characters;
use crate::dirichlet::CoefficientTable;
use crate::error::{Error, Result};
use crate::localcoeffs::ExemplarName;
use crate::util::{fmt_f64, gcd};

/// Experiment parameters. `eta` defaults to max{2, n/2}; the log-power B
/// is always caller-supplied (its value in the source analysis is not
/// settled, so nothing here hardcodes it).
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub pi: String,
    pub x: f64,
    pub eta: f64,
    pub b_log_power: f64,
    pub a_log_power: f64,
    pub rho: u32,
    pub seed: u64,
    pub q_min: u64,
    pub q_max: Option<u64>,
    pub weight: Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    Plain,
    Log,
    SmoothedRho,
}

impl ExperimentConfig {
    pub fn new(pi: ExemplarName, x: f64) -> ExperimentConfig {
        let n = pi.rank() as f64;
        ExperimentConfig {
            pi: pi.as_str().to_string(),
            x,
            eta: (n / 2.0).max(2.0),
            b_log_power: 8.0,
            a_log_power: 1.0,
            rho: (pi.rank() / 4) as u32 + 1,
            seed: 1,
            q_min: 1,
            q_max: None,
            weight: Weight::Plain,
        }
    }
}

/// Q = x^{1/η} (log x)^{-B}, clamped to at least 1 so the full-sum
/// modulus q = 1 is always present (at desk scale the theoretical Q
/// drops below 1 for any sizable B).
pub fn level_of_distribution(x: f64, eta: f64, b_log_power: f64) -> f64 {
    (x.powf(1.0 / eta) * x.ln().powf(-b_log_power)).max(1.0)
}

/// Σ_{m<=y, m≡a (q)} t[m].
pub fn progression_sum(
    t: &CoefficientTable,
    y: f64,
    q: u64,
    a: u64,
) -> Result<Complex64> {
    check_progression_args(t, y, q, a)?;
    let a = a % q;
    let mut m = if a == 0 { q } else { a } as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    while (m as f64) <= y {
        acc += t.val(m);
        m += q as usize;
    }
    Ok(acc)
}

/// Σ_{m<=y, m≡a (q)} t[m] (1 - m/y)^ρ.
pub fn psi_rho(t: &CoefficientTable, y: f64, q: u64, a: u64, rho: u32) -> Result<Complex64> {
    check_progression_args(t, y, q, a)?;
    let a = a % q;
    let mut m = if a == 0 { q } else { a } as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    while (m as f64) <= y {
        acc += t.val(m) * (1.0 - m as f64 / y).powi(rho as i32);
        m += q as usize;
    }
    Ok(acc)
}

fn check_progression_args(t: &CoefficientTable, y: f64, q: u64, a: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::contract("modulus must be positive"));
    }
    if gcd(a % q, q) != 1 {
        return Err(Error::contract(format!("need gcd(a, q) = 1, got a={a}, q={q}")));
    }
    if y > t.len() as f64 {
        return Err(Error::range(format!(
            "y = {y} beyond table length {}",
            t.len()
        )));
    }
    Ok(())
}

// Gauss-Legendre nodes/weights on [-1, 1]; k nodes integrate polynomials
// of degree <= 2k-1 exactly, which covers the piecewise-polynomial
// integrand below for rho <= 8.
const GL_NODES: [&[(f64, f64)]; 4] = [
    &[(0.0, 2.0)],
    &[
        (-0.5773502691896257, 1.0),
        (0.5773502691896257, 1.0),
    ],
    &[
        (-0.7745966692414834, 0.5555555555555556),
        (0.0, 0.8888888888888888),
        (0.7745966692414834, 0.5555555555555556),
    ],
    &[
        (-0.8611363115940526, 0.3478548451374538),
        (-0.3399810435848563, 0.6521451548625461),
        (0.3399810435848563, 0.6521451548625461),
        (0.8611363115940526, 0.3478548451374538),
    ],
];

/// Verifies the deweighting identity
/// `∫_{y-z}^{y} t^{ρ-1} ψ_{ρ-1}(t) dt = (y^ρ/ρ) ψ_ρ(y) - ((y-z)^ρ/ρ) ψ_ρ(y-z)`
/// with `z = y / (log y)^{A/2}`. The integrand is piecewise polynomial of
/// degree ρ-1 between consecutive integers, so per-interval Gauss–Legendre
/// quadrature of ψ_{ρ-1} evaluates the left side exactly up to rounding.
pub fn gallagher_identity_check(
    t: &CoefficientTable,
    y: f64,
    q: u64,
    a: u64,
    rho: u32,
    a_log_power: f64,
    tol: f64,
) -> Result<bool> {
    if rho < 1 {
        return Err(Error::contract("rho must be >= 1"));
    }
    if rho > 8 {
        return Err(Error::SizeLimit {
            what: "smoothing order rho",
            limit: 8,
            got: rho as u64,
        });
    }
    if y < 10.0 {
        return Err(Error::contract("identity check needs y >= 10"));
    }
    let z = y / y.ln().powf(a_log_power / 2.0);
    let lo = y - z;

    // Left side: integrate t^{rho-1} psi_{rho-1}(t) over [y-z, y],
    // splitting at integers where the summand set changes.
    let k_nodes = ((rho as usize) + 1) / 2;
    let nodes = GL_NODES[k_nodes.clamp(1, 4) - 1];
    let mut cuts = vec![lo];
    let mut m = lo.floor() as i64 + 1;
    while (m as f64) < y {
        if m as f64 > lo {
            cuts.push(m as f64);
        }
        m += 1;
    }
    cuts.push(y);
    let mut lhs = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        let (a0, b0) = (w[0], w[1]);
        if b0 <= a0 {
            continue;
        }
        let mid = 0.5 * (a0 + b0);
        let half = 0.5 * (b0 - a0);
        for &(xi, wi) in nodes {
            let tt = mid + half * xi;
            let val = psi_rho(t, tt, q, a, rho - 1)? * tt.powi(rho as i32 - 1);
            lhs += val * (wi * half);
        }
    }

    let rhs = psi_rho(t, y, q, a, rho)? * (y.powi(rho as i32) / rho as f64)
        - psi_rho(t, lo, q, a, rho)? * (lo.powi(rho as i32) / rho as f64);
    let denom = 1.0 + rhs.norm();
    Ok((lhs - rhs).norm() / denom <= tol)
}

/// D(x, Q) = Σ_{q<=Q} max_{(a,q)=1} max_{y<=x} |Σ_{m<=y, m≡a} t[m]|.
/// The double max is exact: partial sums only change at class members,
/// so tracking the running extremum per residue class covers every y.
pub fn bv_discrepancy(t: &CoefficientTable, x: f64, q_cap: f64) -> f64 {
    let xi = (x.min(t.len() as f64)) as usize;
    let qmax = q_cap.floor() as u64;
    let per_q: Vec<f64> = (1..=qmax)
        .into_par_iter()
        .map(|q| {
            let qu = q as usize;
            let mut acc = vec![Complex64::new(0.0, 0.0); qu];
            let mut best = vec![0.0f64; qu];
            for m in 1..=xi {
                let r = m % qu;
                acc[r] += t.val(m);
                let mag = acc[r].norm();
                if mag > best[r] {
                    best[r] = mag;
                }
            }
            (0..qu)
                .filter(|&r| gcd(r as u64, q) == 1)
                .map(|r| best[r])
                .fold(0.0f64, f64::max)
        })
        .collect();
    per_q.iter().sum()
}

/// One point of a discrepancy curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub q_cap: f64,
    pub d: f64,
    pub d_over_x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyCurve {
    pub config: ExperimentConfig,
    pub points: Vec<CurvePoint>,
}

impl DiscrepancyCurve {
    /// CSV schema: `x,Q,D,D_over_x,pi,eta,B,A`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,Q,D,D_over_x,pi,eta,B,A\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(p.x),
                fmt_f64(p.q_cap),
                fmt_f64(p.d),
                fmt_f64(p.d_over_x),
                self.config.pi,
                fmt_f64(self.config.eta),
                fmt_f64(self.config.b_log_power),
                fmt_f64(self.config.a_log_power),
            ));
        }
        out
    }
}

/// Discrepancy at a decade ladder of x values up to cfg.x, with
/// Q = x^{1/η}(log x)^{-B} at each rung. For the smoothed weight the
/// per-class maximum is evaluated at the class's own support points.
pub fn run_bv_curve(cfg: &ExperimentConfig, table: &CoefficientTable) -> DiscrepancyCurve {
    let mut xs = Vec::new();
    let mut x = cfg.x;
    while x >= 1000.0 && xs.len() < 12 {
        xs.push(x);
        x /= 10.0;
    }
    xs.reverse();
    if xs.is_empty() {
        xs.push(cfg.x);
    }
    let points = xs
        .iter()
        .map(|&x| {
            let q_cap = level_of_distribution(x, cfg.eta, cfg.b_log_power)
                .min(cfg.q_max.map(|q| q as f64).unwrap_or(f64::INFINITY))
                .max(cfg.q_min as f64);
            let d = match cfg.weight {
                Weight::Plain | Weight::Log => bv_discrepancy(table, x, q_cap),
                Weight::SmoothedRho => smoothed_discrepancy(table, x, q_cap, cfg.rho),
            };
            CurvePoint {
                x,
                q_cap,
                d,
                d_over_x: d / x,
            }
        })
        .collect();
    DiscrepancyCurve {
        config: cfg.clone(),
        points,
    }
}

/// Discrepancy with the (1 - m/y)^ρ weight, the max over y taken on each
/// class's support points (the weight varies continuously in y, so the
/// exact continuous max is not enumerable; support points are where mass
/// enters).
pub fn smoothed_discrepancy(t: &CoefficientTable, x: f64, q_cap: f64, rho: u32) -> f64 {
    let xi = (x.min(t.len() as f64)) as usize;
    let qmax = q_cap.floor() as u64;
    let binom: Vec<f64> = (0..=rho).map(|j| binomial(rho, j)).collect();
    // collect keeps q-order so the final reduction is deterministic
    let per_q: Vec<f64> = (1..=qmax)
        .into_par_iter()
        .map(|q| {
            let qu = q as usize;
            // moments[r][j] = sum of m^j t[m] over class members m <= y
            let mut moments = vec![vec![Complex64::new(0.0, 0.0); rho as usize + 1]; qu];
            let mut best = vec![0.0f64; qu];
            for m in 1..=xi {
                let r = m % qu;
                let mf = m as f64;
                let mut pw = 1.0;
                for j in 0..=rho as usize {
                    moments[r][j] += t.val(m) * pw;
                    pw *= mf;
                }
                // psi_rho(y = m) for this class
                let y = mf;
                let mut val = Complex64::new(0.0, 0.0);
                let mut sign = 1.0;
                for j in 0..=rho as usize {
                    val += moments[r][j] * (sign * binom[j] / y.powi(j as i32));
                    sign = -sign;
                }
                let mag = val.norm();
                if mag > best[r] {
                    best[r] = mag;
                }
            }
            (0..qu)
                .filter(|&r| gcd(r as u64, q) == 1)
                .map(|r| best[r])
                .fold(0.0f64, f64::max)
        })
        .collect();
    per_q.iter().sum()
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Rows of the Siegel–Walfisz empirical check.
#[derive(Debug, Clone, Serialize)]
pub struct SwRow {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SwReport {
    pub pi: String,
    pub a_log_power: f64,
    pub rows: Vec<SwRow>,
    pub per_x_max: Vec<(f64, f64)>,
    /// true if the per-x maximum failed to decrease somewhere
    pub flagged_nondecrease: bool,
    /// true if some x admitted no modulus beyond q = 1
    pub vacuous: bool,
}

/// For each x and each q <= (log x)^A, reports
/// |Σ_{n<=x, n≡a} Λ(n) a_π(n)| / x over unit residues.
pub fn siegel_walfisz_check(
    pi_name: &str,
    von_mangoldt: &CoefficientTable,
    xs: &[f64],
    a_log_power: f64,
) -> Result<SwReport> {
    let mut rows = Vec::new();
    let mut per_x_max = Vec::new();
    let mut vacuous = false;
    for &x in xs {
        if x > von_mangoldt.len() as f64 {
            return Err(Error::range(format!("x = {x} beyond table reach")));
        }
        let qmax = x.ln().powf(a_log_power).floor() as u64;
        if qmax < 2 {
            vacuous = true;
        }
        let mut xmax = 0.0f64;
        for q in 1..=qmax.max(1) {
            for a in 0..q {
                if gcd(a, q) != 1 {
                    continue;
                }
                let s = progression_sum(von_mangoldt, x, q, a)?;
                let ratio = s.norm() / x;
                xmax = xmax.max(ratio);
                rows.push(SwRow { x, q, a, ratio });
            }
        }
        per_x_max.push((x, xmax));
    }
    let flagged = per_x_max.windows(2).any(|w| w[1].1 >= w[0].1);
    Ok(SwReport {
        pi: pi_name.to_string(),
        a_log_power,
        rows,
        per_x_max,
        flagged_nondecrease: flagged,
        vacuous,
    })
}

/// LHS/RHS of the multiplicative large sieve at s = 0:
/// `Σ_{q<=Q} (q/φ(q)) Σ*_{χ (q)} |Σ_n c(n) χ(n)|²  vs  (Q² + x) Σ_n |c(n)|²`.
/// `c` is 1-indexed (c[0] ignored).
pub fn large_sieve_ratio(c: &[Complex64], q_cap: u64) -> Result<f64> {
    let x = c.len() - 1;
    if q_cap > 1000 {
        return Err(Error::SizeLimit {
            what: "large sieve modulus cap",
            limit: 1000,
            got: q_cap,
        });
    }
    if x > 1_000_000 {
        return Err(Error::SizeLimit {
            what: "large sieve coefficient length",
            limit: 1_000_000,
            got: x as u64,
        });
    }
    let norm_sq: f64 = c[1..].iter().map(|z| z.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Ok(0.0);
    }
    let per_q: Vec<f64> = (1..=q_cap)
        .into_par_iter()
        .map(|q| {
            let qu = q as usize;
            let mut class_sums = vec![Complex64::new(0.0, 0.0); qu];
            for (n, cn) in c.iter().enumerate().skip(1) {
                class_sums[n % qu] += cn;
            }
            let phi = class_sums
                .iter()
                .enumerate()
                .filter(|(r, _)| gcd(*r as u64, q) == 1)
                .count() as f64;
            let chars = enumerate_characters(q).expect("within guard");
            let mut acc = 0.0;
            for chi in chars.iter().filter(|c| c.is_primitive()) {
                let mut tsum = Complex64::new(0.0, 0.0);
                for (r, cs) in class_sums.iter().enumerate() {
                    let v = chi.eval(r as u64);
                    if v.re != 0.0 || v.im != 0.0 {
                        tsum += v * cs;
                    }
                }
                acc += tsum.norm_sqr();
            }
            acc * q as f64 / phi
        })
        .collect();
    let lhs: f64 = per_q.iter().sum();
    let rhs = ((q_cap * q_cap) as f64 + x as f64) * norm_sq;
    Ok(lhs / rhs)
}

/// Character-orthogonality route to a progression sum:
/// (1/φ(q)) Σ_χ χ̄(a) Σ_n t[n] χ(n).
pub fn progression_sum_via_characters(
    t: &CoefficientTable,
    y: f64,
    q: u64,
    a: u64,
) -> Result<Complex64> {
    check_progression_args(t, y, q, a)?;
    let chars = enumerate_characters(q)?;
    let yi = y.floor() as usize;
    let qu = q as usize;
    let mut class_sums = vec![Complex64::new(0.0, 0.0); qu];
    for n in 1..=yi.min(t.len()) {
        class_sums[n % qu] += t.val(n);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for chi in &chars {
        let mut inner = Complex64::new(0.0, 0.0);
        for (r, cs) in class_sums.iter().enumerate() {
            inner += chi.eval(r as u64) * cs;
        }
        acc += chi.eval(a).conj() * inner;
    }
    Ok(acc / chars.len() as f64)
}

/// Difference between the prime-power-weighted sum Σ_{n<=x} Λ(n)a_π(n)
/// and the prime-restricted Σ_{p<=x} λ_π(p) log p; the higher
/// prime-power contribution, reported alongside its desk-scale cap.
pub fn prime_power_correction(
    von_mangoldt: &CoefficientTable,
    lambda_log_primes: &CoefficientTable,
    x: f64,
) -> (f64, f64) {
    let xi = x as usize;
    let mut diff = Complex64::new(0.0, 0.0);
    for m in 1..=xi.min(von_mangoldt.len()) {
        diff += von_mangoldt.val(m) - lambda_log_primes.val(m);
    }
    (diff.norm(), x.powf(0.75))
}
