//! Global arithmetic-function layer: multiplicative extension of local
//! generators to 1..N, Dirichlet convolution, von Mangoldt weighting, and
//! the dense coefficient tables every experiment reads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localcoeffs::{a_pk, lambda_pk, mu_pk, rs_lambda_pk, ExemplarPi};

/// Memory guard for the factor sieve.
pub const MAX_SIEVE_N: usize = 100_000_000;

/// What an arithmetic-function table holds. Mostly metadata for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    LambdaPi,
    VonMangoldtAPi,
    MuPi,
    RsLambda,
    Divisor,
    BFpi,
    AlphaFpi,
    BetaFpi,
    Custom,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::LambdaPi => "lambda_pi",
            Role::VonMangoldtAPi => "vonmangoldt_a_pi",
            Role::MuPi => "mu_pi",
            Role::RsLambda => "rs_lambda",
            Role::Divisor => "divisor",
            Role::BFpi => "b_Fpi",
            Role::AlphaFpi => "alpha_Fpi",
            Role::BetaFpi => "beta_Fpi",
            Role::Custom => "custom",
        }
    }
}

/// Smallest-prime-factor sieve on 2..=N (linear sieve construction).
#[derive(Debug, Clone)]
pub struct FactorSieve {
    n: usize,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

/// Linear sieve; spf[m] is the least prime dividing m.
pub fn build_sieve(n: usize) -> Result<FactorSieve> {
    if n > MAX_SIEVE_N {
        return Err(Error::SizeLimit {
            what: "factor sieve length",
            limit: MAX_SIEVE_N as u64,
            got: n as u64,
        });
    }
    if n < 2 {
        return Err(Error::contract("sieve needs N >= 2"));
    }
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    Ok(FactorSieve { n, spf, primes })
}

impl FactorSieve {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn smallest_prime_factor(&self, m: usize) -> u32 {
        self.spf[m]
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, m: usize) -> bool {
        m >= 2 && self.spf[m] as usize == m
    }

    /// Prime factorization (p, multiplicity), ascending p.
    pub fn factorize(&self, mut m: usize) -> Vec<(u64, u32)> {
        debug_assert!(m >= 1 && m <= self.n);
        let mut out = Vec::new();
        while m > 1 {
            let p = self.spf[m];
            let mut k = 0;
            while m % p as usize == 0 {
                m /= p as usize;
                k += 1;
            }
            out.push((p as u64, k));
        }
        out
    }

    /// Classical Möbius on 1..=N.
    pub fn mobius(&self) -> Vec<i8> {
        let mut mu = vec![0i8; self.n + 1];
        mu[1] = 1;
        for m in 2..=self.n {
            let p = self.spf[m] as usize;
            let q = m / p;
            mu[m] = if q % p == 0 { 0 } else { -mu[q] };
        }
        mu
    }

    /// Euler phi on 1..=N.
    pub fn euler_phi(&self) -> Vec<u64> {
        let mut phi = vec![0u64; self.n + 1];
        phi[1] = 1;
        for m in 2..=self.n {
            let p = self.spf[m] as usize;
            let q = m / p;
            phi[m] = phi[q] * if q % p == 0 { p as u64 } else { p as u64 - 1 };
        }
        phi
    }

    /// d(m) on 1..=N, exact integers.
    pub fn divisor_counts(&self) -> Vec<u32> {
        // d via spf: track the exponent of the smallest prime.
        let mut d = vec![0u32; self.n + 1];
        let mut e = vec![0u32; self.n + 1]; // exponent of spf in m
        d[1] = 1;
        for m in 2..=self.n {
            let p = self.spf[m] as usize;
            let q = m / p;
            if q % p == 0 {
                e[m] = e[q] + 1;
                d[m] = d[q] / (e[q] + 1) * (e[m] + 1);
            } else {
                e[m] = 1;
                d[m] = d[q] * 2;
            }
        }
        d
    }
}

/// Dense table of an arithmetic function on 1..=N.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    role: Role,
    values: Vec<Complex64>, // values[m], index 0 unused
}

impl CoefficientTable {
    pub fn from_values(role: Role, values: Vec<Complex64>) -> CoefficientTable {
        assert!(values.len() >= 2, "table needs at least m = 1");
        CoefficientTable { role, values }
    }

    pub fn zeros(role: Role, n: usize) -> CoefficientTable {
        CoefficientTable {
            role,
            values: vec![Complex64::new(0.0, 0.0); n + 1],
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn val(&self, m: usize) -> Complex64 {
        self.values[m]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Real parts, provided every imaginary part is below `tol`. The
    /// exemplars are self-dual so their tables all pass through here.
    pub fn to_real(&self, tol: f64) -> Option<Vec<f64>> {
        if self.values.iter().any(|z| z.im.abs() > tol) {
            return None;
        }
        Some(self.values.iter().map(|z| z.re).collect())
    }

    /// CSV export: header `m,value_re,value_im`, one row per m.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        out.push_str("m,value_re,value_im\n");
        for m in 1..self.values.len() {
            out.push_str(&format!(
                "{},{}\n",
                m,
                crate::util::fmt_complex(self.values[m])
            ));
        }
        out
    }
}

/// values[m] = prod over p^k || m of local(p, k); values[1] = 1.
pub fn multiplicative_extend<F>(local: F, n: usize, sieve: &FactorSieve) -> CoefficientTable
where
    F: Fn(u64, u32) -> Complex64 + Sync,
{
    assert!(n <= sieve.len(), "sieve too short for table length");
    let mut values = vec![Complex64::new(0.0, 0.0); n + 1];
    values[1] = Complex64::new(1.0, 0.0);
    let body: Vec<Complex64> = (2..=n)
        .into_par_iter()
        .map(|m| {
            let mut acc = Complex64::new(1.0, 0.0);
            for (p, k) in sieve.factorize(m) {
                acc *= local(p, k);
            }
            acc
        })
        .collect();
    values[2..].copy_from_slice(&body);
    CoefficientTable::from_values(Role::Custom, values)
}

/// Dirichlet convolution: out[m] = sum over d e = m of f[d] g[e].
pub fn dirichlet_convolve(f: &CoefficientTable, g: &CoefficientTable) -> Result<CoefficientTable> {
    if f.len() != g.len() {
        return Err(Error::contract(format!(
            "convolution length mismatch: {} vs {}",
            f.len(),
            g.len()
        )));
    }
    let n = f.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for d in 1..=n {
        let fd = f.val(d);
        if fd.re == 0.0 && fd.im == 0.0 {
            continue;
        }
        for e in 1..=n / d {
            out[d * e] += fd * g.val(e);
        }
    }
    Ok(CoefficientTable::from_values(Role::Custom, out))
}

fn require_tau_reach(pi: &ExemplarPi, n: usize) -> Result<()> {
    match pi.tau_table() {
        Some(t) if t.len() < n => Err(Error::range(format!(
            "table length {n} exceeds tau reach {}",
            t.len()
        ))),
        None if pi.name() != crate::localcoeffs::ExemplarName::Zeta => {
            Err(Error::contract("exemplar needs a tau table"))
        }
        _ => Ok(()),
    }
}

/// λ_π(m) on 1..=N.
pub fn lambda_table(pi: &ExemplarPi, n: usize, sieve: &FactorSieve) -> Result<CoefficientTable> {
    require_tau_reach(pi, n)?;
    let mut t = multiplicative_extend(
        |p, k| lambda_pk(&pi.satake_at(p).expect("range pre-checked"), k),
        n,
        sieve,
    );
    t.role = Role::LambdaPi;
    Ok(t)
}

/// μ_π(m) on 1..=N.
pub fn mu_table(pi: &ExemplarPi, n: usize, sieve: &FactorSieve) -> Result<CoefficientTable> {
    require_tau_reach(pi, n)?;
    let mut t = multiplicative_extend(
        |p, k| mu_pk(&pi.satake_at(p).expect("range pre-checked"), k),
        n,
        sieve,
    );
    t.role = Role::MuPi;
    Ok(t)
}

/// λ_{π×π̃}(m) on 1..=N.
pub fn rs_lambda_table(pi: &ExemplarPi, n: usize, sieve: &FactorSieve) -> Result<CoefficientTable> {
    require_tau_reach(pi, n)?;
    let mut t = multiplicative_extend(
        |p, k| {
            Complex64::new(
                rs_lambda_pk(&pi.satake_at(p).expect("range pre-checked"), k),
                0.0,
            )
        },
        n,
        sieve,
    );
    t.role = Role::RsLambda;
    Ok(t)
}

/// Λ(m) a_π(m): a_π(p^k) log p on prime powers, zero elsewhere.
pub fn von_mangoldt_a(pi: &ExemplarPi, n: usize, sieve: &FactorSieve) -> Result<CoefficientTable> {
    require_tau_reach(pi, n)?;
    let mut t = CoefficientTable::zeros(Role::VonMangoldtAPi, n);
    for &p in sieve.primes() {
        let p = p as u64;
        if p as usize > n {
            break;
        }
        let s = pi.satake_at(p)?;
        let logp = (p as f64).ln();
        let mut pk = p as usize;
        let mut k = 1u32;
        while pk <= n {
            t.values[pk] = a_pk(&s, k) * logp;
            match pk.checked_mul(p as usize) {
                Some(next) => {
                    pk = next;
                    k += 1;
                }
                None => break,
            }
        }
    }
    Ok(t)
}

/// Verifies the series identity -L' = L * (-L'/L) coefficientwise:
/// λ_π(m) log m = Σ_{de=m} λ_π(d) Λ(e) a_π(e) for all m <= N.
pub fn truncated_log_deriv_check(pi: &ExemplarPi, n: usize, tol: f64) -> Result<bool> {
    if n > 100_000 {
        return Err(Error::SizeLimit {
            what: "log-derivative check length",
            limit: 100_000,
            got: n as u64,
        });
    }
    let sieve = build_sieve(n)?;
    let lam = lambda_table(pi, n, &sieve)?;
    let vm = von_mangoldt_a(pi, n, &sieve)?;
    let conv = dirichlet_convolve(&lam, &vm)?;
    let mut max_dev: f64 = 0.0;
    for m in 1..=n {
        let want = lam.val(m) * (m as f64).ln();
        max_dev = max_dev.max((conv.val(m) - want).norm());
    }
    Ok(max_dev < tol)
}
