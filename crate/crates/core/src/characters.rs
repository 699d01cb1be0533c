//! Dirichlet characters mod q: enumeration through CRT component
//! generators, conductor and primitivity, quadratic characters via the
//! Kronecker symbol, and Gauss sums.
//!
//! Characters are stored as dense value arrays (complex roots of unity,
//! exactly 0 off the units) because the sieve experiments evaluate χ(n)
//! in hot loops.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::util::gcd;

/// Guard for character enumeration.
pub const MAX_CHARACTER_MODULUS: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<Complex64>, // index a in 0..q, chi(a); 0 on non-units
    conductor: u64,
    parity: i8, // chi(-1)
    is_primitive: bool,
    is_quadratic: bool,
    exponents: Vec<u32>, // CRT exponent tuple; deterministic identity
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// χ(n) for any integer n >= 0.
    #[inline]
    pub fn eval(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus.max(1)) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_primitive(&self) -> bool {
        self.is_primitive
    }

    pub fn is_quadratic(&self) -> bool {
        self.is_quadratic
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// All values real (hence in {-1, 0, +1}).
    pub fn is_real(&self) -> bool {
        self.is_quadratic || self.is_principal()
    }
}

/// One cyclic factor of (Z/q)^*, with its discrete-log table.
struct CyclicComponent {
    pe: u64,
    order: u32,
    dlog: Vec<u32>, // index a mod pe -> exponent; only meaningful on units
}

struct UnitGroup {
    q: u64,
    components: Vec<CyclicComponent>,
}

fn primitive_root_mod_p(p: u64) -> u64 {
    // Factor p-1, then search.
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    'outer: for g in 2..p {
        for &f in &factors {
            if pow_mod(g, (p - 1) / f, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
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

fn cyclic_from_generator(pe: u64, g: u64, order: u32) -> CyclicComponent {
    let mut dlog = vec![u32::MAX; pe as usize];
    let mut x = 1u64;
    for j in 0..order {
        dlog[x as usize] = j;
        x = (x as u128 * g as u128 % pe as u128) as u64;
    }
    CyclicComponent { pe, order, dlog }
}

fn unit_group(q: u64) -> UnitGroup {
    let mut components = Vec::new();
    let mut m = q;
    let mut p = 2u64;
    let mut pfacs = Vec::new();
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pfacs.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        pfacs.push((m, 1));
    }
    for (p, e) in pfacs {
        let pe = p.pow(e);
        if p == 2 {
            match e {
                1 => {} // trivial unit group
                2 => components.push(cyclic_from_generator(4, 3, 2)),
                _ => {
                    // <-1> x <5>
                    let half = pe / 4; // order of 5
                    let mut dlog5 = vec![u32::MAX; pe as usize];
                    let mut sign = vec![u32::MAX; pe as usize];
                    let mut x = 1u64;
                    for j in 0..half {
                        dlog5[x as usize] = j as u32;
                        sign[x as usize] = 0;
                        let neg = pe - x;
                        dlog5[neg as usize] = j as u32;
                        sign[neg as usize] = 1;
                        x = x * 5 % pe;
                    }
                    components.push(CyclicComponent {
                        pe,
                        order: 2,
                        dlog: sign,
                    });
                    components.push(CyclicComponent {
                        pe,
                        order: half as u32,
                        dlog: dlog5,
                    });
                }
            }
        } else {
            let mut g = primitive_root_mod_p(p);
            if e > 1 {
                // Lift to a primitive root mod p^e.
                if pow_mod(g, p - 1, p * p) == 1 {
                    g += p;
                }
            }
            let order = (pe / p * (p - 1)) as u32;
            components.push(cyclic_from_generator(pe, g, order));
        }
    }
    UnitGroup { q, components }
}

impl UnitGroup {
    fn phi(&self) -> u64 {
        self.components.iter().map(|c| c.order as u64).product()
    }

    /// Conductor of the character with the given exponent tuple, from the
    /// order of each component restriction. Cross-checked against the
    /// brute-force `conductor_of`.
    fn conductor_from_exponents(&self, exps: &[u32]) -> u64 {
        let mut cond = 1u64;
        let mut i = 0;
        while i < self.components.len() {
            let c = &self.components[i];
            if c.pe % 2 == 0 && c.pe >= 8 {
                // Two components on the same 2^e: (sign, power-of-5).
                let s = exps[i];
                let k = exps[i + 1];
                let c5 = &self.components[i + 1];
                let local = if k == 0 {
                    if s == 0 {
                        1
                    } else {
                        4
                    }
                } else {
                    let ord5 = c5.order / gcd(k as u64, c5.order as u64) as u32;
                    4 * ord5 as u64
                };
                cond *= local;
                i += 2;
            } else {
                let k = exps[i];
                let local = if k == 0 {
                    1
                } else {
                    let ord = c.order as u64 / gcd(k as u64, c.order as u64);
                    // ord = p^a * b with b | p-1; conductor p^{a+1}
                    let p = smallest_prime_factor(c.pe);
                    if p == 2 {
                        // the mod-4 component
                        4
                    } else {
                        let mut pa = 1u64;
                        let mut o = ord;
                        while o % p == 0 {
                            pa *= p;
                            o /= p;
                        }
                        pa * p
                    }
                };
                cond *= local;
                i += 1;
            }
        }
        cond
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// All φ(q) characters mod q, principal first, in a deterministic order
/// (lexicographic over CRT exponent tuples).
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(Error::contract("modulus must be positive"));
    }
    if q > MAX_CHARACTER_MODULUS {
        return Err(Error::SizeLimit {
            what: "character modulus",
            limit: MAX_CHARACTER_MODULUS,
            got: q,
        });
    }
    if q == 1 {
        return Ok(vec![DirichletCharacter {
            modulus: 1,
            values: vec![Complex64::new(1.0, 0.0)],
            conductor: 1,
            parity: 1,
            is_primitive: true,
            is_quadratic: false,
            exponents: vec![],
        }]);
    }
    let group = unit_group(q);
    let orders: Vec<u32> = group.components.iter().map(|c| c.order).collect();
    let phi = group.phi() as usize;

    let mut chars = Vec::with_capacity(phi);
    let mut exps = vec![0u32; orders.len()];
    loop {
        chars.push(build_character(&group, &exps));
        // mixed-radix increment
        let mut i = orders.len();
        loop {
            if i == 0 {
                return Ok(chars);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

fn build_character(group: &UnitGroup, exps: &[u32]) -> DirichletCharacter {
    let q = group.q;
    let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
    let quadratic_exps = exps
        .iter()
        .zip(&group.components)
        .all(|(&k, c)| (2 * k) % c.order == 0);
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        // angle = sum over components of k_i * dlog_i(a) / d_i
        let mut frac = 0f64;
        for (c, &k) in group.components.iter().zip(exps) {
            let r = (a % c.pe) as usize;
            let j = c.dlog[r];
            debug_assert!(j != u32::MAX, "dlog missing for unit {a} mod {}", c.pe);
            frac += (k as f64) * (j as f64) / (c.order as f64);
        }
        frac = frac.fract();
        if quadratic_exps {
            // Exact ±1 for real characters.
            let half = (frac * 2.0).round() as i64;
            values[a as usize] = Complex64::new(if half % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        } else {
            values[a as usize] = Complex64::from_polar(1.0, TAU * frac);
        }
    }
    let conductor = group.conductor_from_exponents(exps);
    let parity = if q <= 2 {
        1
    } else if values[(q - 1) as usize].re > 0.0 {
        1
    } else {
        -1
    };
    let nontrivial = exps.iter().any(|&k| k != 0);
    DirichletCharacter {
        modulus: q,
        values,
        conductor,
        parity,
        is_primitive: conductor == q,
        is_quadratic: quadratic_exps && nontrivial,
        exponents: exps.to_vec(),
    }
}

/// Brute-force conductor: the smallest f | q such that χ(a) = 1 whenever
/// a ≡ 1 (mod f) and gcd(a, q) = 1. Serves as the oracle for the
/// exponent-derived conductor stored on the character.
pub fn conductor_of(chi: &DirichletCharacter) -> u64 {
    let q = chi.modulus;
    if q == 1 {
        return 1;
    }
    let mut divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    divisors.sort_unstable();
    'div: for f in divisors {
        let mut a = 1u64;
        while a < q {
            if gcd(a, q) == 1 && (chi.eval(a) - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                continue 'div;
            }
            a += f;
        }
        return f;
    }
    q
}

/// The character mod `chi.conductor()` that induces `chi`.
pub fn primitivize(chi: &DirichletCharacter) -> Result<DirichletCharacter> {
    let f = chi.conductor();
    let cands = enumerate_characters(f)?;
    'cand: for cand in cands {
        let mut a = 1u64;
        while a <= chi.modulus {
            if gcd(a, chi.modulus) == 1 && (cand.eval(a) - chi.eval(a)).norm() > 1e-9 {
                continue 'cand;
            }
            a += 1;
        }
        return Ok(cand);
    }
    Err(Error::Inconsistency(format!(
        "no character mod {f} induces the given character mod {}",
        chi.modulus
    )))
}

/// Gauss sum τ(χ) = Σ_{a mod q} χ(a) e(a/q).
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..q {
        let v = chi.values[a as usize];
        if v.re != 0.0 || v.im != 0.0 {
            acc += v * Complex64::from_polar(1.0, TAU * a as f64 / q as f64);
        }
    }
    if q == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        acc
    }
}

/// Kronecker symbol (a | b), extended Jacobi symbol.
pub fn kronecker(a: i64, b: i64) -> i64 {
    // (a | 0) = 1 iff |a| = 1
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    const TAB2: [i64; 8] = [0, 1, 0, -1, 0, -1, 0, 1]; // (2|b) via b mod 8
    let mut a = a;
    let mut b = b;
    let mut v = 0;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 {
        1
    } else {
        TAB2[(a.rem_euclid(8)) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= TAB2[(b.rem_euclid(8)) as usize];
        }
        // Quadratic reciprocity; a odd here, b odd positive.
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Is d a fundamental discriminant (d = 1 allowed as the trivial one)?
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let squarefree = |m: i64| -> bool {
        let m = m.unsigned_abs();
        let mut p = 2u64;
        while p * p <= m {
            if m % (p * p) == 0 {
                return false;
            }
            p += 1;
        }
        true
    };
    if d.rem_euclid(4) == 1 {
        squarefree(d)
    } else if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        (r == 2 || r == 3) && squarefree(m)
    } else {
        false
    }
}

/// All fundamental discriminants with 1 <= |d| <= dmax, ascending |d|.
pub fn fundamental_discriminants(dmax: u64) -> Vec<i64> {
    let mut out = Vec::new();
    for ad in 1..=dmax as i64 {
        for d in [ad, -ad] {
            if is_fundamental_discriminant(d) {
                out.push(d);
            }
        }
    }
    out
}

/// The quadratic character χ_d(n) = (d | n) as a dense character mod |d|.
/// Primitive exactly when d is a fundamental discriminant.
pub fn kronecker_character(d: i64) -> Result<DirichletCharacter> {
    if d == 0 {
        return Err(Error::contract("discriminant must be nonzero"));
    }
    let q = d.unsigned_abs();
    if q > MAX_CHARACTER_MODULUS {
        return Err(Error::SizeLimit {
            what: "character modulus",
            limit: MAX_CHARACTER_MODULUS,
            got: q,
        });
    }
    let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
    for a in 0..q {
        values[a as usize] = Complex64::new(kronecker(d, a as i64) as f64, 0.0);
    }
    let parity = if d > 0 { 1 } else { -1 }; // chi_d(-1) = sign of d
    Ok(DirichletCharacter {
        modulus: q,
        values,
        conductor: q,
        parity,
        is_primitive: is_fundamental_discriminant(d),
        is_quadratic: q > 1,
        exponents: vec![],
    })
}

/// Σ_{q <= x} 1/φ(q), exact at desk scale; compares to
/// (ζ(2)ζ(3)/ζ(6)) log x + O(1) downstream.
pub fn phi_reciprocal_sum(x: u64) -> Result<f64> {
    if x > 10_000_000 {
        return Err(Error::SizeLimit {
            what: "phi reciprocal sum range",
            limit: 10_000_000,
            got: x,
        });
    }
    if x == 0 {
        return Ok(0.0);
    }
    if x == 1 {
        return Ok(1.0);
    }
    let sieve = crate::dirichlet::build_sieve(x as usize)?;
    let phi = sieve.euler_phi();
    Ok((1..=x as usize).map(|q| 1.0 / phi[q] as f64).sum())
}

/// ζ(2)ζ(3)/ζ(6) via its Euler product ∏(1 + 1/(p(p-1))).
pub fn phi_sum_constant(prime_limit: u64) -> f64 {
    let sieve = crate::dirichlet::build_sieve(prime_limit as usize).expect("within guard");
    let mut c = 1.0;
    for &p in sieve.primes() {
        let p = p as f64;
        c *= 1.0 + 1.0 / (p * (p - 1.0));
    }
    c
}
