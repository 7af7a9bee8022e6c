//! Exact modular arithmetic on `u64` residues.
//!
//! Products go through `u128`, so every operation is exact for moduli up to
//! `u64::MAX`. Residues are always kept in their least non-negative form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    let (a, b) = (a % n, b % n);
    if a >= b {
        a - b
    } else {
        n - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn neg_mod(a: u64, n: u64) -> u64 {
    sub_mod(0, a, n)
}

/// Reduces a signed value into `[0, n)`.
#[inline]
pub fn reduce_signed(a: i128, n: u64) -> u64 {
    a.rem_euclid(n as i128) as u64
}

/// Square-and-multiply exponentiation. `k = 0` gives `1 mod n`.
pub fn mod_pow(a: u64, mut k: u64, n: u64) -> u64 {
    let mut base = a % n;
    let mut acc = 1 % n;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        k >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: returns `(g, s, t)` with `g = gcd(a, b) >= 0` and
/// `a*s + b*t = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn mod_inverse(a: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidModulus(n));
    }
    let (g, s, _) = ext_gcd((a % n) as i128, n as i128);
    if g != 1 {
        return Err(Error::NotCoprime { a, n });
    }
    Ok(reduce_signed(s, n))
}

/// Combines `x = r_i (mod m_i)` for pairwise coprime `m_i` into the unique
/// residue modulo the product.
pub fn crt_combine(system: &[(u64, u64)]) -> Result<Residue> {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, mi) in system {
        if mi == 0 {
            return Err(Error::InvalidModulus(mi));
        }
        if gcd(m, mi) != 1 {
            return Err(Error::ModuliNotCoprime { a: m, b: mi });
        }
        let product = m
            .checked_mul(mi)
            .ok_or_else(|| Error::Overflow(format!("CRT modulus {m} * {mi}")))?;
        // x + m * ((r - x) * m^-1 mod mi)
        let inv = mod_inverse(m % mi, mi).expect("coprime checked above");
        let step = mul_mod(sub_mod(r % mi, x % mi, mi), inv, mi);
        x = ((x as u128 + m as u128 * step as u128) % product as u128) as u64;
        m = product;
    }
    Ok(Residue::new(x, m))
}

/// Deterministic primality by trial division; fine for desk-scale inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization with multiplicities by trial division up to `bound`.
///
/// A leftover cofactor is accepted as prime only when it is smaller than
/// `(bound + 1)^2`, i.e. when trial division has certified it.
pub fn factor_with_multiplicity(n: u64, bound: u64) -> Result<Vec<(u64, u32)>> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d <= bound && d.saturating_mul(d) <= rest {
        if rest.is_multiple_of(d) {
            let mut k = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                k += 1;
            }
            factors.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        if d.saturating_mul(d) > rest {
            factors.push((rest, 1));
        } else {
            return Err(Error::NotFactorable {
                n,
                cofactor: rest,
                bound,
            });
        }
    }
    Ok(factors)
}

/// Factors `n` and insists every prime appears once.
pub fn factor_squarefree(n: u64, bound: u64) -> Result<Modulus> {
    let factors = factor_with_multiplicity(n, bound)?;
    if let Some(&(prime, _)) = factors.iter().find(|&&(_, k)| k > 1) {
        return Err(Error::NotSquarefree { n, prime });
    }
    Ok(Modulus {
        n,
        primes: factors.into_iter().map(|(p, _)| p).collect(),
    })
}

/// A squarefree modulus together with its (ascending) prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Modulus {
    n: u64,
    primes: Vec<u64>,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        factor_squarefree(n, DEFAULT_FACTOR_BOUND)
    }

    pub fn with_bound(n: u64, bound: u64) -> Result<Self> {
        factor_squarefree(n, bound)
    }

    /// Builds the modulus from distinct primes given in any order.
    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        let mut primes = primes.to_vec();
        primes.sort_unstable();
        let mut n = 1u64;
        for &p in &primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            n = n
                .checked_mul(p)
                .ok_or_else(|| Error::Overflow(format!("product of {primes:?}")))?;
        }
        if let Some(w) = primes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotSquarefree { n, prime: w[0] });
        }
        if n < 2 {
            return Err(Error::InvalidModulus(n));
        }
        Ok(Modulus { n, primes })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn residue(&self, value: u64) -> Residue {
        Residue::new(value, self.n)
    }

    /// `n = p1 * p2 * ...` header used in reports.
    pub fn describe(&self) -> String {
        let factors: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        format!("n = {} = {}", self.n, factors.join(" * "))
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// Canonical element of `Z_n`: `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_signed(value: i128, modulus: u64) -> Self {
        Residue {
            value: reduce_signed(value, modulus),
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, k: u64) -> Self {
        Residue::new(mod_pow(self.value, k, self.modulus), self.modulus)
    }

    pub fn inverse(self) -> Result<Self> {
        mod_inverse(self.value, self.modulus).map(|v| Residue::new(v, self.modulus))
    }

    pub fn is_idempotent(self) -> bool {
        mul_mod(self.value, self.value, self.modulus) == self.value
    }

    fn check_same(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "residues from different rings");
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check_same(rhs);
        Residue::new(add_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check_same(rhs);
        Residue::new(sub_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check_same(rhs);
        Residue::new(mul_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(neg_mod(self.value, self.modulus), self.modulus)
    }
}
