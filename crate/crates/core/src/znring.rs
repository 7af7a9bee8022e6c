//! Idempotents of `Z_n` for squarefree `n`.
//!
//! An idempotent is fixed by choosing `0` or `1` modulo each prime, so there
//! are exactly `2^m` of them for `m` prime factors. [`enumerate_idempotents`]
//! builds them by CRT; [`euler_idempotent`] evaluates the Euler-exponent
//! closed forms available when `n = pqr`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{crt_combine, factor_with_multiplicity, mod_pow, mul_mod, Modulus, Residue};
use crate::polyring::Poly;

/// Per-prime choice of `0` or `1`, ordered like `Modulus::primes`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdempotentPattern {
    bits: Vec<bool>,
}

impl IdempotentPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        IdempotentPattern { bits }
    }

    /// Parses digits such as `[0, 1, 1]`; anything but 0/1 is rejected.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        digits
            .iter()
            .map(|&d| match d {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Parse(format!("pattern digit {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(IdempotentPattern::new)
    }

    /// Pattern of an idempotent `y`: its residue modulo each prime.
    pub fn of(m: &Modulus, y: u64) -> Self {
        IdempotentPattern::new(m.primes().iter().map(|&p| y % p == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// All `2^k` patterns of length `k`, in binary counting order with the
    /// first prime as the most significant position.
    pub fn all(k: usize) -> impl Iterator<Item = IdempotentPattern> {
        (0u64..1 << k).map(move |code| {
            IdempotentPattern::new((0..k).map(|i| code >> (k - 1 - i) & 1 == 1).collect())
        })
    }

    fn check_len(&self, m: &Modulus) -> Result<()> {
        if self.len() != m.prime_count() {
            return Err(Error::WrongPrimeCount {
                expected: m.prime_count(),
                found: self.len(),
            });
        }
        Ok(())
    }

    pub fn to_digit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// The CRT value of a pattern.
pub fn pattern_value(m: &Modulus, pattern: &IdempotentPattern) -> Result<Residue> {
    pattern.check_len(m)?;
    let system: Vec<(u64, u64)> = m
        .primes()
        .iter()
        .zip(pattern.bits())
        .map(|(&p, &b)| (b as u64, p))
        .collect();
    crt_combine(&system)
}

/// All idempotents of `Z_n`, ascending.
pub fn enumerate_idempotents(m: &Modulus) -> Vec<Residue> {
    let mut out: Vec<Residue> = IdempotentPattern::all(m.prime_count())
        .map(|pat| pattern_value(m, &pat).expect("primes of a Modulus are pairwise coprime"))
        .collect();
    out.sort();
    out
}

pub fn is_idempotent(y: u64, n: u64) -> bool {
    mul_mod(y, y, n) == y % n
}

/// Exhaustive scan of `y^2 = y (mod n)`; independent of the CRT route.
pub fn scan_idempotents(n: u64) -> Vec<u64> {
    (0..n).filter(|&y| is_idempotent(y, n)).collect()
}

fn three_primes(m: &Modulus) -> Result<(u64, u64, u64)> {
    match *m.primes() {
        [p, q, r] => Ok((p, q, r)),
        _ => Err(Error::WrongPrimeCount {
            expected: 3,
            found: m.prime_count(),
        }),
    }
}

/// Euler closed form for the idempotent with the given pattern, `n = pqr`.
///
/// A single `1` at prime `s` with the other primes `a, b` gives `(ab)^(s-1)`;
/// a single `0` at prime `z` gives `z^((a-1)(b-1))`.
pub fn euler_idempotent(m: &Modulus, pattern: &IdempotentPattern) -> Result<Residue> {
    let (p, q, r) = three_primes(m)?;
    pattern.check_len(m)?;
    let primes = [p, q, r];
    let n = m.n();
    let ones: Vec<usize> = (0..3).filter(|&i| pattern.bits()[i]).collect();
    let value = match ones.len() {
        0 => 0,
        3 => 1 % n,
        1 => {
            let s = primes[ones[0]];
            let base: u64 = primes.iter().filter(|&&x| x != s).product();
            mod_pow(base, s - 1, n)
        }
        _ => {
            let zero = (0..3).find(|i| !pattern.bits()[*i]).expect("one zero bit");
            let z = primes[zero];
            let exp: u64 = primes.iter().filter(|&&x| x != z).map(|&x| x - 1).product();
            mod_pow(z, exp, n)
        }
    };
    Ok(Residue::new(value, n))
}

/// One row of the closed-form cross-check for `n = pqr`.
#[derive(Debug, Clone, Serialize)]
pub struct EulerCheckRow {
    pub pattern: String,
    pub expression: &'static str,
    pub closed_form: u64,
    pub crt: u64,
    /// Alternative exponent printed for the same case, if any.
    pub alternate_expression: Option<&'static str>,
    pub alternate_value: Option<u64>,
}

impl EulerCheckRow {
    pub fn closed_form_matches(&self) -> bool {
        self.closed_form == self.crt
    }

    pub fn alternate_matches(&self) -> Option<bool> {
        self.alternate_value.map(|v| v == self.crt)
    }
}

/// Closed forms in binary pattern order `(p, q, r)`.
const EXPRESSIONS: [&str; 8] = [
    "0",
    "(pq)^(r-1)",
    "(pr)^(q-1)",
    "p^((q-1)(r-1))",
    "(qr)^(p-1)",
    "q^((p-1)(r-1))",
    "r^((p-1)(q-1))",
    "1",
];

/// Compares every closed form with the CRT value.
///
/// The patterns `(0,1,0)` and `(1,0,0)` also carry the variants
/// `(pr)^(r-1)` and `(qr)^(r-1)`, which appear in some derivations; their
/// agreement is recorded rather than enforced.
pub fn euler_cross_check(m: &Modulus) -> Result<Vec<EulerCheckRow>> {
    let (p, q, r) = three_primes(m)?;
    let n = m.n();
    IdempotentPattern::all(3)
        .enumerate()
        .map(|(i, pat)| {
            let closed_form = euler_idempotent(m, &pat)?.value();
            let crt = pattern_value(m, &pat)?.value();
            let (alternate_expression, alternate_value) = match i {
                2 => (Some("(pr)^(r-1)"), Some(mod_pow(p * r, r - 1, n))),
                4 => (Some("(qr)^(r-1)"), Some(mod_pow(q * r, r - 1, n))),
                _ => (None, None),
            };
            Ok(EulerCheckRow {
                pattern: pat.to_digit_string(),
                expression: EXPRESSIONS[i],
                closed_form,
                crt,
                alternate_expression,
                alternate_value,
            })
        })
        .collect()
}

/// Whether `Z_n` has no nonzero nilpotents, i.e. `n` is squarefree.
pub fn is_reduced(n: u64) -> Result<bool> {
    is_reduced_with_bound(n, crate::modarith::DEFAULT_FACTOR_BOUND)
}

pub fn is_reduced_with_bound(n: u64, bound: u64) -> Result<bool> {
    Ok(factor_with_multiplicity(n, bound)?
        .iter()
        .all(|&(_, k)| k == 1))
}

/// Every `u` in `Z_n[x]` of degree `<= max_degree` with `u * u = u`, found
/// by visiting all `n^(max_degree + 1)` coefficient vectors.
pub fn poly_idempotents_bruteforce(
    m: &Modulus,
    max_degree: usize,
    budget: u64,
) -> Result<Vec<Poly>> {
    let n = m.n();
    let width = u32::try_from(max_degree + 1).unwrap_or(u32::MAX);
    let states = n
        .checked_pow(width)
        .filter(|&s| s <= budget)
        .ok_or_else(|| Error::BudgetExceeded {
            states: format!("{n}^{width}"),
            budget,
        })?;
    let mut found: Vec<Poly> = (0..states)
        .into_par_iter()
        .filter_map(|code| {
            let mut coeffs = Vec::with_capacity(max_degree + 1);
            let mut rest = code;
            for _ in 0..=max_degree {
                coeffs.push(rest % n);
                rest /= n;
            }
            let u = Poly::from_coeffs(n, coeffs);
            (&u * &u == u).then_some(u)
        })
        .collect();
    found.sort();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(v: &[Residue]) -> Vec<u64> {
        v.iter().map(|r| r.value()).collect()
    }

    #[test]
    fn idempotents_of_105_and_385() {
        let m = Modulus::new(105).unwrap();
        assert_eq!(
            values(&enumerate_idempotents(&m)),
            vec![0, 1, 15, 21, 36, 70, 85, 91]
        );
        let m = Modulus::new(385).unwrap();
        assert_eq!(
            values(&enumerate_idempotents(&m)),
            vec![0, 1, 56, 155, 176, 210, 231, 330]
        );
        // independent scan agrees
        assert_eq!(
            scan_idempotents(385),
            vec![0, 1, 56, 155, 176, 210, 231, 330]
        );
    }

    #[test]
    fn prime_modulus_has_trivial_idempotents() {
        for p in [2, 3, 7, 101] {
            let m = Modulus::new(p).unwrap();
            assert_eq!(values(&enumerate_idempotents(&m)), vec![0, 1]);
        }
    }

    #[test]
    fn euler_examples() {
        let m = Modulus::new(105).unwrap();
        let pat = IdempotentPattern::from_digits(&[0, 0, 1]).unwrap();
        assert_eq!(euler_idempotent(&m, &pat).unwrap().value(), 15);
        let pat = IdempotentPattern::from_digits(&[1, 1, 1]).unwrap();
        assert_eq!(euler_idempotent(&m, &pat).unwrap().value(), 1);
        let m = Modulus::new(385).unwrap();
        let pat = IdempotentPattern::from_digits(&[0, 1, 1]).unwrap();
        assert_eq!(euler_idempotent(&m, &pat).unwrap().value(), 155);
        assert_eq!(pattern_value(&m, &pat).unwrap().value(), 155);
    }

    #[test]
    fn euler_values_of_105() {
        // 15^6, 21^4, 35^2, 3^24, 5^12, 7^8
        let m = Modulus::new(105).unwrap();
        let rows = euler_cross_check(&m).unwrap();
        let got: Vec<(String, u64)> = rows
            .iter()
            .map(|r| (r.pattern.clone(), r.closed_form))
            .collect();
        let want = [
            ("000", 0),
            ("001", 15),
            ("010", 21),
            ("011", 36),
            ("100", 70),
            ("101", 85),
            ("110", 91),
            ("111", 1),
        ];
        for ((gp, gv), (wp, wv)) in got.iter().zip(want) {
            assert_eq!((gp.as_str(), *gv), (wp, wv));
        }
        assert!(rows.iter().all(EulerCheckRow::closed_form_matches));
    }

    #[test]
    fn euler_wrong_prime_count() {
        let m = Modulus::new(35).unwrap();
        let pat = IdempotentPattern::from_digits(&[0, 1]).unwrap();
        assert_eq!(
            euler_idempotent(&m, &pat),
            Err(Error::WrongPrimeCount {
                expected: 3,
                found: 2
            })
        );
        let m = Modulus::new(105).unwrap();
        assert!(matches!(
            euler_idempotent(&m, &pat),
            Err(Error::WrongPrimeCount {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn reducedness() {
        assert_eq!(is_reduced(105), Ok(true));
        assert_eq!(is_reduced(4), Ok(false));
        assert_eq!(is_reduced(12), Ok(false));
        assert!(matches!(
            is_reduced_with_bound(1009 * 1013, 10),
            Err(Error::NotFactorable { .. })
        ));
        // 6 is a nonzero nilpotent mod 12
        assert_eq!(mul_mod(6, 6, 12), 0);
    }

    #[test]
    fn poly_bruteforce_small() {
        let m = Modulus::new(7).unwrap();
        let found = poly_idempotents_bruteforce(&m, 1, 1000).unwrap();
        assert_eq!(found, vec![Poly::zero(7), Poly::one(7)]);

        let m = Modulus::new(105).unwrap();
        let found = poly_idempotents_bruteforce(&m, 0, 1000).unwrap();
        let consts: Vec<u64> = found
            .iter()
            .map(|u| u.const_value().unwrap().value())
            .collect();
        let mut expected = values(&enumerate_idempotents(&m));
        expected.sort();
        let mut consts_sorted = consts.clone();
        consts_sorted.sort();
        assert_eq!(consts_sorted, expected);

        assert!(matches!(
            poly_idempotents_bruteforce(&m, 2, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn complement_closure() {
        for n in [30, 105, 385, 2 * 3 * 5 * 7 * 11] {
            let m = Modulus::new(n).unwrap();
            let list = values(&enumerate_idempotents(&m));
            for &y in &list {
                assert!(list.contains(&((n + 1 - y) % n)));
            }
        }
    }

    #[test]
    fn pattern_round_trip() {
        let m = Modulus::new(455).unwrap();
        for pat in IdempotentPattern::all(3) {
            let y = pattern_value(&m, &pat).unwrap().value();
            assert_eq!(IdempotentPattern::of(&m, y), pat);
        }
    }
}
