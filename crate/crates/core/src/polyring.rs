//! Dense univariate polynomials over `Z_n`.
//!
//! Coefficients are stored little-endian in degree, each in `[0, n)`, with no
//! trailing zeros. The zero polynomial is the empty sequence and has degree
//! `None`, which orders below every `Some(d)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::modarith::{add_mod, mul_mod, neg_mod, sub_mod, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn from_coeffs(modulus: u64, coeffs: Vec<u64>) -> Self {
        assert!(modulus > 0, "polynomial modulus must be positive");
        let coeffs = coeffs.into_iter().map(|c| c % modulus).collect();
        let mut p = Poly { modulus, coeffs };
        p.normalize();
        p
    }

    pub fn from_signed(modulus: u64, coeffs: &[i128]) -> Self {
        let coeffs = coeffs
            .iter()
            .map(|&c| crate::modarith::reduce_signed(c, modulus))
            .collect();
        Poly::from_coeffs(modulus, coeffs)
    }

    pub fn zero(modulus: u64) -> Self {
        Poly::from_coeffs(modulus, Vec::new())
    }

    pub fn one(modulus: u64) -> Self {
        Poly::constant(1, modulus)
    }

    pub fn constant(c: u64, modulus: u64) -> Self {
        Poly::from_coeffs(modulus, vec![c])
    }

    /// The indeterminate `x`.
    pub fn x(modulus: u64) -> Self {
        Poly::monomial(1, 1, modulus)
    }

    pub fn monomial(c: u64, degree: usize, modulus: u64) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(modulus, coeffs)
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_normalized(&self) -> bool {
        self.coeffs.last() != Some(&0) && self.coeffs.iter().all(|&c| c < self.modulus)
    }

    /// Constant term of a degree `<= 0` polynomial.
    pub fn const_value(&self) -> Result<Residue> {
        match self.degree() {
            None => Ok(Residue::new(0, self.modulus)),
            Some(0) => Ok(Residue::new(self.coeffs[0], self.modulus)),
            Some(degree) => Err(Error::NotConstant { degree }),
        }
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let n = self.modulus;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| add_mod(self.coeff(i), other.coeff(i), n))
            .collect();
        Ok(Poly::from_coeffs(n, coeffs))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let n = self.modulus;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| sub_mod(self.coeff(i), other.coeff(i), n))
            .collect();
        Ok(Poly::from_coeffs(n, coeffs))
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let n = self.modulus;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(n));
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = add_mod(coeffs[i + j], mul_mod(a, b, n), n);
            }
        }
        Ok(Poly::from_coeffs(n, coeffs))
    }

    pub fn scale(&self, c: u64) -> Poly {
        let n = self.modulus;
        Poly::from_coeffs(n, self.coeffs.iter().map(|&a| mul_mod(a, c, n)).collect())
    }

    pub fn checked_scale(&self, c: Residue) -> Result<Poly> {
        if c.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: c.modulus(),
                right: self.modulus,
            });
        }
        Ok(self.scale(c.value()))
    }

    pub fn add_constant(&self, c: u64) -> Poly {
        self + &Poly::constant(c, self.modulus)
    }

    /// True when every coefficient, read as an integer in `[0, n)`, is a
    /// multiple of `d`. For `d | n` this is divisibility by `d` in `Z_n[x]`.
    pub fn divisible_by(&self, d: u64) -> bool {
        d != 0 && self.coeffs.iter().all(|&c| c % d == 0)
    }

    /// Coefficientwise exact quotient `self / d`, or `None` when some
    /// coefficient is not a multiple of `d`. The quotient `k` satisfies
    /// `d * k = self` in `Z_n[x]`.
    pub fn div_exact(&self, d: u64) -> Option<Poly> {
        if !self.divisible_by(d) {
            return None;
        }
        Some(Poly::from_coeffs(
            self.modulus,
            self.coeffs.iter().map(|&c| c / d).collect(),
        ))
    }

    /// Reduces every coefficient modulo `m` (still read as an element of `Z_n`).
    pub fn reduce_coeffs(&self, m: u64) -> Poly {
        Poly::from_coeffs(self.modulus, self.coeffs.iter().map(|&c| c % m).collect())
    }

    /// Applies `f` to every coefficient and renormalizes.
    pub fn map_coeffs(&self, f: impl Fn(u64) -> u64) -> Poly {
        Poly::from_coeffs(self.modulus, self.coeffs.iter().map(|&c| f(c)).collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        let n = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, n), c, n))
    }

    /// Parses `c0 + c1*x + c2*x^2 + ...`. Terms may appear in any order,
    /// repeat, and be joined with `-`; whitespace is free between tokens.
    pub fn parse(text: &str, modulus: u64) -> Result<Poly> {
        parse::parse_poly(text, modulus)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

// Operator forms panic on mismatched moduli; use the checked_* methods when
// operands come from different sources.
impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial moduli differ")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial moduli differ")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial moduli differ")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let n = self.modulus;
        self.map_coeffs(|c| neg_mod(c, n))
    }
}

mod parse {
    use super::Poly;
    use crate::error::{Error, Result};
    use crate::modarith::{add_mod, sub_mod};

    struct Cursor<'a> {
        chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    }

    impl Cursor<'_> {
        fn skip_ws(&mut self) {
            while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
                self.chars.next();
            }
        }

        fn peek(&mut self) -> Option<char> {
            self.skip_ws();
            self.chars.peek().map(|&(_, c)| c)
        }

        fn eat(&mut self, want: char) -> bool {
            if self.peek() == Some(want) {
                self.chars.next();
                true
            } else {
                false
            }
        }

        fn number(&mut self) -> Result<Option<u128>> {
            self.skip_ws();
            let mut digits = String::new();
            while let Some(&(_, c)) = self.chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                digits.push(c);
                self.chars.next();
            }
            if digits.is_empty() {
                return Ok(None);
            }
            digits
                .parse::<u128>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("number too large: {digits}")))
        }
    }

    pub(super) fn parse_poly(text: &str, n: u64) -> Result<Poly> {
        if n == 0 {
            return Err(Error::InvalidModulus(0));
        }
        let mut cur = Cursor {
            chars: text.char_indices().peekable(),
        };
        let mut coeffs: Vec<u64> = Vec::new();
        let mut negative = cur.eat('-');
        if !negative {
            cur.eat('+');
        }
        loop {
            let (c, k) = term(&mut cur, n)?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] = if negative {
                sub_mod(coeffs[k], c, n)
            } else {
                add_mod(coeffs[k], c, n)
            };
            match cur.peek() {
                None => break,
                Some('+') => {
                    cur.chars.next();
                    negative = false;
                }
                Some('-') => {
                    cur.chars.next();
                    negative = true;
                }
                Some(other) => {
                    return Err(Error::Parse(format!(
                        "unexpected '{other}' in polynomial {text:?}"
                    )))
                }
            }
        }
        Ok(Poly::from_coeffs(n, coeffs))
    }

    /// `c`, `c*x`, `c*x^k`, `x`, `x^k` (also `cx^k` without the star).
    fn term(cur: &mut Cursor<'_>, n: u64) -> Result<(u64, usize)> {
        let coeff = cur.number()?.map(|c| (c % n as u128) as u64);
        let has_star = cur.eat('*');
        if cur.eat('x') {
            let degree = if cur.eat('^') {
                let k = cur
                    .number()?
                    .ok_or_else(|| Error::Parse("missing exponent after '^'".into()))?;
                usize::try_from(k)
                    .ok()
                    .filter(|&k| k <= 1 << 20)
                    .ok_or_else(|| Error::Parse(format!("exponent {k} too large")))?
            } else {
                1
            };
            Ok((coeff.unwrap_or(1 % n), degree))
        } else if has_star {
            Err(Error::Parse("expected 'x' after '*'".into()))
        } else {
            coeff
                .map(|c| (c, 0))
                .ok_or_else(|| Error::Parse("expected a coefficient or 'x'".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u64, c: &[u64]) -> Poly {
        Poly::from_coeffs(n, c.to_vec())
    }

    #[test]
    fn add_examples() {
        let n = 105;
        assert_eq!(&p(n, &[1, 1]) + &p(n, &[0, n - 1]), Poly::one(n));
        let a = p(n, &[3, 0, 4]);
        assert_eq!(&a + &Poly::zero(n), a);
        assert_eq!(&p(n, &[0, 70]) + &p(n, &[0, 70]), p(n, &[0, 35]));
    }

    #[test]
    fn mul_examples() {
        let n = 105;
        assert_eq!(&p(n, &[0, 15]) * &p(n, &[0, 7]), Poly::zero(n));
        let a = p(n, &[3, 0, 4]);
        assert_eq!(&a * &Poly::one(n), a);
        assert_eq!(&p(n, &[1, 1]) * &p(n, &[1, 1]), p(n, &[1, 2, 1]));
    }

    #[test]
    fn sub_and_scale_examples() {
        let n = 105;
        let a = p(n, &[3, 0, 4]);
        assert_eq!(&a - &a, Poly::zero(n));
        assert_eq!(a.scale(0), Poly::zero(n));
        assert_eq!(p(n, &[7, 1]).scale(15), p(n, &[0, 15]));
        assert_eq!(
            p(n, &[7, 1]).checked_scale(Residue::new(15, 105)).unwrap(),
            p(n, &[0, 15])
        );
    }

    #[test]
    fn modulus_mismatch() {
        let err = p(105, &[1]).checked_add(&p(385, &[1])).unwrap_err();
        assert_eq!(
            err,
            Error::ModulusMismatch {
                left: 105,
                right: 385
            }
        );
        assert!(p(105, &[1]).checked_mul(&p(7, &[1])).is_err());
        assert!(p(105, &[1]).checked_sub(&p(7, &[1])).is_err());
    }

    #[test]
    fn const_value_examples() {
        assert_eq!(p(105, &[36]).const_value().unwrap().value(), 36);
        assert_eq!(Poly::zero(105).const_value().unwrap().value(), 0);
        assert_eq!(
            p(105, &[1, 1]).const_value(),
            Err(Error::NotConstant { degree: 1 })
        );
    }

    #[test]
    fn zero_has_lowest_degree() {
        assert_eq!(Poly::zero(5).degree(), None);
        assert!(Poly::zero(5).degree() < Poly::one(5).degree());
        assert_eq!(p(5, &[0, 0, 3, 0, 0]).coeffs(), &[0, 0, 3]);
    }

    #[test]
    fn divisibility() {
        let a = p(105, &[15, 30, 0, 45]);
        assert!(a.divisible_by(15));
        assert_eq!(a.div_exact(15).unwrap(), p(105, &[1, 2, 0, 3]));
        assert!(a.div_exact(7).is_none());
        assert!(Poly::zero(105).divisible_by(7));
    }

    #[test]
    fn render_and_parse() {
        let a = p(385, &[0, 1, 384]);
        assert_eq!(a.to_string(), "1*x + 384*x^2");
        assert_eq!(Poly::parse("1*x + 384*x^2", 385).unwrap(), a);
        assert_eq!(Poly::parse("x - x^2", 385).unwrap(), a);
        assert_eq!(Poly::parse("  x-   x ^ 2 ", 385).unwrap(), a);
        assert_eq!(Poly::parse("-1", 385).unwrap(), p(385, &[384]));
        assert_eq!(
            Poly::parse("3 + 2x + x^2 + 4", 385).unwrap(),
            p(385, &[7, 2, 1])
        );
        assert_eq!(Poly::parse("0", 385).unwrap(), Poly::zero(385));
        assert_eq!(Poly::zero(385).to_string(), "0");
        assert!(Poly::parse("", 385).is_err());
        assert!(Poly::parse("3 +", 385).is_err());
        assert!(Poly::parse("2*", 385).is_err());
        assert!(Poly::parse("x^", 385).is_err());
        assert!(Poly::parse("y", 385).is_err());
        assert!(Poly::parse("1 2", 385).is_err());
    }

    fn arb_poly(n: u64) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(0..n, 0..=7).prop_map(move |c| Poly::from_coeffs(n, c))
    }

    fn arb_triple() -> impl Strategy<Value = (Poly, Poly, Poly)> {
        prop_oneof![Just(105u64), Just(385), Just(2), Just(455), Just(30)]
            .prop_flat_map(|n| (arb_poly(n), arb_poly(n), arb_poly(n)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            prop_assert_eq!(&a + &(-&a), Poly::zero(a.modulus()));
        }

        #[test]
        fn degree_laws((a, b, _c) in arb_triple()) {
            prop_assert!((&a + &b).degree() <= a.degree().max(b.degree()));
            let prod = (&a * &b).degree();
            match (a.degree(), b.degree()) {
                (Some(da), Some(db)) => prop_assert!(prod <= Some(da + db)),
                _ => prop_assert_eq!(prod, None),
            }
        }

        #[test]
        fn normalization_is_idempotent((a, _b, _c) in arb_triple()) {
            prop_assert!(a.is_normalized());
            prop_assert_eq!(Poly::from_coeffs(a.modulus(), a.coeffs().to_vec()), a.clone());
        }

        #[test]
        fn render_parse_round_trip((a, _b, _c) in arb_triple()) {
            prop_assert_eq!(Poly::parse(&a.to_string(), a.modulus()).unwrap(), a);
        }
    }
}
