//! 2x2 matrices `[[e, f], [g, h]]` over `Z_n[x]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2Poly {
    modulus: u64,
    e: Poly,
    f: Poly,
    g: Poly,
    h: Poly,
}

impl Mat2Poly {
    pub fn new(e: Poly, f: Poly, g: Poly, h: Poly) -> Result<Self> {
        let modulus = e.modulus();
        for other in [&f, &g, &h] {
            if other.modulus() != modulus {
                return Err(Error::ModulusMismatch {
                    left: modulus,
                    right: other.modulus(),
                });
            }
        }
        Ok(Mat2Poly {
            modulus,
            e,
            f,
            g,
            h,
        })
    }

    /// Matrix with constant entries `[[e, f], [g, h]]`.
    pub fn from_constants(n: u64, [e, f, g, h]: [u64; 4]) -> Self {
        Mat2Poly {
            modulus: n,
            e: Poly::constant(e, n),
            f: Poly::constant(f, n),
            g: Poly::constant(g, n),
            h: Poly::constant(h, n),
        }
    }

    pub fn zero(n: u64) -> Self {
        Mat2Poly::from_constants(n, [0, 0, 0, 0])
    }

    pub fn identity(n: u64) -> Self {
        Mat2Poly::from_constants(n, [1, 0, 0, 1])
    }

    pub fn scalar(c: u64, n: u64) -> Self {
        Mat2Poly::from_constants(n, [c, 0, 0, c])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn e(&self) -> &Poly {
        &self.e
    }
    pub fn f(&self) -> &Poly {
        &self.f
    }
    pub fn g(&self) -> &Poly {
        &self.g
    }
    pub fn h(&self) -> &Poly {
        &self.h
    }

    pub fn entries(&self) -> [&Poly; 4] {
        [&self.e, &self.f, &self.g, &self.h]
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|p| p.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2Poly::identity(self.modulus)
    }

    pub fn is_constant(&self) -> bool {
        self.entries().iter().all(|p| p.is_constant())
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries().iter().map(|p| p.degree()).max().flatten()
    }

    fn check_same(&self, other: &Mat2Poly) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Mat2Poly) -> Result<Mat2Poly> {
        self.check_same(other)?;
        let (a, b) = (self, other);
        Ok(Mat2Poly {
            modulus: self.modulus,
            e: &(&a.e * &b.e) + &(&a.f * &b.g),
            f: &(&a.e * &b.f) + &(&a.f * &b.h),
            g: &(&a.g * &b.e) + &(&a.h * &b.g),
            h: &(&a.g * &b.f) + &(&a.h * &b.h),
        })
    }

    pub fn add(&self, other: &Mat2Poly) -> Result<Mat2Poly> {
        self.check_same(other)?;
        Ok(Mat2Poly {
            modulus: self.modulus,
            e: &self.e + &other.e,
            f: &self.f + &other.f,
            g: &self.g + &other.g,
            h: &self.h + &other.h,
        })
    }

    pub fn sub(&self, other: &Mat2Poly) -> Result<Mat2Poly> {
        self.check_same(other)?;
        Ok(Mat2Poly {
            modulus: self.modulus,
            e: &self.e - &other.e,
            f: &self.f - &other.f,
            g: &self.g - &other.g,
            h: &self.h - &other.h,
        })
    }

    pub fn scale(&self, c: u64) -> Mat2Poly {
        Mat2Poly {
            modulus: self.modulus,
            e: self.e.scale(c),
            f: self.f.scale(c),
            g: self.g.scale(c),
            h: self.h.scale(c),
        }
    }

    /// `I - A`.
    pub fn complement(&self) -> Mat2Poly {
        Mat2Poly::identity(self.modulus)
            .sub(self)
            .expect("same modulus")
    }

    /// `eh - fg`.
    pub fn det(&self) -> Poly {
        &(&self.e * &self.h) - &(&self.f * &self.g)
    }

    /// `e + h`.
    pub fn trace(&self) -> Poly {
        &self.e + &self.h
    }

    /// `A * A == A`, compared entrywise in canonical form.
    pub fn is_idempotent(&self) -> bool {
        self.mul(self).expect("same modulus") == *self
    }

    /// The four scalar equations of `A^2 = A`:
    /// `e^2 + fg = e`, `f(e + h) = f`, `g(e + h) = g`, `fg + h^2 = h`.
    pub fn idempotent_equations_hold(&self) -> bool {
        let fg = &self.f * &self.g;
        let t = self.trace();
        &(&self.e * &self.e) + &fg == self.e
            && &self.f * &t == self.f
            && &self.g * &t == self.g
            && &fg + &(&self.h * &self.h) == self.h
    }

    /// `P A P^-1` for the elementary unimodular `P = [[1, s], [0, 1]]`
    /// (upper) or `[[1, 0], [s, 1]]` (lower).
    pub fn conjugate_elementary(&self, s: &Poly, upper: bool) -> Result<Mat2Poly> {
        if s.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: s.modulus(),
            });
        }
        let n = self.modulus;
        let (one, zero) = (Poly::one(n), Poly::zero(n));
        let neg = -s;
        let (p, p_inv) = if upper {
            (
                Mat2Poly::new(one.clone(), s.clone(), zero.clone(), one.clone())?,
                Mat2Poly::new(one.clone(), neg, zero, one)?,
            )
        } else {
            (
                Mat2Poly::new(one.clone(), zero.clone(), s.clone(), one.clone())?,
                Mat2Poly::new(one.clone(), zero, neg, one)?,
            )
        };
        p.mul(self)?.mul(&p_inv)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            n: self.modulus,
            entries: [
                [self.e.coeffs().to_vec(), self.f.coeffs().to_vec()],
                [self.g.coeffs().to_vec(), self.h.coeffs().to_vec()],
            ],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("matrix file serializes")
    }

    pub fn from_json(text: &str) -> Result<Mat2Poly> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidMatrixFile(e.to_string()))?;
        file.to_matrix()
    }
}

impl fmt::Display for Mat2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e, self.f, self.g, self.h)
    }
}

/// On-disk form: `{"n": 385, "entries": [[e, f], [g, h]]}` where each entry
/// is a coefficient array in ascending degree, canonical in `[0, n)`, with
/// no trailing zeros (`[]` is the zero polynomial).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: u64,
    pub entries: [[Vec<u64>; 2]; 2],
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<Mat2Poly> {
        let n = self.n;
        if n < 2 {
            return Err(Error::InvalidMatrixFile(format!("modulus {n} is below 2")));
        }
        let mut polys = Vec::with_capacity(4);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, coeffs) in row.iter().enumerate() {
                if let Some(&c) = coeffs.iter().find(|&&c| c >= n) {
                    return Err(Error::InvalidMatrixFile(format!(
                        "entry ({i},{j}) has non-canonical coefficient {c} for n = {n}"
                    )));
                }
                if coeffs.last() == Some(&0) {
                    return Err(Error::InvalidMatrixFile(format!(
                        "entry ({i},{j}) has a trailing zero coefficient"
                    )));
                }
                polys.push(Poly::from_coeffs(n, coeffs.clone()));
            }
        }
        let mut it = polys.into_iter();
        let mut next = || it.next().expect("four entries");
        Mat2Poly::new(next(), next(), next(), next())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rank_one_example(n: u64) -> Mat2Poly {
        // [[x, x - x^2], [1, 1 - x]]
        let x = Poly::x(n);
        let one = Poly::one(n);
        Mat2Poly::new(x.clone(), &x - &(&x * &x), one.clone(), &one - &x).unwrap()
    }

    #[test]
    fn mul_examples() {
        let n = 385;
        let a = rank_one_example(n);
        assert_eq!(a.mul(&Mat2Poly::identity(n)).unwrap(), a);
        assert_eq!(Mat2Poly::zero(n).mul(&a).unwrap(), Mat2Poly::zero(n));
        let z = Poly::zero(n);
        let xm = Mat2Poly::new(Poly::x(n), z.clone(), z.clone(), z.clone()).unwrap();
        let x2 = Mat2Poly::new(Poly::monomial(1, 2, n), z.clone(), z.clone(), z).unwrap();
        assert_eq!(xm.mul(&xm).unwrap(), x2);
        assert!(a.mul(&Mat2Poly::identity(105)).is_err());
    }

    #[test]
    fn det_trace_examples() {
        let id = Mat2Poly::identity(385);
        assert_eq!(id.det(), Poly::one(385));
        assert_eq!(id.trace(), Poly::constant(2, 385));
        let a = rank_one_example(385);
        assert_eq!(a.det(), Poly::zero(385));
        assert_eq!(a.trace(), Poly::one(385));
        let s = Mat2Poly::scalar(155, 385);
        assert_eq!(s.det(), Poly::constant(155, 385));
        assert_eq!(s.trace(), Poly::constant(310, 385));
    }

    #[test]
    fn idempotency_examples() {
        assert!(Mat2Poly::identity(385).is_idempotent());
        for n in [2, 30, 105, 385, 455] {
            assert!(rank_one_example(n).is_idempotent());
        }
        assert!(Mat2Poly::from_constants(385, [1, 1, 0, 0]).is_idempotent());
        assert!(!Mat2Poly::from_constants(385, [1, 1, 1, 0]).is_idempotent());
        assert!(!Mat2Poly::from_constants(385, [1, 1, 1, 0]).idempotent_equations_hold());
    }

    #[test]
    fn mismatched_entries_rejected() {
        let r = Mat2Poly::new(Poly::one(5), Poly::one(7), Poly::one(5), Poly::one(5));
        assert_eq!(r, Err(Error::ModulusMismatch { left: 5, right: 7 }));
    }

    #[test]
    fn file_round_trip_and_validation() {
        let a = rank_one_example(385);
        let json = a.to_json();
        assert_eq!(
            json,
            r#"{"n":385,"entries":[[[0,1],[0,1,384]],[[1],[1,384]]]}"#
        );
        assert_eq!(Mat2Poly::from_json(&json).unwrap(), a);
        let bad = r#"{"n":385,"entries":[[[0,1],[0,1,385]],[[1],[1,384]]]}"#;
        assert!(matches!(
            Mat2Poly::from_json(bad),
            Err(Error::InvalidMatrixFile(_))
        ));
        let trailing = r#"{"n":385,"entries":[[[0,1,0],[]],[[1],[1,384]]]}"#;
        assert!(matches!(
            Mat2Poly::from_json(trailing),
            Err(Error::InvalidMatrixFile(_))
        ));
        assert!(Mat2Poly::from_json("{}").is_err());
    }

    fn arb_mat(n: u64) -> impl Strategy<Value = Mat2Poly> {
        let poly = move || {
            proptest::collection::vec(0..n, 0..=4).prop_map(move |c| Poly::from_coeffs(n, c))
        };
        (poly(), poly(), poly(), poly()).prop_map(|(e, f, g, h)| Mat2Poly::new(e, f, g, h).unwrap())
    }

    fn arb_pair() -> impl Strategy<Value = (Mat2Poly, Mat2Poly)> {
        prop_oneof![Just(2u64), Just(6), Just(385), Just(455)]
            .prop_flat_map(|n| (arb_mat(n), arb_mat(n)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn two_idempotency_checks_agree((a, b) in arb_pair()) {
            prop_assert_eq!(a.is_idempotent(), a.idempotent_equations_hold());
            // small moduli hit idempotents often enough to exercise the true branch
            prop_assert_eq!(b.is_idempotent(), b.idempotent_equations_hold());
        }

        #[test]
        fn det_is_multiplicative((a, b) in arb_pair()) {
            prop_assert_eq!(a.mul(&b).unwrap().det(), &a.det() * &b.det());
        }

        #[test]
        fn file_round_trip((a, _b) in arb_pair()) {
            prop_assert_eq!(Mat2Poly::from_json(&a.to_json()).unwrap(), a);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2_000))]

        // Constant 2x2 matrices over Z_2 / Z_6 are small enough that random
        // draws land on idempotents regularly.
        #[test]
        fn checks_agree_on_constants(n in prop_oneof![Just(2u64), Just(6)], e in 0u64..6, f in 0u64..6, g in 0u64..6, h in 0u64..6) {
            let a = Mat2Poly::from_constants(n, [e, f, g, h]);
            prop_assert_eq!(a.is_idempotent(), a.idempotent_equations_hold());
            if a.is_idempotent() {
                prop_assert!(a.complement().is_idempotent());
            }
        }
    }
}
