//! Classification of idempotent 2x2 matrices over `Z_pqr[x]`, for distinct
//! primes `p, q, r > 3`.
//!
//! Every idempotent has a constant idempotent determinant `d` and a constant
//! trace `t` with `t^2 = t + 2d`. For each realizable `(d, t)` there is one
//! structural template:
//!
//! | family              | det             | trace                      | shape                                           |
//! |---------------------|-----------------|----------------------------|-------------------------------------------------|
//! | `Det0General`       | 0               | 1                          | `[[e, f], [g, 1-e]]`, `e(1-e) = fg`             |
//! | `Det0Scaled`        | 0               | `I`                        | `I * [[e, f], [g, 1-e]]`, `e(1-e) - fg = J k`   |
//! | `DetPairScalar`     | `(pq)^(r-1)`    | `2d`                       | `diag(d, d)`                                    |
//! | `DetPairShift`      | `(pq)^(r-1)`    | `d + 1`                    | `[[1+re, rf], [rg, d-re]]`                      |
//! | `DetPairMixed`      | `(pq)^(r-1)`    | `(2-p^(q-1))d + p^(q-1)`   | `[[u+pr e, pr f], [pr g, t-u-pr e]]`            |
//! | `DetSingleScalar`   | `p^((q-1)(r-1))`| `2d`                       | `diag(d, d)`                                    |
//! | `DetSingleShift`    | `p^((q-1)(r-1))`| `d + 1`                    | `[[1+qr e, qr f], [qr g, d-qr e]]`              |
//!
//! The remaining determinant values are reached by permuting prime roles.
//! Matching recovers the template parameters and the divisibility witness
//! `k(x)` by exact coefficientwise division.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mat2::Mat2Poly;
use crate::modarith::{crt_combine, gcd, mod_inverse, mod_pow, mul_mod, Modulus};
use crate::polyring::Poly;
use crate::quadcong::{lemma_formula_solutions, trace_candidates, FormulaFamily};
use crate::znring::enumerate_idempotents;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Det0General,
    Det0Scaled,
    DetPairScalar,
    DetPairShift,
    DetPairMixed,
    DetSingleScalar,
    DetSingleShift,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Det0General,
        Family::Det0Scaled,
        Family::DetPairScalar,
        Family::DetPairShift,
        Family::DetPairMixed,
        Family::DetSingleScalar,
        Family::DetSingleShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Det0General => "det0-general",
            Family::Det0Scaled => "det0-scaled",
            Family::DetPairScalar => "det-pair-scalar",
            Family::DetPairShift => "det-pair-shift",
            Family::DetPairMixed => "det-pair-mixed",
            Family::DetSingleScalar => "det-single-scalar",
            Family::DetSingleShift => "det-single-shift",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Assignment of the modulus' primes to the template roles `p, q, r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeRoles {
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

impl PrimeRoles {
    pub fn new(p: u64, q: u64, r: u64) -> Self {
        PrimeRoles { p, q, r }
    }

    fn check(&self, m: &Modulus) -> Result<()> {
        let mut given = [self.p, self.q, self.r];
        given.sort_unstable();
        if given != m.primes() {
            return Err(Error::InconsistentLabel(format!(
                "roles ({}, {}, {}) are not a permutation of {:?}",
                self.p,
                self.q,
                self.r,
                m.primes()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PrimeRoles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={},q={},r={}", self.p, self.q, self.r)
    }
}

/// Returns the sorted primes if `m` is within the classification's scope.
pub fn check_scope(m: &Modulus) -> Result<(u64, u64, u64)> {
    match *m.primes() {
        [p, q, r] if p > 3 => Ok((p, q, r)),
        _ => Err(Error::PrimesOutOfScope {
            primes: m.primes().to_vec(),
        }),
    }
}

/// Scale/annihilator pairs for the scaled rank-one family, in the fixed
/// positional order `I_i <-> J_i`:
/// `(pq)^(r-1) <-> r`, `(pr)^(q-1) <-> q`, `(qr)^(p-1) <-> p`,
/// `p^((q-1)(r-1)) <-> qr`, `q^((p-1)(r-1)) <-> pr`, `r^((p-1)(q-1)) <-> pq`.
pub fn scale_annihilator_pairs(m: &Modulus) -> Result<[(u64, u64); 6]> {
    let (p, q, r) = check_scope(m)?;
    let n = m.n();
    Ok([
        (mod_pow(p * q, r - 1, n), r),
        (mod_pow(p * r, q - 1, n), q),
        (mod_pow(q * r, p - 1, n), p),
        (mod_pow(p, (q - 1) * (r - 1), n), q * r),
        (mod_pow(q, (p - 1) * (r - 1), n), p * r),
        (mod_pow(r, (p - 1) * (q - 1), n), p * q),
    ])
}

/// One of the class templates together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassLabel {
    pub family: Family,
    pub roles: PrimeRoles,
    /// `I`, for `Det0Scaled`.
    pub scale: Option<u64>,
    /// `J`, for `Det0Scaled`.
    pub annihilator: Option<u64>,
    pub det: u64,
    pub trace: u64,
    /// `u = 0 (mod p)`, `u = 1 (mod r)`, canonical in `[0, pr)`; `DetPairMixed` only.
    pub u: Option<u64>,
}

impl ClassLabel {
    /// Builds a label from its family and roles, deriving every other field.
    ///
    /// Role conventions: for the `DetPair*` families `r` is the prime where
    /// the determinant is 1, and for `DetPairMixed` `p` is the prime where
    /// the trace vanishes. For `DetSingle*` families `p` is the prime where
    /// the determinant vanishes. `Det0*` families ignore roles and use the
    /// ascending order. `scale` is required for `Det0Scaled` only.
    pub fn new(m: &Modulus, family: Family, roles: PrimeRoles, scale: Option<u64>) -> Result<Self> {
        let (sp, sq, sr) = check_scope(m)?;
        roles.check(m)?;
        let n = m.n();
        let PrimeRoles { p, q, r } = roles;
        let sorted = PrimeRoles::new(sp, sq, sr);
        let label = |family, roles, det, trace| ClassLabel {
            family,
            roles,
            scale: None,
            annihilator: None,
            det,
            trace,
            u: None,
        };
        if family != Family::Det0Scaled && scale.is_some() {
            return Err(Error::InconsistentLabel(format!(
                "{family} takes no scale parameter"
            )));
        }
        Ok(match family {
            Family::Det0General => label(family, sorted, 0, 1 % n),
            Family::Det0Scaled => {
                let i = scale.ok_or_else(|| {
                    Error::InconsistentLabel("det0-scaled needs a scale I".into())
                })?;
                let (_, j) = scale_annihilator_pairs(m)?
                    .into_iter()
                    .find(|&(s, _)| s == i)
                    .ok_or_else(|| {
                        Error::InconsistentLabel(format!(
                            "{i} is not a nontrivial idempotent scale of Z_{n}"
                        ))
                    })?;
                ClassLabel {
                    scale: Some(i),
                    annihilator: Some(j),
                    ..label(family, sorted, 0, i)
                }
            }
            Family::DetPairScalar | Family::DetPairShift | Family::DetPairMixed => {
                let d = mod_pow(p * q, r - 1, n);
                let (roles, trace, u) = match family {
                    Family::DetPairScalar => (ordered_pair(p, q, r), mul_mod(2, d, n), None),
                    Family::DetPairShift => (ordered_pair(p, q, r), (d + 1) % n, None),
                    _ => {
                        let pq1 = mod_pow(p, q - 1, n);
                        // (2 - p^(q-1)) d + p^(q-1)
                        let trace = (mul_mod((2 + n - pq1) % n, d, n) + pq1) % n;
                        let u = crt_combine(&[(0, p), (1, r)])?.value();
                        (roles, trace, Some(u))
                    }
                };
                ClassLabel {
                    u,
                    ..label(family, roles, d, trace)
                }
            }
            Family::DetSingleScalar | Family::DetSingleShift => {
                let d = mod_pow(p, (q - 1) * (r - 1), n);
                let roles = PrimeRoles::new(p, q.min(r), q.max(r));
                let trace = if family == Family::DetSingleScalar {
                    mul_mod(2, d, n)
                } else {
                    (d + 1) % n
                };
                label(family, roles, d, trace)
            }
        })
    }

    /// Like [`ClassLabel::new`] for `Det0Scaled`, but also checks a
    /// caller-supplied annihilator against the positional pairing.
    pub fn det0_scaled_with(m: &Modulus, scale: u64, annihilator: u64) -> Result<Self> {
        let label = ClassLabel::new(m, Family::Det0Scaled, sorted_roles(m)?, Some(scale))?;
        if label.annihilator != Some(annihilator) {
            return Err(Error::InconsistentLabel(format!(
                "scale {scale} pairs with annihilator {}, not {annihilator}",
                label.annihilator.unwrap_or(0)
            )));
        }
        Ok(label)
    }

    /// Every label for `m`: 1 general, 6 scaled, 12 pair and 6 single.
    pub fn all(m: &Modulus) -> Result<Vec<ClassLabel>> {
        let (p, q, r) = check_scope(m)?;
        let roles = sorted_roles(m)?;
        let mut out = vec![ClassLabel::new(m, Family::Det0General, roles, None)?];
        for (i, _) in scale_annihilator_pairs(m)? {
            out.push(ClassLabel::new(m, Family::Det0Scaled, roles, Some(i))?);
        }
        let primes = [p, q, r];
        for &top in &primes {
            let rest: Vec<u64> = primes.iter().copied().filter(|&x| x != top).collect();
            let (a, b) = (rest[0], rest[1]);
            // `top` is the det-one prime for pair families
            out.push(ClassLabel::new(
                m,
                Family::DetPairScalar,
                PrimeRoles::new(a, b, top),
                None,
            )?);
            out.push(ClassLabel::new(
                m,
                Family::DetPairShift,
                PrimeRoles::new(a, b, top),
                None,
            )?);
            out.push(ClassLabel::new(
                m,
                Family::DetPairMixed,
                PrimeRoles::new(a, b, top),
                None,
            )?);
            out.push(ClassLabel::new(
                m,
                Family::DetPairMixed,
                PrimeRoles::new(b, a, top),
                None,
            )?);
            // `top` is the det-zero prime for single families
            out.push(ClassLabel::new(
                m,
                Family::DetSingleScalar,
                PrimeRoles::new(top, a, b),
                None,
            )?);
            out.push(ClassLabel::new(
                m,
                Family::DetSingleShift,
                PrimeRoles::new(top, a, b),
                None,
            )?);
        }
        out.sort();
        Ok(out)
    }

    /// Recomputes the label from its family, roles and scale and checks that
    /// every stored field agrees.
    pub fn validate(&self, m: &Modulus) -> Result<()> {
        let fresh = ClassLabel::new(m, self.family, self.roles, self.scale)?;
        if fresh != *self {
            return Err(Error::InconsistentLabel(format!(
                "{} does not match its derived form {}",
                self, fresh
            )));
        }
        Ok(())
    }

    /// Multiplier of the off-diagonal entries in the shift and mixed shapes.
    pub fn stride(&self) -> Option<u64> {
        let PrimeRoles { p, q, r } = self.roles;
        match self.family {
            Family::DetPairShift => Some(r),
            Family::DetSingleShift => Some(q * r),
            Family::DetPairMixed => Some(p * r),
            _ => None,
        }
    }
}

fn ordered_pair(p: u64, q: u64, r: u64) -> PrimeRoles {
    PrimeRoles::new(p.min(q), p.max(q), r)
}

fn sorted_roles(m: &Modulus) -> Result<PrimeRoles> {
    let (p, q, r) = check_scope(m)?;
    Ok(PrimeRoles::new(p, q, r))
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Det0General => write!(f, "{}", self.family),
            Family::Det0Scaled => write!(
                f,
                "{}(I={},J={})",
                self.family,
                self.scale.unwrap_or(0),
                self.annihilator.unwrap_or(0)
            ),
            _ => write!(f, "{}({})", self.family, self.roles),
        }
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(serializer)
    }
}

/// Template parameters recovered from a matched matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    General { e: Poly, f: Poly, g: Poly },
    Scaled { e: Poly, f: Poly, g: Poly, k: Poly },
    Scalar,
    Shift { e: Poly, f: Poly, g: Poly, k: Poly },
    Mixed { u: u64, e: Poly, f: Poly, g: Poly },
}

impl fmt::Display for Witness {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::General { e, f, g } => write!(out, "e = {e}; f = {f}; g = {g}"),
            Witness::Scaled { e, f, g, k } | Witness::Shift { e, f, g, k } => {
                write!(out, "e = {e}; f = {f}; g = {g}; k = {k}")
            }
            Witness::Scalar => write!(out, "(no parameters)"),
            Witness::Mixed { u, e, f, g } => write!(out, "u = {u}; e = {e}; f = {f}; g = {g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassMatch {
    pub label: ClassLabel,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub modulus: u64,
    pub primes: Vec<u64>,
    pub idempotent: bool,
    pub trivial: bool,
    pub det: Option<u64>,
    pub trace: Option<u64>,
    pub matches: Vec<ClassMatch>,
    pub anomalies: Vec<String>,
}

impl ClassificationReport {
    pub fn matches_label(&self, label: &ClassLabel) -> bool {
        self.matches.iter().any(|m| &m.label == label)
    }

    /// Non-trivial idempotent that no template accepted.
    pub fn is_unmatched(&self) -> bool {
        self.idempotent && !self.trivial && self.matches.is_empty()
    }
}

/// Precomputed templates for one modulus.
#[derive(Debug, Clone)]
pub struct Classifier {
    modulus: Modulus,
    labels: Vec<ClassLabel>,
    idempotents: Vec<u64>,
}

impl Classifier {
    pub fn new(m: &Modulus) -> Result<Self> {
        check_scope(m)?;
        Ok(Classifier {
            modulus: m.clone(),
            labels: ClassLabel::all(m)?,
            idempotents: enumerate_idempotents(m).iter().map(|r| r.value()).collect(),
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn classify(&self, g: &Mat2Poly) -> Result<ClassificationReport> {
        let m = &self.modulus;
        let n = m.n();
        if g.modulus() != n {
            return Err(Error::ModulusMismatch {
                left: n,
                right: g.modulus(),
            });
        }
        let mut report = ClassificationReport {
            modulus: n,
            primes: m.primes().to_vec(),
            idempotent: g.is_idempotent(),
            trivial: false,
            det: None,
            trace: None,
            matches: Vec::new(),
            anomalies: Vec::new(),
        };
        if !report.idempotent {
            return Ok(report);
        }
        let constant = |what: &str, p: Poly| {
            p.const_value().map(|r| r.value()).map_err(|_| {
                Error::InternalTheoremViolation(format!("{what} of idempotent {g} is {p}"))
            })
        };
        let det = constant("determinant", g.det())?;
        let trace = constant("trace", g.trace())?;
        report.det = Some(det);
        report.trace = Some(trace);

        if self.idempotents.binary_search(&det).is_err() {
            report
                .anomalies
                .push(format!("determinant {det} is not an idempotent of Z_{n}"));
        } else if !trace_candidates(m, det)?.contains(trace) {
            report
                .anomalies
                .push(format!("trace {trace} does not solve t^2 = t + 2*{det}"));
        }

        if g.is_zero() || g.is_identity() {
            report.trivial = true;
            return Ok(report);
        }
        if det == 1 {
            report
                .anomalies
                .push("determinant 1 on an idempotent other than the identity".into());
        }
        for label in &self.labels {
            if label.det != det || label.trace != trace {
                continue;
            }
            if let Some(witness) = match_template(label, g) {
                report.matches.push(ClassMatch {
                    label: label.clone(),
                    witness,
                });
            }
        }
        Ok(report)
    }
}

/// Classifies `g` against every template for `m`.
pub fn classify(g: &Mat2Poly, m: &Modulus) -> Result<ClassificationReport> {
    Classifier::new(m)?.classify(g)
}

fn match_template(label: &ClassLabel, g: &Mat2Poly) -> Option<Witness> {
    let n = g.modulus();
    let (e, f, gg, h) = (g.e(), g.f(), g.g(), g.h());
    let konst = |c: u64| Poly::constant(c, n);
    match label.family {
        Family::Det0General => {
            let ok =
                *h == &Poly::one(n) - e && &(e * &(&Poly::one(n) - e)) - &(f * gg) == Poly::zero(n);
            ok.then(|| Witness::General {
                e: e.clone(),
                f: f.clone(),
                g: gg.clone(),
            })
        }
        Family::Det0Scaled => {
            let (i, j) = (label.scale?, label.annihilator?);
            let fixed = |x: &Poly| x.scale(i) == *x;
            if !(fixed(e) && fixed(f) && fixed(gg)) || *h != &konst(i) - e {
                return None;
            }
            let side = &(e * &(&Poly::one(n) - e)) - &(f * gg);
            let k = side.div_exact(j)?;
            Some(Witness::Scaled {
                e: e.clone(),
                f: f.clone(),
                g: gg.clone(),
                k,
            })
        }
        Family::DetPairScalar | Family::DetSingleScalar => {
            (*g == Mat2Poly::scalar(label.det, n)).then_some(Witness::Scalar)
        }
        Family::DetPairShift | Family::DetSingleShift => {
            let s = label.stride()?;
            let cofactor = n / s;
            let e_w = (e - &Poly::one(n)).div_exact(s)?;
            let f_w = f.div_exact(s)?;
            let g_w = gg.div_exact(s)?;
            if *h != &konst(label.det) - &e_w.scale(s) {
                return None;
            }
            // e(1 + s e) + s f g = cofactor * k
            let side = &(&e_w * &e_w.scale(s).add_constant(1)) + &(&f_w * &g_w).scale(s);
            let k = side.div_exact(cofactor)?;
            Some(Witness::Shift {
                e: e_w,
                f: f_w,
                g: g_w,
                k,
            })
        }
        Family::DetPairMixed => {
            let s = label.stride()?;
            let u = label.u?;
            let e_w = (e - &konst(u)).div_exact(s)?;
            let f_w = f.div_exact(s)?;
            let g_w = gg.div_exact(s)?;
            if *h != &konst(label.trace) - e || g.det() != konst(label.det) {
                return None;
            }
            Some(Witness::Mixed {
                u,
                e: e_w,
                f: f_w,
                g: g_w,
            })
        }
    }
}

/// Free parameters for [`generate`]. Unset fields take defaults: `e = x`,
/// `g = 1` (with `f` solved from the side condition), multiplier `0`, no
/// conjugation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeParams {
    pub e: Option<Poly>,
    pub f: Option<Poly>,
    pub g: Option<Poly>,
    /// `m` in `f = e(1-e) - J m` for the scaled family.
    pub multiplier: Option<Poly>,
    /// Conjugate the result by `[[1, s], [0, 1]]` (`true`) or
    /// `[[1, 0], [s, 1]]` (`false`).
    pub conjugator: Option<(Poly, bool)>,
}

impl FreeParams {
    /// Random parameters keeping every generated entry at degree
    /// `<= max_entry_degree` (for `max_entry_degree >= 2`).
    pub fn random<R: Rng>(rng: &mut R, n: u64, max_entry_degree: usize) -> Self {
        fn poly<R: Rng>(rng: &mut R, n: u64, deg: usize) -> Poly {
            let len = rng.gen_range(0..=deg + 1);
            Poly::from_coeffs(n, (0..len).map(|_| rng.gen_range(0..n)).collect())
        }
        let e = poly(rng, n, max_entry_degree / 2);
        let multiplier = poly(rng, n, max_entry_degree);
        // lower conjugation multiplies f by s, so only the upper one gets x
        let upper = rng.gen_bool(0.5);
        let s = poly(rng, n, usize::from(upper && max_entry_degree >= 4));
        FreeParams {
            e: Some(e),
            multiplier: Some(multiplier),
            conjugator: Some((s, upper)),
            ..FreeParams::default()
        }
    }

    pub fn from_seed(seed: u64, n: u64, max_entry_degree: usize) -> Self {
        FreeParams::random(&mut ChaCha8Rng::seed_from_u64(seed), n, max_entry_degree)
    }

    /// Random parameters accepted by `family`: the scalar families only
    /// take a conjugator.
    pub fn random_for<R: Rng>(
        family: Family,
        rng: &mut R,
        n: u64,
        max_entry_degree: usize,
    ) -> Self {
        let params = FreeParams::random(rng, n, max_entry_degree);
        match family {
            Family::DetPairScalar | Family::DetSingleScalar => FreeParams {
                conjugator: params.conjugator,
                ..FreeParams::default()
            },
            _ => params,
        }
    }
}

/// Finds `(f, g)` with `factor * f * g = target (mod modulus)` coefficientwise.
///
/// One of `f`, `g` is taken as given (default `g = 1`); it must be a constant
/// with `factor * it` invertible modulo `modulus`, and the other is solved
/// coefficient by coefficient.
fn solve_off_diagonal(
    target: &Poly,
    factor: u64,
    modulus: u64,
    f: Option<Poly>,
    g: Option<Poly>,
) -> Result<(Poly, Poly)> {
    let n = target.modulus();
    let holds = |f: &Poly, g: &Poly| (&(f * g).scale(factor) - target).divisible_by(modulus);
    let solve_for = |known: &Poly, name: &str| -> Result<Poly> {
        let c = known.const_value().map_err(|_| {
            Error::UnsatisfiableParams(format!(
                "{name} = {known} must be a constant to solve for its partner"
            ))
        })?;
        let inv = mod_inverse(mul_mod(factor, c.value(), modulus), modulus).map_err(|_| {
            Error::UnsatisfiableParams(format!(
                "{name} = {known} is not a unit modulo {modulus} after scaling by {factor}"
            ))
        })?;
        Ok(target.scale(inv))
    };
    match (f, g) {
        (Some(f), Some(g)) => {
            if holds(&f, &g) {
                Ok((f, g))
            } else {
                Err(Error::UnsatisfiableParams(format!(
                    "{factor} * ({f}) * ({g}) differs from {target} modulo {modulus}"
                )))
            }
        }
        (Some(f), None) => Ok((f.clone(), solve_for(&f, "f")?)),
        (None, g) => {
            let g = g.unwrap_or_else(|| Poly::one(n));
            Ok((solve_for(&g, "g")?, g))
        }
    }
}

/// Builds a member of the class `label` from the free parameters.
pub fn generate(label: &ClassLabel, m: &Modulus, params: &FreeParams) -> Result<Mat2Poly> {
    label.validate(m)?;
    let n = m.n();
    for p in [&params.e, &params.f, &params.g, &params.multiplier]
        .into_iter()
        .flatten()
        .chain(params.conjugator.as_ref().map(|(s, _)| s))
    {
        if p.modulus() != n {
            return Err(Error::ModulusMismatch {
                left: n,
                right: p.modulus(),
            });
        }
    }
    let one = Poly::one(n);
    let konst = |c: u64| Poly::constant(c, n);
    let e = params.e.clone().unwrap_or_else(|| Poly::x(n));
    let (f_in, g_in) = (params.f.clone(), params.g.clone());

    let g_mat = match label.family {
        Family::Det0General => {
            let target = &e * &(&one - &e);
            let (f, g) = solve_off_diagonal(&target, 1, n, f_in, g_in)?;
            let h = &one - &e;
            Mat2Poly::new(e, f, g, h)?
        }
        Family::Det0Scaled => {
            let (i, j) = (
                label.scale.expect("validated"),
                label.annihilator.expect("validated"),
            );
            let target = &e * &(&one - &e);
            let solved_f = f_in.is_none();
            let (mut f, g) = solve_off_diagonal(&target, 1, j, f_in, g_in)?;
            if solved_f {
                if let Some(mult) = &params.multiplier {
                    f = &f - &mult.scale(j);
                }
            }
            let h = &one - &e;
            Mat2Poly::new(e, f, g, h)?.scale(i)
        }
        Family::DetPairScalar | Family::DetSingleScalar => {
            if params.e.is_some() || params.f.is_some() || params.g.is_some() {
                return Err(Error::UnsatisfiableParams(format!(
                    "{label} has no free parameters"
                )));
            }
            Mat2Poly::scalar(label.det, n)
        }
        Family::DetPairShift | Family::DetSingleShift => {
            let s = label.stride().expect("shift family");
            let cofactor = n / s;
            // e(1 + s e) + s f g = 0 (mod cofactor)
            let target = -&(&e * &e.scale(s).add_constant(1));
            let (f, g) = solve_off_diagonal(&target, s, cofactor, f_in, g_in)?;
            let se = e.scale(s);
            Mat2Poly::new(
                se.add_constant(1),
                f.scale(s),
                g.scale(s),
                &konst(label.det) - &se,
            )?
        }
        Family::DetPairMixed => {
            let s = label.stride().expect("mixed family");
            let q = label.roles.q;
            let u = label.u.expect("validated");
            let top = &konst(u) + &e.scale(s);
            let bottom = &konst(label.trace) - &top;
            // (top * bottom - d) is a multiple of s; s^2 f g must equal it
            let excess = &(&top * &bottom) - &konst(label.det);
            let target = excess.div_exact(s).ok_or_else(|| {
                Error::InternalTheoremViolation(format!("{excess} is not a multiple of {s}"))
            })?;
            let (f, g) = solve_off_diagonal(&target, s, q, f_in, g_in)?;
            Mat2Poly::new(top, f.scale(s), g.scale(s), bottom)?
        }
    };
    let g_mat = match &params.conjugator {
        Some((s, upper)) => g_mat.conjugate_elementary(s, *upper)?,
        None => g_mat,
    };
    if !g_mat.is_idempotent() {
        return Err(Error::InternalTheoremViolation(format!(
            "generated {label} member {g_mat} is not idempotent"
        )));
    }
    Ok(g_mat)
}

fn check_cubic_budget(n: u64, budget: u64) -> Result<()> {
    match n.checked_mul(n).and_then(|s| s.checked_mul(n)) {
        Some(states) if states <= budget => Ok(()),
        _ => Err(Error::BudgetExceeded {
            states: format!("{n}^3"),
            budget,
        }),
    }
}

/// All constant idempotent matrices `[e, f, g, h]` over `Z_n`, ascending.
///
/// Works for any `n >= 2`. For each `(e, h)` with `e - e^2 = h - h^2` and
/// each `f` annihilated by `e + h - 1`, the solutions of `f g = e - e^2` are
/// read off from `gcd(f, n)`, so the cost is `O(n^3)` rather than `O(n^4)`.
pub fn constant_idempotent_entries(n: u64, budget: u64) -> Result<Vec<[u64; 4]>> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    check_cubic_budget(n, budget)?;
    let defect: Vec<u64> = (0..n).map(|x| (x + n - mul_mod(x, x, n)) % n).collect();
    let mut by_defect: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (x, &c) in defect.iter().enumerate() {
        by_defect.entry(c).or_default().push(x as u64);
    }
    let out: Vec<[u64; 4]> = (0..n)
        .into_par_iter()
        .flat_map_iter(|e| {
            let c = defect[e as usize];
            let mut found = Vec::new();
            for f in 0..n {
                // (e, f) fixed: enumerate h, then g
                for &h in &by_defect[&c] {
                    let t1 = (e + h + n - 1) % n;
                    if mul_mod(f, t1, n) != 0 {
                        continue;
                    }
                    let d = gcd(f, n);
                    if !c.is_multiple_of(d) {
                        continue;
                    }
                    let step = n / d;
                    let base = if f == 0 {
                        0
                    } else {
                        let inv = mod_inverse((f / d) % step, step).expect("coprime after gcd");
                        mul_mod((c / d) % step, inv, step)
                    };
                    for k in 0..d {
                        let g = base + k * step;
                        if mul_mod(g, t1, n) == 0 {
                            found.push([e, f, g, h]);
                        }
                    }
                }
            }
            found.sort_unstable();
            found
        })
        .collect();
    Ok(out)
}

/// Constant idempotent matrices as [`Mat2Poly`] values.
pub fn bruteforce_constant_idempotents(m: &Modulus, budget: u64) -> Result<Vec<Mat2Poly>> {
    let n = m.n();
    Ok(constant_idempotent_entries(n, budget)?
        .into_iter()
        .map(|entries| Mat2Poly::from_constants(n, entries))
        .collect())
}

/// A determinant/trace combination whose matrix count is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpossibleTrace {
    pub det: u64,
    pub trace: u64,
    pub description: String,
}

/// Determinant/trace pairs that solve the trace congruence yet carry no
/// idempotent matrix: every candidate with residue `-1` at a prime where
/// the determinant is `1`. Listed for each role assignment.
pub fn impossible_traces(m: &Modulus) -> Result<Vec<ImpossibleTrace>> {
    let (p, q, r) = check_scope(m)?;
    let primes = [p, q, r];
    let mut out = Vec::new();
    for &top in &primes {
        let rest: Vec<u64> = primes.iter().copied().filter(|&x| x != top).collect();
        // determinant (ab)^(top-1): entries 2, 4, 6, 8 of the pair list
        let rep = lemma_formula_solutions(
            m,
            FormulaFamily::PrimePairDet {
                pair: (rest[0], rest[1]),
            },
        )?;
        for idx in [1, 3, 5, 7] {
            let entry = &rep.entries[idx];
            out.push(ImpossibleTrace {
                det: rep.det,
                trace: entry.value,
                description: format!(
                    "det (pq)^(r-1) with p={},q={},r={}: trace {}",
                    rest[0], rest[1], top, entry.expression
                ),
            });
        }
        // determinant top^(...): entries 3..8 of the single-prime list
        let rep = lemma_formula_solutions(m, FormulaFamily::SinglePrimeDet { pivot: top })?;
        for entry in &rep.entries[2..] {
            out.push(ImpossibleTrace {
                det: rep.det,
                trace: entry.value,
                description: format!(
                    "det p^((q-1)(r-1)) with p={},q={},r={}: trace {}",
                    top, rest[0], rest[1], entry.expression
                ),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetTraceCount {
    pub det: u64,
    pub trace: u64,
    pub count: usize,
}

/// How mixed-family members sit relative to the canonical `u` in `[0, pr)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MixedOffsetStats {
    /// Top-left entry equals `u` exactly (`e(x) = 0`).
    pub at_canonical_u: usize,
    /// Top-left entry is `u + pr * e` with `e != 0` (a different class mod `q`).
    pub shifted: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessReport {
    pub modulus: u64,
    pub primes: Vec<u64>,
    pub total: usize,
    pub trivial: usize,
    pub matched: usize,
    pub unmatched: Vec<[u64; 4]>,
    /// Matrices accepted by more than one template.
    pub overlaps: usize,
    pub family_counts: BTreeMap<Family, usize>,
    pub label_counts: BTreeMap<String, usize>,
    pub det_histogram: BTreeMap<u64, usize>,
    pub det_trace_histogram: Vec<DetTraceCount>,
    pub mixed_offsets: MixedOffsetStats,
    pub anomalies: Vec<String>,
}

impl CompletenessReport {
    pub fn count_at(&self, det: u64, trace: u64) -> usize {
        self.det_trace_histogram
            .iter()
            .find(|c| c.det == det && c.trace == trace)
            .map_or(0, |c| c.count)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let primes: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        s += &format!("n = {} = {}\n", self.modulus, primes.join(" * "));
        s += &format!("constant idempotents: {}\n", self.total);
        s += &format!("trivial: {}\n", self.trivial);
        s += &format!("matched: {}\n", self.matched);
        s += &format!("unmatched: {}\n", self.unmatched.len());
        s += &format!("overlaps: {}\n", self.overlaps);
        s += "family counts:\n";
        for (fam, count) in &self.family_counts {
            s += &format!("  {fam:<18} {count}\n");
        }
        s += "label counts:\n";
        for (label, count) in &self.label_counts {
            s += &format!("  {label:<40} {count}\n");
        }
        s += "det histogram:\n";
        for (det, count) in &self.det_histogram {
            s += &format!("  det {det:<8} {count}\n");
        }
        s += "det/trace histogram:\n";
        for c in &self.det_trace_histogram {
            s += &format!("  det {:<8} trace {:<8} {}\n", c.det, c.trace, c.count);
        }
        s += &format!(
            "mixed top-left: {} at canonical u, {} shifted by pr*e\n",
            self.mixed_offsets.at_canonical_u, self.mixed_offsets.shifted
        );
        for a in &self.anomalies {
            s += &format!("anomaly: {a}\n");
        }
        for u in &self.unmatched {
            s += &format!("unmatched: [[{}, {}], [{}, {}]]\n", u[0], u[1], u[2], u[3]);
        }
        s
    }
}

/// Classifies every constant idempotent matrix over `Z_n`.
pub fn completeness_check(m: &Modulus, budget: u64) -> Result<CompletenessReport> {
    let classifier = Classifier::new(m)?;
    let n = m.n();
    let entries = constant_idempotent_entries(n, budget)?;
    let reports: Vec<ClassificationReport> = entries
        .par_iter()
        .map(|&ent| classifier.classify(&Mat2Poly::from_constants(n, ent)))
        .collect::<Result<_>>()?;

    let mut rep = CompletenessReport {
        modulus: n,
        primes: m.primes().to_vec(),
        total: entries.len(),
        trivial: 0,
        matched: 0,
        unmatched: Vec::new(),
        overlaps: 0,
        family_counts: Family::ALL.into_iter().map(|f| (f, 0)).collect(),
        label_counts: classifier
            .labels()
            .iter()
            .map(|l| (l.to_string(), 0))
            .collect(),
        det_histogram: BTreeMap::new(),
        det_trace_histogram: Vec::new(),
        mixed_offsets: MixedOffsetStats::default(),
        anomalies: Vec::new(),
    };
    let mut dt: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for (ent, r) in entries.iter().zip(&reports) {
        let (det, trace) = (r.det.expect("idempotent"), r.trace.expect("idempotent"));
        *rep.det_histogram.entry(det).or_default() += 1;
        *dt.entry((det, trace)).or_default() += 1;
        for a in &r.anomalies {
            rep.anomalies.push(format!("{ent:?}: {a}"));
        }
        if r.trivial {
            rep.trivial += 1;
            continue;
        }
        if r.matches.is_empty() {
            rep.unmatched.push(*ent);
            continue;
        }
        rep.matched += 1;
        if r.matches.len() > 1 {
            rep.overlaps += 1;
        }
        for mt in &r.matches {
            *rep.family_counts.entry(mt.label.family).or_default() += 1;
            *rep.label_counts.entry(mt.label.to_string()).or_default() += 1;
            if let Witness::Mixed { e, .. } = &mt.witness {
                if e.is_zero() {
                    rep.mixed_offsets.at_canonical_u += 1;
                } else {
                    rep.mixed_offsets.shifted += 1;
                }
            }
        }
    }
    rep.det_trace_histogram = dt
        .into_iter()
        .map(|((det, trace), count)| DetTraceCount { det, trace, count })
        .collect();
    Ok(rep)
}

/// Number of constant idempotent 2x2 matrices over `Z_n`, from the prime
/// count `2 + p(p + 1)` (zero, identity and the rank-one projections of
/// `F_p^2`) multiplied across the factorization.
pub fn predicted_constant_count(m: &Modulus) -> u128 {
    m.primes()
        .iter()
        .map(|&p| 2 + u128::from(p) * u128::from(p + 1))
        .product()
}

/// The det/trace histogram of constant idempotent matrices predicted prime
/// by prime: over `F_p` the only shapes are zero `(0, 0)`, rank one
/// `(0, 1)` with `p(p + 1)` members and identity `(1, 2)` with one member.
/// Sorted by `(det, trace)`.
pub fn predicted_det_trace_histogram(m: &Modulus) -> Result<Vec<DetTraceCount>> {
    // (det residues, trace residues, member count) per partial CRT cell
    type Cell = (Vec<(u64, u64)>, Vec<(u64, u64)>, u128);
    let mut cells: Vec<Cell> = vec![(vec![], vec![], 1)];
    for &p in m.primes() {
        let shapes = [
            (0, 0, 1),
            (0, 1 % p, u128::from(p) * u128::from(p + 1)),
            (1 % p, 2 % p, 1),
        ];
        let mut next = Vec::with_capacity(cells.len() * 3);
        for (dets, traces, count) in &cells {
            for &(d, t, c) in &shapes {
                let mut dets = dets.clone();
                let mut traces = traces.clone();
                dets.push((d, p));
                traces.push((t, p));
                next.push((dets, traces, count * c));
            }
        }
        cells = next;
    }
    let mut out = Vec::with_capacity(cells.len());
    for (dets, traces, count) in cells {
        out.push(DetTraceCount {
            det: crt_combine(&dets)?.value(),
            trace: crt_combine(&traces)?.value(),
            count: usize::try_from(count)
                .map_err(|_| Error::Overflow(format!("histogram cell of size {count}")))?,
        });
    }
    out.sort_by_key(|c| (c.det, c.trace));
    Ok(out)
}

/// Determinant and trace of `g` when both are constant.
pub fn det_trace(g: &Mat2Poly) -> Option<(u64, u64)> {
    let det = g.det().const_value().ok()?.value();
    let trace = g.trace().const_value().ok()?.value();
    Some((det, trace))
}
