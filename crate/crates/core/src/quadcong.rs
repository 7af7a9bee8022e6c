//! The trace congruence `t^2 = t + 2d (mod n)` for an idempotent `d`.
//!
//! The trace `t` of an idempotent 2x2 matrix with determinant `d` satisfies
//! this congruence. It is solved prime by prime with an exhaustive scan and
//! recombined by CRT. [`lemma_formula_solutions`] evaluates the closed-form
//! root lists known for `n = pqr` and reports how each one sits against the
//! solver.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{add_mod, crt_combine, mod_pow, mul_mod, Modulus, Residue};
use crate::znring::is_idempotent;

/// All `x` in `[0, p)` with `x^2 = x + c (mod p)`.
pub fn prime_quadratic_roots(p: u64, c: u64) -> Vec<u64> {
    let c = c % p;
    (0..p)
        .filter(|&x| mul_mod(x, x, p) == add_mod(x, c, p))
        .collect()
}

/// Exhaustive `t` in `[0, n)` with `t^2 = t + 2d (mod n)`; the reference the
/// CRT solver is checked against.
pub fn scan_trace_solutions(n: u64, d: u64) -> Vec<u64> {
    let rhs = mul_mod(2, d, n);
    (0..n)
        .filter(|&t| mul_mod(t, t, n) == add_mod(t, rhs, n))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceCandidateSet {
    pub modulus: u64,
    pub det: u64,
    pub solutions: Vec<u64>,
}

impl TraceCandidateSet {
    pub fn contains(&self, t: u64) -> bool {
        self.solutions.binary_search(&t).is_ok()
    }
}

/// Solutions of `t^2 = t + 2d (mod n)` for an idempotent `d`, ascending.
pub fn trace_candidates(m: &Modulus, d: u64) -> Result<TraceCandidateSet> {
    let n = m.n();
    if d >= n || !is_idempotent(d, n) {
        return Err(Error::NotIdempotentDet { d, n });
    }
    let per_prime: Vec<(u64, Vec<u64>)> = m
        .primes()
        .iter()
        .map(|&p| (p, prime_quadratic_roots(p, mul_mod(2, d, p))))
        .collect();
    let mut solutions = vec![Residue::new(0, 1)];
    for (p, roots) in &per_prime {
        let mut next = Vec::with_capacity(solutions.len() * roots.len());
        for partial in &solutions {
            for &root in roots {
                next.push(crt_combine(&[
                    (partial.value(), partial.modulus()),
                    (root, *p),
                ])?);
            }
        }
        solutions = next;
    }
    let mut solutions: Vec<u64> = solutions.into_iter().map(Residue::value).collect();
    solutions.sort_unstable();
    Ok(TraceCandidateSet {
        modulus: n,
        det: d,
        solutions,
    })
}

/// Which printed root list to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormulaFamily {
    /// `d = p^((q-1)(r-1))` with `pivot` playing `p`; `q < r` are the others.
    SinglePrimeDet { pivot: u64 },
    /// `d = (pq)^(r-1)` with `pair = (p, q)`; `r` is the remaining prime.
    PrimePairDet { pair: (u64, u64) },
}

/// One printed root expression, evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaEntry {
    pub expression: &'static str,
    pub value: u64,
    /// `value mod p`, `value mod q`, `value mod r` in role order.
    pub residues: [u64; 3],
    /// The residues the expression is meant to produce, as signed
    /// representatives in role order (`-1` meaning `prime - 1`).
    pub intended: [i64; 3],
    pub in_solution_set: bool,
    pub matches_intended: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormulaReport {
    pub modulus: u64,
    pub family: FormulaFamily,
    /// Primes in role order `(p, q, r)`.
    pub roles: [u64; 3],
    pub det: u64,
    pub entries: Vec<FormulaEntry>,
    pub solver: TraceCandidateSet,
}

impl FormulaReport {
    /// The set of evaluated values, ascending and deduplicated.
    pub fn values(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.entries.iter().map(|e| e.value).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn discrepancies(&self) -> Vec<&FormulaEntry> {
        self.entries
            .iter()
            .filter(|e| !e.in_solution_set || !e.matches_intended)
            .collect()
    }

    /// Solver roots not produced by any printed expression.
    pub fn missing_from_formulas(&self) -> Vec<u64> {
        let values = self.values();
        self.solver
            .solutions
            .iter()
            .copied()
            .filter(|t| values.binary_search(t).is_err())
            .collect()
    }
}

/// Signed arithmetic helper for the closed forms.
struct Eval {
    n: u64,
}

impl Eval {
    fn r(&self, v: u64) -> Residue {
        Residue::new(v, self.n)
    }
    fn s(&self, v: i128) -> Residue {
        Residue::from_signed(v, self.n)
    }
    fn pow(&self, base: u64, k: u64) -> Residue {
        self.r(mod_pow(base, k, self.n))
    }
}

/// Evaluates the eight printed root expressions for the chosen determinant
/// family and compares each with the solver's root set.
///
/// Mismatches are reported, never raised.
pub fn lemma_formula_solutions(m: &Modulus, family: FormulaFamily) -> Result<FormulaReport> {
    let primes = match *m.primes() {
        [a, b, c] => [a, b, c],
        _ => {
            return Err(Error::WrongPrimeCount {
                expected: 3,
                found: m.prime_count(),
            })
        }
    };
    let roles = role_order(&primes, family)?;
    let [p, q, r] = roles;
    let ev = Eval { n: m.n() };
    let one = ev.r(1);
    let two = ev.r(2);

    let rows: Vec<(&'static str, Residue, [i64; 3])> = match family {
        FormulaFamily::SinglePrimeDet { .. } => {
            let d = ev.pow(p, (q - 1) * (r - 1));
            let pq_r = ev.pow(p * q, r - 1);
            let pr_q = ev.pow(p * r, q - 1);
            let p_q = ev.pow(p, q - 1);
            let p_r = ev.pow(p, r - 1);
            vec![
                ("2p^((q-1)(r-1))", two * d, [0, 2, 2]),
                ("p^((q-1)(r-1)) + 1", d + one, [1, 2, 2]),
                ("-p^((q-1)(r-1))", -d, [0, -1, -1]),
                ("1 - 2p^((q-1)(r-1))", one - two * d, [1, -1, -1]),
                (
                    "(-1 - 2p^(q-1))(pq)^(r-1) + 2p^(q-1)",
                    (ev.s(-1) - two * p_q) * pq_r + two * p_q,
                    [0, 2, -1],
                ),
                (
                    "(-2 - p^(q-1))(pq)^(r-1) + p^(q-1) + 1",
                    (ev.s(-2) - p_q) * pq_r + p_q + one,
                    [1, 2, -1],
                ),
                (
                    "(-1 - 2p^(r-1))(pr)^(q-1) + 2p^(r-1)",
                    (ev.s(-1) - two * p_r) * pr_q + two * p_r,
                    [0, -1, 2],
                ),
                (
                    "(-2 - p^(r-1))(pr)^(q-1) + p^(r-1) + 1",
                    (ev.s(-2) - p_r) * pr_q + p_r + one,
                    [1, -1, 2],
                ),
            ]
        }
        FormulaFamily::PrimePairDet { .. } => {
            let d = ev.pow(p * q, r - 1);
            let p_q = ev.pow(p, q - 1);
            let q_p = ev.pow(q, p - 1);
            vec![
                ("2(pq)^(r-1)", two * d, [0, 0, 2]),
                ("-(pq)^(r-1)", -d, [0, 0, -1]),
                ("(pq)^(r-1) + 1", d + one, [1, 1, 2]),
                ("1 - 2(pq)^(r-1)", one - two * d, [1, 1, -1]),
                (
                    "(2 - p^(q-1))(pq)^(r-1) + p^(q-1)",
                    (two - p_q) * d + p_q,
                    [0, 1, 2],
                ),
                (
                    "(-1 - p^(q-1))(pq)^(r-1) + p^(q-1)",
                    (ev.s(-1) - p_q) * d + p_q,
                    [0, 1, -1],
                ),
                (
                    "(2 - q^(p-1))(pq)^(r-1) + q^(p-1)",
                    (two - q_p) * d + q_p,
                    [1, 0, 2],
                ),
                (
                    "(-1 - q^(p-1))(pq)^(r-1) + q^(p-1)",
                    (ev.s(-1) - q_p) * d + q_p,
                    [1, 0, -1],
                ),
            ]
        }
    };

    let det = match family {
        FormulaFamily::SinglePrimeDet { .. } => ev.pow(p, (q - 1) * (r - 1)).value(),
        FormulaFamily::PrimePairDet { .. } => ev.pow(p * q, r - 1).value(),
    };
    let solver = trace_candidates(m, det)?;
    let entries = rows
        .into_iter()
        .map(|(expression, value, intended)| {
            let value = value.value();
            let residues = [value % p, value % q, value % r];
            let matches_intended = roles
                .iter()
                .zip(intended)
                .zip(residues)
                .all(|((&prime, want), got)| (want.rem_euclid(prime as i64)) as u64 == got);
            FormulaEntry {
                expression,
                value,
                residues,
                intended,
                in_solution_set: solver.contains(value),
                matches_intended,
            }
        })
        .collect();
    Ok(FormulaReport {
        modulus: m.n(),
        family,
        roles,
        det,
        entries,
        solver,
    })
}

fn role_order(primes: &[u64; 3], family: FormulaFamily) -> Result<[u64; 3]> {
    let not_a_factor = |x: u64| Error::Parse(format!("{x} is not a prime factor of the modulus"));
    match family {
        FormulaFamily::SinglePrimeDet { pivot } => {
            if !primes.contains(&pivot) {
                return Err(not_a_factor(pivot));
            }
            let rest: Vec<u64> = primes.iter().copied().filter(|&x| x != pivot).collect();
            Ok([pivot, rest[0], rest[1]])
        }
        FormulaFamily::PrimePairDet { pair: (a, b) } => {
            for x in [a, b] {
                if !primes.contains(&x) {
                    return Err(not_a_factor(x));
                }
            }
            if a == b {
                return Err(Error::Parse(format!("pair ({a}, {b}) repeats a prime")));
            }
            let r = primes
                .iter()
                .copied()
                .find(|&x| x != a && x != b)
                .expect("three distinct primes");
            Ok([a, b, r])
        }
    }
}
