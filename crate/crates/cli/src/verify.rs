//! The `verify` invariant suite.

use std::fmt::Write as _;

use pqr_idempotents::classify::{
    check_scope, completeness_check, constant_idempotent_entries, det_trace, generate,
    impossible_traces, predicted_constant_count, predicted_det_trace_histogram, ClassLabel,
    Classifier, Family, FreeParams,
};
use pqr_idempotents::quadcong::{scan_trace_solutions, trace_candidates};
use pqr_idempotents::znring::{
    enumerate_idempotents, euler_cross_check, poly_idempotents_bruteforce, scan_idempotents,
};
use pqr_idempotents::{Error, Modulus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::{CliError, Rendered};

/// Largest modulus for which `O(n)` scans are run.
const SCAN_LIMIT: u64 = 10_000_000;

/// Entry degree bound for generator draws.
const DRAW_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

fn line(name: &'static str, pass: bool, detail: String) -> CheckLine {
    CheckLine {
        name,
        status: if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail,
    }
}

fn skip(name: &'static str, detail: String) -> CheckLine {
    CheckLine {
        name,
        status: CheckStatus::Skip,
        detail,
    }
}

/// Runs every check that applies to `m` within `budget`.
pub fn verify(m: &Modulus, draws: usize, budget: u64) -> Result<Vec<CheckLine>, Error> {
    let n = m.n();
    let k = m.prime_count();
    let mut out = Vec::new();

    let product: u64 = m.primes().iter().product();
    out.push(line(
        "factorization",
        product == n,
        format!("product of {:?} is {product}", m.primes()),
    ));

    let idem: Vec<u64> = enumerate_idempotents(m).iter().map(|r| r.value()).collect();
    out.push(line(
        "idempotent count",
        idem.len() == 1 << k,
        format!("{} idempotents, 2^{k} expected", idem.len()),
    ));
    let closed = idem.iter().all(|&y| {
        let c = (n + 1 - y) % n;
        (y as u128 * y as u128 % n as u128) as u64 == y && idem.binary_search(&c).is_ok()
    });
    out.push(line(
        "idempotent law and complements",
        closed,
        "y*y = y and 1 - y idempotent for every y".into(),
    ));
    if n <= SCAN_LIMIT {
        let scan = scan_idempotents(n);
        out.push(line(
            "idempotents match scan",
            scan == idem,
            format!("scan of [0, {n}) found {}", scan.len()),
        ));
    } else {
        out.push(skip(
            "idempotents match scan",
            format!("n above {SCAN_LIMIT}"),
        ));
    }

    if k == 3 {
        let rows = euler_cross_check(m)?;
        let bad = rows.iter().filter(|r| !r.closed_form_matches()).count();
        let variants: Vec<String> = rows
            .iter()
            .filter(|r| r.alternate_matches() == Some(false))
            .map(|r| {
                format!(
                    "{} gives {}",
                    r.alternate_expression.unwrap_or(""),
                    r.alternate_value.unwrap_or(0)
                )
            })
            .collect();
        let mut detail = format!("{} of 8 closed forms equal CRT", 8 - bad);
        if !variants.is_empty() {
            write!(
                detail,
                "; variants differing from CRT: {}",
                variants.join(", ")
            )
            .unwrap();
        }
        out.push(line("closed forms", bad == 0, detail));
    } else {
        out.push(skip("closed forms", format!("{k} prime factors")));
    }

    if n <= SCAN_LIMIT {
        let mut mismatched = Vec::new();
        let mut sizes = Vec::new();
        for &d in &idem {
            let set = trace_candidates(m, d)?;
            if set.solutions != scan_trace_solutions(n, d) {
                mismatched.push(d);
            }
            sizes.push(set.solutions.len());
        }
        out.push(line(
            "trace solver matches scan",
            mismatched.is_empty(),
            format!("mismatched dets: {mismatched:?}"),
        ));
        if m.primes().iter().all(|&p| p > 3) {
            let want = 1usize << k;
            out.push(line(
                "trace candidate count",
                sizes.iter().all(|&s| s == want),
                format!("sizes {sizes:?}, {want} expected"),
            ));
        } else {
            out.push(skip(
                "trace candidate count",
                "a prime <= 3 gives repeated roots".into(),
            ));
        }
    } else {
        out.push(skip(
            "trace solver matches scan",
            format!("n above {SCAN_LIMIT}"),
        ));
    }

    match poly_idempotents_bruteforce(m, 1, budget) {
        Ok(found) => out.push(line(
            "linear polynomial idempotents are constant",
            found.len() == idem.len() && found.iter().all(|u| u.is_constant()),
            format!("{} found among degree <= 1", found.len()),
        )),
        Err(Error::BudgetExceeded { .. }) => out.push(skip(
            "linear polynomial idempotents are constant",
            "over budget".into(),
        )),
        Err(e) => return Err(e),
    }

    let in_scope = check_scope(m).is_ok();
    let oracle_fits = n.checked_pow(3).is_some_and(|s| s <= budget);
    if !oracle_fits {
        out.push(skip("constant matrix count", "over budget".into()));
    } else if in_scope {
        let rep = completeness_check(m, budget)?;
        out.push(line(
            "constant matrix count",
            rep.total as u128 == predicted_constant_count(m),
            format!(
                "{} found, {} predicted",
                rep.total,
                predicted_constant_count(m)
            ),
        ));
        let predicted = predicted_det_trace_histogram(m)?;
        out.push(line(
            "det/trace histogram",
            predicted == rep.det_trace_histogram,
            format!("{} nonempty cells", rep.det_trace_histogram.len()),
        ));
        let impossible = impossible_traces(m)?;
        let hit: Vec<(u64, u64)> = impossible
            .iter()
            .filter(|t| rep.count_at(t.det, t.trace) > 0)
            .map(|t| (t.det, t.trace))
            .collect();
        out.push(line(
            "impossible traces empty",
            hit.is_empty(),
            format!("{} impossible pairs, occupied: {hit:?}", impossible.len()),
        ));
        out.push(line(
            "completeness",
            rep.unmatched.is_empty() && rep.anomalies.is_empty(),
            format!(
                "{} nontrivial, {} matched, {} unmatched, {} overlaps, mixed u canonical/shifted {}/{}",
                rep.total - rep.trivial,
                rep.matched,
                rep.unmatched.len(),
                rep.overlaps,
                rep.mixed_offsets.at_canonical_u,
                rep.mixed_offsets.shifted
            ),
        ));
    } else {
        let total = constant_idempotent_entries(n, budget)?.len();
        out.push(line(
            "constant matrix count",
            total as u128 == predicted_constant_count(m),
            format!("{total} found, {} predicted", predicted_constant_count(m)),
        ));
    }

    if in_scope {
        out.push(generator_check(m, draws)?);
    } else {
        out.push(skip(
            "generator soundness",
            "classification needs three primes > 3".into(),
        ));
    }
    Ok(out)
}

/// `draws` seeded draws per family, cycling through its labels.
fn generator_check(m: &Modulus, draws: usize) -> Result<CheckLine, Error> {
    let n = m.n();
    let classifier = Classifier::new(m)?;
    let labels = ClassLabel::all(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(n);
    let mut failures = Vec::new();
    let mut total = 0usize;
    for family in Family::ALL {
        let family_labels: Vec<&ClassLabel> =
            labels.iter().filter(|l| l.family == family).collect();
        for i in 0..draws {
            let label = family_labels[i % family_labels.len()];
            let params = FreeParams::random_for(family, &mut rng, n, DRAW_DEGREE);
            let g = generate(label, m, &params)?;
            total += 1;
            let sound = g.is_idempotent()
                && g.max_degree().unwrap_or(0) <= DRAW_DEGREE
                && det_trace(&g).is_some_and(|(d, t)| d == label.det && t == label.trace)
                && classifier.classify(&g)?.matches_label(label);
            if !sound {
                failures.push(format!("{label}: {g}"));
            }
        }
    }
    let mut detail = format!("{total} draws, {} unsound", failures.len());
    if let Some(first) = failures.first() {
        write!(detail, "; first {first}").unwrap();
    }
    Ok(line("generator soundness", failures.is_empty(), detail))
}

pub(crate) fn render(n: u64, draws: usize, budget: u64) -> Result<Rendered, CliError> {
    let m = Modulus::new(n)?;
    let checks = verify(&m, draws, budget)?;
    let mut text = format!("{}\n", m.describe());
    for c in &checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        };
        writeln!(text, "{tag} {}: {}", c.name, c.detail).unwrap();
    }
    let failed = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .count();
    let total = checks
        .iter()
        .filter(|c| c.status != CheckStatus::Skip)
        .count();
    writeln!(text, "{} of {total} checks passed", total - failed).unwrap();
    Ok(Rendered {
        text,
        json: json!({
            "modulus": m,
            "header": m.describe(),
            "checks": checks,
            "failed": failed,
        }),
        failure: (failed > 0).then_some(CliError::VerifyFailed { failed, total }),
    })
}
