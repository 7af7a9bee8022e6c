use std::fmt::Write as _;
use std::path::Path;

use pqr_idempotents::classify::{
    constant_idempotent_entries, generate as build, predicted_constant_count,
    scale_annihilator_pairs, ClassLabel, Classifier, Family, FreeParams, PrimeRoles,
};
use pqr_idempotents::quadcong::{lemma_formula_solutions, trace_candidates, FormulaFamily};
use pqr_idempotents::znring::{enumerate_idempotents, euler_cross_check};
use pqr_idempotents::{Error, Mat2Poly, Modulus, Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{join, CliError, GenerateArgs, Rendered};

fn ok(text: String, json: serde_json::Value) -> Result<Rendered, CliError> {
    Ok(Rendered {
        text,
        json,
        failure: None,
    })
}

pub(crate) fn idempotents(n: u64) -> Result<Rendered, CliError> {
    let m = Modulus::new(n)?;
    let values: Vec<u64> = enumerate_idempotents(&m)
        .iter()
        .map(|r| r.value())
        .collect();
    let mut text = format!("{}\n", m.describe());
    writeln!(text, "count: {}", values.len()).unwrap();
    writeln!(text, "idempotents: {}", join(&values)).unwrap();

    let rows = if m.prime_count() == 3 {
        euler_cross_check(&m)?
    } else {
        Vec::new()
    };
    if !rows.is_empty() {
        text += "closed forms (pattern over p q r, expression, value, crt):\n";
        for row in &rows {
            let status = if row.closed_form_matches() {
                "ok"
            } else {
                "MISMATCH"
            };
            writeln!(
                text,
                "  {} {:<16} {:>10} {:>10} {}",
                row.pattern, row.expression, row.closed_form, row.crt, status
            )
            .unwrap();
            if let (Some(expr), Some(v)) = (row.alternate_expression, row.alternate_value) {
                let agrees = if v == row.crt { "agrees" } else { "differs" };
                writeln!(text, "      variant {expr} = {v} ({agrees})").unwrap();
            }
        }
    }
    ok(
        text,
        json!({
            "modulus": m,
            "header": m.describe(),
            "idempotents": values,
            "closed_forms": rows,
        }),
    )
}

/// The printed root list that applies to determinant `d`, if any.
fn formula_family(m: &Modulus, d: u64) -> Option<FormulaFamily> {
    let primes = m.primes();
    if primes.len() != 3 {
        return None;
    }
    let zeros: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| d.is_multiple_of(p))
        .collect();
    match zeros.len() {
        2 => Some(FormulaFamily::PrimePairDet {
            pair: (zeros[0], zeros[1]),
        }),
        1 => Some(FormulaFamily::SinglePrimeDet { pivot: zeros[0] }),
        _ => None,
    }
}

pub(crate) fn solve_trace(n: u64, d: u64) -> Result<Rendered, CliError> {
    let m = Modulus::new(n)?;
    let set = trace_candidates(&m, d)?;
    let mut text = format!("{}\n", m.describe());
    writeln!(text, "det: {d}").unwrap();
    writeln!(text, "count: {}", set.solutions.len()).unwrap();
    writeln!(text, "traces: {}", join(&set.solutions)).unwrap();

    let report = formula_family(&m, d)
        .map(|family| lemma_formula_solutions(&m, family))
        .transpose()?;
    match &report {
        None => text += "closed-form root list: none for this determinant\n",
        Some(rep) => {
            writeln!(
                text,
                "closed-form root list (roles p={} q={} r={}):",
                rep.roles[0], rep.roles[1], rep.roles[2]
            )
            .unwrap();
            for e in &rep.entries {
                let status = match (e.in_solution_set, e.matches_intended) {
                    (true, true) => "ok",
                    (true, false) => "SOLVES-OTHER-ROOT",
                    (false, _) => "NOT-A-ROOT",
                };
                let intended: Vec<String> = e.intended.iter().map(i64::to_string).collect();
                writeln!(
                    text,
                    "  {:<36} {:>6}  residues {:?} intended [{}]  {}",
                    e.expression,
                    e.value,
                    e.residues,
                    intended.join(", "),
                    status
                )
                .unwrap();
            }
            writeln!(text, "discrepancies: {}", rep.discrepancies().len()).unwrap();
            let missing = rep.missing_from_formulas();
            if missing.is_empty() {
                text += "roots not produced by the list: none\n";
            } else {
                writeln!(text, "roots not produced by the list: {}", join(missing)).unwrap();
            }
        }
    }
    ok(
        text,
        json!({
            "modulus": m,
            "header": m.describe(),
            "candidates": set,
            "formula_report": report,
        }),
    )
}

pub(crate) fn classify(path: &Path) -> Result<Rendered, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let g = Mat2Poly::from_json(&raw)?;
    let m = Modulus::new(g.modulus())?;
    let report = Classifier::new(&m)?.classify(&g)?;

    let mut text = format!("{}\n", m.describe());
    writeln!(text, "matrix: {g}").unwrap();
    writeln!(text, "idempotent: {}", yes_no(report.idempotent)).unwrap();
    if report.idempotent {
        writeln!(text, "trivial: {}", yes_no(report.trivial)).unwrap();
        writeln!(text, "det: {}", report.det.unwrap_or_default()).unwrap();
        writeln!(text, "trace: {}", report.trace.unwrap_or_default()).unwrap();
        writeln!(text, "matches: {}", report.matches.len()).unwrap();
        for mt in &report.matches {
            writeln!(text, "  {}  witness {}", mt.label, mt.witness).unwrap();
        }
    }
    for a in &report.anomalies {
        writeln!(text, "anomaly: {a}").unwrap();
    }
    ok(
        text,
        json!({
            "modulus": m,
            "header": m.describe(),
            "matrix": g.to_file(),
            "report": report,
        }),
    )
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    name.to_ascii_lowercase()
        .replace('_', "-")
        .parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn parse_poly(text: &Option<String>, n: u64) -> Result<Option<Poly>, CliError> {
    text.as_deref()
        .map(|t| Poly::parse(t, n))
        .transpose()
        .map_err(CliError::from)
}

pub(crate) fn generate(args: &GenerateArgs) -> Result<Rendered, CliError> {
    let family = parse_family(&args.family)?;
    let m = Modulus::new(args.n)?;
    let n = m.n();
    let roles = match args.roles.as_deref() {
        None => match *m.primes() {
            [p, q, r] => PrimeRoles::new(p, q, r),
            _ => {
                return Err(Error::PrimesOutOfScope {
                    primes: m.primes().to_vec(),
                }
                .into())
            }
        },
        Some(&[p, q, r]) => PrimeRoles::new(p, q, r),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--roles takes three primes p,q,r, got {}",
                other.len()
            )))
        }
    };
    let scale = match (family, args.scale) {
        (Family::Det0Scaled, None) => Some(scale_annihilator_pairs(&m)?[0].0),
        (_, s) => s,
    };
    let label = ClassLabel::new(&m, family, roles, scale)?;

    let mut params = match args.seed {
        Some(seed) => {
            FreeParams::random_for(family, &mut ChaCha8Rng::seed_from_u64(seed), n, args.degree)
        }
        None => FreeParams::default(),
    };
    if let Some(e) = parse_poly(&args.e, n)? {
        params.e = Some(e);
    }
    if let Some(f) = parse_poly(&args.f, n)? {
        params.f = Some(f);
    }
    if let Some(g) = parse_poly(&args.g, n)? {
        params.g = Some(g);
    }
    if let Some(mult) = parse_poly(&args.multiplier, n)? {
        params.multiplier = Some(mult);
    }
    let g = build(&label, &m, &params)?;
    let file_json = g.to_json();

    let mut text = format!("{}\n", m.describe());
    writeln!(text, "class: {label}").unwrap();
    writeln!(text, "det: {}", label.det).unwrap();
    writeln!(text, "trace: {}", label.trace).unwrap();
    writeln!(text, "matrix: {g}").unwrap();
    match &args.out {
        Some(path) => {
            std::fs::write(path, format!("{file_json}\n"))
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            writeln!(text, "wrote: {}", path.display()).unwrap();
        }
        None => writeln!(text, "{file_json}").unwrap(),
    }
    ok(
        text,
        json!({
            "modulus": m,
            "header": m.describe(),
            "label": label,
            "matrix": g.to_file(),
            "out": args.out.as_ref().map(|p| p.display().to_string()),
        }),
    )
}

pub(crate) fn oracle(n: u64, budget: u64) -> Result<Rendered, CliError> {
    let m = Modulus::new(n)?;
    let entries = constant_idempotent_entries(n, budget)?;
    let count = entries.len();
    let nontrivial = entries
        .iter()
        .filter(|&&[e, f, g, h]| !(f == 0 && g == 0 && e == h && (e == 0 || e == 1 % n)))
        .count();
    let per_prime: Vec<(u64, u128)> = m
        .primes()
        .iter()
        .map(|&p| (p, 2 + u128::from(p) * u128::from(p + 1)))
        .collect();
    let predicted = predicted_constant_count(&m);

    let mut text = format!("{}\n", m.describe());
    writeln!(text, "count: {count}").unwrap();
    writeln!(text, "nontrivial: {nontrivial}").unwrap();
    let factors: Vec<String> = per_prime.iter().map(|(p, c)| format!("{p}:{c}")).collect();
    writeln!(text, "per prime: {}", factors.join(" ")).unwrap();
    writeln!(text, "crt product: {predicted}").unwrap();
    writeln!(
        text,
        "multiplicative: {}",
        yes_no(predicted == count as u128)
    )
    .unwrap();
    ok(
        text,
        json!({
            "modulus": m,
            "header": m.describe(),
            "count": count,
            "nontrivial": nontrivial,
            "per_prime": per_prime.iter().map(|(p, c)| json!({"prime": p, "count": c.to_string()})).collect::<Vec<_>>(),
            "crt_product": predicted.to_string(),
            "multiplicative": predicted == count as u128,
        }),
    )
}
