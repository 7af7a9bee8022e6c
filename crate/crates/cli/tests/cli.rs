use std::process::{Command, Output};

use pqr_idempotents::Mat2Poly;

fn pqr_idem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqr-idem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn line_after<'a>(text: &'a str, prefix: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("no line starting with {prefix:?} in\n{text}"))
}

#[test]
fn idempotents_of_105() {
    let out = pqr_idem(&["idempotents", "105"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n = 105 = 3 * 5 * 7\n"));
    assert_eq!(line_after(&text, "idempotents: "), "0 1 15 21 36 70 85 91");
    assert_eq!(text.matches(" ok\n").count(), 8);
}

#[test]
fn idempotents_of_a_prime() {
    let out = pqr_idem(&["idempotents", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n = 7 = 7\n"));
    assert_eq!(line_after(&text, "idempotents: "), "0 1");
    assert!(!text.contains("closed forms"));
}

#[test]
fn oracle_of_5() {
    let out = pqr_idem(&["oracle", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(line_after(&text, "count: "), "32");
    assert_eq!(line_after(&text, "multiplicative: "), "yes");
}

#[test]
fn oracle_respects_budget() {
    let out = pqr_idem(&["oracle", "35", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: BUDGET_EXCEEDED: "));
}

#[test]
fn domain_errors_exit_1() {
    for (args, code) in [
        (&["idempotents", "4"][..], "NOT_SQUAREFREE"),
        (&["solve-trace", "385", "2"][..], "NOT_IDEMPOTENT_DET"),
        (
            &["generate", "det0-general", "--n", "105"][..],
            "PRIMES_OUT_OF_SCOPE",
        ),
        (
            &["generate", "det0-general", "--n", "35"][..],
            "PRIMES_OUT_OF_SCOPE",
        ),
    ] {
        let out = pqr_idem(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(stdout(&out).is_empty());
        let err = stderr(&out);
        assert!(
            err.starts_with(&format!("error: {code}: ")),
            "{args:?}: {err}"
        );
        assert_eq!(err.lines().count(), 1);
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &[][..],
        &["idempotents"][..],
        &["idempotents", "abc"][..],
        &["frobnicate", "5"][..],
        &["generate", "det-nothing", "--n", "385"][..],
        &["generate", "det0-general", "--n", "385", "--e", "1 +"][..],
        &["generate", "det-pair-shift", "--n", "385", "--roles", "5,7"][..],
    ] {
        let out = pqr_idem(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert!(err.starts_with("error: "), "{args:?}: {err}");
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}

#[test]
fn help_exits_0() {
    let out = pqr_idem(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("solve-trace"));
}

#[test]
fn solve_trace_reports_root_list() {
    let out = pqr_idem(&["solve-trace", "385", "210"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n = 385 = 5 * 7 * 11\n"));
    assert_eq!(
        line_after(&text, "traces: "),
        "21 35 120 175 211 266 351 365"
    );
    assert_eq!(line_after(&text, "discrepancies: "), "0");
    assert_eq!(
        line_after(&text, "roots not produced by the list: "),
        "none"
    );
}

#[test]
fn solve_trace_without_root_list() {
    let out = pqr_idem(&["solve-trace", "385", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(line_after(&text, "traces: "), "0 1 56 155 176 210 231 330");
    assert!(text.contains("closed-form root list: none"));
}

#[test]
fn generate_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    for (i, family) in [
        "det0-general",
        "det0-scaled",
        "det-pair-scalar",
        "det-pair-shift",
        "det-pair-mixed",
        "det-single-scalar",
        "det-single-shift",
    ]
    .into_iter()
    .enumerate()
    {
        let path = dir.path().join(format!("{family}.json"));
        let seed = (i as u64 + 1).to_string();
        let out = pqr_idem(&[
            "generate",
            family,
            "--n",
            "385",
            "--seed",
            &seed,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{family}: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.starts_with("n = 385 = 5 * 7 * 11\n"));
        let class = line_after(&text, "class: ").to_string();

        let g = Mat2Poly::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(g.is_idempotent());

        let out = pqr_idem(&["classify", path.to_str().unwrap()]);
        assert!(out.status.success());
        let report = stdout(&out);
        assert_eq!(line_after(&report, "idempotent: "), "yes");
        assert_eq!(line_after(&report, "matches: "), "1");
        assert!(report.contains(&format!("  {class}  witness ")), "{report}");
    }
}

#[test]
fn generate_is_deterministic() {
    let args = [
        "generate",
        "det-single-shift",
        "--n",
        "455",
        "--seed",
        "42",
        "--roles",
        "7,5,13",
    ];
    let a = pqr_idem(&args);
    let b = pqr_idem(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("class: det-single-shift(p=7,q=5,r=13)"));
}

#[test]
fn generate_with_given_e() {
    let out = pqr_idem(&["generate", "det0-general", "--n", "385", "--e", "x"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        line_after(&text, "matrix: "),
        "[[1*x, 1*x + 384*x^2], [1, 1 + 384*x]]"
    );
    assert!(text.contains(r#"{"n":385,"entries":[[[0,1],[0,1,384]],[[1],[1,384]]]}"#));
}

#[test]
fn generate_rejects_wrong_scale() {
    let out = pqr_idem(&["generate", "det0-scaled", "--n", "385", "--scale", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: INCONSISTENT_LABEL: "));
}

#[test]
fn classify_non_idempotent_and_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.json");
    std::fs::write(&plain, r#"{"n":385,"entries":[[[2],[]],[[],[1]]]}"#).unwrap();
    let out = pqr_idem(&["classify", plain.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(line_after(&stdout(&out), "idempotent: "), "no");

    let trailing = dir.path().join("trailing.json");
    std::fs::write(&trailing, r#"{"n":385,"entries":[[[1,0],[]],[[],[1]]]}"#).unwrap();
    let out = pqr_idem(&["classify", trailing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: INVALID_MATRIX_FILE: "));

    let out = pqr_idem(&[
        "classify",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: IO: "));
}

#[test]
fn classify_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.json");
    std::fs::write(&path, r#"{"n":455,"entries":[[[1],[]],[[],[1]]]}"#).unwrap();
    let out = pqr_idem(&["classify", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n = 455 = 5 * 7 * 13\n"));
    assert_eq!(line_after(&text, "trivial: "), "yes");
    assert_eq!(line_after(&text, "matches: "), "0");
}

#[test]
fn json_mirrors_text() {
    let out = pqr_idem(&["idempotents", "385", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["header"], "n = 385 = 5 * 7 * 11");
    let list: Vec<u64> = serde_json::from_value(v["idempotents"].clone()).unwrap();
    assert_eq!(list, [0, 1, 56, 155, 176, 210, 231, 330]);
    assert_eq!(v["closed_forms"].as_array().unwrap().len(), 8);

    let out = pqr_idem(&["oracle", "--json", "35"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 1856);
    assert_eq!(v["crt_product"], "1856");
}

#[test]
fn verify_passes_in_scope() {
    let out = pqr_idem(&["verify", "385", "--draws", "10"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.starts_with("n = 385 = 5 * 7 * 11\n"));
    assert!(!text.contains("FAIL"));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 13);
}

#[test]
fn verify_skips_out_of_scope_checks() {
    let out = pqr_idem(&["verify", "105"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("SKIP trace candidate count"));
    assert!(text.contains("SKIP generator soundness"));
    assert!(text.contains("PASS constant matrix count: 25984 found, 25984 predicted"));
}
