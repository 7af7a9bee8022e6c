use pqr_idempotents::classify::{
    classify, constant_idempotent_entries, generate, predicted_constant_count, ClassLabel,
    Classifier, Family, FreeParams,
};
use pqr_idempotents::quadcong::{scan_trace_solutions, trace_candidates};
use pqr_idempotents::znring::{
    enumerate_idempotents, poly_idempotents_bruteforce, scan_idempotents,
};
use pqr_idempotents::{Mat2Poly, Modulus, Poly};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const IN_SCOPE: [u64; 4] = [385, 455, 595, 1001];

fn three_prime_moduli(limit: u64) -> Vec<u64> {
    (2..=limit)
        .filter(|&n| Modulus::new(n).is_ok_and(|m| m.prime_count() == 3))
        .collect()
}

#[test]
fn idempotents_match_scan_for_squarefree_moduli() {
    for n in 2..3000u64 {
        if let Ok(m) = Modulus::new(n) {
            let crt: Vec<u64> = enumerate_idempotents(&m)
                .iter()
                .map(|r| r.value())
                .collect();
            assert_eq!(crt, scan_idempotents(n), "n={n}");
        }
    }
}

#[test]
fn trace_solver_matches_scan_for_three_primes() {
    for n in three_prime_moduli(1500) {
        let m = Modulus::new(n).unwrap();
        for d in enumerate_idempotents(&m) {
            let set = trace_candidates(&m, d.value()).unwrap();
            assert_eq!(
                set.solutions,
                scan_trace_solutions(n, d.value()),
                "n={n} d={d:?}"
            );
        }
    }
}

#[test]
fn polynomial_idempotents_are_constant() {
    for n in [6u64, 30, 42, 66] {
        let m = Modulus::new(n).unwrap();
        let found = poly_idempotents_bruteforce(&m, 2, u64::MAX).unwrap();
        assert!(found.iter().all(Poly::is_constant), "n={n}");
        assert_eq!(found.len(), 1 << m.prime_count(), "n={n}");
    }
}

#[test]
fn constant_counts_are_multiplicative() {
    for n in [2u64, 3, 6, 10, 15, 21, 30, 33] {
        let m = Modulus::new(n).unwrap();
        let found = constant_idempotent_entries(n, u64::MAX).unwrap().len();
        assert_eq!(found as u128, predicted_constant_count(&m), "n={n}");
    }
}

#[test]
fn every_label_has_a_base_member() {
    for n in IN_SCOPE {
        let m = Modulus::new(n).unwrap();
        let classifier = Classifier::new(&m).unwrap();
        for label in ClassLabel::all(&m).unwrap() {
            let g = generate(&label, &m, &FreeParams::default()).unwrap();
            let report = classifier.classify(&g).unwrap();
            assert!(report.matches_label(&label), "{label}: {g}");
            assert_eq!(report.matches.len(), 1, "{label}");
        }
    }
}

#[test]
fn complement_of_a_class_member_is_idempotent() {
    let m = Modulus::new(455).unwrap();
    for label in ClassLabel::all(&m).unwrap() {
        let params =
            FreeParams::random_for(label.family, &mut ChaCha8Rng::seed_from_u64(7), 455, 5);
        let g = generate(&label, &m, &params).unwrap();
        let c = g.complement();
        assert!(c.is_idempotent());
        let report = classify(&c, &m).unwrap();
        assert!(
            report.trivial || !report.matches.is_empty(),
            "{label}: complement {c}"
        );
    }
}

#[test]
fn non_idempotents_have_no_matches() {
    let m = Modulus::new(385).unwrap();
    let g = Mat2Poly::from_constants(385, [2, 0, 0, 1]);
    let report = classify(&g, &m).unwrap();
    assert!(!report.idempotent);
    assert!(report.matches.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_members_classify_to_their_label(
        which in 0usize..IN_SCOPE.len(),
        family in 0usize..Family::ALL.len(),
        pick in any::<usize>(),
        seed in any::<u64>(),
    ) {
        let n = IN_SCOPE[which];
        let m = Modulus::new(n).unwrap();
        let family = Family::ALL[family];
        let labels: Vec<ClassLabel> = ClassLabel::all(&m)
            .unwrap()
            .into_iter()
            .filter(|l| l.family == family)
            .collect();
        let label = &labels[pick % labels.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = FreeParams::random_for(family, &mut rng, n, 5);
        let g = generate(label, &m, &params).unwrap();
        prop_assert!(g.is_idempotent());
        prop_assert!(g.max_degree().unwrap_or(0) <= 5);
        let report = classify(&g, &m).unwrap();
        prop_assert_eq!(report.det, Some(label.det));
        prop_assert_eq!(report.trace, Some(label.trace));
        prop_assert!(report.matches_label(label));
        prop_assert!(report.anomalies.is_empty());
    }
}
