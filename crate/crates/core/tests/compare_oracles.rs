mod common;

use nmda_core::compare::{
    check_k_bound, decide, min_diff_finite, min_diff_infinite, Case, ComparisonInstance, KBound, Relation, Verdict,
    Witness, WordMode, DEFAULT_SEARCH_DEPTH,
};
use nmda_core::eval::{word_value_finite, word_value_lasso};
use nmda_core::rational::{int, Rational};
use nmda_core::samples::single_state;

use common::*;

#[test]
fn infinite_min_diff_inside_oracle_at_several_depths() {
    let mut rng = rng(100);
    for i in 0..100 {
        let (la, ld) = (random_lambda(&mut rng), random_lambda(&mut rng));
        let left = random_nda(&mut rng, 4, &la);
        let right = random_dda(&mut rng, 4, &ld);
        let report = min_diff_infinite(&left, &right).unwrap();
        for depth in [5, 10, 20] {
            let (lo, hi) = min_diff_interval(&left, &right, depth);
            assert!(
                lo <= report.min_diff && report.min_diff <= hi,
                "instance {i}, depth {depth}: {} not in [{lo}, {hi}]",
                report.min_diff
            );
        }
    }
}

#[test]
fn finite_min_diff_inside_oracle_and_witness_exact() {
    let mut rng = rng(101);
    let mut attained = 0;
    for i in 0..100 {
        let (la, ld) = (random_lambda(&mut rng), random_lambda(&mut rng));
        let left = random_nda(&mut rng, 3, &la);
        let right = random_dda(&mut rng, 3, &ld);
        let report = min_diff_finite(&left, &right).unwrap();
        let (lo, hi) = finite_min_diff_interval(&left, &right, 16);
        assert!(
            lo <= report.min_diff && report.min_diff <= hi,
            "instance {i}: {} not in [{lo}, {hi}]",
            report.min_diff
        );
        match (&report.witness, report.attained) {
            (Some(Witness::Finite(u)), true) => {
                attained += 1;
                assert!(!u.is_empty());
                let diff =
                    word_value_finite(&left, u).unwrap().unwrap() - word_value_finite(&right, u).unwrap().unwrap();
                assert_eq!(diff, report.min_diff, "instance {i}");
            }
            (None, false) => {}
            other => panic!("instance {i}: inconsistent report {other:?}"),
        }
    }
    assert!(attained > 0);
}

#[test]
fn every_case_is_exercised() {
    let mut rng = rng(102);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..300 {
        let (la, ld) = (random_lambda(&mut rng), random_lambda(&mut rng));
        let left = random_nda(&mut rng, 3, &la);
        let right = random_dda(&mut rng, 3, &ld);
        seen.insert(min_diff_infinite(&left, &right).unwrap().case);
    }
    let x = single_state(int(1), int(1), int(2));
    let y = single_state(int(0), int(1), int(3));
    seen.insert(min_diff_infinite(&x, &y).unwrap().case);
    seen.insert(min_diff_infinite(&y, &x).unwrap().case);
    for case in [
        Case::EqualFactors,
        Case::ConstantLeft,
        Case::ConstantRight,
        Case::Unfolded,
    ] {
        assert!(seen.contains(&case), "{case:?} never produced");
    }
}

#[test]
fn verdicts_agree_with_min_diff() {
    let mut rng = rng(103);
    for i in 0..60 {
        let (la, ld) = (random_lambda(&mut rng), random_lambda(&mut rng));
        let left = random_nda(&mut rng, 3, &la);
        let right = random_dda(&mut rng, 3, &ld);
        for mode in [WordMode::Infinite, WordMode::Finite] {
            let instance = ComparisonInstance::new(left.clone(), right.clone(), mode).unwrap();
            let d = decide(&instance, Relation::Geq, DEFAULT_SEARCH_DEPTH).unwrap();
            let zero = Rational::from_integer(0.into());
            assert_eq!(d.verdict, Verdict::from_bool(d.report.min_diff >= zero), "instance {i}");
            if d.verdict == Verdict::False {
                // The certificate is a word on which left < right.
                let diff = match d.certificate.expect("false verdicts carry a word") {
                    Witness::Lasso(w) => {
                        word_value_lasso(&left, &w).unwrap() - word_value_lasso(instance.right(), &w).unwrap()
                    }
                    Witness::Finite(u) => {
                        word_value_finite(&left, &u).unwrap().unwrap()
                            - word_value_finite(instance.right(), &u).unwrap().unwrap()
                    }
                };
                assert!(diff < zero, "instance {i}: certificate gives {diff}");
            }
            let gt = decide(&instance, Relation::Gt, DEFAULT_SEARCH_DEPTH).unwrap().verdict;
            if gt == Verdict::True {
                assert_eq!(d.verdict, Verdict::True);
            }
        }
    }
}

#[test]
fn deterministic_equality_is_decided() {
    let mut rng = rng(104);
    for _ in 0..40 {
        let lambda = random_lambda(&mut rng);
        let d = random_dda(&mut rng, 3, &lambda);
        let instance = ComparisonInstance::new(d.clone(), d.clone(), WordMode::Infinite).unwrap();
        assert_eq!(decide(&instance, Relation::Eq, 4).unwrap().verdict, Verdict::True);
        let other = random_dda(&mut rng, 3, &lambda);
        let instance = ComparisonInstance::new(d.clone(), other, WordMode::Infinite).unwrap();
        let eq = decide(&instance, Relation::Eq, 4).unwrap().verdict;
        assert_ne!(eq, Verdict::Unknown, "deterministic left operands never give unknown");
    }
}

#[test]
fn k_stays_within_size_bound() {
    let mut rng = rng(105);
    let mut checked = 0;
    for _ in 0..200 {
        let (la, ld) = (random_lambda(&mut rng), random_lambda(&mut rng));
        let left = random_nda(&mut rng, 4, &la);
        let right = random_dda(&mut rng, 4, &ld);
        let instance = ComparisonInstance::new(left, right, WordMode::Infinite).unwrap();
        if let KBound::Checked { k, bound, holds, .. } = check_k_bound(&instance).unwrap() {
            assert!(holds && (k as u128) <= bound);
            checked += 1;
        }
    }
    assert!(checked > 50);
}
