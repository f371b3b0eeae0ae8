mod common;

use common::*;
use haarcorr::haar_mc;
use haarcorr::oracle::{self, Atom, MomentExpression, TraceWord};
use num_complex::Complex64;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRng, TestRunner};

#[test]
fn sampled_moments_match_oracle() {
    let q = 8;
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::deterministic_rng(Default::default()),
    );
    let strategy = expression_strategy(3);
    for case in 0..20u64 {
        let spec = strategy.new_tree(&mut runner).unwrap().current();
        let e = build_expression(&spec, q, case);
        let exact = oracle::haar_average(&e, q).unwrap().value;
        let est = haar_mc::estimate(&e, q, 4000, 1000 + case).unwrap();
        assert!(
            est.agrees_with(exact, 3.0),
            "case {case} {e}: exact {exact}, mc {} +/- ({}, {})",
            est.mean,
            est.std_error_re,
            est.std_error_im
        );
    }
}

fn power_pair(m: i64) -> MomentExpression {
    MomentExpression::new()
        .with_trace(TraceWord::new(vec![Atom::U(m)]))
        .with_trace(TraceWord::new(vec![Atom::U(-m)]))
}

#[test]
fn trace_power_moments_within_four_sigma() {
    for m in 1..=3 {
        let est = haar_mc::estimate(&power_pair(m), 8, 10_000, 17).unwrap();
        assert!(
            est.agrees_with(Complex64::from(m as f64), 4.0),
            "m={m}: {est:?}"
        );
    }
}

#[test]
fn worker_count_does_not_change_bits() {
    let e = power_pair(2);
    let one = haar_mc::estimate_on_workers(&e, 6, 500, 9, 1).unwrap();
    let four = haar_mc::estimate_on_workers(&e, 6, 500, 9, 4).unwrap();
    assert_eq!(one.mean.re.to_bits(), four.mean.re.to_bits());
    assert_eq!(one.mean.im.to_bits(), four.mean.im.to_bits());
    assert_eq!(one.std_error_re.to_bits(), four.std_error_re.to_bits());
}

#[test]
fn standard_error_shrinks_like_root_n() {
    let e = power_pair(1);
    let small = haar_mc::estimate(&e, 8, 2_500, 3).unwrap();
    let large = haar_mc::estimate(&e, 8, 10_000, 3).unwrap();
    let ratio = small.std_error_re / large.std_error_re;
    assert!((ratio / 2.0 - 1.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn samples_are_unitary() {
    for i in 0..50 {
        let u = haar_mc::sample_unitary(12, &mut haar_mc::sample_stream(5, i));
        assert!(haarcorr::linalg::unitarity_defect(&u) < 1e-10);
    }
}
