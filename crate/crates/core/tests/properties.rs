mod common;

use std::collections::BTreeSet;

use common::*;
use haarcorr::cobweb;
use haarcorr::correlators::{self, TimeSequence};
use haarcorr::haar_mc;
use haarcorr::linalg::default_z;
use haarcorr::oracle::{self, Atom, MomentExpression, TraceWord};
use haarcorr::otoc;
use haarcorr::perm::{self, Permutation};
use haarcorr::weingarten;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn perm_strategy(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn time_strategy(lengths: &'static [usize]) -> impl Strategy<Value = TimeSequence> {
    prop::sample::select(lengths)
        .prop_flat_map(|n| prop::collection::vec(-3i64..=3, n))
        .prop_filter_map("consecutive equal times", |v| TimeSequence::new(v).ok())
}

proptest! {
    #[test]
    fn distance_plus_cycles_is_n(p in perm_strategy(9)) {
        prop_assert_eq!(p.transposition_distance() + p.num_cycles(), p.len());
    }

    #[test]
    fn inverse_composes_to_identity(p in perm_strategy(9)) {
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn cycle_notation_round_trips(p in perm_strategy(9)) {
        let back = Permutation::from_cycles(&p.to_string(), p.len()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn even_cycle_only_is_consistent(p in perm_strategy(8)) {
        if p.is_even_cycle_only() {
            prop_assert_eq!(p.len() % 2, 0);
            let from_lengths: i8 = p.cycle_type().iter().map(|&l| if l % 2 == 0 { -1i8 } else { 1 }).product();
            prop_assert_eq!(from_lengths, p.cycle_stats().parity);
            prop_assert_eq!(from_lengths, p.parity());
        }
    }
}

#[test]
fn parity_is_a_homomorphism_on_s4() {
    let all: Vec<Permutation> = perm::enumerate(4).unwrap().collect();
    for p in &all {
        for r in &all {
            assert_eq!(p.compose(r).unwrap().parity(), p.parity() * r.parity());
        }
    }
}

#[test]
fn enumerate_yields_distinct_factorial_many() {
    for n in 1..=6 {
        let set: BTreeSet<Vec<usize>> = perm::enumerate(n)
            .unwrap()
            .map(|p| p.images().to_vec())
            .collect();
        assert_eq!(set.len() as u64, perm::factorial(n));
    }
}

#[test]
fn weingarten_is_a_class_function() {
    for n in 1..=4 {
        let all: Vec<Permutation> = perm::enumerate(n).unwrap().collect();
        for sigma in &all {
            let base = weingarten::wg_exact(n, 7.0, sigma).unwrap();
            for rho in &all {
                let conj = rho.compose(sigma).unwrap().compose(&rho.inverse()).unwrap();
                assert_eq!(weingarten::wg_exact(n, 7.0, &conj).unwrap(), base);
            }
        }
    }
}

#[test]
fn weingarten_defining_relation() {
    for n in 1..=4 {
        let all: Vec<Permutation> = perm::enumerate(n).unwrap().collect();
        for q in [6.0f64, 9.0] {
            for sigma in &all {
                let sum: f64 = all
                    .iter()
                    .map(|tau| {
                        let arg = sigma.compose(&tau.inverse()).unwrap();
                        weingarten::wg_exact(n, q, &arg).unwrap() * q.powi(tau.num_cycles() as i32)
                    })
                    .sum();
                let delta = if sigma.is_identity() { 1.0 } else { 0.0 };
                assert!(
                    (sum - delta).abs() <= 1e-9,
                    "n={n} q={q} sigma={sigma}: {sum}"
                );
            }
        }
    }
}

#[test]
fn two_perfect_matchings_never_compose_to_the_long_cycle() {
    for n in [2usize, 4] {
        let pi = Permutation::canonical_pi(n);
        let pairings: Vec<Permutation> = perm::enumerate(n)
            .unwrap()
            .filter(|p| p.cycle_type() == vec![2; n / 2])
            .collect();
        for sigma in &pairings {
            for tau in pairings.iter().filter(|t| t.is_even_cycle_only()) {
                assert_ne!(tau.compose(&sigma.inverse()).unwrap(), pi);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn oracle_is_cyclic(spec in expression_strategy(3), k in 0usize..6, seed in 0u64..1000) {
        let q = 4;
        let e = build_expression(&spec, q, seed);
        let mut rotated = e.clone();
        let w = &rotated.factors[0];
        rotated.factors[0] = w.rotated(k % w.atoms.len());
        let a = oracle::haar_average(&e, q).unwrap().value;
        let b = oracle::haar_average(&rotated, q).unwrap().value;
        prop_assert!(close(a, b, 1e-12 * (1.0 + a.norm())), "{a} vs {b}");
    }

    #[test]
    fn oracle_commutes_with_conjugation(spec in expression_strategy(3), seed in 0u64..1000) {
        let q = 4;
        let e = build_expression(&spec, q, seed);
        let a = oracle::haar_average(&e, q).unwrap().value;
        let b = oracle::haar_average(&e.conjugate(), q).unwrap().value;
        prop_assert!(close(a.conj(), b, 1e-12 * (1.0 + a.norm())), "{a} vs {b}");
    }

    #[test]
    fn odd_correlators_vanish(t in time_strategy(&[3, 5])) {
        prop_assume!(t.n_unitaries() <= 3);
        let q = 4;
        let v = correlators::avg_correlator_exact(&t, q, &default_z(q).unwrap()).unwrap();
        prop_assert!(v.norm() <= 1e-12);
    }

    #[test]
    fn evaluate_is_cyclic(t in time_strategy(&[2, 3, 4, 5, 6]), k in 0usize..6, seed in any::<u64>()) {
        let q = 6;
        let z = default_z(q).unwrap();
        let u = haar_mc::sample_unitary(q, &mut haar_mc::sample_stream(seed, 0));
        let mut times = t.times().to_vec();
        let len = times.len();
        times.rotate_left(k % len);
        let a = correlators::evaluate(&t, &u, &z).unwrap();
        let b = correlators::evaluate(&TimeSequence::new(times).unwrap(), &u, &z).unwrap();
        prop_assert!(close(a, b, 1e-10));
    }

    #[test]
    fn average_is_shift_invariant(t in time_strategy(&[2, 3, 4]), c in -5i64..5) {
        prop_assume!(t.n_unitaries() <= 3);
        let q = 6;
        let z = default_z(q).unwrap();
        let a = correlators::avg_correlator_exact(&t, q, &z).unwrap();
        let b = correlators::avg_correlator_exact(&t.shifted(c), q, &z).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn symmetry_factor_divides_length(t in time_strategy(&[2, 3, 4, 5, 6, 8])) {
        prop_assert_eq!(t.len() % correlators::symmetry_factor(&t), 0);
    }
}

#[test]
fn unit_normalized_trace_is_one() {
    let e = MomentExpression::new()
        .with_normalized_trace(TraceWord::new(vec![Atom::U(1), Atom::U(-1)]));
    for q in 1..=12 {
        assert_eq!(
            oracle::haar_average(&e, q).unwrap().value,
            Complex64::new(1.0, 0.0)
        );
    }
}

#[test]
fn even_correlators_decay() {
    for t in correlators::enumerate_sequences(4, 3, 3) {
        for q in [6usize, 8] {
            let v = correlators::avg_correlator_exact(&t, q, &default_z(q).unwrap()).unwrap();
            assert!(v.norm() * (q * q) as f64 <= 10.0, "t=({t}) q={q}: {v}");
        }
    }
}

#[test]
fn pair_gram_is_positive() {
    for q in [2usize, 3, 4, 8, 64] {
        let ev = otoc::pair_gram(q).symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let c = 1.0 / q as f64;
        assert!((ev[0] - (1.0 - c)).abs() < 1e-14 && (ev[1] - (1.0 + c)).abs() < 1e-14);
        assert!(ev[0] > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduction_is_sound(e in 1usize..=8, seed in any::<u64>()) {
        let d = cobweb::random_diagram(e, &mut ChaCha20Rng::seed_from_u64(seed));
        let rep = d.reduce();
        let mut before = d.count_loops();
        for (i, step) in rep.steps.iter().enumerate() {
            let after = step.result.count_loops();
            prop_assert_eq!(before, after + 1);
            prop_assert_eq!(d.count_loops(), i + 1 + after);
            before = after;
        }
        prop_assert_eq!(rep.loop_credits, rep.removed_parallel + rep.removed_bubble);
        prop_assert_eq!(d.count_loops(), rep.loop_credits + rep.reduced.count_loops());
    }

    #[test]
    fn reduction_is_confluent(e in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let d = cobweb::random_diagram(e, &mut rng);
        let base = d.reduce();
        for _ in 0..10 {
            let r = d.reduce_random(&mut rng);
            prop_assert_eq!(r.reduced_chords(), base.reduced_chords());
            prop_assert_eq!(r.loop_credits, base.loop_credits);
        }
    }

    #[test]
    fn loop_bounds_hold(e in 2usize..=8, seed in any::<u64>()) {
        let d = cobweb::random_diagram(e, &mut ChaCha20Rng::seed_from_u64(seed));
        let rep = d.reduce();
        let ep = rep.reduced_chords();
        if ep >= 2 {
            prop_assert!(rep.reduced.count_loops() as f64 <= (2.0 * ep as f64 / 3.0).max(1.0));
        }
        if !d.is_planar() {
            prop_assert!(d.count_loops() as f64 <= e as f64 - ep as f64 / 3.0);
        }
        if ep == 2 {
            prop_assert_eq!(rep.reduced.to_string(), "4; 0-2, 1-3");
            prop_assert_eq!(d.count_loops(), e - 1);
        }
    }
}

#[test]
fn planarity_equivalences_exhaustive() {
    for e in 0..=5 {
        for d in cobweb::all_matchings(e) {
            let planar = d.is_planar();
            assert_eq!(planar, d.reduce().reduced_chords() == 0, "{d}");
            assert_eq!(planar, d.count_loops() == e + 1, "{d}");
        }
    }
}

#[test]
fn reduced_diagrams_on_few_vertices() {
    let reduced = |e: usize| -> Vec<String> {
        cobweb::all_matchings(e)
            .into_iter()
            .filter(|d| d.reduce().reduced_chords() == e)
            .map(|d| d.to_string())
            .collect()
    };
    assert_eq!(reduced(2), vec!["4; 0-2, 1-3"]);
    assert_eq!(reduced(3), vec!["6; 0-3, 1-4, 2-5"]);
}
