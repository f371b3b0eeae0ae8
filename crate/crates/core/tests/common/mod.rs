#![allow(dead_code)]

use haarcorr::linalg::{self, CMatrix};
use haarcorr::oracle::{Atom, MomentExpression, TraceWord};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Dense complex matrix with i.i.d. entries in the unit square, seeded.
pub fn random_matrix(q: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    CMatrix::from_fn(q, q, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Traceless Hermitian matrix with `Tr(O†O) = q`, seeded.
pub fn random_traceless_hermitian(q: usize, seed: u64) -> CMatrix {
    let a = random_matrix(q, seed);
    linalg::normalize_traceless(&(&a + a.adjoint()))
}

#[derive(Clone, Copy, Debug)]
pub enum AtomSpec {
    U(i64),
    Op(usize, bool),
}

pub const OP_NAMES: [&str; 2] = ["Z", "A"];

/// Random words over `U^{±1}`, `U^{±2}`, `Z` and a generic operator `A`,
/// with at most `max_u` unitaries and adjoints each.
pub fn expression_strategy(max_u: usize) -> impl Strategy<Value = Vec<Vec<AtomSpec>>> {
    let atom = prop_oneof![
        prop::sample::select(vec![1i64, -1, 2, -2]).prop_map(AtomSpec::U),
        (0..2usize, any::<bool>()).prop_map(|(k, d)| AtomSpec::Op(k, d)),
    ];
    prop::collection::vec(prop::collection::vec(atom, 1..5), 1..3).prop_filter(
        "unitary budget",
        move |f| {
            let (mut p, mut n) = (0i64, 0i64);
            for a in f.iter().flatten() {
                if let AtomSpec::U(k) = a {
                    if *k > 0 {
                        p += k
                    } else {
                        n -= k
                    }
                }
            }
            p as usize <= max_u && n as usize <= max_u
        },
    )
}

pub fn build_expression(spec: &[Vec<AtomSpec>], q: usize, op_seed: u64) -> MomentExpression {
    let mut e = MomentExpression::new()
        .with_operator("Z", linalg::default_z(q).unwrap())
        .with_operator("A", random_matrix(q, op_seed));
    for word in spec {
        let atoms = word
            .iter()
            .map(|a| match *a {
                AtomSpec::U(k) => Atom::U(k),
                AtomSpec::Op(k, dagger) => Atom::Fixed {
                    op: OP_NAMES[k].to_string(),
                    dagger,
                },
            })
            .collect();
        e = e.with_normalized_trace(TraceWord::new(atoms));
    }
    e
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
