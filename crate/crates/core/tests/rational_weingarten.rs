//! Exact rational Weingarten values from the full Gram system, frozen against
//! the floating-point implementation.

use haarcorr::perm::{self, Permutation};
use haarcorr::weingarten;
use num_rational::Ratio;

type Q = Ratio<i128>;

/// Solves `G w = e_id` over the rationals by Gauss-Jordan elimination.
fn rational_wg(n: usize, q: i128) -> Vec<(Permutation, Q)> {
    let perms: Vec<Permutation> = perm::enumerate(n).unwrap().collect();
    let m = perms.len();
    let mut a: Vec<Vec<Q>> = perms
        .iter()
        .map(|s| {
            let mut row: Vec<Q> = perms
                .iter()
                .map(|t| {
                    let c = s.compose(&t.inverse()).unwrap().num_cycles() as u32;
                    Q::from_integer(q.pow(c))
                })
                .collect();
            row.push(Q::from_integer(if s.is_identity() { 1 } else { 0 }));
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| a[r][col] != Q::from_integer(0))
            .expect("nonsingular");
        a.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..m {
            if r != col && a[r][col] != Q::from_integer(0) {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    perms
        .into_iter()
        .zip(a.into_iter().map(|row| row[m]))
        .collect()
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[test]
fn float_table_matches_rational_solve() {
    for n in 1..=4 {
        for q in [4i128, 5, 6, 9] {
            if q < n as i128 {
                continue;
            }
            for (sigma, w) in rational_wg(n, q) {
                let got = weingarten::wg_exact(n, q as f64, &sigma).unwrap();
                let want = to_f64(w);
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs(),
                    "n={n} q={q} {sigma}: {got} vs {w}"
                );
            }
        }
    }
}

#[test]
fn frozen_rational_values() {
    let lookup = |n: usize, q: i128, ct: &[usize]| {
        rational_wg(n, q)
            .into_iter()
            .find(|(s, _)| s.cycle_type() == ct)
            .map(|(_, w)| w)
            .unwrap()
    };
    assert_eq!(lookup(2, 3, &[1, 1]), Q::new(1, 8));
    assert_eq!(lookup(2, 3, &[2]), Q::new(-1, 24));
    assert_eq!(lookup(3, 4, &[1, 1, 1]), Q::new(14, 4 * 15 * 12));
    assert_eq!(lookup(3, 4, &[3]), Q::new(2, 4 * 15 * 12));
}
