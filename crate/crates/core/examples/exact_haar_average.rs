//! Exact Haar averages of trace polynomials, including trace-power moments.
//!
//! cargo run --example exact_haar_average

use std::collections::BTreeMap;

use haarcorr::linalg::default_z;
use haarcorr::oracle::{self, MomentExpression};

fn main() -> haarcorr::Result<()> {
    let q = 6;
    let ops = BTreeMap::from([("Z".to_string(), default_z(q)?)]);

    for text in [
        "tr[ U ] * tr[ U^-1 ]",
        "tr[ U^2 ] * tr[ U^-2 ]",
        "tr[ U ] * tr[ U ] * tr[ U^-1 ] * tr[ U^-1 ]",
        "ntr[ Z U Z U^dag ]",
        "ntr[ Z U Z U^dag Z U Z U^dag ]",
        "1/q * tr[ Z U^2 Z U^-1 Z U Z U^-2 ]",
    ] {
        let e = MomentExpression::parse(text, &ops)?;
        let avg = oracle::haar_average(&e, q)?;
        println!(
            "q={q}  {text:<48} = {:+.12}  ({} unitaries, {} terms)",
            avg.value.re, avg.n_unitaries, avg.term_count
        );
    }

    println!("\ntrace-power moments against the closed form");
    for (a, b) in [
        (vec![2], vec![2]),
        (vec![1, 1], vec![1, 1]),
        (vec![0, 0, 1], vec![0, 0, 1]),
        (vec![1], vec![0, 1]),
    ] {
        let exact = oracle::haar_average(&oracle::trace_power_expression(&a, &b), q)?
            .value
            .re;
        let closed = oracle::trace_power_moment(&a, &b, q)?;
        println!("a={a:?} b={b:?}: oracle {exact:.12}, closed form {closed}");
    }
    Ok(())
}
