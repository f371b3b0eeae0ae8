//! Seeded Monte Carlo estimates compared with exact averages.
//!
//! cargo run --release --example haar_sampling -- 20000

use haarcorr::haar_mc;
use haarcorr::linalg::unitarity_defect;
use haarcorr::oracle::{self, Atom, MomentExpression, TraceWord};

fn main() -> haarcorr::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(10_000, |s| s.parse().expect("sample count"));
    let (q, seed) = (8, 2024);

    let u = haar_mc::sample_unitary(q, &mut haar_mc::sample_stream(seed, 0));
    println!(
        "unitarity defect of one sample: {:.2e}",
        unitarity_defect(&u)
    );

    for m in 1..=3 {
        let e = MomentExpression::new()
            .with_trace(TraceWord::new(vec![Atom::U(m)]))
            .with_trace(TraceWord::new(vec![Atom::U(-m)]));
        let est = haar_mc::estimate(&e, q, n, seed)?;
        let exact = oracle::haar_average(&e, q)?.value;
        println!(
            "E|Tr U^{m}|^2: mc {:.4} +/- {:.4}, exact {:.4}, within 4 sigma: {}",
            est.mean.re,
            est.std_error(),
            exact.re,
            est.agrees_with(exact, 4.0)
        );
    }
    Ok(())
}
