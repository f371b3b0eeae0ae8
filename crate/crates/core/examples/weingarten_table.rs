//! Weingarten values per cycle type next to their leading asymptotics.
//!
//! cargo run --example weingarten_table -- 4 16

use haarcorr::perm;
use haarcorr::weingarten;

fn main() -> haarcorr::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(3), |s| s.parse()).expect("n");
    let q: f64 = args.next().map_or(Ok(8.0), |s| s.parse()).expect("q");

    println!("n = {n}, q = {q}");
    println!(
        "{:>12} {:>16} {:>16} {:>10}",
        "cycle type", "exact", "leading", "rel gap"
    );
    for ct in perm::partitions(n) {
        let sigma = perm::representative(&ct);
        let exact = weingarten::wg_exact(n, q, &sigma)?;
        let leading = weingarten::wg_leading(n, q, &sigma)?;
        println!(
            "{:>12} {:>16.8e} {:>16.8e} {:>10.2e}",
            format!("{ct:?}"),
            exact,
            leading,
            ((exact - leading) / leading).abs()
        );
    }
    Ok(())
}
