//! Compensated second moments approach the number of cyclic symmetries of
//! the time sequence.
//!
//! cargo run --release --example second_moment

use haarcorr::correlators::{self, ProbeMode, TimeSequence};

fn main() -> haarcorr::Result<()> {
    let qs = [8, 16, 32];
    for text in ["0,1", "0,1,0,1", "0,1,0,2"] {
        let t: TimeSequence = text.parse()?;
        let rows = correlators::second_moment_probe(&t, &qs, ProbeMode::Exact)?;
        let comp: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.5}", r.compensated))
            .collect();
        println!(
            "t=({t}) symmetry factor {}: q^2 E|<Z(t)>|^2 = {}",
            correlators::symmetry_factor(&t),
            comp.join(", ")
        );
    }

    let pair: Vec<TimeSequence> = vec!["0,1".parse()?, "0,2".parse()?];
    let rows = correlators::probe(&pair, &[false, true], &qs, ProbeMode::Exact)?;
    let comp: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2e}", r.compensated))
        .collect();
    println!("inequivalent pair (0,1),(0,2): {}", comp.join(", "));
    Ok(())
}
