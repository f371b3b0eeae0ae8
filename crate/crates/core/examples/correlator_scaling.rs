//! Averaged correlators across dimensions: odd lengths vanish, even lengths
//! decay like 1/q².
//!
//! cargo run --release --example correlator_scaling

use haarcorr::correlators::{self, ProbeMode, TimeSequence};

fn main() -> haarcorr::Result<()> {
    let qs = [4, 8, 16];
    for text in ["0,1,0,1", "0,1,2,1", "0,2,1,2", "0,1,2", "0,1,0,2,1"] {
        let t: TimeSequence = text.parse()?;
        let rows = correlators::scaling_probe(&t, &qs, ProbeMode::Exact)?;
        print!("t=({t:<10}) ");
        for r in rows {
            print!("  q={:<3} q^2*re={:+.6}", r.q, r.compensated);
        }
        println!();
    }
    Ok(())
}
