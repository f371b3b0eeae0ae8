//! OTOCs from the pair-space projector formula compared with the exact average.
//!
//! cargo run --release --example otoc_leading_order -- "1,1b"

use haarcorr::otoc::{self, OtocSystem};

fn main() -> haarcorr::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_default();
    let layers = otoc::parse_layers(&text)?;
    println!(
        "T = {}, layers = {:?}",
        layers.len() + 1,
        otoc::format_layers(&layers)
    );

    for q in [4, 8, 16] {
        let sys = OtocSystem::with_default_z(q)?;
        let lead = sys.theorem4_value(&layers)?;
        let (plus, minus) = sys.otoc_plus_minus(&layers)?;
        let exact = sys.otoc_exact(&layers)?;
        println!(
            "q={q:<3} projector {:+.3e}  ladders {:+.3e}  exact {:+.3e}  q^3*gap {:.3}",
            lead.re,
            (plus - minus).re,
            exact.re,
            (lead - exact).norm() * (q as f64).powi(3)
        );
    }

    let k = otoc::projector_k(4)?;
    let c = k.coefficients(OtocSystem::with_default_z(4)?.right_boundary());
    println!(
        "K|Z(T)_-> at q=4 has coefficients ({:.6}, {:.6})",
        c[0].re, c[1].re
    );
    Ok(())
}
