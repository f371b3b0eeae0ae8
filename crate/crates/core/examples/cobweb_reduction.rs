//! Chord-diagram loop counting, reduction logs and the leading OTOC family.
//!
//! cargo run --example cobweb_reduction -- "8; 0-5, 1-3, 2-6, 4-7"

use haarcorr::cobweb::{self, CobwebDiagram};

fn main() -> haarcorr::Result<()> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "10; 0-9, 1-2, 3-7, 4-8, 5-6".into());
    let d: CobwebDiagram = text.parse()?;
    let report = d.reduce();
    println!("{d}");
    println!("loops {} crossings {}", d.count_loops(), d.crossings());
    print!("{}", report.log());
    println!(
        "reduced to {} with E' = {}, {} loop credits",
        report.reduced,
        report.reduced_chords(),
        report.loop_credits
    );

    for t in 2..=4 {
        println!("\nleading diagrams for T = {t}");
        for d in cobweb::enumerate_leading(t)? {
            let c = d.leg_counts().expect("four-arc layout");
            println!("  {d}  (1-1b {}, 1-2b {})", c.one_onebar, c.one_twobar);
        }
    }
    Ok(())
}
