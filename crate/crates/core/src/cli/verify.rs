//! Named consistency checks for `haarcorr verify`.
//!
//! Each check emits one row per case: the measured value, its target, the
//! tolerance or band used, and a pass flag.

use clap::ValueEnum;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::output::{Cell, Table};
use super::{q_list, Outcome, VerifyArgs};
use crate::cobweb::{self, CobwebDiagram};
use crate::correlators::{self, ProbeMode, TimeSequence};
use crate::error::Result;
use crate::haar_mc;
use crate::linalg::default_z;
use crate::oracle::{self, Atom, MomentExpression, TraceWord};
use crate::otoc::{self, LayerSpec, Leg, OtocSystem};
use crate::perm::{self, Permutation};
use crate::weingarten;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Trace-power moments against their closed form.
    Diaconis,
    /// Gram relation and leading-order error band of the Weingarten function.
    Weingarten,
    /// Odd correlators vanish, even ones decay like `1/q²`.
    Theorem1,
    /// `q²`-compensated triple product of `(0,1)` correlators stays bounded.
    Theorem2,
    /// Compensated second moments approach the symmetry factor.
    Theorem3,
    /// Projector formula for OTOCs against the exact average.
    Theorem4,
    /// Loop counting, reduction and the leading four-arc family.
    Cobweb,
    /// Sampled `|Tr U^m|²` moments.
    Haar,
}

/// Whether a positive sequence never exceeds `factor` times its first entry.
pub fn bounded_within(values: &[f64], factor: f64) -> bool {
    match values.first() {
        None => true,
        Some(&first) => values.iter().all(|&v| v <= factor * first + 1e-12),
    }
}

struct Report {
    table: Table,
    passed: bool,
}

impl Report {
    fn new() -> Self {
        Self {
            table: Table::new(&["check", "case", "value", "target", "tolerance", "pass"]),
            passed: true,
        }
    }

    fn row(
        &mut self,
        check: &str,
        case: String,
        value: Cell,
        target: Cell,
        tolerance: String,
        pass: bool,
    ) {
        self.passed &= pass;
        self.table.push(vec![
            check.into(),
            case.into(),
            value,
            target,
            tolerance.into(),
            pass.into(),
        ]);
    }
}

fn or_default(qs: &[usize], default: &[usize]) -> Result<Vec<usize>> {
    if qs.is_empty() {
        Ok(default.to_vec())
    } else {
        q_list(qs)
    }
}

pub(super) fn run(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let mut r = Report::new();
    match a.check {
        Check::Diaconis => diaconis(&mut r, &or_default(&a.q, &[4, 6])?)?,
        Check::Weingarten => weingarten_checks(&mut r, &or_default(&a.q, &[6, 9])?)?,
        Check::Theorem1 => odd_even_decay(&mut r, &or_default(&a.q, &[4, 6])?)?,
        Check::Theorem2 => higher_moments(&mut r, &or_default(&a.q, &[6, 8, 12])?)?,
        Check::Theorem3 => second_moment(
            &mut r,
            &or_default(&a.q, &[8, 16])?,
            a.samples.unwrap_or(20_000),
            seed,
        )?,
        Check::Theorem4 => {
            otoc_projector(&mut r, a.t.unwrap_or(2), &or_default(&a.q, &[4, 8, 16])?)?
        }
        Check::Cobweb => cobweb_checks(&mut r, a.samples.unwrap_or(200), seed)?,
        Check::Haar => haar(
            &mut r,
            &or_default(&a.q, &[8])?,
            a.samples.unwrap_or(10_000),
            seed,
        )?,
    }
    Ok(Outcome {
        table: r.table,
        passed: r.passed,
    })
}

/// Multiplicity vectors `(a_1, a_2, a_3)` with `Σ m a_m ≤ max_weight`.
pub fn weight_vectors(max_weight: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a3 in 0..=max_weight / 3 {
        for a2 in 0..=(max_weight - 3 * a3) / 2 {
            for a1 in 0..=max_weight - 3 * a3 - 2 * a2 {
                out.push(vec![a1, a2, a3]);
            }
        }
    }
    out
}

fn diaconis(r: &mut Report, qs: &[usize]) -> Result<()> {
    let vs = weight_vectors(3);
    for &q in qs {
        for a in &vs {
            for b in &vs {
                let exact = oracle::haar_average(&oracle::trace_power_expression(a, b), q)?.value;
                let target = oracle::trace_power_moment(a, b, q)?;
                let err = (exact - Complex64::from(target)).norm() / target.abs().max(1.0);
                r.row(
                    "diaconis",
                    format!("q={q} a={a:?} b={b:?}"),
                    exact.re.into(),
                    target.into(),
                    "rel 1e-9".into(),
                    err <= 1e-9,
                );
            }
        }
    }
    Ok(())
}

fn weingarten_checks(r: &mut Report, qs: &[usize]) -> Result<()> {
    for n in 1..=4 {
        for &q in qs {
            let mut worst = 0.0f64;
            let perms: Vec<Permutation> = perm::enumerate(n)?.collect();
            for sigma in &perms {
                let mut sum = 0.0;
                for tau in &perms {
                    let arg = sigma.compose(&tau.inverse())?;
                    sum += weingarten::wg_exact(n, q as f64, &arg)?
                        * (q as f64).powi(tau.num_cycles() as i32);
                }
                let delta = if sigma.is_identity() { 1.0 } else { 0.0 };
                worst = worst.max((sum - delta).abs());
            }
            r.row(
                "weingarten",
                format!("gram relation n={n} q={q}"),
                worst.into(),
                0.0.into(),
                "abs 1e-9".into(),
                worst <= 1e-9,
            );
        }
    }
    let sweep = [8.0f64, 16.0, 32.0, 64.0];
    for n in 1..=4 {
        for ct in perm::partitions(n) {
            let sigma = perm::representative(&ct);
            let k = (n + sigma.transposition_distance() + 2) as i32;
            let s = sweep
                .iter()
                .map(|&q| {
                    let e = weingarten::wg_exact(n, q, &sigma)?;
                    let l = weingarten::wg_leading(n, q, &sigma)?;
                    Ok((e - l).abs() * q.powi(k))
                })
                .collect::<Result<Vec<f64>>>()?;
            r.row(
                "weingarten",
                format!("leading band n={n} type={ct:?}"),
                s.iter().cloned().fold(0.0, f64::max).into(),
                Cell::Empty,
                format!("max <= 3 * {}", s[0]),
                bounded_within(&s, 3.0),
            );
        }
    }
    Ok(())
}

fn odd_even_decay(r: &mut Report, qs: &[usize]) -> Result<()> {
    for n in [3, 5] {
        for t in correlators::enumerate_sequences(n, 3, 3) {
            for &q in qs {
                let v = correlators::avg_correlator_exact(&t, q, &default_z(q)?)?;
                r.row(
                    "theorem1",
                    format!("odd t=({t}) q={q}"),
                    v.norm().into(),
                    0.0.into(),
                    "abs 1e-12".into(),
                    v.norm() <= 1e-12,
                );
            }
        }
    }
    for t in correlators::enumerate_sequences(4, 3, 3) {
        for q in [6usize, 8, 12] {
            let v = correlators::avg_correlator_exact(&t, q, &default_z(q)?)?;
            let s = v.norm() * (q * q) as f64;
            r.row(
                "theorem1",
                format!("even t=({t}) q={q}"),
                s.into(),
                Cell::Empty,
                "q^2 |value| <= 10".into(),
                s <= 10.0,
            );
        }
    }
    let anchor: TimeSequence = "0,1,0,1".parse()?;
    for q in [4usize, 8] {
        let v = correlators::avg_correlator_exact(&anchor, q, &default_z(q)?)?;
        let target = -1.0 / ((q * q) as f64 - 1.0);
        r.row(
            "theorem1",
            format!("anchor t=(0,1,0,1) q={q}"),
            v.re.into(),
            target.into(),
            "abs 1e-12".into(),
            (v - Complex64::from(target)).norm() <= 1e-12,
        );
    }
    Ok(())
}

fn higher_moments(r: &mut Report, qs: &[usize]) -> Result<()> {
    let t: TimeSequence = "0,1".parse()?;
    let ts = vec![t.clone(), t.clone(), t];
    let rows = correlators::probe(&ts, &[false, true, false], qs, ProbeMode::Exact)?;
    let s: Vec<f64> = rows
        .iter()
        .map(|p| p.value.norm() * (p.q * p.q) as f64)
        .collect();
    r.row(
        "theorem2",
        "p=3 t=(0,1) conj=+-+".into(),
        s.iter().cloned().fold(0.0, f64::max).into(),
        Cell::Empty,
        format!("max <= 3 * {}", s[0]),
        bounded_within(&s, 3.0),
    );
    Ok(())
}

/// Weighted least-squares `C` in `y ≈ target + C/q`.
pub fn fit_inverse_q(points: &[(f64, f64, f64)], target: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &(q, y, se) in points {
        let w = 1.0 / (se * se).max(1e-300);
        num += w * (y - target) / q;
        den += w / (q * q);
    }
    num / den
}

fn second_moment(r: &mut Report, qs: &[usize], n_samples: usize, seed: u64) -> Result<()> {
    let single: TimeSequence = "0,1".parse()?;
    for q in [4usize, 8] {
        let v = correlators::avg_product_exact(
            &[single.clone(), single.clone()],
            &[false, true],
            q,
            &default_z(q)?,
        )?;
        let target = 1.0 / ((q * q) as f64 - 1.0);
        r.row(
            "theorem3",
            format!("t=(0,1) q={q}"),
            v.re.into(),
            target.into(),
            "abs 1e-12".into(),
            (v - Complex64::from(target)).norm() <= 1e-12,
        );
    }
    let t: TimeSequence = "0,1,0,1".parse()?;
    let rows = correlators::second_moment_probe(&t, qs, ProbeMode::MonteCarlo { n_samples, seed })?;
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|p| {
            let q2 = (p.q * p.q) as f64;
            (p.q as f64, p.compensated, p.std_error * q2)
        })
        .collect();
    let c = fit_inverse_q(&pts, 2.0);
    for &(q, y, se) in &pts {
        let fitted = 2.0 + c / q;
        r.row(
            "theorem3",
            format!("t=(0,1,0,1) q={q} mc n={n_samples} C={c}"),
            y.into(),
            fitted.into(),
            format!("3 sigma = {}", 3.0 * se),
            (y - fitted).abs() <= 3.0 * se,
        );
    }
    let pair = [single, "0,2".parse()?];
    let rows = correlators::probe(&pair, &[false, true], &[8, 16, 32], ProbeMode::Exact)?;
    let s: Vec<f64> = rows
        .iter()
        .map(|p| p.value.norm() * (p.q * p.q) as f64)
        .collect();
    let shrinking = s.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    r.row(
        "theorem3",
        "inequivalent (0,1),(0,2) q=8,16,32".into(),
        s[s.len() - 1].into(),
        0.0.into(),
        format!("nonincreasing from {}", s[0]),
        shrinking && s[s.len() - 1] <= 0.5,
    );
    Ok(())
}

/// `q³ |projector formula − exact|` for each `q`.
pub fn projector_gaps(layers: &[LayerSpec], qs: &[usize]) -> Result<Vec<f64>> {
    qs.iter()
        .map(|&q| {
            let sys = OtocSystem::with_default_z(q)?;
            let gap = (sys.theorem4_value(layers)? - sys.otoc_exact(layers)?).norm();
            Ok(gap * (q as f64).powi(3))
        })
        .collect()
}

fn otoc_projector(r: &mut Report, t: usize, qs: &[usize]) -> Result<()> {
    for q in [4usize, 8] {
        let sys = OtocSystem::with_default_z(q)?;
        let lead = sys.theorem4_value(&[])?;
        let exact = sys.otoc_exact(&[])?;
        let target = -1.0 / ((q * q) as f64 - 1.0);
        r.row(
            "theorem4",
            format!("T=1 q={q}"),
            exact.re.into(),
            target.into(),
            "abs 1e-12".into(),
            (lead - Complex64::from(target)).norm() <= 1e-12
                && (exact - Complex64::from(target)).norm() <= 1e-12,
        );
    }
    if t >= 2 {
        let mut layers = vec![LayerSpec::empty(); t - 1];
        layers[0] = LayerSpec::z_on(&[Leg::One, Leg::OneBar]);
        let s = projector_gaps(&layers, qs)?;
        let c = s.iter().cloned().fold(0.0, f64::max);
        r.row(
            "theorem4",
            format!("T={t} layers={} C={c}", otoc::format_layers(&layers)),
            c.into(),
            Cell::Empty,
            format!("max <= 3 * {}", s[0]),
            bounded_within(&s, 3.0),
        );
    }
    for q in [2usize, 4, 8, 64] {
        let k = otoc::projector_k(q)?.matrix();
        let defect = (k * k - k).norm();
        r.row(
            "theorem4",
            format!("K idempotent q={q}"),
            defect.into(),
            0.0.into(),
            "abs 1e-12".into(),
            defect <= 1e-12,
        );
    }
    Ok(())
}

fn cobweb_checks(r: &mut Report, samples: usize, seed: u64) -> Result<()> {
    let mut planar_ok = true;
    for e in 0..=5 {
        for d in cobweb::all_matchings(e) {
            let planar = d.is_planar();
            let full = d.reduce().reduced_chords() == 0;
            let max_loops = d.count_loops() == e + 1;
            planar_ok &= planar == full && full == max_loops;
        }
    }
    r.row(
        "cobweb",
        "planar <=> fully reducible <=> N = E+1, E <= 5".into(),
        planar_ok.into(),
        true.into(),
        "exhaustive".into(),
        planar_ok,
    );
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut sound, mut bound, mut full_bound) = (true, true, true);
    for i in 0..samples {
        let d = cobweb::random_diagram(1 + i % 8, &mut rng);
        let rep = d.reduce();
        let mut credits = 0;
        let mut prev = d.clone();
        for step in &rep.steps {
            credits += 1;
            sound &= prev.count_loops() == step.result.count_loops() + 1;
            sound &= d.count_loops() == credits + step.result.count_loops();
            prev = step.result.clone();
        }
        sound &= d.count_loops() == rep.loop_credits + rep.reduced.count_loops();
        let ep = rep.reduced_chords();
        if ep >= 2 {
            let n_red = rep.reduced.count_loops() as f64;
            bound &= n_red <= (2.0 * ep as f64 / 3.0).max(1.0);
            full_bound &= d.count_loops() as f64 <= d.n_chords() as f64 - ep as f64 / 3.0;
        }
    }
    r.row(
        "cobweb",
        format!("reduction soundness, {samples} random diagrams E <= 8"),
        sound.into(),
        true.into(),
        "every step".into(),
        sound,
    );
    r.row(
        "cobweb",
        "reduced bound N' <= max(1, 2E'/3)".into(),
        bound.into(),
        true.into(),
        "never violated".into(),
        bound,
    );
    r.row(
        "cobweb",
        "full bound N <= E - E'/3".into(),
        full_bound.into(),
        true.into(),
        "never violated".into(),
        full_bound,
    );
    for t in [2usize, 3] {
        let found = cobweb::enumerate_leading(t)?;
        let ok = found == cobweb::ladder_family(t)?
            && found.iter().all(|d| {
                let c = d.leg_counts().expect("four-arc layout");
                c.one_onebar == c.two_twobar && !d.is_planar()
            });
        r.row(
            "cobweb",
            format!("leading family T={t}"),
            found.len().into(),
            (t - 1).into(),
            "equals ladder family".into(),
            ok,
        );
    }
    let triple: CobwebDiagram = "6; 0-3, 1-4, 2-5".parse()?;
    let reduced6: Vec<CobwebDiagram> = cobweb::all_matchings(3)
        .into_iter()
        .filter(|d| d.reduce().reduced_chords() == 3)
        .collect();
    r.row(
        "cobweb",
        "unique reduced diagram with E'=3 on 6 vertices".into(),
        reduced6.len().into(),
        1usize.into(),
        "exhaustive".into(),
        reduced6 == vec![triple],
    );
    Ok(())
}

fn haar(r: &mut Report, qs: &[usize], n_samples: usize, seed: u64) -> Result<()> {
    for &q in qs {
        for m in 1..=3i64 {
            let e = MomentExpression::new()
                .with_trace(TraceWord::new(vec![Atom::U(m)]))
                .with_trace(TraceWord::new(vec![Atom::U(-m)]));
            let est = haar_mc::estimate(&e, q, n_samples, seed)?;
            r.row(
                "haar",
                format!("|Tr U^{m}|^2 q={q} n={n_samples}"),
                est.mean.re.into(),
                (m as f64).into(),
                format!("4 sigma = {}", 4.0 * est.std_error()),
                est.agrees_with(Complex64::from(m as f64), 4.0),
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_vectors_up_to_three() {
        let v = weight_vectors(3);
        assert_eq!(v.len(), 7);
        assert!(v.iter().all(|a| a[0] + 2 * a[1] + 3 * a[2] <= 3));
    }

    #[test]
    fn band_helper() {
        assert!(bounded_within(&[1.0, 2.9, 0.5], 3.0));
        assert!(!bounded_within(&[1.0, 3.1], 3.0));
        assert!(bounded_within(&[0.0, 0.0], 3.0));
    }

    #[test]
    fn inverse_q_fit_recovers_slope() {
        let pts = [(8.0, 2.0 + 3.0 / 8.0, 0.1), (16.0, 2.0 + 3.0 / 16.0, 0.1)];
        assert!((fit_inverse_q(&pts, 2.0) - 3.0).abs() < 1e-12);
    }
}
