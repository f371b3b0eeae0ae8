//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! cargo test --test acceptance

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use haarcorr::cobweb::{self, CobwebDiagram};
use haarcorr::correlators::{self, ProbeMode, TimeSequence};
use haarcorr::haar_mc;
use haarcorr::linalg::default_z;
use haarcorr::oracle::{self, Atom, MomentExpression, TraceWord};
use haarcorr::otoc::{self, LayerSpec, Leg, OtocSystem};
use haarcorr::perm::{self, Permutation};
use haarcorr::weingarten;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// `max ≤ factor · first`, the first entry being the smallest `q`.
fn bounded(values: &[f64], factor: f64) -> bool {
    values.iter().all(|&v| v <= factor * values[0] + 1e-12)
}

fn weight_vectors() -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a1 in 0..=3 {
        for a2 in 0..=1 {
            for a3 in 0..=1 {
                if a1 + 2 * a2 + 3 * a3 <= 3 {
                    v.push([a1, a2, a3]);
                }
            }
        }
    }
    v
}

fn diaconis() -> Verdict {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for q in [4usize, 6] {
        for a in weight_vectors() {
            for b in weight_vectors() {
                let target = if a == b {
                    (0..3)
                        .map(|i| ((i + 1) as f64).powi(a[i] as i32) * perm::factorial(a[i]) as f64)
                        .product()
                } else {
                    0.0
                };
                let v = oracle::haar_average(&oracle::trace_power_expression(&a, &b), q)
                    .unwrap()
                    .value;
                worst = worst.max((v - Complex64::from(target)).norm() / target.abs().max(1.0));
                cases += 1;
            }
        }
    }
    verdict(
        worst <= 1e-9,
        format!("{cases} cases, max rel err {worst:.1e}"),
    )
}

fn weingarten_criterion() -> Verdict {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let all: Vec<Permutation> = perm::enumerate(n).unwrap().collect();
        for q in [6.0f64, 9.0] {
            for sigma in &all {
                let sum: f64 = all
                    .iter()
                    .map(|tau| {
                        let arg = sigma.compose(&tau.inverse()).unwrap();
                        weingarten::wg_exact(n, q, &arg).unwrap() * q.powi(tau.num_cycles() as i32)
                    })
                    .sum();
                let delta = if sigma.is_identity() { 1.0 } else { 0.0 };
                worst = worst.max((sum - delta).abs());
            }
        }
    }
    let mut bands_ok = true;
    let mut worst_ratio = 0.0f64;
    for n in 1..=4 {
        for ct in perm::partitions(n) {
            let sigma = perm::representative(&ct);
            let k = (n + sigma.transposition_distance() + 2) as i32;
            let s: Vec<f64> = [8.0f64, 16.0, 32.0, 64.0]
                .iter()
                .map(|&q| {
                    let e = weingarten::wg_exact(n, q, &sigma).unwrap();
                    let l = weingarten::wg_leading(n, q, &sigma).unwrap();
                    (e - l).abs() * q.powi(k)
                })
                .collect();
            if s[0] > 0.0 {
                worst_ratio = worst_ratio.max(s.iter().cloned().fold(0.0, f64::max) / s[0]);
            }
            bands_ok &= bounded(&s, 3.0);
        }
    }
    verdict(
        worst <= 1e-9 && bands_ok,
        format!("gram residual {worst:.1e}, worst band ratio {worst_ratio:.3}"),
    )
}

fn odd_even_decay() -> Verdict {
    let mut odd_worst = 0.0f64;
    let mut odd_cases = 0;
    for n in [3, 5] {
        for t in correlators::enumerate_sequences(n, 3, 3) {
            for q in [4usize, 6] {
                let v = correlators::avg_correlator_exact(&t, q, &default_z(q).unwrap()).unwrap();
                odd_worst = odd_worst.max(v.norm());
                odd_cases += 1;
            }
        }
    }
    let mut even_worst = 0.0f64;
    let mut even_cases = 0;
    for t in correlators::enumerate_sequences(4, 3, 3) {
        for q in [6usize, 8, 12] {
            let v = correlators::avg_correlator_exact(&t, q, &default_z(q).unwrap()).unwrap();
            even_worst = even_worst.max(v.norm() * (q * q) as f64);
            even_cases += 1;
        }
    }
    let anchor: TimeSequence = "0,1,0,1".parse().unwrap();
    let mut anchor_err = 0.0f64;
    for q in [4usize, 8] {
        let v = correlators::avg_correlator_exact(&anchor, q, &default_z(q).unwrap()).unwrap();
        anchor_err = anchor_err.max((v - Complex64::from(-1.0 / ((q * q) as f64 - 1.0))).norm());
    }
    verdict(
        odd_cases > 0 && even_cases > 0 && odd_worst <= 1e-12 && even_worst <= 10.0 && anchor_err <= 1e-12,
        format!(
            "odd {odd_cases} cases max |v| {odd_worst:.1e}; even {even_cases} cases max q^2|v| {even_worst:.3}; anchor err {anchor_err:.1e}"
        ),
    )
}

fn second_moment() -> Verdict {
    let single: TimeSequence = "0,1".parse().unwrap();
    let mut exact_err = 0.0f64;
    for q in [4usize, 8] {
        let v = correlators::avg_product_exact(
            &[single.clone(), single.clone()],
            &[false, true],
            q,
            &default_z(q).unwrap(),
        )
        .unwrap();
        let q2 = (q * q) as f64;
        exact_err = exact_err
            .max((v.re * q2 - 1.0 / (1.0 - 1.0 / q2)).abs())
            .max(v.im.abs());
    }

    let t: TimeSequence = "0,1,0,1".parse().unwrap();
    let s = correlators::symmetry_factor(&t) as f64;
    let rows = correlators::second_moment_probe(
        &t,
        &[8, 16],
        ProbeMode::MonteCarlo {
            n_samples: 20_000,
            seed: 2,
        },
    )
    .unwrap();
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r.q as f64, r.compensated, r.std_error * (r.q * r.q) as f64))
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for &(q, y, se) in &pts {
        num += (y - s) / q / (se * se);
        den += 1.0 / (q * q * se * se);
    }
    let c = num / den;
    let mc_ok = pts
        .iter()
        .all(|&(q, y, se)| (y - (s + c / q)).abs() <= 3.0 * se);

    let pair: Vec<TimeSequence> = vec![single, "0,2".parse().unwrap()];
    let rows = correlators::probe(&pair, &[false, true], &[8, 16, 32], ProbeMode::Exact).unwrap();
    let decays = rows
        .iter()
        .all(|r| r.value.norm() * (r.q * r.q) as f64 <= 1.0 / r.q as f64);
    let comp: Vec<String> = pts
        .iter()
        .map(|p| format!("{:.4}+/-{:.4}", p.1, p.2))
        .collect();
    verdict(
        exact_err <= 1e-12 && mc_ok && decays && s == 2.0,
        format!(
            "(0,1) err {exact_err:.1e}; (0,1,0,1) S={s} compensated [{}] C={c:.3}; inequivalent pair decays: {decays}",
            comp.join(", ")
        ),
    )
}

fn higher_moments() -> Verdict {
    let t: TimeSequence = "0,1".parse().unwrap();
    let rows = correlators::probe(
        &[t.clone(), t.clone(), t],
        &[false, true, false],
        &[6, 8, 12],
        ProbeMode::Exact,
    )
    .unwrap();
    let s: Vec<f64> = rows
        .iter()
        .map(|r| r.value.norm() * (r.q * r.q) as f64)
        .collect();
    verdict(bounded(&s, 3.0), format!("q^2|v| over q=6,8,12: {s:.3?}"))
}

fn otoc_projector() -> Verdict {
    let mut t1_err = 0.0f64;
    for q in [4usize, 8] {
        let sys = OtocSystem::with_default_z(q).unwrap();
        let target = Complex64::from(-1.0 / ((q * q) as f64 - 1.0));
        t1_err = t1_err
            .max((sys.theorem4_value(&[]).unwrap() - target).norm())
            .max((sys.otoc_exact(&[]).unwrap() - target).norm());
    }
    let layers = [LayerSpec::z_on(&[Leg::One, Leg::OneBar])];
    let s: Vec<f64> = [4usize, 8, 16]
        .iter()
        .map(|&q| {
            let sys = OtocSystem::with_default_z(q).unwrap();
            let gap =
                (sys.theorem4_value(&layers).unwrap() - sys.otoc_exact(&layers).unwrap()).norm();
            gap * (q as f64).powi(3)
        })
        .collect();
    let mut idem = 0.0f64;
    for q in [2usize, 4, 8, 64] {
        let k = otoc::projector_k(q).unwrap().matrix();
        idem = idem.max((k * k - k).norm());
    }
    verdict(
        t1_err <= 1e-12 && bounded(&s, 3.0) && idem <= 1e-12,
        format!("T=1 err {t1_err:.1e}; T=2 q^3 gap {s:.3?}; K idempotence {idem:.1e}"),
    )
}

/// Ladder diagrams built from leg/step positions: `n_cross` steps join each
/// plain leg to the other copy's barred leg.
fn expected_ladders(t: usize) -> Vec<CobwebDiagram> {
    let mut out: Vec<CobwebDiagram> = (1..t)
        .map(|n_cross| {
            let mut chords = Vec::new();
            for k in 0..t {
                let (one, twobar, two, onebar) = (k, 2 * t - 1 - k, 2 * t + k, 4 * t - 1 - k);
                if k < n_cross {
                    chords.extend([(one, twobar), (two, onebar)]);
                } else {
                    chords.extend([(one, onebar), (two, twobar)]);
                }
            }
            let marks = [t - 1, 2 * t - 1, 3 * t - 1, 4 * t - 1];
            CobwebDiagram::from_chords(4 * t, &chords)
                .and_then(|d| d.with_arcs(t))
                .and_then(|d| d.with_decorations(&marks))
                .unwrap()
        })
        .collect();
    out.sort();
    out
}

fn cobweb_criterion() -> Verdict {
    let mut planar_ok = true;
    for e in 0..=5 {
        for d in cobweb::all_matchings(e) {
            let planar = d.is_planar();
            planar_ok &= planar == (d.reduce().reduced_chords() == 0)
                && planar == (d.count_loops() == e + 1);
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let (mut sound, mut bound) = (true, true);
    for i in 0..200 {
        let d = cobweb::random_diagram(1 + i % 8, &mut rng);
        let rep = d.reduce();
        let mut credits = 0;
        for step in &rep.steps {
            credits += 1;
            sound &= d.count_loops() == credits + step.result.count_loops();
        }
        sound &= d.count_loops() == rep.loop_credits + rep.reduced.count_loops();
        let ep = rep.reduced_chords();
        if ep >= 2 {
            bound &= rep.reduced.count_loops() as f64 <= (2.0 * ep as f64 / 3.0).max(1.0);
        }
    }
    let mut family_ok = true;
    let mut sizes = Vec::new();
    for t in [2usize, 3] {
        let found = cobweb::enumerate_leading(t).unwrap();
        sizes.push(found.len());
        family_ok &= found == expected_ladders(t);
        family_ok &= found.iter().all(|d| {
            let c = d.leg_counts().unwrap();
            c.one_onebar == c.two_twobar
        });
    }
    verdict(
        planar_ok && sound && bound && family_ok,
        format!("planarity {planar_ok}, soundness {sound}, bound {bound}, leading families {sizes:?} match ladders {family_ok}"),
    )
}

fn reproducibility() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_haarcorr");
    let configs: [&[&str]; 3] = [
        &[
            "second-moment",
            "--times",
            "0,1,0,1",
            "--q",
            "8,16",
            "--mode",
            "mc",
            "--n",
            "2000",
            "--seed",
            "7",
        ],
        &[
            "otoc", "--layers", "1,1b", "--q", "8", "--mode", "mc", "--n", "1000", "--seed", "5",
            "--format", "json",
        ],
        &["verify", "cobweb", "--samples", "50", "--seed", "3"],
    ];
    let mut identical = true;
    for args in configs {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                Command::new(bin)
                    .args(args)
                    .env_remove("HAARCORR_SEED")
                    .output()
                    .unwrap()
                    .stdout
            })
            .collect();
        identical &= !outs[0].is_empty() && outs[0] == outs[1];
    }
    let mut haar_ok = true;
    let mut z = Vec::new();
    for m in 1..=3i64 {
        let e = MomentExpression::new()
            .with_trace(TraceWord::new(vec![Atom::U(m)]))
            .with_trace(TraceWord::new(vec![Atom::U(-m)]));
        let est = haar_mc::estimate(&e, 8, 10_000, 8).unwrap();
        haar_ok &= est.agrees_with(Complex64::from(m as f64), 4.0);
        z.push(format!(
            "{:+.2}",
            (est.mean.re - m as f64) / est.std_error_re
        ));
    }
    verdict(
        identical && haar_ok,
        format!(
            "byte-identical CLI reruns {identical}; |Tr U^m|^2 z-scores [{}]",
            z.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Duration, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        (1, "Diaconis identity", Duration::from_secs(5), diaconis),
        (
            2,
            "Weingarten relation and asymptotics",
            Duration::from_secs(5),
            weingarten_criterion,
        ),
        (
            3,
            "odd vanishing and even 1/q^2 decay",
            Duration::from_secs(60),
            odd_even_decay,
        ),
        (
            4,
            "second moment and symmetry factor",
            Duration::from_secs(600),
            second_moment,
        ),
        (5, "higher moments", Duration::from_secs(30), higher_moments),
        (
            6,
            "OTOC projector formula",
            Duration::from_secs(120),
            otoc_projector,
        ),
        (
            7,
            "cobweb engine",
            Duration::from_secs(60),
            cobweb_criterion,
        ),
        (
            8,
            "reproducibility and Haar validity",
            Duration::from_secs(600),
            reproducibility,
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed <= limit;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {id}: {name}: {} ({:.2} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
