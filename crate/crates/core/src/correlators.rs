//! Time sequences and the n-point correlators `⟨Z(t_1)⋯Z(t_n)⟩`, their Haar
//! averages, products of correlators, and compensated scaling probes.
//!
//! A correlator with times `t` is built as `(1/q) Tr[Z U^{x_1} Z U^{x_2} ⋯ Z U^{x_n}]`
//! with `x_i = t_{i+1} - t_i` and the wrap-around difference `x_n = t_1 - t_n`.
//! Conjugated factors are the adjointed word, so the exact and sampled paths
//! consume the same expression.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::haar_mc;
use crate::linalg::{self, CMatrix};
use crate::oracle::{self, Atom, MomentExpression, TraceWord};

/// Operator name used for `Z` inside built expressions.
pub const Z_NAME: &str = "Z";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimeSequence {
    times: Vec<i64>,
    canonical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceVector {
    pub x: Vec<i64>,
    pub n_unitaries: usize,
}

impl TimeSequence {
    /// Validated sequence kept in the given rotation.
    pub fn new(times: Vec<i64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidTimes(format!(
                "need at least 2 times, got {}",
                times.len()
            )));
        }
        let n = times.len();
        for i in 0..n {
            if times[i] == times[(i + 1) % n] {
                return Err(Error::InvalidTimes(format!(
                    "consecutive times equal at positions {} and {} in {times:?}",
                    i + 1,
                    (i + 1) % n + 1
                )));
            }
        }
        Ok(Self {
            times,
            canonical: false,
        })
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    fn rotation(&self, k: usize) -> Vec<i64> {
        let mut v = self.times.clone();
        let n = v.len();
        v.rotate_left(k % n);
        v
    }

    pub fn shifted(&self, c: i64) -> Self {
        Self {
            times: self.times.iter().map(|t| t + c).collect(),
            canonical: self.canonical,
        }
    }

    pub fn n_unitaries(&self) -> usize {
        differences(self).n_unitaries
    }
}

impl fmt::Display for TimeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.times.iter().map(i64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for TimeSequence {
    type Err = Error;

    /// Comma-separated integers, e.g. `"0,1,0,2"`; canonicalized.
    fn from_str(s: &str) -> Result<Self> {
        let times = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad time `{p}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        canonicalize(&times)
    }
}

/// Validates `times` and rotates it to its lexicographically smallest rotation
/// (which starts with a minimal time).
pub fn canonicalize(times: &[i64]) -> Result<TimeSequence> {
    let raw = TimeSequence::new(times.to_vec())?;
    let best = (0..raw.len())
        .map(|k| raw.rotation(k))
        .min()
        .expect("non-empty");
    Ok(TimeSequence {
        times: best,
        canonical: true,
    })
}

pub fn differences(t: &TimeSequence) -> DifferenceVector {
    let n = t.len();
    let x: Vec<i64> = (0..n).map(|i| t.times[(i + 1) % n] - t.times[i]).collect();
    let n_unitaries = x.iter().map(|v| v.unsigned_abs() as usize).sum::<usize>() / 2;
    DifferenceVector { x, n_unitaries }
}

/// `(1/q) Tr[Z U^{x_1} ⋯ Z U^{x_n}]` with `Z` bound to `z`.
pub fn correlator_expression(t: &TimeSequence, z: &CMatrix) -> MomentExpression {
    let mut atoms = Vec::with_capacity(2 * t.len());
    for &x in &differences(t).x {
        atoms.push(Atom::fixed(Z_NAME));
        atoms.push(Atom::U(x));
    }
    MomentExpression::new()
        .with_operator(Z_NAME, z.clone())
        .with_normalized_trace(TraceWord::new(atoms))
}

/// Product of correlators; factor `i` is conjugated when `conj[i]` is set.
pub fn product_expression(
    ts: &[TimeSequence],
    conj: &[bool],
    z: &CMatrix,
) -> Result<MomentExpression> {
    if ts.len() != conj.len() {
        return Err(Error::SizeMismatch {
            left: ts.len(),
            right: conj.len(),
        });
    }
    let mut e = MomentExpression::new().with_operator(Z_NAME, z.clone());
    for (t, &c) in ts.iter().zip(conj) {
        let f = correlator_expression(t, z);
        e = e.times(&if c { f.conjugate() } else { f });
    }
    Ok(e)
}

/// `(1/q) Tr[∏_i U^{t_i} Z U^{-t_i}]` at a fixed unitary.
pub fn evaluate(t: &TimeSequence, u: &CMatrix, z: &CMatrix) -> Result<Complex64> {
    let q = u.nrows();
    if u.ncols() != q || z.nrows() != q || z.ncols() != q {
        return Err(Error::SizeMismatch {
            left: q,
            right: z.nrows(),
        });
    }
    let power = |k: i64| -> Result<CMatrix> {
        if k.abs() > oracle::expr::MAX_POWER {
            return Err(Error::PowerTooLarge(k));
        }
        let mut m = CMatrix::identity(q, q);
        for _ in 0..k.unsigned_abs() {
            m *= u;
        }
        Ok(if k < 0 { m.adjoint() } else { m })
    };
    let mut acc = CMatrix::identity(q, q);
    for &ti in t.times() {
        acc = acc * power(ti)? * z * power(-ti)?;
    }
    Ok(linalg::trace(&acc) / q as f64)
}

/// Exact Haar average of one correlator.
pub fn avg_correlator_exact(t: &TimeSequence, q: usize, z: &CMatrix) -> Result<Complex64> {
    Ok(oracle::haar_average(&correlator_expression(t, z), q)?.value)
}

/// Exact Haar average of a product of correlators.
pub fn avg_product_exact(
    ts: &[TimeSequence],
    conj: &[bool],
    q: usize,
    z: &CMatrix,
) -> Result<Complex64> {
    Ok(oracle::haar_average(&product_expression(ts, conj, z)?, q)?.value)
}

/// Number of cyclic rotations of `t` that reproduce `t` up to a global shift.
pub fn symmetry_factor(t: &TimeSequence) -> usize {
    (0..t.len())
        .filter(|&k| equal_up_to_shift(&t.rotation(k), t.times()))
        .count()
}

/// Whether some rotation of `t` equals `t2` up to a global time shift.
pub fn cyclic_equivalent(t: &TimeSequence, t2: &TimeSequence) -> bool {
    t.len() == t2.len() && (0..t.len()).any(|k| equal_up_to_shift(&t.rotation(k), t2.times()))
}

fn equal_up_to_shift(a: &[i64], b: &[i64]) -> bool {
    let c = b[0] - a[0];
    a.iter().zip(b).all(|(x, y)| y - x == c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    Exact,
    MonteCarlo { n_samples: usize, seed: u64 },
}

/// One row of a scaling probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub q: usize,
    pub value: Complex64,
    /// `Re(value) · q²`.
    pub compensated: f64,
    /// Standard error of `value` (zero in exact mode).
    pub std_error: f64,
}

/// Values of an arbitrary product of correlators across dimensions, using the
/// default `Z` at each `q`.
pub fn probe(
    ts: &[TimeSequence],
    conj: &[bool],
    qs: &[usize],
    mode: ProbeMode,
) -> Result<Vec<ProbeRow>> {
    if qs.is_empty() || qs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(format!(
            "q list must be nonempty and ascending: {qs:?}"
        )));
    }
    let needed: usize = ts.iter().map(TimeSequence::n_unitaries).sum();
    if qs[0] < needed.max(2) {
        return Err(Error::DimensionTooSmall {
            q: qs[0],
            min: needed.max(2),
        });
    }
    qs.par_iter()
        .map(|&q| {
            let z = linalg::default_z(q)?;
            let expr = product_expression(ts, conj, &z)?;
            let (value, std_error) = match mode {
                ProbeMode::Exact => (oracle::haar_average(&expr, q)?.value, 0.0),
                ProbeMode::MonteCarlo { n_samples, seed } => {
                    let est = haar_mc::estimate(&expr, q, n_samples, seed)?;
                    (est.mean, est.std_error())
                }
            };
            let q2 = (q * q) as f64;
            Ok(ProbeRow {
                q,
                value,
                compensated: value.re * q2,
                std_error,
            })
        })
        .collect()
}

/// `⟨𝒵(t)⟩` across dimensions.
pub fn scaling_probe(t: &TimeSequence, qs: &[usize], mode: ProbeMode) -> Result<Vec<ProbeRow>> {
    probe(std::slice::from_ref(t), &[false], qs, mode)
}

/// `⟨𝒵(t)⟩⟨𝒵(t)⟩^*` across dimensions.
pub fn second_moment_probe(
    t: &TimeSequence,
    qs: &[usize],
    mode: ProbeMode,
) -> Result<Vec<ProbeRow>> {
    probe(&[t.clone(), t.clone()], &[false, true], qs, mode)
}

/// Parses a `+`/`-` conjugation string, e.g. `"+-"`.
pub fn parse_conjugation(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(false),
            '-' => Ok(true),
            other => Err(Error::Parse(format!(
                "bad conjugation flag `{other}` in `{s}`"
            ))),
        })
        .collect()
}

/// All canonical sequences with `n` times, entries in `0..=max_time`, and at
/// most `max_unitaries` unitary instances. Distinct up to rotation and shift.
pub fn enumerate_sequences(n: usize, max_time: i64, max_unitaries: usize) -> Vec<TimeSequence> {
    let mut out: BTreeMap<Vec<i64>, TimeSequence> = BTreeMap::new();
    let mut cur = vec![0i64; n];
    fn rec(
        i: usize,
        cur: &mut Vec<i64>,
        max_time: i64,
        max_u: usize,
        out: &mut BTreeMap<Vec<i64>, TimeSequence>,
    ) {
        if i == cur.len() {
            if let Ok(t) = canonicalize(cur) {
                // Shift so the minimum is 0.
                let t = t.shifted(-t.times()[0]);
                if t.n_unitaries() <= max_u {
                    out.entry(t.times().to_vec()).or_insert(t);
                }
            }
            return;
        }
        for v in 0..=max_time {
            if i > 0 && cur[i - 1] == v {
                continue;
            }
            cur[i] = v;
            rec(i + 1, cur, max_time, max_u, out);
        }
    }
    rec(0, &mut cur, max_time, max_unitaries, &mut out);
    out.into_values().collect()
}
