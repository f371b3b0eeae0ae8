//! Exact Haar averages of trace polynomials in one random unitary.
//!
//! Every `U` instance is matched with a `U†` instance twice, once on the row
//! index (through `σ`) and once on the column index (through `τ`), weighted
//! by `Wg(στ⁻¹)`. For fixed `(σ, τ)` the surviving index identifications form
//! closed loops; each loop contributes the trace of the ordered product of
//! the fixed operators it passes, or `q` when it passes none.
//!
//! The double sum is organized as `Σ_α Wg(α) Σ_σ 𝒢(σ, α⁻¹σ)`. Partial sums
//! per `α` are independent; they are reduced in lexicographic `α` order so the
//! result does not depend on how many threads ran.

pub mod expr;

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

pub use expr::{Atom, MomentExpression, TraceWord};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::perm::{self, Permutation};
use crate::weingarten;

/// Largest number of `U` instances accepted by [`haar_average`].
pub const MAX_UNITARIES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactAverage {
    pub value: Complex64,
    /// Number of `U` instances after expanding powers.
    pub n_unitaries: usize,
    /// Number of `(σ, τ)` pairs summed.
    pub term_count: usize,
}

/// Exact Haar average of `expr` over `U(q)`.
pub fn haar_average(expr: &MomentExpression, q: usize) -> Result<ExactAverage> {
    haar_average_with_progress(expr, q, &|_, _| {})
}

/// As [`haar_average`], calling `progress(done, total)` after each outer term.
pub fn haar_average_with_progress(
    expr: &MomentExpression,
    q: usize,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<ExactAverage> {
    expr.check_operators()?;
    expr.check_dimension(q)?;
    let norm = expr.normalized();
    let (n_u, n_ud) = norm.unitary_counts();
    if n_u != n_ud {
        return Ok(ExactAverage {
            value: ZERO,
            n_unitaries: n_u,
            term_count: 0,
        });
    }
    if n_u > MAX_UNITARIES {
        return Err(Error::OutOfRange {
            n: n_u,
            min: 0,
            max: MAX_UNITARIES,
        });
    }
    if q < n_u.max(1) {
        return Err(Error::DimensionTooSmall { q, min: n_u.max(1) });
    }
    let wiring = Wiring::build(&norm, q)?;
    let scalar = norm.scalar(q);

    if n_u == 0 {
        let mut cache = TraceCache::default();
        let mut scratch = Scratch::new(wiring.len(), 0);
        let g = wiring.loops_value(&[], &[], &mut scratch, &mut cache);
        return Ok(ExactAverage {
            value: scalar * g,
            n_unitaries: 0,
            term_count: 1,
        });
    }

    let table = weingarten::table(n_u, q as f64)?;
    let perms: Vec<Permutation> = perm::enumerate(n_u)?.collect();
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    let total = perms.len();
    let done = AtomicUsize::new(0);

    let partials: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map_init(
            || (TraceCache::default(), Scratch::new(wiring.len(), n_u)),
            |(cache, scratch), ai| {
                let alpha = &perms[ai];
                let wg = table.values[&alpha.cycle_type()];
                let mut inner = ZERO;
                for (sigma, sigma_inv) in perms.iter().zip(&inverses) {
                    // τ = α⁻¹σ so that στ⁻¹ = α; τ⁻¹ = σ⁻¹α.
                    for j in 0..n_u {
                        scratch.tau_inv[j] = sigma_inv.apply(alpha.apply(j));
                    }
                    let tau_inv = std::mem::take(&mut scratch.tau_inv);
                    inner += wiring.loops_value(sigma.images(), &tau_inv, scratch, cache);
                    scratch.tau_inv = tau_inv;
                }
                let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                progress(d, total);
                inner * wg
            },
        )
        .collect();

    let value = partials.iter().fold(ZERO, |acc, v| acc + v);
    Ok(ExactAverage {
        value: scalar * value,
        n_unitaries: n_u,
        term_count: total * total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    U(usize),
    Ud(usize),
    Fixed(usize),
}

/// Flattened atom positions of a normalized expression with unit powers.
struct Wiring {
    slots: Vec<Slot>,
    /// Position following each position inside its word (cyclically).
    next: Vec<usize>,
    u_pos: Vec<usize>,
    ud_pos: Vec<usize>,
    /// Fixed-operator matrices by slot index, adjoint already applied.
    ops: Vec<CMatrix>,
    diagonal: Vec<bool>,
    /// Words without any slot; each contributes `Tr(1) = q`.
    empty_words: usize,
    q: usize,
}

impl Wiring {
    fn build(expr: &MomentExpression, q: usize) -> Result<Self> {
        let mut w = Wiring {
            slots: Vec::new(),
            next: Vec::new(),
            u_pos: Vec::new(),
            ud_pos: Vec::new(),
            ops: Vec::new(),
            diagonal: Vec::new(),
            empty_words: 0,
            q,
        };
        for word in &expr.factors {
            let start = w.slots.len();
            for atom in &word.atoms {
                match atom {
                    Atom::U(k) => {
                        for _ in 0..k.unsigned_abs() {
                            let p = w.slots.len();
                            if *k > 0 {
                                w.slots.push(Slot::U(w.u_pos.len()));
                                w.u_pos.push(p);
                            } else {
                                w.slots.push(Slot::Ud(w.ud_pos.len()));
                                w.ud_pos.push(p);
                            }
                        }
                    }
                    Atom::Fixed { op, dagger } => {
                        let m = expr
                            .operators
                            .get(op)
                            .ok_or_else(|| Error::UnknownOperator(op.clone()))?;
                        let m = if *dagger { m.adjoint() } else { m.clone() };
                        w.slots.push(Slot::Fixed(w.ops.len()));
                        w.diagonal.push(linalg::is_diagonal(&m));
                        w.ops.push(m);
                    }
                }
            }
            let end = w.slots.len();
            if end == start {
                w.empty_words += 1;
            }
            for p in start..end {
                w.next.push(if p + 1 == end { start } else { p + 1 });
            }
        }
        Ok(w)
    }

    fn len(&self) -> usize {
        self.slots.len()
    }

    /// Row-slot successor: leaving the column of `p`'s match partner.
    #[inline]
    fn succ(&self, p: usize, sigma: &[usize], tau_inv: &[usize]) -> usize {
        match self.slots[p] {
            Slot::Fixed(_) => self.next[p],
            Slot::U(i) => self.next[self.ud_pos[sigma[i]]],
            Slot::Ud(j) => self.next[self.u_pos[tau_inv[j]]],
        }
    }

    /// Product over index loops for one `(σ, τ)`.
    fn loops_value(
        &self,
        sigma: &[usize],
        tau_inv: &[usize],
        scratch: &mut Scratch,
        cache: &mut TraceCache,
    ) -> Complex64 {
        let q = Complex64::from(self.q as f64);
        let mut value = ONE;
        for _ in 0..self.empty_words {
            value *= q;
        }
        scratch.visited.iter_mut().for_each(|v| *v = false);
        for start in 0..self.len() {
            if scratch.visited[start] {
                continue;
            }
            scratch.loop_ops.clear();
            let mut p = start;
            while !scratch.visited[p] {
                scratch.visited[p] = true;
                if let Slot::Fixed(k) = self.slots[p] {
                    scratch.loop_ops.push(k);
                }
                p = self.succ(p, sigma, tau_inv);
            }
            let factor = if scratch.loop_ops.is_empty() {
                q
            } else {
                cache.trace(&scratch.loop_ops, self)
            };
            if factor == ZERO {
                return ZERO;
            }
            value *= factor;
        }
        value
    }
}

struct Scratch {
    visited: Vec<bool>,
    loop_ops: Vec<usize>,
    tau_inv: Vec<usize>,
}

impl Scratch {
    fn new(slots: usize, n: usize) -> Self {
        Self {
            visited: vec![false; slots],
            loop_ops: Vec::new(),
            tau_inv: vec![0; n],
        }
    }
}

/// Memoized traces of ordered operator products, keyed by the loop's operator
/// sequence rotated to start at its smallest slot.
#[derive(Default)]
struct TraceCache {
    map: HashMap<Vec<usize>, Complex64>,
}

impl TraceCache {
    fn trace(&mut self, ops: &[usize], wiring: &Wiring) -> Complex64 {
        let start = ops
            .iter()
            .enumerate()
            .min_by_key(|(_, &k)| k)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let key: Vec<usize> = ops[start..].iter().chain(&ops[..start]).copied().collect();
        if let Some(v) = self.map.get(&key) {
            return *v;
        }
        let v = product_trace(&key, wiring);
        self.map.insert(key, v);
        v
    }
}

fn product_trace(ops: &[usize], wiring: &Wiring) -> Complex64 {
    let q = wiring.q;
    if ops.iter().all(|&k| wiring.diagonal[k]) {
        let mut t = ZERO;
        for i in 0..q {
            let mut d = ONE;
            for &k in ops {
                d *= wiring.ops[k][(i, i)];
            }
            t += d;
        }
        return t;
    }
    let mut acc = wiring.ops[ops[0]].clone();
    for &k in &ops[1..] {
        acc *= &wiring.ops[k];
    }
    linalg::trace(&acc)
}

/// `δ^{a,b} ∏_m m^{a_m} a_m!`, the Haar moment of `∏ Tr(U^m)^{a_m} Tr(U^{-m})^{b_m}`.
///
/// `a[m-1]` is the multiplicity of `Tr(U^m)`; likewise for `b`.
pub fn trace_power_moment(a: &[usize], b: &[usize], q: usize) -> Result<f64> {
    let weight = |v: &[usize]| {
        v.iter()
            .enumerate()
            .map(|(i, &c)| (i + 1) * c)
            .sum::<usize>()
    };
    let need = weight(a).max(weight(b));
    if q < need {
        return Err(Error::DimensionTooSmall { q, min: need });
    }
    let trim = |v: &[usize]| {
        let mut v = v.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    if trim(a) != trim(b) {
        return Ok(0.0);
    }
    Ok(a.iter()
        .enumerate()
        .map(|(i, &am)| ((i + 1) as f64).powi(am as i32) * perm::factorial(am) as f64)
        .product())
}

/// `Tr(U^m)^{a_m} Tr(U^{-m})^{b_m}` products as an expression.
pub fn trace_power_expression(a: &[usize], b: &[usize]) -> MomentExpression {
    let mut e = MomentExpression::new();
    for (i, &am) in a.iter().enumerate() {
        for _ in 0..am {
            e = e.with_trace(TraceWord::new(vec![Atom::U(i as i64 + 1)]));
        }
    }
    for (i, &bm) in b.iter().enumerate() {
        for _ in 0..bm {
            e = e.with_trace(TraceWord::new(vec![Atom::U(-(i as i64) - 1)]));
        }
    }
    e
}

/// `q^{#cycles(τ)}` when every cycle of `τ` has even length, else 0.
pub fn h_value(tau: &Permutation, q: usize, n: usize) -> Result<f64> {
    if tau.len() != n {
        return Err(Error::SizeMismatch {
            left: tau.len(),
            right: n,
        });
    }
    Ok(if tau.is_even_cycle_only() {
        (q as f64).powi(tau.num_cycles() as i32)
    } else {
        0.0
    })
}
