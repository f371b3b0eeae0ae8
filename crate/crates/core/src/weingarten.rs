//! Unitary Weingarten function, exact at finite `q` and to leading order in `1/q`.
//!
//! The exact values solve the Gram system `Σ_τ Wg(στ⁻¹) q^{#cycles(τ)} = δ(σ, id)`.
//! Because `Wg` is a class function the system is solved on cycle types: one row
//! per class representative, one unknown per class. The full `n! × n!` Gram
//! matrix is still available through [`gram_matrix`] for inspection and tests.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::perm::{self, catalan, Permutation};

/// Largest `n` for which the full Gram matrix is materialized.
pub const MAX_GRAM_N: usize = 6;
/// Largest `n` accepted for exact tables (7 is the slow, best-effort case).
pub const MAX_TABLE_N: usize = 7;

/// Exact Weingarten values for one `(n, q)`, keyed by cycle type.
#[derive(Clone, Debug)]
pub struct WeingartenTable {
    pub n: usize,
    pub q: f64,
    pub values: BTreeMap<Vec<usize>, f64>,
}

impl WeingartenTable {
    pub fn build(n: usize, q: f64) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_N {
            return Err(Error::OutOfRange {
                n,
                min: 1,
                max: MAX_TABLE_N,
            });
        }
        // Also rejects NaN.
        if q.is_nan() || q < n as f64 {
            return Err(Error::SingularGram { n, q });
        }
        let classes = perm::partitions(n);
        let index: HashMap<Vec<usize>, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let k = classes.len();
        let all: Vec<Permutation> = perm::enumerate(n)?.collect();
        // Scaled by q^{-n} so entries stay in (0, 1].
        let weights: Vec<f64> = all
            .iter()
            .map(|t| q.powi(t.num_cycles() as i32 - n as i32))
            .collect();

        let mut a = DMatrix::<f64>::zeros(k, k);
        for (row, lambda) in classes.iter().enumerate() {
            let sigma = perm::representative(lambda);
            for (tau, w) in all.iter().zip(&weights) {
                let alpha = sigma.compose(&tau.inverse())?;
                a[(row, index[&alpha.cycle_type()])] += w;
            }
        }
        let mut rhs = DVector::<f64>::zeros(k);
        rhs[index[&vec![1; n]]] = 1.0;
        let sol = a.lu().solve(&rhs).ok_or(Error::SingularGram { n, q })?;
        let scale = q.powi(-(n as i32));
        let values = classes
            .into_iter()
            .zip(sol.iter())
            .map(|(c, v)| (c, v * scale))
            .collect();
        Ok(Self { n, q, values })
    }

    pub fn get(&self, cycle_type: &[usize]) -> Option<f64> {
        self.values.get(cycle_type).copied()
    }

    pub fn value(&self, sigma: &Permutation) -> Result<f64> {
        if sigma.len() != self.n {
            return Err(Error::SizeMismatch {
                left: sigma.len(),
                right: self.n,
            });
        }
        Ok(self.values[&sigma.cycle_type()])
    }
}

type TableCache = Mutex<HashMap<(usize, u64), Arc<WeingartenTable>>>;

fn cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, memoized table for `(n, q)`.
pub fn table(n: usize, q: f64) -> Result<Arc<WeingartenTable>> {
    let key = (n, q.to_bits());
    if let Some(t) = cache().lock().expect("weingarten cache poisoned").get(&key) {
        return Ok(Arc::clone(t));
    }
    let built = Arc::new(WeingartenTable::build(n, q)?);
    cache()
        .lock()
        .expect("weingarten cache poisoned")
        .insert(key, Arc::clone(&built));
    Ok(built)
}

/// Gram matrix with entry `(σ, τ) = q^{#cycles(στ⁻¹)}`, rows and columns in
/// lexicographic order of `S_n`.
pub fn gram_matrix(n: usize, q: f64) -> Result<DMatrix<f64>> {
    if n == 0 || n > MAX_GRAM_N {
        return Err(Error::OutOfRange {
            n,
            min: 1,
            max: MAX_GRAM_N,
        });
    }
    let all: Vec<Permutation> = perm::enumerate(n)?.collect();
    let m = all.len();
    let mut g = DMatrix::<f64>::zeros(m, m);
    for (i, s) in all.iter().enumerate() {
        for (j, t) in all.iter().enumerate() {
            g[(i, j)] = q.powi(s.compose(&t.inverse())?.num_cycles() as i32);
        }
    }
    Ok(g)
}

/// Exact `Wg(q, σ)` for `σ ∈ S_n`, `q ≥ n`.
pub fn wg_exact(n: usize, q: f64, sigma: &Permutation) -> Result<f64> {
    table(n, q)?.value(sigma)
}

/// Leading large-`q` term `q^{-(n+|σ|)} ∏_c (-1)^{|c|-1} Cat_{|c|-1}`.
pub fn wg_leading(n: usize, q: f64, sigma: &Permutation) -> Result<f64> {
    if sigma.len() != n {
        return Err(Error::SizeMismatch {
            left: sigma.len(),
            right: n,
        });
    }
    Ok(leading_coefficient(&sigma.cycle_type())?
        * q.powi(-((n + sigma.transposition_distance()) as i32)))
}

/// `∏_c (-1)^{|c|-1} Cat_{|c|-1}` for a cycle type.
pub fn leading_coefficient(cycle_type: &[usize]) -> Result<f64> {
    let mut coeff = 1.0;
    for &len in cycle_type {
        let sign = if (len - 1) % 2 == 0 { 1.0 } else { -1.0 };
        coeff *= sign * catalan(len - 1)? as f64;
    }
    Ok(coeff)
}

/// Exponent `r(σ,τ) = |C_τ| + |C_σ| - n - |τσ⁻¹π|` with `π` the canonical n-cycle.
pub fn term_order(sigma: &Permutation, tau: &Permutation, n: usize) -> Result<i64> {
    for p in [sigma, tau] {
        if p.len() != n {
            return Err(Error::SizeMismatch {
                left: p.len(),
                right: n,
            });
        }
    }
    let pi = Permutation::canonical_pi(n);
    let w = tau.compose(&sigma.inverse())?.compose(&pi)?;
    Ok(tau.num_cycles() as i64 + sigma.num_cycles() as i64
        - n as i64
        - w.transposition_distance() as i64)
}
