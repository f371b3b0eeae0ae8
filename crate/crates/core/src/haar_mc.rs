//! Seeded Haar sampling and Monte Carlo estimates of moment expressions.
//!
//! Sample `i` of a run with seed `s` always draws from ChaCha stream `i` of
//! key `s`, so an estimate does not depend on the number of worker threads.
//! Per-sample values are collected in index order before the reduction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::oracle::MomentExpression;

/// Environment variable consulted for the global seed by the CLI.
pub const SEED_ENV: &str = "HAARCORR_SEED";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaarEstimate {
    pub mean: Complex64,
    /// Standard error of the real part of the mean.
    pub std_error_re: f64,
    /// Standard error of the imaginary part of the mean.
    pub std_error_im: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub q: usize,
}

impl HaarEstimate {
    /// Larger of the two component standard errors.
    pub fn std_error(&self) -> f64 {
        self.std_error_re.max(self.std_error_im)
    }

    /// Whether `target` lies within `k` standard errors in both components.
    pub fn agrees_with(&self, target: Complex64, k: f64) -> bool {
        let within = |d: f64, se: f64| d.abs() <= k * se || d.abs() < 1e-12;
        within(self.mean.re - target.re, self.std_error_re)
            && within(self.mean.im - target.im, self.std_error_im)
    }
}

/// Deterministic random stream for sample `index` of run `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-distributed `q × q` unitary: Ginibre matrix, QR, then the columns of
/// `Q` rescaled by the phases of `diag(R)`.
pub fn sample_unitary<R: Rng + ?Sized>(q: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(q, q, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..q {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 {
            d / n
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..q {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Monte Carlo estimate of the Haar average of `expr`.
pub fn estimate(
    expr: &MomentExpression,
    q: usize,
    n_samples: usize,
    seed: u64,
) -> Result<HaarEstimate> {
    expr.check_operators()?;
    expr.check_dimension(q)?;
    let norm = expr.normalized();
    estimate_with(q, n_samples, seed, |u| norm.evaluate(u))
}

/// As [`estimate`] but on a dedicated pool of `workers` threads.
pub fn estimate_on_workers(
    expr: &MomentExpression,
    q: usize,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<HaarEstimate> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| estimate(expr, q, n_samples, seed))
}

/// Monte Carlo mean of an arbitrary function of a Haar unitary.
pub fn estimate_with<F>(q: usize, n_samples: usize, seed: u64, f: F) -> Result<HaarEstimate>
where
    F: Fn(&CMatrix) -> Result<Complex64> + Sync,
{
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    let values: Vec<Complex64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i);
            let u = sample_unitary(q, &mut rng);
            f(&u)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(&values, seed, q))
}

fn summarize(values: &[Complex64], seed: u64, q: usize) -> HaarEstimate {
    let n = values.len() as f64;
    let sum = values.iter().fold(Complex64::new(0.0, 0.0), |a, v| a + v);
    let mean = sum / n;
    let (mut ss_re, mut ss_im) = (0.0, 0.0);
    for v in values {
        ss_re += (v.re - mean.re).powi(2);
        ss_im += (v.im - mean.im).powi(2);
    }
    let se = |ss: f64| (ss / (n - 1.0)).sqrt() / n.sqrt();
    HaarEstimate {
        mean,
        std_error_re: se(ss_re),
        std_error_im: se(ss_im),
        n_samples: values.len(),
        seed,
        q,
    }
}
