//! Small dense complex-matrix helpers shared by the exact and sampled paths.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `diag(+1, …, +1, -1, …, -1)` with `q/2` entries of each sign.
pub fn default_z(q: usize) -> Result<CMatrix> {
    if q == 0 || !q.is_multiple_of(2) {
        return Err(Error::OddDimension(q));
    }
    Ok(CMatrix::from_fn(q, q, |i, j| {
        if i != j {
            ZERO
        } else if i < q / 2 {
            ONE
        } else {
            -ONE
        }
    }))
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn is_diagonal(m: &CMatrix) -> bool {
    m.nrows() == m.ncols()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == ZERO))
}

/// Max-norm distance of `m m†` from the identity.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let p = m * m.adjoint();
    let mut worst = 0.0f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((p[(i, j)] - target).norm());
        }
    }
    worst
}

/// Rescales a square matrix to zero trace and `Tr(O†O) = q`.
pub fn normalize_traceless(m: &CMatrix) -> CMatrix {
    let q = m.nrows();
    let shift = trace(m) / q as f64;
    let centered = m - CMatrix::identity(q, q) * shift;
    let norm2: f64 = centered.iter().map(|z| z.norm_sqr()).sum();
    centered * Complex64::from((q as f64 / norm2).sqrt())
}
