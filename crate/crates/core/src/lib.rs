//! Haar averages of correlators of a `q`-dimensional system evolved by a
//! random unitary.
//!
//! * [`perm`], [`weingarten`]: symmetric-group utilities and the Weingarten
//!   function, exact and leading order.
//! * [`oracle`]: exact Haar averages of trace polynomials by permutation sums.
//! * [`haar_mc`]: seeded Monte Carlo over Haar unitaries.
//! * [`correlators`]: time sequences, `n`-point correlators, their moments and
//!   `q`-scaling probes.
//! * [`otoc`]: out-of-time-ordered correlators and their leading-order
//!   evaluation in the two-state pair space.
//! * [`cobweb`]: chord diagrams, index-loop counting and reduction.
//! * [`cli`]: the `haarcorr` batch front-end.

pub mod cli;
pub mod cobweb;
pub mod correlators;
pub mod error;
pub mod haar_mc;
pub mod linalg;
pub mod oracle;
pub mod otoc;
pub mod perm;
pub mod weingarten;

pub use error::{Error, Result};
pub use perm::Permutation;
