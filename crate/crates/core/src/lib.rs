//! Unsharpness measures of quantum observables.
//!
//! A POVM `{A_i}` is *sharp* (a PVM) exactly when a second, immediately
//! repeated measurement of it is guaranteed to reproduce the first outcome.
//! This crate quantifies how far an observable is from that ideal:
//!
//! - [`measures`] computes the repeat-probability matrices `E = Σ A_i²` and
//!   `X = Σ ‖A_i‖ A_i` and the scalar measures derived from them (worst-case
//!   and state-averaged never-repeat probabilities, for the Luder instrument
//!   and for the best compatible instrument), plus Luo's uncertainty-based
//!   `f` via the state-dependent noise matrix `F_ρ`.
//! - [`observables`] is the POVM data model and the observable
//!   transformations used throughout: white-noise fuzzification,
//!   coarse-graining, convex combination, unitary conjugation, the
//!   depolarizing dual.
//! - [`monotonicity`] holds the exact λ-scaling laws of the measures under
//!   white noise, the Σ/Σ′ monotonicity conditions, and the dichotomic-qubit
//!   closed forms and grid scans.
//! - [`instruments`] realizes the Luder and repeat-optimal instruments as
//!   executable samplers, with deterministic seeded Monte Carlo and the
//!   six-probe tomographic estimation of an unknown qubit observable.
//! - [`search`] samples random states/unitaries/POVMs and scans qubit
//!   observables for violations of the Σ ordering conditions.
//! - [`linalg`] is the small dense complex Hermitian toolbox everything
//!   else sits on.
//!
//! All randomized entry points take an explicit 64-bit seed and are
//! bit-for-bit reproducible across runs and thread counts.

pub mod instruments;
pub mod linalg;
pub mod measures;
pub mod monotonicity;
pub mod observables;
pub mod rng;
pub mod search;

mod error;

pub use error::{Error, Result};
pub use linalg::{
    ComplexMatrix, EigenDecomposition, HermitianMatrix, C64, EQ_TOL, HERM_TOL, PSD_TOL,
};
pub use measures::MeasureReport;
pub use observables::{DensityMatrix, Povm};
