//! Entanglement of assistance for three-qubit pure states.
//!
//! The crate computes how much Alice–Bob entanglement a helper (Charlie) can
//! concentrate by measuring his share of a pure state `|ψ⟩^{ABC}` and
//! broadcasting the outcome. It builds the optimal helper measurement for the
//! `E₂` measure (twice the smallest Schmidt coefficient), decides when the
//! helper can decouple without loss for strictly concave measures, and ships
//! the numerical machinery used to check those statements: a POVM optimiser,
//! Wootters concurrence, three-tangle, ensemble decompositions and Monte Carlo
//! drivers.
//!
//! Module map:
//!
//! - [`qcore`]: dense complex kernels, states, density matrices, Bloch vectors.
//! - [`states`]: named states and parametric families.
//! - [`monotones`]: bipartite entanglement measures and the three-tangle.
//! - [`assistance`]: helper measurements, assistance values, classifiers.
//! - [`ensembles`]: pure-state decompositions of two-qubit mixed states.
//! - [`verify`]: seeded Monte Carlo suites shared by the CLI and tests.

pub mod assistance;
pub mod ensembles;
mod error;
pub mod monotones;
pub mod optimize;
pub mod qcore;
pub mod states;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use monotones::MonotoneSpec;
pub use qcore::{BlochVector, DensityMatrix, PureState, SchmidtForm, C64, CMat, CVec};
pub use tolerance::Tolerances;
