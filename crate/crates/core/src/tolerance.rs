//! Numerical tolerances used across the crate.
//!
//! Every threshold lives here so that the contract values can be audited in
//! one place. [`Tolerances::default`] returns the contract defaults; callers
//! that need a looser or tighter check pass their own record.

/// Norm of a [`crate::PureState`] must be 1 within this.
pub const STATE_NORM: f64 = 1e-12;
/// Hermiticity, positivity and trace checks for density matrices.
pub const DENSITY: f64 = 1e-12;
/// Input to the Hermitian eigensolver must be Hermitian within this.
pub const HERMITIAN_INPUT: f64 = 1e-10;
/// Allowed excess of a Bloch vector norm over 1.
pub const BLOCH_NORM: f64 = 1e-12;
/// Completeness `Σ M†M = I` of a measurement.
pub const COMPLETENESS: f64 = 1e-10;
/// Outcomes with smaller probability are dropped.
pub const OUTCOME_PROB: f64 = 1e-14;
/// Residual commutator of conditional marginals for a commuting basis.
pub const COMMUTATOR: f64 = 1e-9;
/// Relative cross-product threshold for the parallel/anti-parallel test.
pub const ALIGNMENT: f64 = 1e-8;
/// Smallest eigenvalue below this counts as zero for `S₀`.
pub const S0_RANK: f64 = 1e-10;
/// `|α − 1|` below this selects the Shannon branch of the Rényi entropy.
pub const ALPHA_SHANNON: f64 = 1e-9;
/// Second Schmidt weight of a post-measurement branch that still counts as pure.
pub const BRANCH_PURITY: f64 = 1e-10;
/// Ensemble reconstruction error.
pub const RECONSTRUCTION: f64 = 1e-10;
/// Weights below this are pruned from ensembles.
pub const ENSEMBLE_WEIGHT: f64 = 1e-14;
/// A pure two-qubit state with concurrence above this counts as entangled
/// when mixing product elements away.
pub const ENTANGLED: f64 = 1e-6;
/// Marginal eigenvalue below this counts as a pure marginal.
pub const MIXED_MARGINAL: f64 = 1e-9;

/// Tolerance record threaded through the verification routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub state_norm: f64,
    pub density: f64,
    pub commutator: f64,
    pub alignment: f64,
    pub completeness: f64,
    pub reconstruction: f64,
    /// Agreement between constructive and min-cut values.
    pub saturation: f64,
    /// Slack allowed above the min-cut bound.
    pub upper_bound: f64,
    /// Residual below which the lossless classifier accepts a basis.
    pub lossless: f64,
    /// Infidelity at which two states count as LU-equivalent.
    pub lu_equivalence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            state_norm: STATE_NORM,
            density: DENSITY,
            commutator: COMMUTATOR,
            alignment: ALIGNMENT,
            completeness: COMPLETENESS,
            reconstruction: RECONSTRUCTION,
            saturation: 1e-8,
            upper_bound: 1e-6,
            lossless: 1e-8,
            lu_equivalence: 1e-6,
        }
    }
}
