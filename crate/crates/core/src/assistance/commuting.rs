use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::geometry::{basis_from_direction, conditional_geometry, null_directions, side_first, ConditionalGeometry};
use crate::monotones::Cut;
use crate::qcore::{commutator, frobenius, BlochVector, CMat, CVec, PureState, C64};
use crate::tolerance;
use crate::{Error, Result};

/// Relative orientation of the two conditional Bloch vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Alignment {
    Parallel,
    AntiParallel,
    /// At least one conditional Bloch vector vanishes; treated as parallel.
    ZeroVector,
}

impl Alignment {
    pub fn is_parallel(self) -> bool {
        !matches!(self, Alignment::AntiParallel)
    }
}

/// Charlie basis whose conditional marginals on one side commute.
#[derive(Clone, Debug)]
pub struct CommutingBasisResult {
    pub side: Cut,
    pub basis: [CVec; 2],
    pub probabilities: [f64; 2],
    /// Normalised conditional two-party states (A then B); `None` for an
    /// outcome of zero probability.
    pub conditional_states: [Option<PureState>; 2],
    /// Unnormalised branch amplitudes as side × other matrices, so that
    /// `A_k A_k† = p_k ρ_k`.
    pub operators: [CMat; 2],
    /// Bloch vectors of the normalised conditional marginals.
    pub bloch_vectors: [BlochVector; 2],
    pub alignment: Alignment,
    /// `‖[ρ₁, ρ₂]‖_F`.
    pub residual: f64,
    /// Charlie is uncorrelated with the other two parties.
    pub decoupled: bool,
}

impl CommutingBasisResult {
    /// Conditional marginal `ρ_k` on the chosen side, or `None` when `p_k = 0`.
    pub fn conditional_marginal(&self, k: usize) -> Option<CMat> {
        if self.probabilities[k] < tolerance::OUTCOME_PROB {
            return None;
        }
        let a = &self.operators[k];
        Some(a * a.adjoint() / C64::from(self.probabilities[k]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Preference {
    /// Use the computational Charlie basis whenever it commutes.
    Computational,
    /// Use the computational basis only if it commutes with parallel
    /// alignment; otherwise pick the commuting basis closest to parallel.
    Parallel,
}

/// Orthonormal Charlie basis whose conditional reduced states on `side`
/// commute.
///
/// The computational basis is returned whenever it already commutes.
/// Otherwise the basis direction `n` is read off the null space of
/// `[R]ₓ Y` (see [`super::geometry`]): the conditional Bloch vectors
/// `½(R ± Yn)` commute exactly when `Yn ∥ R`. When that null space has
/// more than one dimension the direction minimising `|Yn|` is taken, which
/// makes the alignment parallel whenever any commuting basis is parallel.
pub fn commuting_charlie_basis(psi: &PureState, side: Cut) -> Result<CommutingBasisResult> {
    commuting_basis_with(psi, side, Preference::Computational)
}

pub(crate) fn commuting_basis_with(psi: &PureState, side: Cut, pref: Preference) -> Result<CommutingBasisResult> {
    let s = side_first(psi, side)?;
    let decoupled = psi.schmidt(&[0, 1])?.coefficients[1] <= 1e-14;
    let z = Vector3::new(0.0, 0.0, 1.0);
    if decoupled {
        return evaluate(&s, side, &z, true);
    }
    let comp = evaluate(&s, side, &z, false)?;
    if comp.residual <= tolerance::COMMUTATOR * 1e-2 {
        let accept = match pref {
            Preference::Computational => true,
            Preference::Parallel => comp.alignment.is_parallel(),
        };
        if accept {
            return Ok(comp);
        }
    }
    let g = conditional_geometry(psi, side)?;
    let n = closed_form_direction(&g);
    let res = evaluate(&s, side, &n, false)?;
    if res.residual > tolerance::COMMUTATOR {
        return Err(Error::Numerical {
            routine: "commuting_charlie_basis",
            residual: res.residual,
        });
    }
    Ok(res)
}

fn cross_matrix(r: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -r[2], r[1], r[2], 0.0, -r[0], -r[1], r[0], 0.0)
}

const NULL_TOL: f64 = 1e-10;

fn closed_form_direction(g: &ConditionalGeometry) -> Vector3<f64> {
    let k = cross_matrix(&g.r) * g.y;
    let (dirs, sv) = null_directions(&k);
    let d = sv.iter().filter(|&&s| s <= NULL_TOL).count().max(1);
    if d == 1 {
        return dirs[0];
    }
    // Minimise |Y n| over unit vectors in the null space.
    let basis = nalgebra::DMatrix::<f64>::from_fn(3, d, |i, j| dirs[j][i]);
    let yd = nalgebra::DMatrix::<f64>::from_fn(3, 3, |i, j| g.y[(i, j)]) * &basis;
    let svd = yd.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let kmin = (0..svd.singular_values.len())
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .expect("non-empty");
    let c = v_t.row(kmin).transpose();
    let n = &basis * c;
    Vector3::new(n[0], n[1], n[2]).normalize()
}

/// Branch amplitudes `(I ⊗ I ⊗ ⟨e|)|ψ⟩` of a side-first state.
pub(crate) fn branch_vector(s: &PureState, e: &CVec) -> CVec {
    let v = s.amplitudes();
    CVec::from_fn(4, |i, _| v[2 * i] * e[0].conj() + v[2 * i + 1] * e[1].conj())
}

fn evaluate(s: &PureState, side: Cut, n: &Vector3<f64>, decoupled: bool) -> Result<CommutingBasisResult> {
    let basis = basis_from_direction(n);
    let mut probabilities = [0.0; 2];
    let mut operators = [CMat::zeros(2, 2), CMat::zeros(2, 2)];
    let mut states: [Option<PureState>; 2] = [None, None];
    let mut marginals: [Option<CMat>; 2] = [None, None];
    let mut blochs = [BlochVector::ZERO; 2];
    for k in 0..2 {
        let b = branch_vector(s, &basis[k]);
        let p = b.norm_squared();
        probabilities[k] = p;
        let a = CMat::from_fn(2, 2, |i, j| b[2 * i + j]);
        if p >= tolerance::OUTCOME_PROB {
            let rho = &a * a.adjoint() / C64::from(p);
            blochs[k] = crate::qcore::bloch_of_matrix(&rho);
            marginals[k] = Some(rho);
            let ab = match side {
                Cut::A => b.clone(),
                Cut::B => CVec::from_fn(4, |idx, _| b[2 * (idx % 2) + idx / 2]),
            };
            states[k] = Some(PureState::normalized(vec![2, 2], ab)?);
        }
        operators[k] = a;
    }
    let residual = match (&marginals[0], &marginals[1]) {
        (Some(r0), Some(r1)) => frobenius(&commutator(r0, r1)),
        _ => 0.0,
    };
    let alignment = classify(&blochs, &probabilities);
    Ok(CommutingBasisResult {
        side,
        basis,
        probabilities,
        conditional_states: states,
        operators,
        bloch_vectors: blochs,
        alignment,
        residual,
        decoupled,
    })
}

fn classify(r: &[BlochVector; 2], p: &[f64; 2]) -> Alignment {
    let zero = |k: usize| p[k] < tolerance::OUTCOME_PROB || r[k].norm() <= tolerance::ALIGNMENT;
    if zero(0) || zero(1) {
        return Alignment::ZeroVector;
    }
    if r[0].dot(&r[1]) >= 0.0 {
        Alignment::Parallel
    } else {
        Alignment::AntiParallel
    }
}

/// Cross-product alignment test `‖r₁ × r₂‖ ≤ 1e-8 (‖r₁‖‖r₂‖ + 1e-12)`.
pub fn aligned(r1: &BlochVector, r2: &BlochVector) -> bool {
    r1.cross(r2).norm() <= tolerance::ALIGNMENT * (r1.norm() * r2.norm() + 1e-12)
}
