use serde::Serialize;

use super::commuting::commuting_charlie_basis;
use crate::monotones::{cut_entanglement, wootters_concurrence, Cut, MonotoneSpec};
use crate::qcore::{CMat, PureState, C64};
use crate::states::lu_align;
use crate::Result;

/// The three equivalent conditions for an AB-symmetric state and whether
/// the equivalence is claimed for this state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorollaryReport {
    /// `E₂^{A|BC} = E₂^{B|AC}`.
    pub i: bool,
    /// `SWAP_{AB}|ψ⟩` is a local-unitary image of `|ψ⟩`.
    pub ii: bool,
    /// `C(ρ^{AC}) = C(ρ^{BC})`.
    pub iii: bool,
    /// Both A-side conditional marginals differ from `I/2`.
    pub applicable: bool,
    pub cut_gap: f64,
    pub concurrence_gap: f64,
    /// Best `1 − |⟨SWAP ψ|(U ⊗ V ⊗ W)|ψ⟩|²` found.
    pub lu_infidelity: f64,
    /// The local-unitary search ended between `tol` and the 1e-4
    /// inequivalence threshold, so `ii` is not conclusive.
    pub lu_inconclusive: bool,
}

/// Options for the local-unitary part of [`corollary_check`].
#[derive(Clone, Copy, Debug)]
pub struct LuSearch {
    pub starts: usize,
    pub seed: u64,
}

impl Default for LuSearch {
    fn default() -> Self {
        LuSearch { starts: 24, seed: 0x1u64 }
    }
}

const INEQUIVALENT: f64 = 1e-4;

pub fn corollary_check(psi: &PureState, tol: f64) -> Result<CorollaryReport> {
    corollary_check_with(psi, tol, &LuSearch::default())
}

pub fn corollary_check_with(psi: &PureState, tol: f64, search: &LuSearch) -> Result<CorollaryReport> {
    let e_a = cut_entanglement(psi, Cut::A, MonotoneSpec::E2)?;
    let e_b = cut_entanglement(psi, Cut::B, MonotoneSpec::E2)?;
    let cut_gap = (e_a - e_b).abs();
    let c_ac = wootters_concurrence(&psi.reduced(&[0, 2])?)?;
    let c_bc = wootters_concurrence(&psi.reduced(&[1, 2])?)?;
    let concurrence_gap = (c_ac - c_bc).abs();
    let swapped = psi.swapped(0, 1)?;
    let al = lu_align(psi, &swapped, &[], search.starts.saturating_sub(1), search.seed)?;
    let lu_infidelity = (1.0 - al.fidelity).max(0.0);
    let basis = commuting_charlie_basis(psi, Cut::A)?;
    let half = CMat::identity(2, 2) * C64::from(0.5);
    let applicable = (0..2).all(|k| match basis.conditional_marginal(k) {
        Some(rho) => (rho - &half).norm() > tol,
        None => false,
    });
    Ok(CorollaryReport {
        i: cut_gap <= tol,
        ii: lu_infidelity <= tol,
        iii: concurrence_gap <= tol,
        applicable,
        cut_gap,
        concurrence_gap,
        lu_infidelity,
        lu_inconclusive: lu_infidelity > tol && lu_infidelity <= INEQUIVALENT,
    })
}
