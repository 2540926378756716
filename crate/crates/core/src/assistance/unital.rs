use serde::Serialize;

use crate::qcore::{commutator, eig_hermitian, frobenius, is_unitary, CMat, C64};
use crate::{Error, Result};

/// Outcome of [`unital_fixed_point_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnitalCheck {
    /// `λ_min(Σ p_x U_x H U_x†) = λ_min(H)` within 1e-10.
    pub preserved: bool,
    /// Every `U_x` commutes with `H` within 1e-10.
    pub commutes: bool,
    /// Every `U_x H U_x†` has the smallest-eigenvalue eigenvector of `H` as
    /// an eigenvector with the same eigenvalue, within 1e-9.
    pub shares_eigenvector: bool,
}

const PRESERVED_TOL: f64 = 1e-10;
const COMMUTES_TOL: f64 = 1e-10;
const SHARED_TOL: f64 = 1e-9;

/// Compares λ_min preservation under a mixed-unitary channel with
/// commutation of every unitary with `H`.
///
/// `mixture` lists `(p_x, U_x)`; weights must be positive and sum to 1 and
/// the first unitary must be the identity.
pub fn unital_fixed_point_check(h: &CMat, mixture: &[(f64, CMat)]) -> Result<UnitalCheck> {
    if h.shape() != (2, 2) {
        return Err(Error::input("H must be a 2×2 matrix"));
    }
    if mixture.is_empty() {
        return Err(Error::input("the mixture needs at least one element"));
    }
    if mixture.iter().any(|(p, _)| !(*p > 0.0)) {
        return Err(Error::input("mixture weights must be strictly positive"));
    }
    let total: f64 = mixture.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::input(format!("mixture weights sum to {total}")));
    }
    for (_, u) in mixture {
        if u.shape() != (2, 2) || !is_unitary(u, 1e-10) {
            return Err(Error::input("mixture elements must be 2×2 unitaries"));
        }
    }
    if (&mixture[0].1 - CMat::identity(2, 2)).norm() > 1e-10 {
        return Err(Error::input("the first unitary of the mixture must be the identity"));
    }
    let eh = eig_hermitian(h)?;
    let mut mixed = CMat::zeros(2, 2);
    for (p, u) in mixture {
        mixed += u * h * u.adjoint() * C64::from(*p);
    }
    let em = eig_hermitian(&crate::qcore::hermitian_part(&mixed))?;
    let preserved = (eh.values[1] - em.values[1]).abs() <= PRESERVED_TOL;
    let commutes = mixture.iter().all(|(_, u)| frobenius(&commutator(h, u)) <= COMMUTES_TOL);
    let v = eh.vector(1);
    let shares_eigenvector = mixture.iter().all(|(_, u)| {
        let t = u * h * u.adjoint();
        (&t * &v - &v * C64::from(eh.values[1])).norm() <= SHARED_TOL
    });
    Ok(UnitalCheck {
        preserved,
        commutes,
        shares_eigenvector,
    })
}
