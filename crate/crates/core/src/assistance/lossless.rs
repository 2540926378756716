use nalgebra::Vector3;
use serde::Serialize;

use super::commuting::branch_vector;
use super::geometry::{basis_from_direction, conditional_geometry, null_directions, side_first};
use crate::monotones::Cut;
use crate::qcore::io::{matrix_to_json, MatrixJson};
use crate::qcore::{eig_hermitian, is_unitary, CMat, CVec, PureState, C64};
use crate::tolerance;
use crate::Result;

/// How a lossless verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum LosslessBranch {
    /// Both single-party marginals are maximally mixed.
    MaximallyMixed,
    /// A Charlie basis leaves every conditional marginal equal to the global one.
    EqualMarginals,
}

/// Parameters of the lossless family `Σ_x √p_x (U_x ⊗ V_x)|λ_min⟩|x⟩`
/// read off a state, with `U_x = I`.
///
/// The state equals `(a_basis ⊗ I ⊗ [basis₀ basis₁])` applied to the family
/// member, with the cut's party in the first slot.
#[derive(Clone, Debug)]
pub struct Thm2Parameters {
    pub lambda_min: f64,
    pub weights: Vec<f64>,
    pub v: Vec<CMat>,
    /// Eigenbasis of the marginal as columns, smallest eigenvalue first.
    pub a_basis: CMat,
    /// Charlie basis, one ket per kept weight.
    pub basis: Vec<CVec>,
}

#[derive(Clone, Debug)]
pub struct LosslessCertificate {
    pub cut: Cut,
    pub branch: LosslessBranch,
    pub basis: [CVec; 2],
    pub weights: [f64; 2],
    pub lambda_min: f64,
    /// Largest `‖ρ_x − ρ‖_F` over the conditional marginals on the cut's
    /// party (against `I/2` for the maximally mixed branch).
    pub residual: f64,
    /// `Σ_x p_x ‖ρ_x − ρ‖²_F`.
    pub objective: f64,
    pub parameters: Option<Thm2Parameters>,
}

#[derive(Clone, Debug)]
pub enum LosslessVerdict {
    /// The two-party reduction is pure: Charlie is uncorrelated.
    Decoupled,
    Lossless(LosslessCertificate),
    /// No two-outcome basis works; `residual` is the best residual found.
    Lossy { residual: f64 },
}

impl LosslessVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            LosslessVerdict::Decoupled => "decoupled",
            LosslessVerdict::Lossless(_) => "lossless",
            LosslessVerdict::Lossy { .. } => "lossy",
        }
    }

    pub fn is_lossless(&self) -> bool {
        matches!(self, LosslessVerdict::Lossless(_))
    }

    pub fn certificate_json(&self) -> serde_json::Value {
        match self {
            LosslessVerdict::Decoupled => serde_json::json!({}),
            LosslessVerdict::Lossy { residual } => serde_json::json!({ "residual": residual }),
            LosslessVerdict::Lossless(c) => {
                let ket = |v: &CVec| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
                let mut obj = serde_json::json!({
                    "cut": c.cut.to_string(),
                    "branch": c.branch,
                    "basis": [ket(&c.basis[0]), ket(&c.basis[1])],
                    "weights": c.weights,
                    "lambdaMin": c.lambda_min,
                    "residual": c.residual,
                });
                if let Some(p) = &c.parameters {
                    let v: Vec<MatrixJson> = p.v.iter().map(matrix_to_json).collect();
                    obj["family"] = serde_json::json!({
                        "lambdaMin": p.lambda_min,
                        "weights": p.weights,
                        "v": v,
                        "aBasis": matrix_to_json(&p.a_basis),
                    });
                }
                obj
            }
        }
    }
}

struct BasisEvaluation {
    basis: [CVec; 2],
    weights: [f64; 2],
    residual: f64,
    objective: f64,
}

fn evaluate(s: &PureState, n: &Vector3<f64>, reference: &CMat) -> BasisEvaluation {
    let basis = basis_from_direction(n);
    let mut weights = [0.0; 2];
    let mut residual: f64 = 0.0;
    let mut objective = 0.0;
    for k in 0..2 {
        let b = branch_vector(s, &basis[k]);
        let p = b.norm_squared();
        weights[k] = p;
        if p < tolerance::OUTCOME_PROB {
            continue;
        }
        let a = CMat::from_fn(2, 2, |i, j| b[2 * i + j]);
        let rho = &a * a.adjoint() / C64::from(p);
        let d = (rho - reference).norm();
        residual = residual.max(d);
        objective += p * d * d;
    }
    BasisEvaluation {
        basis,
        weights,
        residual,
        objective,
    }
}

/// Classifies whether Charlie can decouple without loss across `cut` for
/// strictly concave measures.
///
/// A Charlie projector along `n` leaves the conditional marginal on the cut's
/// party equal to the global one exactly when `(Y − R tᵀ) n = 0` (notation of
/// [`super::geometry`]), so the candidate basis is the smallest right
/// singular vector of that matrix. The verdict is then decided on the direct
/// residual `max_x ‖ρ_x − ρ‖_F ≤ tol`.
pub fn lossless_classifier(psi: &PureState, cut: Cut, tol: f64) -> Result<LosslessVerdict> {
    let s = side_first(psi, cut)?;
    if psi.schmidt(&[0, 1])?.coefficients[1] <= 1e-14 {
        return Ok(LosslessVerdict::Decoupled);
    }
    let rho = s.reduced(&[0])?;
    let lam_side = rho.lambda_min();
    let lam_other = s.reduced(&[1])?.lambda_min();
    let g = conditional_geometry(psi, cut)?;
    let half = CMat::identity(2, 2) * C64::from(0.5);
    if (lam_side - 0.5).abs() <= tol {
        if (lam_other - 0.5).abs() > tol {
            return Ok(LosslessVerdict::Lossy {
                residual: (lam_other - 0.5).abs(),
            });
        }
        // Maximally entangled branches: R + Y n = 0 with R ≈ 0.
        let (dirs, _) = null_directions(&g.y);
        let ev = evaluate(&s, &dirs[0], &half);
        return Ok(LosslessVerdict::Lossless(certificate(&s, cut, LosslessBranch::MaximallyMixed, lam_side, ev)));
    }
    let m = g.y - g.r * g.t.transpose();
    let (dirs, _) = null_directions(&m);
    let ev = evaluate(&s, &dirs[0], rho.matrix());
    if ev.residual <= tol {
        Ok(LosslessVerdict::Lossless(certificate(&s, cut, LosslessBranch::EqualMarginals, lam_side, ev)))
    } else {
        Ok(LosslessVerdict::Lossy { residual: ev.residual })
    }
}

fn certificate(s: &PureState, cut: Cut, branch: LosslessBranch, lambda_min: f64, ev: BasisEvaluation) -> LosslessCertificate {
    let parameters = if ev.residual <= 1e-8 { family_parameters(s, &ev.basis) } else { None };
    LosslessCertificate {
        cut,
        branch,
        basis: ev.basis,
        weights: ev.weights,
        lambda_min,
        residual: ev.residual,
        objective: ev.objective,
        parameters,
    }
}

/// Reads the family parameters off a side-first state and a Charlie basis
/// whose conditional marginals all equal the global one.
fn family_parameters(s: &PureState, basis: &[CVec; 2]) -> Option<Thm2Parameters> {
    let rho = s.reduced(&[0]).ok()?;
    let eig = eig_hermitian(rho.matrix()).ok()?;
    let lambda_min = eig.values[1];
    if lambda_min < 1e-12 {
        return None;
    }
    let e = [eig.vector(1), eig.vector(0)];
    let lam = [eig.values[1], eig.values[0]];
    let a_basis = CMat::from_columns(&e);
    let mut weights = Vec::new();
    let mut v = Vec::new();
    let mut kept = Vec::new();
    for c in basis {
        let b = branch_vector(s, c);
        let p = b.norm_squared();
        if p < tolerance::OUTCOME_PROB {
            continue;
        }
        let psi_x = &b / C64::from(p.sqrt());
        let mut vx = CMat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let f = e[i][0].conj() * psi_x[j] + e[i][1].conj() * psi_x[2 + j];
                vx[(j, i)] = f / C64::from(lam[i].sqrt());
            }
        }
        if !is_unitary(&vx, 1e-6) {
            return None;
        }
        weights.push(p);
        v.push(vx);
        kept.push(c.clone());
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Some(Thm2Parameters {
        lambda_min,
        weights,
        v,
        a_basis,
        basis: kept,
    })
}

/// Family parameters of a lossless state across `cut`, if it has them.
pub(crate) fn lossless_certificate_parameters(psi: &PureState, cut: Cut) -> Result<Option<Thm2Parameters>> {
    match lossless_classifier(psi, cut, 1e-8)? {
        LosslessVerdict::Lossless(c) => Ok(c.parameters),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{generate, named, FamilySpec};

    #[test]
    fn ghz_is_lossless_by_maximal_mixing() {
        match lossless_classifier(&named::ghz(), Cut::A, 1e-8).unwrap() {
            LosslessVerdict::Lossless(c) => {
                assert_eq!(c.branch, LosslessBranch::MaximallyMixed);
                assert!(c.residual < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn w_is_lossy() {
        assert!(matches!(
            lossless_classifier(&named::w(), Cut::A, 1e-8).unwrap(),
            LosslessVerdict::Lossy { .. }
        ));
    }

    #[test]
    fn bell_times_c_is_decoupled() {
        assert!(matches!(
            lossless_classifier(&named::bell_times_c(), Cut::B, 1e-8).unwrap(),
            LosslessVerdict::Decoupled
        ));
    }

    #[test]
    fn thm2_members_recover_lambda() {
        for seed in 0..20 {
            let lam = 0.05 + 0.02 * seed as f64;
            let spec = FamilySpec::Thm2 {
                lambda_min: lam,
                weights: vec![0.3, 0.7],
                phases: None,
                v: None,
                seed,
            };
            let psi = generate(&spec).unwrap();
            match lossless_classifier(&psi, Cut::A, 1e-8).unwrap() {
                LosslessVerdict::Lossless(c) => {
                    assert!((c.lambda_min - lam).abs() < 1e-8);
                    assert!(c.parameters.is_some());
                }
                other => panic!("seed {seed}: {other:?}"),
            }
        }
    }
}
