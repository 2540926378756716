use serde::Serialize;

use super::commuting::{commuting_basis_with, CommutingBasisResult, Preference};
use super::measurement::{average_post_measurement, Measurement};
use super::numeric::{eoa_numeric, NumericBudget};
use crate::monotones::{cut_entanglement, Cut, MonotoneSpec};
use crate::qcore::{CVec, PureState};
use crate::states::{e_basis, eq21_form};
use crate::{Error, Result};

/// Charlie basis built from the normal form
/// `√p|00⟩|η₀⟩ + √(1−p)|11⟩|η₁⟩` (in suitable local bases of A and B).
#[derive(Clone, Debug)]
pub struct EBasisResult {
    pub eta0: CVec,
    pub eta1: CVec,
    /// `θ ∈ [0, π/4]` with `cos 2θ = ⟨η₀|η₁⟩`.
    pub theta: f64,
    pub e0: CVec,
    pub e1: CVec,
    /// Weight of the `|00⟩` branch.
    pub p: f64,
    /// Local bases of A and B in which the normal form holds.
    pub a_basis: [CVec; 2],
    pub b_basis: [CVec; 2],
}

/// Which branch of the case analysis produced the measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Theorem1Case {
    /// The two-party reduction is pure; Charlie does nothing.
    Decoupled,
    /// A-side commuting basis with parallel conditional Bloch vectors.
    SideA,
    /// B-side commuting basis with parallel conditional Bloch vectors.
    SideB,
    /// Both sides anti-parallel; Charlie measures the `e`-basis.
    EBasis,
}

#[derive(Clone, Debug)]
pub struct Theorem1Result {
    pub measurement: Measurement,
    /// Average `E₂` the construction guarantees.
    pub predicted: f64,
    pub case: Theorem1Case,
    pub commuting: Option<CommutingBasisResult>,
    pub e_basis: Option<EBasisResult>,
}

const NORMAL_FORM_RESIDUAL: f64 = 1e-8;

/// Optimal Charlie measurement for `E₂` on a three-qubit pure state.
///
/// Case analysis: a pure AB reduction needs no measurement; otherwise a
/// commuting basis with parallel conditional Bloch vectors on side A (or
/// else side B) reaches `1 − |R|` (or `1 − |S|`); when both sides are
/// anti-parallel the state is brought to the normal form and Charlie
/// measures `{e₀, e₁}`, leaving both branches with Schmidt weights
/// `(p, 1 − p)`.
pub fn theorem1_measurement(psi: &PureState) -> Result<Theorem1Result> {
    if !psi.is_three_qubit() {
        return Err(Error::input(format!("expected a three-qubit state, got dims {:?}", psi.dims())));
    }
    let sf = psi.schmidt(&[0, 1])?;
    if sf.coefficients[1] <= 1e-14 {
        return Ok(Theorem1Result {
            measurement: Measurement::trivial(2, 2),
            predicted: cut_entanglement(psi, Cut::A, MonotoneSpec::E2)?,
            case: Theorem1Case::Decoupled,
            commuting: None,
            e_basis: None,
        });
    }
    let side_a = commuting_basis_with(psi, Cut::A, Preference::Parallel)?;
    if side_a.alignment.is_parallel() {
        return from_side(psi, side_a, Theorem1Case::SideA);
    }
    let side_b = commuting_basis_with(psi, Cut::B, Preference::Parallel)?;
    if side_b.alignment.is_parallel() {
        return from_side(psi, side_b, Theorem1Case::SideB);
    }
    let eb = e_basis_from(psi, &side_a)?;
    let measurement = Measurement::projective(2, &[eb.e0.clone(), eb.e1.clone()])?;
    let predicted = 2.0 * eb.p.min(1.0 - eb.p);
    Ok(Theorem1Result {
        measurement,
        predicted,
        case: Theorem1Case::EBasis,
        commuting: Some(side_a),
        e_basis: Some(eb),
    })
}

fn from_side(psi: &PureState, res: CommutingBasisResult, case: Theorem1Case) -> Result<Theorem1Result> {
    let cut = res.side;
    let measurement = Measurement::projective(2, &res.basis)?;
    let predicted = cut_entanglement(psi, cut, MonotoneSpec::E2)?;
    Ok(Theorem1Result {
        measurement,
        predicted,
        case,
        commuting: Some(res),
        e_basis: None,
    })
}

/// Normal-form `e`-basis from an A-side commuting basis with anti-parallel
/// conditional Bloch vectors. Both conditional states then share their
/// Schmidt bases, which are read off the branch with the larger Schmidt gap.
fn e_basis_from(psi: &PureState, side_a: &CommutingBasisResult) -> Result<EBasisResult> {
    let gap = |k: usize| -> f64 {
        side_a.conditional_states[k]
            .as_ref()
            .map_or(-1.0, |s| {
                let c = s.schmidt(&[0]).map(|f| f.coefficients).unwrap_or_default();
                c.first().copied().unwrap_or(0.0) - c.get(1).copied().unwrap_or(0.0)
            })
    };
    let k = if gap(0) >= gap(1) { 0 } else { 1 };
    let branch = side_a.conditional_states[k]
        .as_ref()
        .ok_or(Error::Numerical {
            routine: "theorem1_measurement",
            residual: 1.0,
        })?;
    let m = branch.as_matrix(1);
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let order: [usize; 2] = if svd.singular_values[0] >= svd.singular_values[1] { [0, 1] } else { [1, 0] };
    let a = order.map(|i| u.column(i).into_owned());
    let b = order.map(|i| v_t.row(i).transpose().into_owned());
    e_basis_in(psi, a, b)
}

fn e_basis_in(psi: &PureState, a: [CVec; 2], b: [CVec; 2]) -> Result<EBasisResult> {
    let form = eq21_form(psi, a, b);
    if form.residual > NORMAL_FORM_RESIDUAL {
        return Err(Error::Numerical {
            routine: "normal form",
            residual: form.residual,
        });
    }
    let (theta, e0, e1) = e_basis(&form.eta0, &form.eta1, form.overlap);
    Ok(EBasisResult {
        eta0: form.eta0,
        eta1: form.eta1,
        theta,
        e0,
        e1,
        p: form.p,
        a_basis: form.a,
        b_basis: form.b,
    })
}

/// Normal form and `e`-basis of a state whose A-side computational-preferring
/// commuting basis has anti-parallel (or vanishing) conditional Bloch
/// vectors, such as GHZ or members of the Eq21 family. Returns a numerical
/// error when the state has no such normal form.
pub fn normal_form_e_basis(psi: &PureState) -> Result<EBasisResult> {
    let side_a = commuting_basis_with(psi, Cut::A, Preference::Computational)?;
    e_basis_from(psi, &side_a)
}

/// Outcome of [`verify_theorem1`].
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem1Check {
    pub cut_a: f64,
    pub cut_b: f64,
    pub constructive: f64,
    pub numeric: Option<f64>,
    pub case: Theorem1Case,
    /// `|constructive − min(cutA, cutB)|` plus one rounding unit of the
    /// larger value.
    pub gap: f64,
}

/// Checks that the constructive measurement saturates the min-cut bound
/// within `tol` and, when a numeric budget is given, that the numeric
/// optimum does not exceed it by more than `tol`.
pub fn verify_theorem1(psi: &PureState, tol: f64, numeric: Option<&NumericBudget>) -> Result<Theorem1Check> {
    let cut_a = cut_entanglement(psi, Cut::A, MonotoneSpec::E2)?;
    let cut_b = cut_entanglement(psi, Cut::B, MonotoneSpec::E2)?;
    let min_cut = cut_a.min(cut_b);
    let t1 = theorem1_measurement(psi)?;
    let constructive = average_post_measurement(psi, &t1.measurement, MonotoneSpec::E2)?;
    // Observed difference plus the rounding bound of the compared values:
    // agreement below one ulp cannot be certified.
    let gap = (constructive - min_cut).abs() + f64::EPSILON * constructive.abs().max(min_cut.abs());
    let fail = |what: &str, gap: f64| Error::Verification {
        what: what.to_string(),
        gap,
        state: Some(Box::new(psi.clone())),
    };
    if !(gap <= tol) {
        return Err(fail("constructive measurement misses the min-cut value", gap));
    }
    let numeric = match numeric {
        Some(b) => {
            let v = eoa_numeric(psi, MonotoneSpec::E2, b)?.value;
            if v > min_cut + tol {
                return Err(fail("numeric optimum exceeds the min-cut bound", v - min_cut));
            }
            Some(v)
        }
        None => None,
    };
    Ok(Theorem1Check {
        cut_a,
        cut_b,
        constructive,
        numeric,
        case: t1.case,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{generate, named, FamilySpec};

    #[test]
    fn ghz_reaches_one_with_bell_branches() {
        let psi = named::ghz();
        let r = theorem1_measurement(&psi).unwrap();
        assert!((r.predicted - 1.0).abs() < 1e-12);
        let avg = average_post_measurement(&psi, &r.measurement, MonotoneSpec::E2).unwrap();
        assert!((avg - 1.0).abs() < 1e-12);
        for b in super::super::measurement::post_measurement_branches(&psi, &r.measurement).unwrap() {
            assert!((crate::monotones::e2(&b.state).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn w_uses_computational_basis() {
        let psi = named::w();
        let r = theorem1_measurement(&psi).unwrap();
        assert!((r.predicted - 2.0 / 3.0).abs() < 1e-12);
        let c = r.commuting.unwrap();
        assert!((c.basis[0][0].re.abs() - 1.0).abs() < 1e-12 || (c.basis[1][0].re.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_times_c_is_trivial() {
        let r = theorem1_measurement(&named::bell_times_c()).unwrap();
        assert_eq!(r.case, Theorem1Case::Decoupled);
        assert_eq!(r.measurement.len(), 1);
        assert!((r.predicted - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_normal_form_is_x_basis() {
        let eb = normal_form_e_basis(&named::ghz()).unwrap();
        assert!((eb.theta - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((eb.p - 0.5).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eb.e0[0].norm() - s).abs() < 1e-12 && (eb.e0[1].norm() - s).abs() < 1e-12);
    }

    #[test]
    fn eq21_normal_form_reconstructs_etas() {
        for (p, o) in [(0.8, [0.3, 0.2]), (0.35, [0.0, 0.9]), (0.6, [-0.5, 0.0])] {
            let psi = generate(&FamilySpec::Eq21 { p, overlap: o }).unwrap();
            let eb = normal_form_e_basis(&psi).unwrap();
            let (c, s) = (eb.theta.cos(), eb.theta.sin());
            let r0 = &eb.e0 * crate::C64::from(c) + &eb.e1 * crate::C64::from(s);
            let r1 = &eb.e0 * crate::C64::from(c) - &eb.e1 * crate::C64::from(s);
            assert!((r0 - &eb.eta0).norm() < 1e-10);
            assert!((r1 - &eb.eta1).norm() < 1e-10);
            assert!((eb.p.min(1.0 - eb.p) - p.min(1.0 - p)).abs() < 1e-12);
            let m = Measurement::projective(2, &[eb.e0.clone(), eb.e1.clone()]).unwrap();
            let avg = average_post_measurement(&psi, &m, MonotoneSpec::E2).unwrap();
            assert!((avg - 2.0 * p.min(1.0 - p)).abs() < 1e-10);
        }
    }
}
