use super::measurement::{average_post_measurement, Measurement};
use super::theorem1::theorem1_measurement;
use crate::monotones::MonotoneSpec;
use crate::qcore::{eig_hermitian, CVec, DensityMatrix, PureState, C64};
use crate::{Error, Result};

/// Assistance value of a rank-two two-qubit density matrix.
#[derive(Clone, Debug)]
pub struct DensityAssistance {
    /// Average `E₂` reached by the constructive measurement on the purifier.
    pub value: f64,
    /// `2·min(λ_min(ρ^A), λ_min(ρ^B))`.
    pub formula: f64,
    /// Purification `Σ_k √μ_k |k⟩^{AB} |k⟩^C` over the eigen-decomposition.
    pub purification: PureState,
    pub measurement: Measurement,
}

const RANK_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-8;

/// Purifies `rho` with a qubit, runs the constructive measurement and checks
/// the result against `2·min(λ_min(ρ^A), λ_min(ρ^B))` within 1e-8.
pub fn eoa_density(rho: &DensityMatrix) -> Result<DensityAssistance> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let eig = eig_hermitian(rho.matrix())?;
    if eig.values[2] > RANK_TOL {
        return Err(Error::input(format!(
            "density matrix has rank above two (third eigenvalue {:.3e})",
            eig.values[2]
        )));
    }
    let mut amps = CVec::zeros(8);
    for k in 0..2 {
        let w = eig.values[k].max(0.0).sqrt();
        let v = eig.vector(k);
        for i in 0..4 {
            amps[2 * i + k] += v[i] * C64::from(w);
        }
    }
    let purification = PureState::normalized(vec![2, 2, 2], amps)?;
    let t1 = theorem1_measurement(&purification)?;
    let value = average_post_measurement(&purification, &t1.measurement, MonotoneSpec::E2)?;
    let la = rho.partial_trace(&[2, 2], &[0])?.lambda_min();
    let lb = rho.partial_trace(&[2, 2], &[1])?.lambda_min();
    let formula = 2.0 * la.min(lb);
    if (value - formula).abs() > IDENTITY_TOL {
        return Err(Error::Verification {
            what: "assistance value differs from the marginal formula".into(),
            gap: (value - formula).abs(),
            state: Some(Box::new(purification)),
        });
    }
    Ok(DensityAssistance {
        value,
        formula,
        purification,
        measurement: t1.measurement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::named;

    #[test]
    fn bell_state() {
        let r = eoa_density(&named::phi_plus().density()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_correlation_reaches_one() {
        let zz = PureState::from_real(&[2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let oo = PureState::from_real(&[2, 2], &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let rho = DensityMatrix::mixture(&[(0.5, &zz), (0.5, &oo)]).unwrap();
        assert!((eoa_density(&rho).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_reduction() {
        let rho = named::w().reduced(&[0, 1]).unwrap();
        assert!((eoa_density(&rho).unwrap().value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_three_is_rejected() {
        let mut rng = crate::qcore::seeded_rng(2);
        let rho = crate::qcore::random_density(4, 3, &mut rng);
        assert!(eoa_density(&rho).is_err());
    }
}
