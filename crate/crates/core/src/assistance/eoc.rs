use nalgebra::Vector3;
use serde::Serialize;

use super::geometry::basis_from_direction;
use super::measurement::Measurement;
use super::numeric::{eoa_numeric, NumericBudget};
use super::theorem1::theorem1_measurement;
use crate::monotones::MonotoneSpec;
use crate::optimize::{pattern_search, PatternSearch};
use crate::qcore::{seeded_rng, CMat, PureState, C64};
use crate::tolerance;
use crate::Result;

/// Effort for [`eoc_lower_bound_search`].
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EocBudget {
    /// Outer evaluations per measuring party.
    pub outer_evals: usize,
    /// Budget of the inner Charlie optimisation for measures other than `E₂`.
    pub inner: NumericBudget,
    pub seed: u64,
}

impl Default for EocBudget {
    fn default() -> Self {
        EocBudget {
            outer_evals: 400,
            inner: NumericBudget {
                starts: 2,
                evals_per_start: 1500,
                ..NumericBudget::default()
            },
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EocResult {
    /// Best two-round average found; a lower bound on the entanglement of
    /// collaboration.
    pub value: f64,
    /// Party (0 = Alice, 1 = Bob) whose first-round measurement achieved it.
    pub party: usize,
    pub first_round: Measurement,
    /// Value of the protocol in which the first round does nothing, i.e.
    /// the inner assistance value of the state itself.
    pub baseline: f64,
}

/// Two-outcome Kraus pair `√E`, `√(I − E)` with `E = e₀|n⟩⟨n| + e₁|−n⟩⟨−n|`.
fn kraus_pair(x: &[f64]) -> [CMat; 2] {
    let e0 = x[0].sin().powi(2);
    let e1 = x[1].sin().powi(2);
    let n = Vector3::new(x[2].sin() * x[3].cos(), x[2].sin() * x[3].sin(), x[2].cos());
    let [u, w] = basis_from_direction(&n);
    let pu = &u * u.adjoint();
    let pw = &w * w.adjoint();
    [
        &pu * C64::from(e0.sqrt()) + &pw * C64::from(e1.sqrt()),
        &pu * C64::from((1.0 - e0).sqrt()) + &pw * C64::from((1.0 - e1).sqrt()),
    ]
}

fn inner_value(state: &PureState, m: MonotoneSpec, budget: &EocBudget) -> Result<f64> {
    if m == MonotoneSpec::E2 && state.is_three_qubit() {
        Ok(theorem1_measurement(state)?.predicted)
    } else {
        Ok(eoa_numeric(state, m, &budget.inner)?.value)
    }
}

fn protocol_value(psi: &PureState, party: usize, kraus: &[CMat; 2], m: MonotoneSpec, budget: &EocBudget) -> Result<f64> {
    let mut total = 0.0;
    for k in kraus {
        let (dims, amps) = psi.apply_on(party, k)?;
        let q = amps.norm_squared();
        if q < tolerance::OUTCOME_PROB {
            continue;
        }
        let branch = PureState::normalized(dims, amps)?;
        total += q * inner_value(&branch, m, budget)?;
    }
    Ok(total)
}

/// Lower bound on the entanglement of collaboration from two-round
/// protocols: Alice or Bob applies a two-outcome measurement, broadcasts the
/// result, and Charlie then performs the best assistance measurement on the
/// resulting branch (the constructive one for `E₂`, the numeric one
/// otherwise).
pub fn eoc_lower_bound_search(psi: &PureState, m: MonotoneSpec, budget: &EocBudget) -> Result<EocResult> {
    m.validate()?;
    let baseline = inner_value(psi, m, budget)?;
    let x0 = [std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, 0.0];
    let mut best = EocResult {
        value: baseline,
        party: 0,
        first_round: Measurement::new(0, kraus_pair(&x0).to_vec())?,
        baseline,
    };
    let mut rng = seeded_rng(budget.seed);
    let cfg = PatternSearch {
        initial_step: 0.4,
        min_step: 1e-6,
        max_evals: budget.outer_evals.max(1),
    };
    for party in 0..2 {
        let mut failure = None;
        let objective = |x: &[f64]| match protocol_value(psi, party, &kraus_pair(x), m, budget) {
            Ok(v) => -v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        };
        let res = pattern_search(objective, &x0, &cfg, &mut rng);
        if let Some(e) = failure {
            return Err(e);
        }
        if -res.value > best.value {
            best = EocResult {
                value: -res.value,
                party,
                first_round: Measurement::new(party, kraus_pair(&res.x).to_vec())?,
                baseline,
            };
        }
    }
    Ok(best)
}
