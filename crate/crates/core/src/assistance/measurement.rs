use serde::Serialize;

use crate::monotones::{lambda_min_of_amplitudes, MonotoneSpec};
use crate::qcore::io::{matrix_to_json, MatrixJson};
use crate::qcore::{CMat, CVec, PureState, C64};
use crate::tolerance;
use crate::{Error, Result};

/// Finite list of Kraus operators acting on one subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    subsystem: usize,
    elements: Vec<CMat>,
}

/// Largest number of outcomes a [`Measurement`] may carry.
pub const MAX_OUTCOMES: usize = 4;

impl Measurement {
    /// Validates `Σ M†M = I` within [`tolerance::COMPLETENESS`] and the
    /// outcome count.
    pub fn new(subsystem: usize, elements: Vec<CMat>) -> Result<Self> {
        if elements.is_empty() || elements.len() > MAX_OUTCOMES {
            return Err(Error::input(format!(
                "a measurement needs 1 to {MAX_OUTCOMES} elements, got {}",
                elements.len()
            )));
        }
        let d = elements[0].ncols();
        if elements.iter().any(|m| m.ncols() != d) {
            return Err(Error::input("measurement elements act on different dimensions"));
        }
        let mut sum = CMat::zeros(d, d);
        for m in &elements {
            sum += m.adjoint() * m;
        }
        let dev = (sum - CMat::identity(d, d)).norm();
        if dev > tolerance::COMPLETENESS {
            return Err(Error::input(format!("measurement is incomplete (deviation {dev:.3e})")));
        }
        Ok(Measurement { subsystem, elements })
    }

    /// Projective measurement `{|e_k⟩⟨e_k|}` for an orthonormal basis.
    pub fn projective(subsystem: usize, basis: &[CVec]) -> Result<Self> {
        Self::new(subsystem, basis.iter().map(|e| e * e.adjoint()).collect())
    }

    pub fn computational(subsystem: usize, dim: usize) -> Self {
        let basis: Vec<CVec> = (0..dim)
            .map(|k| {
                let mut v = CVec::zeros(dim);
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::projective(subsystem, &basis).expect("computational basis is complete")
    }

    /// Qubit measurement in `{|+⟩, |−⟩}`.
    pub fn x_basis(subsystem: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVec::from_vec(vec![C64::from(s), C64::from(s)]);
        let minus = CVec::from_vec(vec![C64::from(s), C64::from(-s)]);
        Self::projective(subsystem, &[plus, minus]).expect("X basis is complete")
    }

    /// Single-outcome identity: no measurement at all.
    pub fn trivial(subsystem: usize, dim: usize) -> Self {
        Measurement {
            subsystem,
            elements: vec![CMat::identity(dim, dim)],
        }
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn to_json(&self) -> MeasurementJson {
        MeasurementJson {
            subsystem: self.subsystem,
            elements: self.elements.iter().map(matrix_to_json).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementJson {
    pub subsystem: usize,
    pub elements: Vec<MatrixJson>,
}

/// One outcome of a measurement on a tripartite pure state.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcome: usize,
    pub probability: f64,
    /// Normalised post-measurement state of the unmeasured parties.
    pub state: PureState,
}

/// Post-measurement ensemble on the unmeasured parties. Outcomes with
/// probability below [`tolerance::OUTCOME_PROB`] are dropped. Every kept
/// branch must be pure on the unmeasured parties, otherwise
/// [`Error::MixedBranch`] is returned.
pub fn post_measurement_branches(psi: &PureState, meas: &Measurement) -> Result<Vec<Branch>> {
    let s = meas.subsystem();
    let n = psi.parties();
    if s >= n || n < 2 {
        return Err(Error::input(format!("measured subsystem {s} out of range")));
    }
    if meas.elements()[0].ncols() != psi.dims()[s] {
        return Err(Error::DimensionMismatch {
            expected: psi.dims()[s],
            got: meas.elements()[0].ncols(),
        });
    }
    let mut order: Vec<usize> = (0..n).filter(|&k| k != s).collect();
    order.push(s);
    let moved = psi.permuted(&order)?;
    let rest_dims: Vec<usize> = order[..n - 1].iter().map(|&k| psi.dims()[k]).collect();
    let mut out = Vec::with_capacity(meas.len());
    for (x, m) in meas.elements().iter().enumerate() {
        let (dims, amps) = moved.apply_on(n - 1, m)?;
        let p = amps.norm_squared();
        if p < tolerance::OUTCOME_PROB {
            continue;
        }
        let rows: usize = rest_dims.iter().product();
        let cols = dims[n - 1];
        let mat = CMat::from_fn(rows, cols, |i, j| amps[i * cols + j]);
        let sv = mat.singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let weight = sv.get(1).map_or(0.0, |s| s * s / p);
        if weight > tolerance::BRANCH_PURITY {
            return Err(Error::MixedBranch { outcome: x, weight });
        }
        let svd = mat.svd(true, false);
        let u = svd.u.expect("requested u");
        let k = (0..svd.singular_values.len())
            .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .expect("non-empty");
        let mut v = u.column(k).into_owned();
        crate::qcore::canonical_phase(&mut v);
        out.push(Branch {
            outcome: x,
            probability: p,
            state: PureState::normalized(rest_dims.clone(), v)?,
        });
    }
    Ok(out)
}

/// `Σ_x p_x E(φ_x)` over the normalised post-measurement states.
pub fn average_post_measurement(psi: &PureState, meas: &Measurement, m: MonotoneSpec) -> Result<f64> {
    let branches = post_measurement_branches(psi, meas)?;
    let mut total = 0.0;
    for b in &branches {
        let e = if b.state.dims() == [2, 2] {
            let a = b.state.amplitudes();
            m.f(lambda_min_of_amplitudes(a[0], a[1], a[2], a[3]))
        } else {
            m.evaluate(&b.state)?
        };
        total += b.probability * e;
    }
    Ok(total)
}
