use serde::Serialize;

use super::eoc::{eoc_lower_bound_search, EocBudget};
use super::lossless::{lossless_classifier, LosslessVerdict};
use super::measurement::{average_post_measurement, MAX_OUTCOMES};
use super::numeric::{eoa_numeric, NumericBudget};
use super::theorem1::{theorem1_measurement, Theorem1Case};
use crate::monotones::{cut_entanglement, Cut, MonotoneSpec};
use crate::qcore::io::{matrix_to_json, MatrixJson};
use crate::qcore::PureState;
use crate::Result;

/// Knobs for [`analyze`].
#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub numeric: NumericBudget,
    /// Run the two-round collaboration search as well.
    pub eoc: Option<EocBudget>,
    /// Tolerance of the lossless classifier.
    pub lossless_tol: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            numeric: NumericBudget::default(),
            eoc: None,
            lossless_tol: crate::Tolerances::default().lossless,
        }
    }
}

/// Everything known about one three-qubit state for one measure.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AssistanceReport {
    pub cut_a: f64,
    pub cut_b: f64,
    /// Average of the measure under the constructive `E₂`-optimal measurement.
    pub eoa_constructive: f64,
    /// Best value of the numeric POVM search (a lower bound).
    pub eoa_numeric: f64,
    pub numeric_converged: bool,
    /// Number of POVM elements the numeric search was allowed.
    pub outcome_cap: usize,
    pub eoc_lower_bound: Option<f64>,
    pub monotone: String,
    pub verdict: &'static str,
    /// `min(cutA, cutB) − eoaNumeric`.
    pub gap: f64,
    pub case: Theorem1Case,
    /// Kraus operators of the constructive measurement on Charlie.
    pub measurement: Vec<MatrixJson>,
    pub certificate: serde_json::Value,
}

impl AssistanceReport {
    /// Bound checks: numeric value within the min-cut bound and below the
    /// collaboration lower bound, both with slack `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        let min_cut = self.cut_a.min(self.cut_b);
        self.eoa_numeric <= min_cut + tol && self.eoc_lower_bound.is_none_or(|e| self.eoa_numeric <= e + tol)
    }
}

/// Computes cut values, constructive and numeric assistance values, the
/// lossless verdict on the smaller cut and, optionally, the collaboration
/// lower bound.
pub fn analyze(psi: &PureState, m: MonotoneSpec, opts: &AnalyzeOptions) -> Result<AssistanceReport> {
    m.validate()?;
    let cut_a = cut_entanglement(psi, Cut::A, m)?;
    let cut_b = cut_entanglement(psi, Cut::B, m)?;
    let t1 = theorem1_measurement(psi)?;
    let eoa_constructive = average_post_measurement(psi, &t1.measurement, m)?;
    let numeric = eoa_numeric(psi, m, &opts.numeric)?;
    let eoc_lower_bound = match &opts.eoc {
        Some(b) => Some(eoc_lower_bound_search(psi, m, b)?.value),
        None => None,
    };
    let e2a = cut_entanglement(psi, Cut::A, MonotoneSpec::E2)?;
    let e2b = cut_entanglement(psi, Cut::B, MonotoneSpec::E2)?;
    let cut = if e2a <= e2b { Cut::A } else { Cut::B };
    let verdict = lossless_classifier(psi, cut, opts.lossless_tol)?;
    let mut certificate = verdict.certificate_json();
    if let LosslessVerdict::Lossy { .. } = verdict {
        certificate["cut"] = serde_json::json!(cut.to_string());
    }
    Ok(AssistanceReport {
        cut_a,
        cut_b,
        eoa_constructive,
        eoa_numeric: numeric.value,
        numeric_converged: numeric.converged,
        outcome_cap: MAX_OUTCOMES,
        eoc_lower_bound,
        monotone: m.to_string(),
        verdict: verdict.label(),
        gap: cut_a.min(cut_b) - numeric.value,
        case: t1.case,
        measurement: t1.measurement.elements().iter().map(matrix_to_json).collect(),
        certificate,
    })
}
