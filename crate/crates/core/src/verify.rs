//! Seeded Monte Carlo suites.
//!
//! Trial `i` of a run with seed `s` draws its instance from seed `s + i`, so
//! a run is reproducible and parallel and serial execution agree exactly.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::assistance::{
    corollary_check_with, eoa_density, eoa_numeric, lossless_classifier, unital_fixed_point_check, verify_theorem1,
    LosslessVerdict, LuSearch, NumericBudget,
};
use crate::ensembles::{entangled_decomposition, s0_assistance};
use crate::monotones::{cut_entanglement, three_tangle_forms, Cut, MonotoneSpec};
use crate::qcore::io::{density_to_json, matrix_to_json, StateJson};
use crate::qcore::{haar_state, haar_unitary, random_density, seeded_rng, CMat, DensityMatrix, PureState, C64};
use crate::states::{generate, FamilySpec};
use crate::{Error, Result};

/// A verification target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Constructive `E₂` measurement saturates the min-cut bound on Haar states.
    Thm1,
    /// Generated lossless states classify lossless and reach the cut
    /// entropy; Haar states classify lossy with a positive entropy gap.
    Thm2,
    /// λ_min preservation under mixed-unitary channels ⇔ commutation.
    Prop2,
    /// Symmetric normal-form states meet all three symmetry conditions;
    /// Haar states agree on the cut and concurrence conditions.
    Corollary,
    /// All-entangled decompositions of two-qubit states with mixed marginals.
    AppendixB,
    /// Non-negative three-tangle and the concurrence difference identity.
    Ckw,
    /// Assisted `E₂` of rank-two two-qubit states equals `2·min λ_min`.
    Eq37,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Thm1,
        Suite::Thm2,
        Suite::Prop2,
        Suite::Corollary,
        Suite::AppendixB,
        Suite::Ckw,
        Suite::Eq37,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Prop2 => "prop2",
            Suite::Corollary => "corollary",
            Suite::AppendixB => "appendixB",
            Suite::Ckw => "ckw",
            Suite::Eq37 => "eq37",
        }
    }

    /// Tolerance used when the caller does not set one.
    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Thm1 => 1e-7,
            Suite::Thm2 => 1e-8,
            Suite::Prop2 => 1e-10,
            Suite::Corollary => 1e-6,
            Suite::AppendixB => 1e-10,
            Suite::Ckw => 1e-9,
            Suite::Eq37 => 1e-7,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::input(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Numeric POVM search budget. `thm1` runs the numeric upper-bound
    /// check only when this is set; `thm2` falls back to the default.
    pub numeric: Option<NumericBudget>,
    /// Local-unitary starts for the `corollary` suite's symmetric states.
    pub lu_starts: usize,
}

impl SuiteConfig {
    pub fn new(suite: Suite, trials: usize, seed: u64) -> Self {
        SuiteConfig {
            trials,
            seed,
            tol: suite.default_tol(),
            numeric: None,
            lu_starts: LuSearch::default().starts,
        }
    }
}

/// One trial. `value`/`reference` are the compared quantities; `gap` is the
/// figure checked against the tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub pass: bool,
    pub value: f64,
    pub reference: f64,
    pub gap: f64,
    pub note: String,
    #[serde(skip)]
    pub artifact: Option<Value>,
}

impl TrialRow {
    pub const CSV_HEADER: &'static str = "trial,seed,pass,value,reference,gap,note";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.trial,
            self.seed,
            self.pass,
            self.value,
            self.reference,
            self.gap,
            self.note.replace(',', ";")
        )
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub passed: usize,
    pub failed: usize,
    pub max_gap: f64,
    /// Replay artifact of the first failing trial.
    pub counterexample: Option<Value>,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Outcome {
    pass: bool,
    value: f64,
    reference: f64,
    gap: f64,
    note: String,
    artifact: Value,
}

/// Runs `suite` for `cfg.trials` trials in parallel.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::input("tol must be positive"));
    }
    let rows: Vec<TrialRow> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i as u64);
            let o = run_trial(suite, cfg, seed);
            TrialRow {
                trial: i,
                seed,
                pass: o.pass,
                value: o.value,
                reference: o.reference,
                gap: o.gap,
                note: o.note,
                artifact: (!o.pass).then_some(o.artifact),
            }
        })
        .collect();
    let failed = rows.iter().filter(|r| !r.pass).count();
    let max_gap = rows.iter().map(|r| r.gap).filter(|g| g.is_finite()).fold(0.0, f64::max);
    let counterexample = rows.iter().find(|r| !r.pass).map(|r| {
        json!({
            "trial": r.trial,
            "seed": r.seed,
            "gap": r.gap,
            "note": r.note,
            "instance": r.artifact,
        })
    });
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        tol: cfg.tol,
        passed: cfg.trials - failed,
        failed,
        max_gap,
        counterexample,
        rows,
    })
}

fn state_artifact(psi: &PureState) -> Value {
    serde_json::to_value(StateJson::from(psi)).unwrap_or(Value::Null)
}

fn failed(err: Error, artifact: Value) -> Outcome {
    Outcome {
        pass: false,
        value: f64::NAN,
        reference: f64::NAN,
        gap: f64::INFINITY,
        note: err.to_string(),
        artifact,
    }
}

fn run_trial(suite: Suite, cfg: &SuiteConfig, seed: u64) -> Outcome {
    match suite {
        Suite::Thm1 => thm1_trial(cfg, seed),
        Suite::Thm2 => thm2_trial(cfg, seed),
        Suite::Prop2 => prop2_trial(seed),
        Suite::Corollary => corollary_trial(cfg, seed),
        Suite::AppendixB => appendix_b_trial(cfg, seed),
        Suite::Ckw => ckw_trial(cfg, seed),
        Suite::Eq37 => eq37_trial(cfg, seed),
    }
}

fn haar(seed: u64) -> PureState {
    haar_state(&[2, 2, 2], &mut seeded_rng(seed)).expect("three-qubit dims are valid")
}

fn thm1_trial(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let psi = haar(seed);
    let budget = cfg.numeric.map(|b| NumericBudget { seed, ..b });
    match verify_theorem1(&psi, cfg.tol, budget.as_ref()) {
        Ok(c) => Outcome {
            pass: true,
            value: c.constructive,
            reference: c.cut_a.min(c.cut_b),
            gap: c.gap,
            note: format!("{:?}", c.case),
            artifact: Value::Null,
        },
        Err(e) => {
            let gap = match &e {
                Error::Verification { gap, .. } => *gap,
                _ => f64::INFINITY,
            };
            Outcome {
                gap,
                ..failed(e, state_artifact(&psi))
            }
        }
    }
}

/// Numeric entropy reach required of lossless states.
const LOSSLESS_REACH: f64 = 1e-4;
/// Haar states with an entropy min-cut above this must show a positive gap.
const GAP_THRESHOLD: f64 = 0.1;

/// Parameters of the lossless state drawn for a `thm2` trial.
pub fn thm2_family_spec(seed: u64) -> FamilySpec {
    let mut rng = seeded_rng(seed ^ 0x7468_6d32);
    let lambda_min = 0.05 + 0.4 * rng.random::<f64>();
    let w = 0.1 + 0.8 * rng.random::<f64>();
    FamilySpec::Thm2 {
        lambda_min,
        weights: vec![w, 1.0 - w],
        phases: None,
        v: None,
        seed,
    }
}

fn thm2_trial(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let budget = NumericBudget {
        seed,
        ..cfg.numeric.unwrap_or_default()
    };
    let entropy = MonotoneSpec::ENTROPY;
    let spec = thm2_family_spec(seed);
    let family = match generate(&spec) {
        Ok(p) => p,
        Err(e) => return failed(e, serde_json::to_value(&spec).unwrap_or(Value::Null)),
    };
    let haar_psi = haar(seed);
    let run = || -> Result<Outcome> {
        let verdict = lossless_classifier(&family, Cut::A, cfg.tol)?;
        let cut = cut_entanglement(&family, Cut::A, entropy)?;
        let reach = eoa_numeric(&family, entropy, &budget)?.value;
        let family_ok = verdict.is_lossless() && reach >= cut - LOSSLESS_REACH;

        let ea = cut_entanglement(&haar_psi, Cut::A, MonotoneSpec::E2)?;
        let eb = cut_entanglement(&haar_psi, Cut::B, MonotoneSpec::E2)?;
        let small = if ea <= eb { Cut::A } else { Cut::B };
        let haar_verdict = lossless_classifier(&haar_psi, small, cfg.tol)?;
        let min_cut = cut_entanglement(&haar_psi, Cut::A, entropy)?.min(cut_entanglement(&haar_psi, Cut::B, entropy)?);
        let haar_value = eoa_numeric(&haar_psi, entropy, &budget)?.value;
        let haar_gap = min_cut - haar_value;
        let lossy = matches!(haar_verdict, LosslessVerdict::Lossy { .. });
        let haar_ok = lossy && (min_cut <= GAP_THRESHOLD || haar_gap > 0.0);
        Ok(Outcome {
            pass: family_ok && haar_ok,
            value: reach,
            reference: cut,
            gap: (cut - reach).max(0.0),
            note: format!("family {}; haar {} gap {haar_gap:.3e}", verdict.label(), haar_verdict.label()),
            artifact: json!({
                "family": spec,
                "familyState": state_artifact(&family),
                "haarState": state_artifact(&haar_psi),
                "familyOk": family_ok,
                "haarOk": haar_ok,
            }),
        })
    };
    run().unwrap_or_else(|e| failed(e, json!({ "family": spec, "haarSeed": seed })))
}

/// A random `(H, {p_x, U_x})` instance; even seeds build unitaries diagonal
/// in the eigenbasis of `H`, odd seeds draw them from the Haar measure.
pub fn prop2_instance(seed: u64) -> (CMat, Vec<(f64, CMat)>) {
    let mut rng = seeded_rng(seed);
    let v = haar_unitary(2, &mut rng);
    let a = rng.random::<f64>();
    let b = a + 0.05 + rng.random::<f64>();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::from(a), C64::from(b)]));
    let h = &v * d * v.adjoint();
    let k = 2 + (rng.random::<u32>() % 3) as usize;
    let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let commuting = seed.is_multiple_of(2);
    let mut mixture = Vec::with_capacity(k);
    for (x, w) in raw.iter().enumerate() {
        let u = if x == 0 {
            CMat::identity(2, 2)
        } else if commuting {
            let ph = nalgebra::DVector::from_vec(vec![
                C64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>()),
                C64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>()),
            ]);
            &v * CMat::from_diagonal(&ph) * v.adjoint()
        } else {
            haar_unitary(2, &mut rng)
        };
        mixture.push((w / total, u));
    }
    (h, mixture)
}

fn prop2_trial(seed: u64) -> Outcome {
    let (h, mixture) = prop2_instance(seed);
    let artifact = json!({
        "h": matrix_to_json(&h),
        "mixture": mixture.iter().map(|(p, u)| json!({"weight": p, "unitary": matrix_to_json(u)})).collect::<Vec<_>>(),
    });
    match unital_fixed_point_check(&h, &mixture) {
        Ok(c) => Outcome {
            pass: c.preserved == c.commutes && (!c.preserved || c.shares_eigenvector),
            value: f64::from(u8::from(c.preserved)),
            reference: f64::from(u8::from(c.commutes)),
            gap: f64::from(u8::from(c.preserved != c.commutes)),
            note: format!(
                "preserved {} commutes {} shared {}",
                c.preserved, c.commutes, c.shares_eigenvector
            ),
            artifact,
        },
        Err(e) => failed(e, artifact),
    }
}

/// Normal-form symmetric state drawn for a `corollary` trial.
pub fn corollary_family_spec(seed: u64) -> FamilySpec {
    let mut rng = seeded_rng(seed ^ 0x636f_726f);
    let p = 0.05 + 0.9 * rng.random::<f64>();
    let r = 0.95 * rng.random::<f64>().sqrt();
    let phase = std::f64::consts::TAU * rng.random::<f64>();
    FamilySpec::Eq21 {
        p,
        overlap: [r * phase.cos(), r * phase.sin()],
    }
}

fn corollary_trial(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let spec = corollary_family_spec(seed);
    let haar_psi = haar(seed);
    let run = || -> Result<Outcome> {
        let family = generate(&spec)?;
        let sym = corollary_check_with(&family, cfg.tol, &LuSearch { starts: cfg.lu_starts, seed })?;
        // Only (i) and (iii) are compared on Haar states; a short search suffices.
        let gen = corollary_check_with(&haar_psi, cfg.tol, &LuSearch { starts: 2, seed })?;
        let family_ok = sym.i && sym.ii && sym.iii;
        let haar_ok = gen.i == gen.iii;
        Ok(Outcome {
            pass: family_ok && haar_ok,
            value: sym.cut_gap.max(sym.concurrence_gap).max(sym.lu_infidelity),
            reference: 0.0,
            gap: sym.cut_gap.max(sym.concurrence_gap).max(sym.lu_infidelity),
            note: format!(
                "family i={} ii={} iii={}; haar i={} iii={}",
                sym.i, sym.ii, sym.iii, gen.i, gen.iii
            ),
            artifact: json!({
                "family": spec,
                "haarState": state_artifact(&haar_psi),
                "familyOk": family_ok,
                "haarOk": haar_ok,
            }),
        })
    };
    run().unwrap_or_else(|e| failed(e, json!({ "family": spec, "haarState": state_artifact(&haar_psi) })))
}

/// A random two-qubit state of rank 2–4 (cycling with the seed) whose
/// marginals are both mixed.
pub fn mixed_marginal_density(seed: u64) -> DensityMatrix {
    let mut rng = seeded_rng(seed);
    let rank = 2 + (seed % 3) as usize;
    loop {
        let rho = random_density(4, rank, &mut rng);
        let la = rho.partial_trace(&[2, 2], &[0]).map(|r| r.lambda_min()).unwrap_or(0.0);
        let lb = rho.partial_trace(&[2, 2], &[1]).map(|r| r.lambda_min()).unwrap_or(0.0);
        if la > 1e-6 && lb > 1e-6 {
            return rho;
        }
    }
}

fn appendix_b_trial(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let rho = mixed_marginal_density(seed);
    let artifact = json!({ "rho": density_to_json(&rho) });
    let run = || -> Result<Outcome> {
        let elim = entangled_decomposition(&rho)?;
        let min_c = elim.ensemble.min_concurrence()?;
        let err = elim.ensemble.reconstruction_error();
        let s0 = s0_assistance(&rho)?;
        let decreasing = elim.product_counts.windows(2).all(|w| w[1] < w[0]);
        Ok(Outcome {
            pass: min_c > 0.0 && err <= cfg.tol && s0 == 1.0 && decreasing,
            value: min_c,
            reference: 0.0,
            gap: err,
            note: format!("elements {} products {:?} s0 {s0}", elim.ensemble.len(), elim.product_counts),
            artifact: artifact.clone(),
        })
    };
    run().unwrap_or_else(|e| failed(e, artifact.clone()))
}

/// `|C²(ρ^AC) − C²(ρ^BC) − (C²_{A|BC} − C²_{B|AC})|` must stay below this.
const DIFFERENCE_IDENTITY: f64 = 1e-8;

fn ckw_trial(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let psi = haar(seed);
    match three_tangle_forms(&psi) {
        Ok((ta, tb)) => {
            // The two tangle forms differ exactly by the identity's residual.
            let identity = (ta - tb).abs();
            Outcome {
                pass: ta >= -cfg.tol && identity <= DIFFERENCE_IDENTITY,
                value: ta,
                reference: tb,
                gap: (-ta).max(0.0),
                note: format!("identity residual {identity:.3e}"),
                artifact: state_artifact(&psi),
            }
        }
        Err(e) => failed(e, state_artifact(&psi)),
    }
}

fn eq37_trial(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let rho = random_density(4, 2, &mut seeded_rng(seed));
    let artifact = json!({ "rho": density_to_json(&rho) });
    match eoa_density(&rho) {
        Ok(r) => {
            let gap = (r.value - r.formula).abs();
            Outcome {
                pass: gap <= cfg.tol,
                value: r.value,
                reference: r.formula,
                gap,
                note: String::new(),
                artifact,
            }
        }
        Err(e) => failed(e, artifact),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_runs_pass() {
        for suite in [Suite::Thm1, Suite::Prop2, Suite::AppendixB, Suite::Ckw, Suite::Eq37] {
            let r = run_suite(suite, &SuiteConfig::new(suite, 20, 5)).unwrap();
            assert!(r.all_passed(), "{suite}: {:?}", r.counterexample);
        }
    }

    #[test]
    fn impossible_tolerance_fails_with_artifact() {
        let cfg = SuiteConfig {
            tol: 1e-30,
            ..SuiteConfig::new(Suite::Thm1, 3, 0)
        };
        let r = run_suite(Suite::Thm1, &cfg).unwrap();
        assert!(!r.all_passed());
        assert!(r.counterexample.unwrap()["instance"]["amplitudes"].is_array());
    }

    #[test]
    fn seeds_are_per_trial() {
        let a = run_suite(Suite::Ckw, &SuiteConfig::new(Suite::Ckw, 6, 10)).unwrap();
        let b = run_suite(Suite::Ckw, &SuiteConfig::new(Suite::Ckw, 3, 13)).unwrap();
        assert_eq!(a.rows[3].value, b.rows[0].value);
    }
}
