//! Direct maximisation of `Σ_x p_x E(φ_x)` over rank-one POVMs on Charlie.
//!
//! A POVM with `K` rank-one elements on `Cⁿ` is encoded by an unconstrained
//! complex `K × n` block `G`. The isometry `F = G (G†G)^{-1/2}` satisfies
//! `F†F = I`, so its rows `f_x` give a complete POVM `{f_x† f_x}`, and the
//! unnormalised branch for outcome `x` is `Σ_c F_{xc} |v_c⟩` with
//! `|v_c⟩ = (I ⊗ I ⊗ ⟨c|)|ψ⟩`.

use serde::Serialize;

use super::measurement::{average_post_measurement, Measurement, MAX_OUTCOMES};
use crate::monotones::{lambda_min_of_amplitudes, MonotoneSpec};
use crate::optimize::{pattern_search, PatternSearch};
use crate::qcore::{psd_inv_sqrt, seeded_rng, CMat, PureState, C64};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Search effort for [`eoa_numeric`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NumericBudget {
    pub starts: usize,
    pub evals_per_start: usize,
    /// Number of POVM elements, at most 4.
    pub outcomes: usize,
    pub seed: u64,
}

impl Default for NumericBudget {
    fn default() -> Self {
        NumericBudget {
            starts: 8,
            evals_per_start: 20_000,
            outcomes: MAX_OUTCOMES,
            seed: 0,
        }
    }
}

impl NumericBudget {
    /// Budget with `evals` total evaluations spread over the default number
    /// of starts.
    pub fn with_total(evals: usize, seed: u64) -> Self {
        let starts = NumericBudget::default().starts;
        NumericBudget {
            starts,
            evals_per_start: (evals / starts).max(1),
            seed,
            ..NumericBudget::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct NumericResult {
    /// Best average found; a lower bound on the entanglement of assistance.
    pub value: f64,
    pub measurement: Measurement,
    /// The best start stopped because its step size collapsed rather than
    /// because the budget ran out.
    pub converged: bool,
    pub evals: usize,
    pub outcomes: usize,
}

struct Problem {
    n: usize,
    k: usize,
    /// `v[c]` holds the four AB amplitudes for Charlie basis state `c`.
    v: Vec<[C64; 4]>,
    m: MonotoneSpec,
}

impl Problem {
    fn isometry(&self, x: &[f64]) -> Option<Vec<C64>> {
        let (n, k) = (self.n, self.k);
        let g: Vec<C64> = x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        let mut s = vec![C64::new(0.0, 0.0); n * n];
        for row in 0..k {
            for a in 0..n {
                let ga = g[row * n + a].conj();
                for b in 0..n {
                    s[a * n + b] += ga * g[row * n + b];
                }
            }
        }
        let inv = if n == 2 { inv_sqrt_2x2(&s)? } else { inv_sqrt_general(&s, n)? };
        let mut f = vec![C64::new(0.0, 0.0); k * n];
        for row in 0..k {
            for b in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..n {
                    acc += g[row * n + a] * inv[a * n + b];
                }
                f[row * n + b] = acc;
            }
        }
        Some(f)
    }

    /// Average of the monotone with the marginal discriminant `d` replaced
    /// by `√(d² + ε²p²)`. E₂ is `1 − Σ d_x`, which has a kink wherever a
    /// branch is maximally entangled; `ε > 0` rounds it off.
    fn value(&self, f: &[C64], eps: f64) -> f64 {
        let mut total = 0.0;
        for row in 0..self.k {
            let mut u = [C64::new(0.0, 0.0); 4];
            for c in 0..self.n {
                let w = f[row * self.n + c];
                for (ui, vi) in u.iter_mut().zip(&self.v[c]) {
                    *ui += w * vi;
                }
            }
            let p: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            if p > 0.0 {
                let lam = if eps > 0.0 {
                    smoothed_lambda_min(&u, p, eps)
                } else {
                    lambda_min_of_amplitudes(u[0], u[1], u[2], u[3])
                };
                total += p * self.m.f(lam);
            }
        }
        total
    }
}

fn smoothed_lambda_min(u: &[C64; 4], p: f64, eps: f64) -> f64 {
    let h00 = u[0].norm_sqr() + u[1].norm_sqr();
    let h11 = u[2].norm_sqr() + u[3].norm_sqr();
    let h01 = u[0] * u[2].conj() + u[1] * u[3].conj();
    let d2 = (h00 - h11).powi(2) + 4.0 * h01.norm_sqr();
    (0.5 * (1.0 - (d2 / (p * p) + eps * eps).sqrt())).max(0.0)
}

/// Smoothing levels of the continuation; the last stage is exact.
const SMOOTHING: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-6, 0.0];

fn inv_sqrt_2x2(s: &[C64]) -> Option<Vec<C64>> {
    let a = s[0].re;
    let d = s[3].re;
    let b = s[1];
    let det = a * d - b.norm_sqr();
    if !(det > 1e-300) {
        return None;
    }
    let root_det = det.sqrt();
    let t = (a + d + 2.0 * root_det).sqrt();
    // √S = (S + √det I)/t, inverted in closed form.
    let (m00, m01, m10, m11) = ((a + root_det) / t, b / t, b.conj() / t, (d + root_det) / t);
    let det_m = m00 * m11 - (m01 * m10).re;
    Some(vec![
        C64::from(m11 / det_m),
        -m01 / det_m,
        -m10 / det_m,
        C64::from(m00 / det_m),
    ])
}

fn inv_sqrt_general(s: &[C64], n: usize) -> Option<Vec<C64>> {
    let m = CMat::from_fn(n, n, |i, j| s[i * n + j]);
    let inv = psd_inv_sqrt(&m).ok()?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some((0..n * n).map(|idx| inv[(idx / n, idx % n)]).collect())
}

fn kraus_from_isometry(f: &[C64], n: usize, k: usize) -> Vec<CMat> {
    (0..k)
        .map(|row| {
            let r = CMat::from_fn(1, n, |_, c| f[row * n + c]);
            let norm = r.norm();
            if norm == 0.0 {
                CMat::zeros(n, n)
            } else {
                r.adjoint() * &r / C64::from(norm)
            }
        })
        .collect()
}

/// Best average of `m` over rank-one Charlie POVMs with `budget.outcomes`
/// elements, by seeded multi-start pattern search.
///
/// `psi` must have qubits A and B and a Charlie of dimension at most 4.
pub fn eoa_numeric(psi: &PureState, m: MonotoneSpec, budget: &NumericBudget) -> Result<NumericResult> {
    m.validate()?;
    let dims = psi.dims();
    if dims.len() != 3 || dims[0] != 2 || dims[1] != 2 || dims[2] > MAX_OUTCOMES {
        return Err(Error::input(format!(
            "numeric assistance needs dims [2, 2, n] with n ≤ {MAX_OUTCOMES}, got {dims:?}"
        )));
    }
    let k = budget.outcomes;
    if k == 0 || k > MAX_OUTCOMES || budget.starts == 0 {
        return Err(Error::input("numeric budget needs at least one start and 1 to 4 outcomes"));
    }
    let n = dims[2];
    let amps = psi.amplitudes();
    let v: Vec<[C64; 4]> = (0..n).map(|c| std::array::from_fn(|i| amps[i * n + c])).collect();
    let problem = Problem { n, k, v, m };
    let cfg = PatternSearch {
        initial_step: 0.5,
        min_step: 1e-9,
        max_evals: (budget.evals_per_start / SMOOTHING.len()).max(2),
    };
    let mut rng = seeded_rng(budget.seed);
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut evals = 0;
    for _ in 0..budget.starts {
        let x0: Vec<f64> = (0..2 * k * n).map(|_| rng.sample(StandardNormal)).collect();
        let mut x = x0;
        let mut res = None;
        for (stage_no, eps) in SMOOTHING.into_iter().enumerate() {
            let cfg = PatternSearch {
                initial_step: if stage_no == 0 { cfg.initial_step } else { 0.05 },
                ..cfg
            };
            let objective = |x: &[f64]| match problem.isometry(x) {
                Some(f) => -problem.value(&f, eps),
                None => f64::INFINITY,
            };
            let stage = pattern_search(objective, &x, &cfg, &mut rng);
            evals += stage.evals;
            x.clone_from(&stage.x);
            res = Some(stage);
        }
        let res = res.expect("at least one stage");
        if best.as_ref().is_none_or(|(v, _, _)| res.value < *v) {
            best = Some((res.value, res.x, res.converged));
        }
    }
    let (_, x, converged) = best.expect("at least one start");
    let f = problem.isometry(&x).ok_or(Error::Numerical {
        routine: "eoa_numeric",
        residual: f64::INFINITY,
    })?;
    let measurement = Measurement::new(2, kraus_from_isometry(&f, n, k))?;
    let value = average_post_measurement(psi, &measurement, m)?;
    Ok(NumericResult {
        value,
        measurement,
        converged,
        evals,
        outcomes: k,
    })
}
