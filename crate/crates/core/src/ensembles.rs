//! Pure-state ensembles of two-qubit density matrices.
//!
//! Three constructions: the ensemble induced by a measurement on the
//! canonical purification, Wootters' decomposition into states of equal
//! concurrence, and a decomposition whose every element is entangled
//! (available whenever both marginals are mixed).

use serde::Serialize;

use crate::assistance::{post_measurement_branches, Measurement};
use crate::monotones::{concurrence_pure, wootters_concurrence};
use crate::qcore::io::{matrix_to_json, MatrixJson, StateJson};
use crate::qcore::{eig_hermitian, frobenius, psd_inv_sqrt, CMat, CVec, DensityMatrix, PureState, C64};
use crate::tolerance;
use crate::{Error, Result};

const TWO_QUBITS: [usize; 2] = [2, 2];

/// Weighted pure states `{p_k, |φ_k⟩}` realising a target density matrix.
#[derive(Clone, Debug)]
pub struct Ensemble {
    target: DensityMatrix,
    elements: Vec<(f64, PureState)>,
}

impl Ensemble {
    /// Prunes weights below [`tolerance::ENSEMBLE_WEIGHT`], then checks the
    /// weight sum and the reconstruction of `target`.
    pub fn new(target: DensityMatrix, elements: Vec<(f64, PureState)>) -> Result<Self> {
        let elements: Vec<(f64, PureState)> = elements
            .into_iter()
            .filter(|(w, _)| *w >= tolerance::ENSEMBLE_WEIGHT)
            .collect();
        if elements.is_empty() {
            return Err(Error::input("ensemble has no element of positive weight"));
        }
        let total: f64 = elements.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical {
                routine: "ensemble weights",
                residual: (total - 1.0).abs(),
            });
        }
        let ens = Ensemble { target, elements };
        let err = ens.reconstruction_error();
        if err > tolerance::RECONSTRUCTION {
            return Err(Error::Numerical {
                routine: "ensemble reconstruction",
                residual: err,
            });
        }
        Ok(ens)
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn elements(&self) -> &[(f64, PureState)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn mixture(&self) -> CMat {
        let n = self.target.dim();
        let mut out = CMat::zeros(n, n);
        for (w, phi) in &self.elements {
            let v = phi.amplitudes();
            out += (v * v.adjoint()) * C64::from(*w);
        }
        out
    }

    /// Frobenius distance between the mixture and the target.
    pub fn reconstruction_error(&self) -> f64 {
        frobenius(&(self.mixture() - self.target.matrix()))
    }

    pub fn concurrences(&self) -> Result<Vec<f64>> {
        self.elements.iter().map(|(_, phi)| concurrence_pure(phi)).collect()
    }

    pub fn min_concurrence(&self) -> Result<f64> {
        Ok(self.concurrences()?.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn to_json(&self) -> EnsembleJson {
        EnsembleJson {
            target: matrix_to_json(self.target.matrix()),
            elements: self
                .elements
                .iter()
                .map(|(w, phi)| ElementJson {
                    weight: *w,
                    state: StateJson::from(phi),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleJson {
    pub target: MatrixJson,
    pub elements: Vec<ElementJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementJson {
    pub weight: f64,
    pub state: StateJson,
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// Normalises `v` into a two-qubit state and returns it with its squared norm.
fn split_weight(v: &CVec) -> Result<(f64, PureState)> {
    let w = v.norm_squared();
    Ok((w, PureState::normalized(TWO_QUBITS.to_vec(), v.clone())?))
}

/// Concurrence `2|ad − bc| / ‖v‖²` of an unnormalised two-qubit vector.
fn concurrence_of(v: &CVec) -> f64 {
    let n = v.norm_squared();
    if n <= 0.0 {
        return 0.0;
    }
    2.0 * (v[0] * v[3] - v[1] * v[2]).norm() / n
}

/// Subnormalised eigenvectors `√λ_k |e_k⟩` for the eigenvalues above `tol`.
fn weighted_eigenvectors(rho: &DensityMatrix, tol: f64) -> Result<Vec<CVec>> {
    let eig = eig_hermitian(rho.matrix())?;
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > tol)
        .map(|(k, &lam)| eig.vector(k) * C64::from(lam.sqrt()))
        .collect())
}

/// Ensemble induced on AB by measuring the purifier of
/// `Σ_k √λ_k |e_k⟩|k⟩` with `meas`.
///
/// The purifier dimension is the measurement's input dimension (at most 4)
/// and must be at least the rank of `rho`.
pub fn hjw_ensemble(rho: &DensityMatrix, meas: &Measurement) -> Result<Ensemble> {
    require_two_qubits(rho)?;
    let k = meas.elements()[0].ncols();
    if meas.subsystem() != 2 {
        return Err(Error::input("the measurement must act on the purifier (subsystem 2)"));
    }
    let vecs = weighted_eigenvectors(rho, tolerance::ENSEMBLE_WEIGHT)?;
    if vecs.len() > k {
        return Err(Error::input(format!(
            "purifier dimension {k} is smaller than rank {}",
            vecs.len()
        )));
    }
    let mut amps = CVec::zeros(4 * k);
    for (j, v) in vecs.iter().enumerate() {
        for i in 0..4 {
            amps[i * k + j] = v[i];
        }
    }
    let psi = PureState::normalized(vec![2, 2, k], amps)?;
    let branches = post_measurement_branches(&psi, meas)?;
    let elements = branches.into_iter().map(|b| (b.probability, b.state)).collect();
    Ensemble::new(rho.clone(), elements)
}

/// `σ_y ⊗ σ_y` applied to the conjugate of `v`.
fn spin_flip(v: &CVec) -> CVec {
    CVec::from_vec(vec![-v[3].conj(), v[2].conj(), v[1].conj(), -v[0].conj()])
}

/// Takagi factorisation `τ = U Σ Uᵀ` of a complex symmetric matrix, through
/// the real symmetric embedding `[[A, B], [B, −A]]` of `τ = A + iB`.
/// Singular values are returned in non-increasing order.
fn takagi(tau: &CMat) -> Result<(Vec<f64>, CMat)> {
    let r = tau.nrows();
    let mut emb = CMat::zeros(2 * r, 2 * r);
    for i in 0..r {
        for j in 0..r {
            let z = 0.5 * (tau[(i, j)] + tau[(j, i)]);
            emb[(i, j)] = C64::from(z.re);
            emb[(i, r + j)] = C64::from(z.im);
            emb[(r + i, j)] = C64::from(z.im);
            emb[(r + i, r + j)] = C64::from(-z.re);
        }
    }
    let eig = eig_hermitian(&emb)?;
    let scale = eig.values.first().copied().unwrap_or(0.0).abs().max(1e-300);
    let positive = eig.values.iter().take(r).filter(|&&s| s > 1e-12 * scale).count();
    let mut u = CMat::zeros(r, r);
    let mut sigma = Vec::with_capacity(r);
    for k in 0..positive {
        let col = eig.vector(k);
        let w = CVec::from_fn(r, |i, _| C64::new(col[i].re, col[r + i].re));
        let n = w.norm();
        u.set_column(k, &(w / C64::from(n)));
        sigma.push(eig.values[k]);
    }
    if positive < r {
        // Null directions: conjugates of the right null vectors of τ.
        let svd = tau.clone().svd(false, true);
        let vt = svd.v_t.expect("requested v_t");
        let mut idx: Vec<usize> = (0..r).collect();
        idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for (slot, &j) in idx.iter().take(r - positive).enumerate() {
            // Row j of Vᵀ is v_j†, so its entries are already conjugated.
            let w = CVec::from_fn(r, |i, _| vt[(j, i)]);
            u.set_column(positive + slot, &w);
            sigma.push(0.0);
        }
    }
    // Remove the residual non-unitarity left by the tolerance split.
    let gram = u.adjoint() * &u;
    let u = &u * psd_inv_sqrt(&gram)?;
    Ok((sigma, u))
}

/// Zeroes the diagonal of a traceless real symmetric matrix `k` by plane
/// rotations; returns the accumulated orthogonal matrix `O` with
/// `diag(O K Oᵀ) = 0`.
fn zero_diagonal(k: &mut [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut o = [[0.0; 4]; 4];
    for (i, row) in o.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = k.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    for _ in 0..8 {
        let Some(i) = (0..4)
            .filter(|&i| k[i][i].abs() > 1e-15 * scale)
            .max_by(|&a, &b| k[a][a].abs().total_cmp(&k[b][b].abs()))
        else {
            break;
        };
        let sign = k[i][i].signum();
        let Some(j) = (0..4)
            .filter(|&j| k[j][j] * sign < 0.0)
            .max_by(|&a, &b| k[a][a].abs().total_cmp(&k[b][b].abs()))
        else {
            break;
        };
        let (a, b, d) = (k[i][i], k[i][j], k[j][j]);
        // a + 2bt + dt² = 0 has real roots since ad < 0; take the small one.
        let disc = (b * b - a * d).sqrt();
        let t = -a / (b + if b >= 0.0 { disc } else { -disc });
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        rotate(k, &mut o, i, j, c, s);
        k[i][i] = 0.0;
    }
    o
}

fn rotate(k: &mut [[f64; 4]; 4], o: &mut [[f64; 4]; 4], i: usize, j: usize, c: f64, s: f64) {
    for col in 0..4 {
        let (ki, kj) = (k[i][col], k[j][col]);
        k[i][col] = c * ki + s * kj;
        k[j][col] = -s * ki + c * kj;
        let (oi, oj) = (o[i][col], o[j][col]);
        o[i][col] = c * oi + s * oj;
        o[j][col] = -s * oi + c * oj;
    }
    for row in k.iter_mut() {
        let (ki, kj) = (row[i], row[j]);
        row[i] = c * ki + s * kj;
        row[j] = -s * ki + c * kj;
    }
}

/// Unit phasors `u_k` with `Σ λ_k u_k = 0`, for `λ₀ ≥ λ₁ ≥ λ₂ ≥ λ₃ ≥ 0` and
/// `λ₀ ≤ λ₁ + λ₂ + λ₃`. The first phasor is 1.
fn close_polygon(lam: [f64; 4]) -> [C64; 4] {
    // Combine the last two sides into one of length L that closes a triangle
    // with the first two.
    let l = (lam[0] - lam[1]).clamp(lam[2] - lam[3], lam[2] + lam[3]);
    let (u1, w) = close_triangle(C64::from(lam[0]), lam[1], l);
    // λ₂u₂ + λ₃u₃ = L·w, i.e. λ₂u₂ + λ₃u₃ + (−L w) = 0.
    let (u2, u3) = close_triangle(-w * l, lam[2], lam[3]);
    [C64::from(1.0), u1, u2, u3]
}

/// Given a fixed side vector `p`, returns unit phasors `(u, v)` with
/// `p + q u + r v = 0` (as closely as the lengths allow).
fn close_triangle(p: C64, q: f64, r: f64) -> (C64, C64) {
    let pl = p.norm();
    let base = if pl > 0.0 { p / pl } else { C64::from(1.0) };
    let cos = if pl * q > 0.0 {
        ((r * r - pl * pl - q * q) / (2.0 * pl * q)).clamp(-1.0, 1.0)
    } else {
        -1.0
    };
    let u = base * C64::from_polar(1.0, cos.acos());
    let rest = -(p + u * q);
    let v = if r > 0.0 && rest.norm() > 0.0 {
        rest / rest.norm()
    } else {
        -base
    };
    (u, v)
}

/// Decomposition of a two-qubit state into at most four pure states whose
/// concurrences all equal the Wootters concurrence.
///
/// Deterministic choices: the Takagi vectors of `⟨v_i|ṽ_j⟩` are
/// phase-fixed by the eigensolver; in the entangled case the subdominant
/// vectors get the phase `i`; in the separable case the polygon of phases
/// starts with phase 1 on the dominant vector and the Hadamard sign pattern
/// mixes the four vectors.
pub fn equal_concurrence_decomposition(rho: &DensityMatrix) -> Result<Ensemble> {
    require_two_qubits(rho)?;
    let target_c = wootters_concurrence(rho)?;
    let v = weighted_eigenvectors(rho, tolerance::ENSEMBLE_WEIGHT)?;
    let r = v.len();
    let tau = CMat::from_fn(r, r, |i, j| v[i].dotc(&spin_flip(&v[j])));
    let (sigma, u) = takagi(&tau)?;
    // x_a = Σ_j U_ja v_j satisfies ⟨x_a|x̃_b⟩ = σ_a δ_ab.
    let mut x: Vec<CVec> = (0..4)
        .map(|a| {
            let mut out = CVec::zeros(4);
            if a < r {
                for (j, vj) in v.iter().enumerate() {
                    out += vj * u[(j, a)];
                }
            }
            out
        })
        .collect();
    let mut lam = [0.0; 4];
    for (a, s) in sigma.iter().enumerate() {
        lam[a] = *s;
    }
    let c = lam[0] - lam[1] - lam[2] - lam[3];
    let z: Vec<CVec> = if c > 0.0 {
        for xa in x.iter_mut().skip(1) {
            *xa *= C64::new(0.0, 1.0);
        }
        let d = [lam[0], -lam[1], -lam[2], -lam[3]];
        let mut k = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                k[i][j] = -c * x[i].dotc(&x[j]).re;
            }
            k[i][i] += d[i];
        }
        let o = zero_diagonal(&mut k);
        (0..4)
            .map(|a| {
                let mut out = CVec::zeros(4);
                for (j, xj) in x.iter().enumerate() {
                    out += xj * C64::from(o[a][j]);
                }
                out
            })
            .collect()
    } else {
        let phasors = close_polygon(lam);
        // ⟨y|ỹ⟩ picks up e^{-2iθ}, so θ_k = −arg(u_k)/2.
        let y: Vec<CVec> = x
            .iter()
            .zip(phasors.iter())
            .map(|(xk, uk)| xk * C64::from_polar(1.0, -0.5 * uk.arg()))
            .collect();
        const SIGNS: [[f64; 4]; 4] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        SIGNS
            .iter()
            .map(|row| {
                let mut out = CVec::zeros(4);
                for (yk, s) in y.iter().zip(row) {
                    out += yk * C64::from(0.5 * s);
                }
                out
            })
            .collect()
    };
    let mut elements = Vec::with_capacity(4);
    for za in &z {
        if za.norm_squared() < tolerance::ENSEMBLE_WEIGHT {
            continue;
        }
        elements.push(split_weight(za)?);
    }
    let ens = Ensemble::new(rho.clone(), renormalised(elements))?;
    let spread = ens
        .concurrences()?
        .iter()
        .map(|ci| (ci - target_c).abs())
        .fold(0.0, f64::max);
    if spread > 1e-8 {
        return Err(Error::Numerical {
            routine: "equal_concurrence_decomposition",
            residual: spread,
        });
    }
    Ok(ens)
}

/// Rescales weights so they sum to one exactly, absorbing the round-off
/// left by pruning.
fn renormalised(mut elements: Vec<(f64, PureState)>) -> Vec<(f64, PureState)> {
    let total: f64 = elements.iter().map(|(w, _)| w).sum();
    if total > 0.0 && (total - 1.0).abs() < 1e-12 {
        for (w, _) in elements.iter_mut() {
            *w /= total;
        }
    }
    elements
}

/// Output of [`eliminate_product_states`].
#[derive(Clone, Debug)]
pub struct Elimination {
    pub ensemble: Ensemble,
    /// Number of product elements before each pass and after the last one.
    pub product_counts: Vec<usize>,
}

const MIX_SAMPLES: usize = 64;

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: usize, b: usize) -> f64 {
    let mut inv = 1.0 / b as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= b as f64;
    }
    out
}

/// Mixing angles `(θ, φ)`: the balanced rotation first, then a Halton
/// sequence over `(0, π/2) × [0, 2π)`.
fn mixing_angles(sample: usize) -> (f64, f64) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
    if sample == 0 {
        return (FRAC_PI_4, 0.0);
    }
    let t = radical_inverse(sample, 2);
    let p = radical_inverse(sample, 3);
    (FRAC_PI_2 * (0.02 + 0.96 * t), TAU * p)
}

fn is_product(v: &CVec) -> bool {
    concurrence_of(v) <= tolerance::ENTANGLED
}

/// Repeatedly mixes a product element with a partner through
/// `[[cos θ, e^{iφ} sin θ], [−e^{−iφ} sin θ, cos θ]]` until every element
/// is entangled. Each pass removes at least one product element.
pub fn eliminate_product_states(ens: &Ensemble) -> Result<Elimination> {
    if ens.target().dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: ens.target().dim(),
        });
    }
    let mut vecs: Vec<CVec> = ens
        .elements()
        .iter()
        .map(|(w, phi)| phi.amplitudes() * C64::from(w.sqrt()))
        .collect();
    let count = |vs: &[CVec]| vs.iter().filter(|v| is_product(v)).count();
    let mut counts = vec![count(&vecs)];
    while *counts.last().expect("non-empty") > 0 {
        let i = vecs.iter().position(is_product).expect("a product element");
        let mut partners: Vec<usize> = (0..vecs.len()).filter(|&j| j != i).collect();
        // Entangled partners first, keeping index order within each group.
        partners.sort_by_key(|&j| is_product(&vecs[j]));
        let mut done = false;
        'partners: for j in partners {
            for sample in 0..MIX_SAMPLES {
                let (theta, phi) = mixing_angles(sample);
                let (c, s) = (theta.cos(), theta.sin());
                let e = C64::from_polar(1.0, phi);
                let a = &vecs[i] * C64::from(c) + &vecs[j] * (e * s);
                let b = &vecs[i] * (-e.conj() * s) + &vecs[j] * C64::from(c);
                if !is_product(&a) && !is_product(&b) {
                    vecs[i] = a;
                    vecs[j] = b;
                    done = true;
                    break 'partners;
                }
            }
        }
        if !done {
            return Err(Error::Numerical {
                routine: "eliminate_product_states",
                residual: *counts.last().expect("non-empty") as f64,
            });
        }
        let now = count(&vecs);
        let before = *counts.last().expect("non-empty");
        if now >= before {
            return Err(Error::Numerical {
                routine: "eliminate_product_states",
                residual: now as f64,
            });
        }
        counts.push(now);
    }
    let elements = vecs.iter().map(split_weight).collect::<Result<Vec<_>>>()?;
    Ok(Elimination {
        ensemble: Ensemble::new(ens.target().clone(), renormalised(elements))?,
        product_counts: counts,
    })
}

fn marginal_lambda_mins(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let a = rho.partial_trace(&TWO_QUBITS, &[0])?.lambda_min();
    let b = rho.partial_trace(&TWO_QUBITS, &[1])?.lambda_min();
    Ok((a, b))
}

/// Decomposition of `rho` into entangled pure states only, starting from the
/// eigen-ensemble. Requires both marginals mixed.
pub fn entangled_decomposition(rho: &DensityMatrix) -> Result<Elimination> {
    require_two_qubits(rho)?;
    let (la, lb) = marginal_lambda_mins(rho)?;
    if la <= tolerance::MIXED_MARGINAL || lb <= tolerance::MIXED_MARGINAL {
        return Err(Error::input(format!(
            "a marginal is pure (λ_min A = {la:.3e}, B = {lb:.3e}); no entangled decomposition exists"
        )));
    }
    let start = hjw_ensemble(rho, &Measurement::computational(2, 4))?;
    eliminate_product_states(&start)
}

/// Assisted `S₀`: 1 when `rho` admits an all-entangled decomposition, 0 when
/// a marginal is pure.
pub fn s0_assistance(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let (la, lb) = marginal_lambda_mins(rho)?;
    if la.min(lb) <= tolerance::MIXED_MARGINAL {
        return Ok(0.0);
    }
    let elim = entangled_decomposition(rho)?;
    Ok(if elim.ensemble.min_concurrence()? > 0.0 { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{random_density, seeded_rng};
    use crate::states::named;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ghz_ab() -> DensityMatrix {
        named::ghz().reduced(&[0, 1]).unwrap()
    }

    fn ket(amps: &[f64]) -> PureState {
        PureState::from_real(&TWO_QUBITS, amps).unwrap()
    }

    #[test]
    fn hjw_computational_is_eigen_ensemble() {
        let ens = hjw_ensemble(&ghz_ab(), &Measurement::computational(2, 2)).unwrap();
        assert_eq!(ens.len(), 2);
        assert!((ens.elements()[0].0 - 0.5).abs() < 1e-12);
        assert!((ens.elements()[0].1.fidelity(&ket(&[1.0, 0.0, 0.0, 0.0])) - 1.0).abs() < 1e-12);
        assert!((ens.elements()[1].1.fidelity(&ket(&[0.0, 0.0, 0.0, 1.0])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hjw_x_basis_gives_bell_pair() {
        let ens = hjw_ensemble(&ghz_ab(), &Measurement::x_basis(2)).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((ens.elements()[0].1.fidelity(&ket(&[s, 0.0, 0.0, s])) - 1.0).abs() < 1e-12);
        assert!((ens.elements()[1].1.fidelity(&ket(&[s, 0.0, 0.0, -s])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hjw_rejects_small_purifier() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            hjw_ensemble(&rho, &Measurement::computational(2, 2)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn equal_concurrence_examples() {
        let s = FRAC_1_SQRT_2;
        let bell = ket(&[s, 0.0, 0.0, s]).density();
        let ens = equal_concurrence_decomposition(&bell).unwrap();
        assert_eq!(ens.len(), 1);
        assert!((ens.concurrences().unwrap()[0] - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(4);
        let ens = equal_concurrence_decomposition(&mixed).unwrap();
        assert_eq!(ens.len(), 4);
        assert!(ens.concurrences().unwrap().iter().all(|c| c.abs() < 1e-8));

        let half = DensityMatrix::new((bell.matrix() + ket(&[1.0, 0.0, 0.0, 0.0]).density().matrix()) * C64::from(0.5)).unwrap();
        let ens = equal_concurrence_decomposition(&half).unwrap();
        assert!(ens.concurrences().unwrap().iter().all(|c| (c - 0.5).abs() < 1e-8));
    }

    #[test]
    fn equal_concurrence_random_ranks() {
        let mut rng = seeded_rng(3);
        for trial in 0..200 {
            let rank = 2 + trial % 3;
            let rho = random_density(4, rank, &mut rng);
            let ens = equal_concurrence_decomposition(&rho).unwrap();
            assert!(ens.len() <= 4);
            let cs = ens.concurrences().unwrap();
            let spread = cs.iter().fold(0.0f64, |m, c| m.max(*c)) - cs.iter().fold(1.0f64, |m, c| m.min(*c));
            assert!(spread <= 1e-8, "trial {trial}: spread {spread}");
        }
    }

    #[test]
    fn entangled_examples() {
        let diag = DensityMatrix::mixture(&[(0.5, &ket(&[1.0, 0.0, 0.0, 0.0])), (0.5, &ket(&[0.0, 0.0, 0.0, 1.0]))]).unwrap();
        let out = entangled_decomposition(&diag).unwrap();
        assert_eq!(out.ensemble.len(), 2);
        assert!(out.ensemble.concurrences().unwrap().iter().all(|c| (c - 1.0).abs() < 1e-12));
        assert_eq!(out.product_counts, vec![2, 0]);

        let s = FRAC_1_SQRT_2;
        let other = DensityMatrix::mixture(&[(0.5, &ket(&[1.0, 0.0, 0.0, 0.0])), (0.5, &ket(&[0.0, 0.0, s, s]))]).unwrap();
        let out = entangled_decomposition(&other).unwrap();
        assert_eq!(out.ensemble.len(), 2);
        assert!(out.ensemble.min_concurrence().unwrap() > 0.0);
        assert!(out.ensemble.reconstruction_error() <= 1e-10);
    }

    #[test]
    fn pure_marginal_is_rejected() {
        let rho = DensityMatrix::mixture(&[(0.5, &ket(&[1.0, 0.0, 0.0, 0.0])), (0.5, &ket(&[0.0, 1.0, 0.0, 0.0]))]).unwrap();
        assert!(matches!(entangled_decomposition(&rho), Err(Error::Input(_))));
        assert_eq!(s0_assistance(&rho).unwrap(), 0.0);
    }

    #[test]
    fn s0_examples() {
        assert_eq!(s0_assistance(&ket(&[1.0, 0.0, 0.0, 0.0]).density()).unwrap(), 0.0);
        let s = FRAC_1_SQRT_2;
        assert_eq!(s0_assistance(&ket(&[s, 0.0, 0.0, s]).density()).unwrap(), 1.0);
        assert_eq!(s0_assistance(&named::w().reduced(&[0, 1]).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn random_mixed_marginals_decompose() {
        let mut rng = seeded_rng(11);
        for _ in 0..100 {
            let rho = random_density(4, 4, &mut rng);
            let out = entangled_decomposition(&rho).unwrap();
            assert!(out.ensemble.min_concurrence().unwrap() > 0.0);
            assert!(out.product_counts.windows(2).all(|w| w[1] < w[0]));
        }
    }
}
