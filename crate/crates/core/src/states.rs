//! Named states and parametric three-qubit families.
//!
//! Every generator is deterministic given its [`FamilySpec`] (including the
//! seed). [`verify_family_membership`] decides whether a state lies in a
//! family up to local unitaries and returns the witnessing parameters.

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assistance::geometry::{basis_from_direction, conditional_geometry, null_directions};
use crate::assistance::lossless_certificate_parameters;
use crate::monotones::Cut;
use crate::optimize::{pattern_search, PatternSearch};
use crate::qcore::io::{matrix_from_json, matrix_to_json, ComplexPair, MatrixJson, StateJson};
use crate::qcore::{haar_state, haar_unitary, is_unitary, kron, psd_inv_sqrt, seeded_rng, CMat, CVec, PureState, C64};
use crate::{Error, Result};

/// Named states.
pub mod named {
    use crate::qcore::PureState;

    fn three(amps: &[f64]) -> PureState {
        PureState::from_real(&[2, 2, 2], amps).expect("valid literal state")
    }

    /// `(|000⟩ + |111⟩)/√2`
    pub fn ghz() -> PureState {
        three(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    }

    /// `(|100⟩ + |010⟩ + |001⟩)/√3`
    pub fn w() -> PureState {
        three(&[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    }

    /// `|000⟩`
    pub fn product() -> PureState {
        three(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// `|Φ⁺⟩ ⊗ |0⟩`
    pub fn bell_times_c() -> PureState {
        three(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    }

    /// `|Φ⁺⟩` on two qubits.
    pub fn phi_plus() -> PureState {
        PureState::from_real(&[2, 2], &[1.0, 0.0, 0.0, 1.0]).expect("valid literal state")
    }
}

/// A named state or a parametric family with all of its parameters.
///
/// Serialised with a `"family"` tag, e.g.
/// `{"family": "eq21", "p": 0.8, "overlap": [0.3, 0.1]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "camelCase")]
pub enum FamilySpec {
    Haar {
        seed: u64,
    },
    Ghz,
    W,
    Product,
    BellTimesC,
    /// `√p|00⟩|η₀⟩ + √(1−p)|11⟩|η₁⟩` with `⟨η₀|η₁⟩ = overlap`.
    Eq21 {
        p: f64,
        overlap: ComplexPair,
    },
    /// `Σ_x √p_x (U_x ⊗ V_x)|λ_min⟩|x⟩` with
    /// `|λ_min⟩ = √λ_min|00⟩ + √(1−λ_min)|11⟩` and `U_x` diagonal.
    #[serde(rename_all = "camelCase")]
    Thm2 {
        lambda_min: f64,
        weights: Vec<f64>,
        /// Diagonal phases `(α, β)` of each `U_x = diag(e^{iα}, e^{iβ})`;
        /// sampled uniformly when absent.
        #[serde(default)]
        phases: Option<Vec<[f64; 2]>>,
        /// Unitaries `V_x`; Haar-sampled when absent.
        #[serde(default)]
        v: Option<Vec<MatrixJson>>,
        #[serde(default)]
        seed: u64,
    },
    /// `√p|Φ⁺⟩|0⟩ + √(1−p)|φ⟩|1⟩` with `SWAP|φ⟩ = (U ⊗ U*)|φ⟩`.
    CorollarySymmetric {
        p: f64,
        #[serde(default)]
        u: Option<MatrixJson>,
        #[serde(default)]
        phi: Option<StateJson>,
        #[serde(default)]
        seed: u64,
    },
}

/// Family selector for [`verify_family_membership`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FamilyKind {
    Haar,
    Ghz,
    W,
    Product,
    BellTimesC,
    Eq21,
    Thm2,
    CorollarySymmetric,
}

impl FamilySpec {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilySpec::Haar { .. } => FamilyKind::Haar,
            FamilySpec::Ghz => FamilyKind::Ghz,
            FamilySpec::W => FamilyKind::W,
            FamilySpec::Product => FamilyKind::Product,
            FamilySpec::BellTimesC => FamilyKind::BellTimesC,
            FamilySpec::Eq21 { .. } => FamilyKind::Eq21,
            FamilySpec::Thm2 { .. } => FamilyKind::Thm2,
            FamilySpec::CorollarySymmetric { .. } => FamilyKind::CorollarySymmetric,
        }
    }

    /// Resolves a CLI family name: `ghz`, `w`, `product`, `bellc`,
    /// `haar[:seed]`, or an inline JSON object.
    pub fn parse(text: &str) -> Result<FamilySpec> {
        let t = text.trim();
        if t.starts_with('{') {
            return Ok(serde_json::from_str(t)?);
        }
        let lower = t.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "ghz" => FamilySpec::Ghz,
            "w" => FamilySpec::W,
            "product" => FamilySpec::Product,
            "bellc" | "bell" | "belltimesc" => FamilySpec::BellTimesC,
            "haar" => FamilySpec::Haar { seed: 0 },
            other => match other.strip_prefix("haar:") {
                Some(s) => FamilySpec::Haar {
                    seed: s.parse().map_err(|_| Error::input(format!("bad Haar seed {s:?}")))?,
                },
                None => return Err(Error::input(format!("unknown family {t:?}"))),
            },
        })
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() || weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::input("family weights must be positive"));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::input(format!("family weights sum to {s}, not 1")));
    }
    Ok(())
}

fn ket(a: C64, b: C64) -> CVec {
    CVec::from_vec(vec![a, b])
}

/// Three-qubit state `Σ_k |ab_k⟩ ⊗ |c_k⟩` from two-qubit and one-qubit vectors.
fn assemble(terms: &[(CVec, CVec)]) -> Result<PureState> {
    let mut amps = CVec::zeros(8);
    for (ab, c) in terms {
        amps += ab.kronecker(c);
    }
    PureState::normalized(vec![2, 2, 2], amps)
}

/// Eq21 state without the open-interval check on `p`; `p ∈ [0, 1]`.
pub(crate) fn eq21_state(p: f64, overlap: C64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&p) || overlap.norm() > 1.0 + 1e-12 {
        return Err(Error::input(format!("Eq21 parameters out of range: p = {p}, |overlap| = {}", overlap.norm())));
    }
    let (eta0, eta1) = eta_pair(overlap);
    let zz = CVec::from_vec(vec![C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::from(0.0)]);
    let oo = CVec::from_vec(vec![C64::from(0.0), C64::from(0.0), C64::from(0.0), C64::from(1.0)]);
    assemble(&[(zz * C64::from(p.sqrt()), eta0), (oo * C64::from((1.0 - p).sqrt()), eta1)])
}

/// `η₀ = cosθ|0⟩ + sinθ|1⟩`, `η₁ = e^{iχ}(cosθ|0⟩ − sinθ|1⟩)` with
/// `cos 2θ = |overlap|` and `χ = arg overlap`.
pub(crate) fn eta_pair(overlap: C64) -> (CVec, CVec) {
    let m = overlap.norm().min(1.0);
    let theta = 0.5 * m.acos();
    let phase = if m > 0.0 { overlap / m } else { C64::from(1.0) };
    let (c, s) = (theta.cos(), theta.sin());
    (
        ket(C64::from(c), C64::from(s)),
        ket(phase * c, -phase * s),
    )
}

fn diag_phase(alpha: f64, beta: f64) -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![C64::from_polar(1.0, alpha), C64::from_polar(1.0, beta)]))
}

/// Orthogonal projector onto the +1 eigenspace of `(U ⊗ U*)† · SWAP`.
fn symmetric_projector(u: &CMat) -> Result<CMat> {
    let mut swap = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            swap[(2 * j + i, 2 * i + j)] = C64::from(1.0);
        }
    }
    let o = kron(u, &u.map(|z| z.conj())).adjoint() * swap;
    let shifted = o - CMat::identity(4, 4);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut proj = CMat::zeros(4, 4);
    for k in 0..4 {
        if svd.singular_values[k] <= 1e-10 {
            let row = v_t.row(k).adjoint();
            proj += &row * row.adjoint();
        }
    }
    Ok(proj)
}

/// Builds the state described by `spec`.
pub fn generate(spec: &FamilySpec) -> Result<PureState> {
    match spec {
        FamilySpec::Haar { seed } => haar_state(&[2, 2, 2], &mut seeded_rng(*seed)),
        FamilySpec::Ghz => Ok(named::ghz()),
        FamilySpec::W => Ok(named::w()),
        FamilySpec::Product => Ok(named::product()),
        FamilySpec::BellTimesC => Ok(named::bell_times_c()),
        FamilySpec::Eq21 { p, overlap } => {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::input(format!("Eq21 weight p = {p} outside (0, 1)")));
            }
            let o = C64::new(overlap[0], overlap[1]);
            if o.norm() > 1.0 + 1e-12 {
                return Err(Error::input(format!("|overlap| = {} exceeds 1", o.norm())));
            }
            eq21_state(*p, o)
        }
        FamilySpec::Thm2 {
            lambda_min,
            weights,
            phases,
            v,
            seed,
        } => generate_thm2(*lambda_min, weights, phases.as_deref(), v.as_deref(), *seed),
        FamilySpec::CorollarySymmetric { p, u, phi, seed } => generate_corollary(*p, u.as_ref(), phi.as_ref(), *seed),
    }
}

fn generate_thm2(
    lambda_min: f64,
    weights: &[f64],
    phases: Option<&[[f64; 2]]>,
    v: Option<&[MatrixJson]>,
    seed: u64,
) -> Result<PureState> {
    if !(lambda_min > 0.0 && lambda_min <= 0.5) {
        return Err(Error::input(format!("lambdaMin = {lambda_min} outside (0, 1/2]")));
    }
    check_weights(weights)?;
    if weights.len() > 2 {
        return Err(Error::input("a qubit Charlie supports at most two branches"));
    }
    let n = weights.len();
    if phases.is_some_and(|p| p.len() != n) || v.is_some_and(|v| v.len() != n) {
        return Err(Error::input("phases and unitaries must match the number of weights"));
    }
    let mut rng = seeded_rng(seed);
    let lam = PureState::from_real(&[2, 2], &[lambda_min.sqrt(), 0.0, 0.0, (1.0 - lambda_min).sqrt()])?;
    let mut terms = Vec::with_capacity(n);
    for x in 0..n {
        let u = match phases {
            Some(p) => diag_phase(p[x][0], p[x][1]),
            None => {
                let a = rng.random::<f64>() * std::f64::consts::TAU;
                let b = rng.random::<f64>() * std::f64::consts::TAU;
                diag_phase(a, b)
            }
        };
        let vx = match v {
            Some(v) => {
                let m = matrix_from_json(&v[x])?;
                if m.shape() != (2, 2) || !is_unitary(&m, 1e-10) {
                    return Err(Error::input(format!("V_{x} is not a 2×2 unitary")));
                }
                m
            }
            None => haar_unitary(2, &mut rng),
        };
        let branch = kron(&u, &vx) * lam.amplitudes() * C64::from(weights[x].sqrt());
        let mut c = CVec::zeros(2);
        c[x] = C64::from(1.0);
        terms.push((branch, c));
    }
    assemble(&terms)
}

fn generate_corollary(p: f64, u: Option<&MatrixJson>, phi: Option<&StateJson>, seed: u64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("weight p = {p} outside [0, 1]")));
    }
    let mut rng = seeded_rng(seed);
    let u = match u {
        Some(m) => {
            let m = matrix_from_json(m)?;
            if m.shape() != (2, 2) || !is_unitary(&m, 1e-10) {
                return Err(Error::input("U is not a 2×2 unitary"));
            }
            m
        }
        None => haar_unitary(2, &mut rng),
    };
    let phi = match phi {
        Some(s) => {
            let st = PureState::try_from(s.clone())?;
            if st.dims() != [2, 2] {
                return Err(Error::input("phi must be a two-qubit state"));
            }
            st
        }
        None => haar_state(&[2, 2], &mut rng)?,
    };
    let projected = symmetric_projector(&u)? * phi.amplitudes();
    if projected.norm() < 1e-8 {
        return Err(Error::input("phi has no component satisfying the swap symmetry for this U"));
    }
    let projected = &projected / C64::from(projected.norm());
    let bell = named::phi_plus().amplitudes().clone();
    let c0 = ket(C64::from(1.0), C64::from(0.0));
    let c1 = ket(C64::from(0.0), C64::from(1.0));
    assemble(&[(bell * C64::from(p.sqrt()), c0), (projected * C64::from((1.0 - p).sqrt()), c1)])
}

/// Applies independent Haar-random unitaries to every party.
pub fn random_local_unitaries(psi: &PureState, rng: &mut impl Rng) -> Result<PureState> {
    let ops: Vec<CMat> = psi.dims().iter().map(|&d| haar_unitary(d, rng)).collect();
    psi.apply_local(&ops)
}

/// Result of a local-unitary alignment search.
#[derive(Clone, Debug)]
pub struct LuAlignment {
    /// Best `|⟨target|(U₁ ⊗ … ⊗ U_n)|ψ⟩|²`.
    pub fidelity: f64,
    pub unitaries: Vec<CMat>,
}

/// `X_k` with `⟨target|(⊗U)|ψ⟩ = Tr(U_k X_k)` when all other unitaries are
/// already applied to `chi`.
fn contraction(chi: &CVec, target: &CVec, dims: &[usize], k: usize) -> CMat {
    let d = dims[k];
    let left: usize = dims[..k].iter().product();
    let right: usize = dims[k + 1..].iter().product();
    let mut x = CMat::zeros(d, d);
    for l in 0..left {
        for r in 0..right {
            for j in 0..d {
                let c = chi[(l * d + j) * right + r];
                for i in 0..d {
                    x[(j, i)] += c * target[(l * d + i) * right + r].conj();
                }
            }
        }
    }
    x
}

fn apply_all(psi: &PureState, us: &[CMat], skip: Option<usize>) -> CVec {
    let mut dims = psi.dims().to_vec();
    let mut amps = psi.amplitudes().clone();
    for (k, u) in us.iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        let tmp = PureState::normalized(dims.clone(), amps.clone()).expect("unitary image of a state");
        let (d, a) = tmp.apply_on(k, u).expect("dimension checked by caller");
        dims = d;
        amps = a;
    }
    amps
}

fn polar_sweeps(psi: &PureState, target: &PureState, us: &mut [CMat]) -> f64 {
    let dims = psi.dims().to_vec();
    let mut best = 0.0;
    for _ in 0..300 {
        for k in 0..dims.len() {
            let chi = apply_all(psi, us, Some(k));
            let x = contraction(&chi, target.amplitudes(), &dims, k);
            let svd = x.svd(true, true);
            let (p, q) = (svd.u.expect("u"), svd.v_t.expect("v_t").adjoint());
            us[k] = q * p.adjoint();
        }
        let f = target.amplitudes().dotc(&apply_all(psi, us, None)).norm_sqr();
        if f - best < 1e-15 {
            best = best.max(f);
            break;
        }
        best = f;
    }
    best
}

/// Maximises `|⟨target|(⊗U_k)|ψ⟩|²` by alternating polar updates, one
/// party at a time, from the supplied initial guesses plus random restarts.
pub fn lu_align(
    psi: &PureState,
    target: &PureState,
    initial: &[Vec<CMat>],
    random_starts: usize,
    seed: u64,
) -> Result<LuAlignment> {
    if psi.dims() != target.dims() {
        return Err(Error::input("states live on different subsystems"));
    }
    let mut rng = seeded_rng(seed);
    let identity: Vec<CMat> = psi.dims().iter().map(|&d| CMat::identity(d, d)).collect();
    let mut starts: Vec<Vec<CMat>> = vec![identity];
    starts.extend(initial.iter().cloned());
    let mut best = LuAlignment {
        fidelity: -1.0,
        unitaries: Vec::new(),
    };
    let total = starts.len() + random_starts;
    for s in 0..total {
        let mut us = if s < starts.len() {
            starts[s].clone()
        } else {
            psi.dims().iter().map(|&d| haar_unitary(d, &mut rng)).collect()
        };
        let f = polar_sweeps(psi, target, &mut us);
        if f > best.fidelity {
            best = LuAlignment { fidelity: f, unitaries: us };
        }
        if best.fidelity >= 1.0 - 1e-13 {
            break;
        }
    }
    Ok(best)
}

/// Witness returned by [`verify_family_membership`].
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub member: bool,
    /// Fidelity between the state and the local-unitary image of the witness.
    pub fidelity: f64,
    /// Family parameters of the witness, when one was found.
    pub parameters: Option<FamilySpec>,
    /// Local unitaries with `ψ ≈ (U_A ⊗ U_B ⊗ U_C)|witness⟩`.
    pub unitaries: Option<Vec<CMat>>,
    /// The witness sits on the boundary of the family's parameter range
    /// (e.g. `p ∈ {0, 1}`).
    pub degenerate: bool,
}

impl MembershipCertificate {
    fn rejected(fidelity: f64) -> Self {
        MembershipCertificate {
            member: false,
            fidelity,
            parameters: None,
            unitaries: None,
            degenerate: false,
        }
    }
}

const MEMBERSHIP_FIDELITY: f64 = 1e-8;

fn certify(psi: &PureState, witness: &PureState, us: Vec<CMat>, spec: Option<FamilySpec>, degenerate: bool) -> Result<MembershipCertificate> {
    let image = witness.apply_local(&us)?;
    let fidelity = psi.fidelity(&image);
    Ok(MembershipCertificate {
        member: fidelity >= 1.0 - MEMBERSHIP_FIDELITY,
        fidelity,
        parameters: spec,
        unitaries: Some(us),
        degenerate,
    })
}

/// Decides whether `psi` is a member of the family up to local unitaries.
///
/// Named states are matched by [`lu_align`]. The parametric families are
/// matched constructively: the witness parameters and local unitaries are
/// read off the state, then the rebuilt state is compared by fidelity.
pub fn verify_family_membership(psi: &PureState, kind: FamilyKind) -> Result<MembershipCertificate> {
    if !psi.is_three_qubit() {
        return Err(Error::input("family membership is defined for three-qubit states"));
    }
    match kind {
        FamilyKind::Haar => Ok(MembershipCertificate {
            member: true,
            fidelity: 1.0,
            parameters: None,
            unitaries: None,
            degenerate: false,
        }),
        FamilyKind::Ghz | FamilyKind::W | FamilyKind::Product | FamilyKind::BellTimesC => {
            let target = match kind {
                FamilyKind::Ghz => named::ghz(),
                FamilyKind::W => named::w(),
                FamilyKind::Product => named::product(),
                _ => named::bell_times_c(),
            };
            let al = lu_align(&target, psi, &[], 24, 0x5eed)?;
            let spec = match kind {
                FamilyKind::Ghz => FamilySpec::Ghz,
                FamilyKind::W => FamilySpec::W,
                FamilyKind::Product => FamilySpec::Product,
                _ => FamilySpec::BellTimesC,
            };
            certify(psi, &target, al.unitaries, Some(spec), false)
        }
        FamilyKind::Eq21 => eq21_membership(psi),
        FamilyKind::Thm2 => thm2_membership(psi),
        FamilyKind::CorollarySymmetric => corollary_membership(psi),
    }
}

fn two_by_two(v: &CVec) -> CMat {
    CMat::from_fn(2, 2, |i, j| v[2 * i + j])
}

fn columns(a: &CVec, b: &CVec) -> CMat {
    CMat::from_columns(&[a.clone(), b.clone()])
}

/// Normal form `ψ = √p|a₀b₀⟩|η₀⟩ + √(1−p)|a₁b₁⟩|η₁⟩` for given orthonormal
/// local bases.
#[derive(Clone, Debug)]
pub(crate) struct Eq21Form {
    pub p: f64,
    pub eta0: CVec,
    pub eta1: CVec,
    /// `⟨η₀|η₁⟩`, real and non-negative after the phase of `a₁` absorbed it.
    pub overlap: f64,
    pub a: [CVec; 2],
    pub b: [CVec; 2],
    /// Norm of the part of `ψ` outside `span{|a₀b₀⟩, |a₁b₁⟩} ⊗ C²`.
    pub residual: f64,
}

pub(crate) fn eq21_form(psi: &PureState, a: [CVec; 2], b: [CVec; 2]) -> Eq21Form {
    let v = psi.amplitudes();
    let mut w = [CVec::zeros(2), CVec::zeros(2)];
    for k in 0..2 {
        let ab = a[k].kronecker(&b[k]);
        for c in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                acc += ab[i].conj() * v[2 * i + c];
            }
            w[k][c] = acc;
        }
    }
    let mut rebuilt = CVec::zeros(8);
    for k in 0..2 {
        rebuilt += a[k].kronecker(&b[k]).kronecker(&w[k]);
    }
    let residual = (v - &rebuilt).norm();
    let p = w[0].norm_squared() / (w[0].norm_squared() + w[1].norm_squared());
    let n0 = w[0].norm();
    let n1 = w[1].norm();
    let eta0 = if n0 > 0.0 { &w[0] / C64::from(n0) } else { CVec::from_vec(vec![C64::from(1.0), C64::from(0.0)]) };
    let mut eta1 = if n1 > 0.0 { &w[1] / C64::from(n1) } else { eta0.clone() };
    let mut a = a;
    let o = eta0.dotc(&eta1);
    if o.norm() > 1e-300 {
        let phase = o / o.norm();
        eta1 *= phase.conj();
        a[1] *= phase;
    }
    let overlap = eta0.dotc(&eta1).re.clamp(0.0, 1.0);
    Eq21Form {
        p,
        eta0,
        eta1,
        overlap,
        a,
        b,
        residual,
    }
}

/// Orthonormal Charlie basis `(e₀, e₁)` with `η₀ = cosθ e₀ + sinθ e₁` and
/// `η₁ = cosθ e₀ − sinθ e₁`.
pub(crate) fn e_basis(eta0: &CVec, eta1: &CVec, overlap: f64) -> (f64, CVec, CVec) {
    let theta = 0.5 * overlap.clamp(-1.0, 1.0).acos();
    let sum = eta0 + eta1;
    let e0 = &sum / C64::from(sum.norm());
    let e1 = if theta > 1e-7 {
        let diff = eta0 - eta1;
        &diff / C64::from(diff.norm())
    } else {
        CVec::from_vec(vec![-e0[1].conj(), e0[0].conj()])
    };
    (theta, e0, e1)
}

fn product_vectors_in_span(v0: &CVec, v1: &CVec) -> Option<[CVec; 2]> {
    let (m0, m1) = (two_by_two(v0), two_by_two(v1));
    let det = |m: &CMat| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let a = det(&m0);
    let c = det(&m1);
    let b = det(&(&m0 + &m1)) - a - c;
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale < 1e-12 {
        return None;
    }
    let disc = (b * b - a * c * 4.0).sqrt();
    if disc.norm() < 1e-7 * scale {
        return None;
    }
    // Roots of a x² + b x + c = 0 as projective points (x : 1), with the
    // cancellation-free pairing of the quadratic formula.
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
    let points: [(C64, C64); 2] = [
        if a.norm() > 1e-14 * scale { (q / a, C64::from(1.0)) } else { (C64::from(1.0), C64::from(0.0)) },
        if q.norm() > 1e-14 * scale { (c / q, C64::from(1.0)) } else { (C64::from(0.0), C64::from(1.0)) },
    ];
    Some(points.map(|(al, be)| {
        let x = v0 * al + v1 * be;
        &x / C64::from(x.norm())
    }))
}

fn top_factors(x: &CVec) -> (CVec, CVec) {
    let svd = two_by_two(x).svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let k = if svd.singular_values[0] >= svd.singular_values[1] { 0 } else { 1 };
    (u.column(k).into_owned(), v_t.row(k).transpose().into_owned())
}

fn orthogonal_complement(v: &CVec) -> CVec {
    CVec::from_vec(vec![-v[1].conj(), v[0].conj()])
}

fn eq21_membership(psi: &PureState) -> Result<MembershipCertificate> {
    let sf = psi.schmidt(&[0, 1])?;
    let (a, b) = if sf.rank(1e-12) <= 1 {
        let ab = &sf.left_basis[0];
        let svd = two_by_two(ab).svd(true, true);
        let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
        (
            [u.column(0).into_owned(), u.column(1).into_owned()],
            [v_t.row(0).transpose().into_owned(), v_t.row(1).transpose().into_owned()],
        )
    } else {
        let Some([x0, x1]) = product_vectors_in_span(&sf.left_basis[0], &sf.left_basis[1]) else {
            return Ok(MembershipCertificate::rejected(0.0));
        };
        let (a0, b0) = top_factors(&x0);
        let (a1, b1) = top_factors(&x1);
        if a0.dotc(&a1).norm() > 1e-6 || b0.dotc(&b1).norm() > 1e-6 {
            return Ok(MembershipCertificate::rejected(0.0));
        }
        let a1 = orthogonal_complement(&a0) * (orthogonal_complement(&a0).dotc(&a1) / orthogonal_complement(&a0).dotc(&a1).norm());
        let b1 = orthogonal_complement(&b0) * (orthogonal_complement(&b0).dotc(&b1) / orthogonal_complement(&b0).dotc(&b1).norm());
        ([a0, a1], [b0, b1])
    };
    let form = eq21_form(psi, a, b);
    let (_, e0, e1) = e_basis(&form.eta0, &form.eta1, form.overlap);
    let degenerate = form.p < 1e-12 || form.p > 1.0 - 1e-12;
    let witness = eq21_state(form.p, C64::from(form.overlap))?;
    let us = vec![columns(&form.a[0], &form.a[1]), columns(&form.b[0], &form.b[1]), columns(&e0, &e1)];
    let spec = FamilySpec::Eq21 {
        p: form.p,
        overlap: [form.overlap, 0.0],
    };
    certify(psi, &witness, us, Some(spec), degenerate)
}

fn thm2_membership(psi: &PureState) -> Result<MembershipCertificate> {
    let Some(params) = lossless_certificate_parameters(psi, Cut::A)? else {
        return Ok(MembershipCertificate::rejected(0.0));
    };
    let spec = FamilySpec::Thm2 {
        lambda_min: params.lambda_min,
        weights: params.weights.clone(),
        phases: Some(vec![[0.0, 0.0]; params.weights.len()]),
        v: Some(params.v.iter().map(matrix_to_json).collect()),
        seed: 0,
    };
    let degenerate = params.weights.len() < 2;
    let witness = generate(&spec)?;
    let c = match params.basis.len() {
        2 => columns(&params.basis[0], &params.basis[1]),
        _ => columns(&params.basis[0], &orthogonal_complement(&params.basis[0])),
    };
    let us = vec![params.a_basis.clone(), CMat::identity(2, 2), c];
    certify(psi, &witness, us, Some(spec), degenerate)
}

/// Unitary `U` with `Φᵀ = U Φ U†`, found in the solution space of the
/// linear equation `Φᵀ X = X Φ`.
fn transpose_similarity(phi: &CMat) -> Option<CMat> {
    let phit = phi.transpose();
    let mut l = CMat::zeros(4, 4);
    for col in 0..4 {
        let mut x = CMat::zeros(2, 2);
        x[(col / 2, col % 2)] = C64::from(1.0);
        let img = &phit * &x - &x * phi;
        for r in 0..4 {
            l[(r, col)] = img[(r / 2, r % 2)];
        }
    }
    let svd = l.svd(false, true);
    let v_t = svd.v_t.expect("v_t");
    let smax = svd.singular_values.max().max(1e-300);
    let null: Vec<CMat> = (0..4)
        .filter(|&k| svd.singular_values[k] <= 1e-9 * smax.max(1.0))
        .map(|k| {
            let row = v_t.row(k).adjoint();
            CMat::from_fn(2, 2, |i, j| row[2 * i + j])
        })
        .collect();
    let mut rng = seeded_rng(17);
    let mut candidates = null.clone();
    for _ in 0..32 {
        let mut x = CMat::zeros(2, 2);
        for n in &null {
            x += n * C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        candidates.push(x);
    }
    for x in candidates {
        let Ok(inv) = psd_inv_sqrt(&(x.adjoint() * &x)) else { continue };
        let u = &x * inv;
        if is_unitary(&u, 1e-9) && (&phit * &u - &u * phi).norm() <= 1e-8 {
            return Some(u);
        }
    }
    None
}

fn corollary_membership(psi: &PureState) -> Result<MembershipCertificate> {
    let g = conditional_geometry(psi, Cut::A)?;
    // Charlie direction whose A-side conditional marginal is I/2:
    // R + Y n = 0 on the unit sphere.
    let objective = |ang: &[f64]| {
        let n = Vector3::new(ang[0].sin() * ang[1].cos(), ang[0].sin() * ang[1].sin(), ang[0].cos());
        (g.r + g.y * n).norm_squared()
    };
    let mut rng = seeded_rng(23);
    let mut best: Option<(f64, Vector3<f64>)> = None;
    let (dirs, _) = null_directions(&g.y);
    let mut seeds: Vec<Vector3<f64>> = dirs.iter().flat_map(|d| [*d, -*d]).collect();
    for _ in 0..8 {
        seeds.push(Vector3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    }
    for s in seeds {
        let s = s.normalize();
        let x0 = [s[2].clamp(-1.0, 1.0).acos(), s[1].atan2(s[0])];
        let cfg = PatternSearch {
            initial_step: 0.3,
            min_step: 1e-12,
            max_evals: 4000,
        };
        let m = pattern_search(objective, &x0, &cfg, &mut rng);
        let n = Vector3::new(m.x[0].sin() * m.x[1].cos(), m.x[0].sin() * m.x[1].sin(), m.x[0].cos());
        if best.as_ref().is_none_or(|(v, _)| m.value < *v) {
            best = Some((m.value, n));
        }
    }
    let (value, n) = best.expect("at least one start");
    if value.sqrt() > 1e-7 {
        return Ok(MembershipCertificate::rejected(0.0));
    }
    let [c0, c1] = basis_from_direction(&n);
    let branch = |c: &CVec| -> CVec {
        let v = psi.amplitudes();
        CVec::from_fn(4, |i, _| v[2 * i] * c[0].conj() + v[2 * i + 1] * c[1].conj())
    };
    let (b0, b1) = (branch(&c0), branch(&c1));
    let p = b0.norm_squared();
    if p < 1e-12 {
        return Ok(MembershipCertificate::rejected(0.0));
    }
    let g_a = two_by_two(&(&b0 / C64::from(p.sqrt()))) * C64::from(std::f64::consts::SQRT_2);
    let Ok(inv) = psd_inv_sqrt(&(g_a.adjoint() * &g_a)) else {
        return Ok(MembershipCertificate::rejected(0.0));
    };
    let g_a = &g_a * inv;
    let phi = if 1.0 - p > 1e-12 {
        let local = kron(&g_a.adjoint(), &CMat::identity(2, 2)) * &b1;
        &local / C64::from(local.norm())
    } else {
        named::phi_plus().amplitudes().clone()
    };
    let Some(u) = transpose_similarity(&two_by_two(&phi)) else {
        return Ok(MembershipCertificate::rejected(0.0));
    };
    let phi_state = PureState::new(vec![2, 2], phi)?;
    let spec = FamilySpec::CorollarySymmetric {
        p,
        u: Some(matrix_to_json(&u)),
        phi: Some(StateJson::from(&phi_state)),
        seed: 0,
    };
    let witness = generate(&spec)?;
    let us = vec![g_a, CMat::identity(2, 2), columns(&c0, &c1)];
    certify(psi, &witness, us, Some(spec), p > 1.0 - 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::io::matrix_to_json;

    fn amps(psi: &PureState) -> Vec<C64> {
        psi.amplitudes().iter().copied().collect()
    }

    #[test]
    fn ghz_literal() {
        let g = generate(&FamilySpec::Ghz).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.amplitudes()[0].re - s).abs() < 1e-15 && (g.amplitudes()[7].re - s).abs() < 1e-15);
    }

    #[test]
    fn thm2_half_with_sigma_z_is_phi_plus_phi_minus() {
        let id = CMat::identity(2, 2);
        let sz = crate::qcore::pauli(3);
        let spec = FamilySpec::Thm2 {
            lambda_min: 0.5,
            weights: vec![0.5, 0.5],
            phases: Some(vec![[0.0, 0.0], [0.0, 0.0]]),
            v: Some(vec![matrix_to_json(&id), matrix_to_json(&sz)]),
            seed: 0,
        };
        let psi = generate(&spec).unwrap();
        let h = 0.5;
        let expected = [h, h, 0.0, 0.0, 0.0, 0.0, h, -h];
        for (z, e) in amps(&psi).iter().zip(expected) {
            assert!((z - C64::from(e)).norm() < 1e-15);
        }
        assert!(verify_family_membership(&psi, FamilyKind::Ghz).unwrap().member);
    }

    #[test]
    fn eq21_overlap_one_decouples() {
        let psi = generate(&FamilySpec::Eq21 {
            p: 0.8,
            overlap: [1.0, 0.0],
        })
        .unwrap();
        assert!(psi.schmidt(&[0, 1]).unwrap().rank(1e-12) == 1);
        let ab = psi.reduced(&[0, 1]).unwrap();
        assert!((ab.matrix()[(0, 0)].re - 0.8).abs() < 1e-14);
        assert!((ab.matrix()[(3, 3)].re - 0.2).abs() < 1e-14);
    }

    #[test]
    fn eq21_overlap_is_reproduced() {
        let o = C64::new(0.3, -0.4);
        let (e0, e1) = eta_pair(o);
        assert!((e0.dotc(&e1) - o).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate(&FamilySpec::Eq21 { p: 1.0, overlap: [0.0, 0.0] }).is_err());
        assert!(generate(&FamilySpec::Eq21 { p: 0.5, overlap: [1.0, 1.0] }).is_err());
        let bad = FamilySpec::Thm2 {
            lambda_min: 0.6,
            weights: vec![1.0],
            phases: None,
            v: None,
            seed: 0,
        };
        assert!(generate(&bad).is_err());
        let bad = FamilySpec::Thm2 {
            lambda_min: 0.2,
            weights: vec![0.5, 0.4],
            phases: None,
            v: None,
            seed: 0,
        };
        assert!(generate(&bad).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = FamilySpec::Thm2 {
            lambda_min: 0.2,
            weights: vec![0.3, 0.7],
            phases: None,
            v: None,
            seed: 9,
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn named_memberships() {
        assert!(verify_family_membership(&named::ghz(), FamilyKind::Thm2).unwrap().member);
        assert!(!verify_family_membership(&named::w(), FamilyKind::Thm2).unwrap().member);
        let c = verify_family_membership(&named::product(), FamilyKind::Eq21).unwrap();
        assert!(c.member && c.degenerate);
        assert!(!verify_family_membership(&named::w(), FamilyKind::Eq21).unwrap().member);
        let mut rng = seeded_rng(4);
        let rotated = random_local_unitaries(&named::w(), &mut rng).unwrap();
        assert!(verify_family_membership(&rotated, FamilyKind::W).unwrap().member);
        assert!(!verify_family_membership(&rotated, FamilyKind::Ghz).unwrap().member);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = FamilySpec::Eq21 {
            p: 0.25,
            overlap: [0.1, 0.2],
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(FamilySpec::parse(&text).unwrap(), spec);
        assert_eq!(FamilySpec::parse("GHZ").unwrap(), FamilySpec::Ghz);
        assert_eq!(FamilySpec::parse("haar:5").unwrap(), FamilySpec::Haar { seed: 5 });
        assert!(FamilySpec::parse("nonsense").is_err());
    }
}
