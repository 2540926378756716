//! Bipartite entanglement measures and the three-tangle.
//!
//! Every pure two-qubit monotone here is a function of the smallest squared
//! Schmidt coefficient `λ_min ∈ [0, ½]`; [`MonotoneSpec::f`] exposes that
//! eigenvalue function. Logarithms are base 2, so `|Φ⁺⟩` carries one ebit.

use std::fmt;
use std::str::FromStr;

use crate::qcore::{eig_hermitian, kron, pauli, CMat, DensityMatrix, PureState, C64};
use crate::tolerance;
use crate::{Error, Result};

/// Choice of bipartite measure.
///
/// CLI spelling: `e2`, `ek:<k>`, `entropy:<alpha>`, `s0`, `concurrence`,
/// `gconc`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MonotoneSpec {
    /// Twice the smallest squared Schmidt coefficient.
    E2,
    /// Ky-Fan tail sum `Σ_{n≥k} λ↓_n`.
    KyFan { k: usize },
    /// Rényi entropy of entanglement, `α ∈ [0, 1]`.
    EntropyAlpha { alpha: f64 },
    /// Schmidt-rank indicator (`α = 0` entropy for qubits).
    S0,
    ConcurrencePure,
    GConcurrence,
}

impl MonotoneSpec {
    pub const ENTROPY: MonotoneSpec = MonotoneSpec::EntropyAlpha { alpha: 1.0 };

    /// Eigenvalue function `f(λ_min)` for two-qubit pure states.
    pub fn f(&self, lambda_min: f64) -> f64 {
        let l = lambda_min.clamp(0.0, 0.5);
        match *self {
            MonotoneSpec::E2 => 2.0 * l,
            MonotoneSpec::KyFan { k } => match k {
                1 => 1.0,
                2 => l,
                _ => 0.0,
            },
            MonotoneSpec::EntropyAlpha { alpha } => renyi(&[1.0 - l, l], alpha),
            MonotoneSpec::S0 => s0_step(l),
            MonotoneSpec::ConcurrencePure | MonotoneSpec::GConcurrence => 2.0 * (l * (1.0 - l)).sqrt(),
        }
    }

    /// True exactly for the measures whose eigenvalue function is strictly
    /// concave on `[0, ½]`.
    pub fn strictly_concave(&self) -> bool {
        match *self {
            MonotoneSpec::EntropyAlpha { alpha } => alpha > 0.0,
            MonotoneSpec::ConcurrencePure | MonotoneSpec::GConcurrence => true,
            MonotoneSpec::E2 | MonotoneSpec::S0 | MonotoneSpec::KyFan { .. } => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MonotoneSpec::KyFan { k: 0 } => Err(Error::input("Ky-Fan index must be at least 1")),
            MonotoneSpec::EntropyAlpha { alpha } if !(0.0..=1.0).contains(&alpha) => {
                Err(Error::input(format!("entropy order {alpha} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the measure on a list of squared Schmidt coefficients.
    pub fn evaluate_spectrum(&self, spectrum: &[f64]) -> Result<f64> {
        self.validate()?;
        let mut lam: Vec<f64> = spectrum.iter().map(|&x| x.max(0.0)).collect();
        lam.sort_by(|a, b| b.total_cmp(a));
        let d = lam.len();
        if d == 0 {
            return Err(Error::input("empty spectrum"));
        }
        Ok(match *self {
            MonotoneSpec::E2 => 2.0 * lam[d - 1],
            MonotoneSpec::KyFan { k } => {
                if k > d {
                    return Err(Error::input(format!("Ky-Fan index {k} exceeds local dimension {d}")));
                }
                lam[k - 1..].iter().sum()
            }
            MonotoneSpec::EntropyAlpha { alpha } => renyi(&lam, alpha),
            MonotoneSpec::S0 => renyi(&lam, 0.0),
            MonotoneSpec::ConcurrencePure => (2.0 * (1.0 - lam.iter().map(|x| x * x).sum::<f64>())).max(0.0).sqrt(),
            MonotoneSpec::GConcurrence => d as f64 * lam.iter().product::<f64>().powf(1.0 / d as f64),
        })
    }

    /// Evaluates the measure on a bipartite pure state.
    pub fn evaluate(&self, phi: &PureState) -> Result<f64> {
        self.evaluate_spectrum(&schmidt_spectrum(phi)?)
    }
}

fn s0_step(lambda_min: f64) -> f64 {
    if lambda_min < tolerance::S0_RANK {
        0.0
    } else {
        1.0
    }
}

fn renyi(lam: &[f64], alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < tolerance::ALPHA_SHANNON {
        -lam.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
    } else if alpha == 0.0 {
        (lam.iter().filter(|&&x| x >= tolerance::S0_RANK).count() as f64).log2()
    } else {
        let s: f64 = lam.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
        (s.log2() / (1.0 - alpha)).max(0.0)
    }
}

impl fmt::Display for MonotoneSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneSpec::E2 => write!(f, "e2"),
            MonotoneSpec::KyFan { k } => write!(f, "ek:{k}"),
            MonotoneSpec::EntropyAlpha { alpha } => write!(f, "entropy:{alpha}"),
            MonotoneSpec::S0 => write!(f, "s0"),
            MonotoneSpec::ConcurrencePure => write!(f, "concurrence"),
            MonotoneSpec::GConcurrence => write!(f, "gconc"),
        }
    }
}

impl FromStr for MonotoneSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = match s.trim() {
            "e2" => MonotoneSpec::E2,
            "s0" => MonotoneSpec::S0,
            "concurrence" => MonotoneSpec::ConcurrencePure,
            "gconc" => MonotoneSpec::GConcurrence,
            other => {
                if let Some(k) = other.strip_prefix("ek:") {
                    MonotoneSpec::KyFan {
                        k: k.parse().map_err(|_| Error::input(format!("bad Ky-Fan index in {other:?}")))?,
                    }
                } else if let Some(a) = other.strip_prefix("entropy:") {
                    MonotoneSpec::EntropyAlpha {
                        alpha: a.parse().map_err(|_| Error::input(format!("bad entropy order in {other:?}")))?,
                    }
                } else {
                    return Err(Error::input(format!("unknown monotone {other:?}")));
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Squared Schmidt coefficients of a two-party pure state, non-increasing.
pub fn schmidt_spectrum(phi: &PureState) -> Result<Vec<f64>> {
    if phi.parties() != 2 {
        return Err(Error::input(format!(
            "expected a bipartite state, got {} parties",
            phi.parties()
        )));
    }
    Ok(phi.schmidt(&[0])?.coefficients)
}

/// Smallest eigenvalue of the first-party marginal of a (possibly
/// unnormalised) two-qubit vector given as a 2×2 amplitude matrix.
pub(crate) fn lambda_min_of_amplitudes(m00: C64, m01: C64, m10: C64, m11: C64) -> f64 {
    let p = m00.norm_sqr() + m01.norm_sqr() + m10.norm_sqr() + m11.norm_sqr();
    if p <= 0.0 {
        return 0.0;
    }
    // Marginal H = M M†; (tr H)² − 4 det H = (h00 − h11)² + 4|h01|² is a sum
    // of squares, so λ_max is accurate even at the degenerate point, and
    // λ_min = det H / λ_max keeps relative accuracy near product states.
    let h00 = m00.norm_sqr() + m01.norm_sqr();
    let h11 = m10.norm_sqr() + m11.norm_sqr();
    let h01 = m00 * m10.conj() + m01 * m11.conj();
    let disc = (h00 - h11).hypot(2.0 * h01.norm());
    let lam_max = 0.5 * (p + disc);
    let det = (m00 * m11 - m01 * m10).norm_sqr();
    (det / lam_max / p).clamp(0.0, 0.5)
}

fn two_qubit_lambda_min(phi: &PureState) -> Result<f64> {
    if phi.dims() != [2, 2] {
        return Err(Error::input(format!("expected a two-qubit state, got dims {:?}", phi.dims())));
    }
    let a = phi.amplitudes();
    Ok(lambda_min_of_amplitudes(a[0], a[1], a[2], a[3]))
}

/// `2·λ_min(φ^A)`.
pub fn e2(phi: &PureState) -> Result<f64> {
    Ok(2.0 * two_qubit_lambda_min(phi)?)
}

pub fn ky_fan(phi: &PureState, k: usize) -> Result<f64> {
    MonotoneSpec::KyFan { k }.evaluate(phi)
}

pub fn entropy_alpha(phi: &PureState, alpha: f64) -> Result<f64> {
    MonotoneSpec::EntropyAlpha { alpha }.evaluate(phi)
}

/// `2√(λ_min(1 − λ_min))`.
pub fn concurrence_pure(phi: &PureState) -> Result<f64> {
    let l = two_qubit_lambda_min(phi)?;
    Ok(2.0 * (l * (1.0 - l)).sqrt())
}

/// `2·det(φ^A)^{1/2}`.
pub fn g_concurrence(phi: &PureState) -> Result<f64> {
    if phi.dims() != [2, 2] {
        return Err(Error::input("G-concurrence is implemented for two qubits only"));
    }
    let rho_a = phi.reduced(&[0])?;
    let m = rho_a.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
    Ok(2.0 * det.sqrt())
}

fn spin_flip() -> CMat {
    kron(&pauli(2), &pauli(2))
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The `λ_i` (square roots of the eigenvalues of `ρρ̃`) are computed as the
/// singular values of `τ_ij = ⟨v_i|ṽ_j⟩` over the subnormalised eigenvectors
/// `|v_i⟩ = √p_i |e_i⟩`, which avoids square roots of round-off.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let checked = DensityMatrix::with_tolerance(rho.matrix().clone(), 1e-10)?;
    let eig = eig_hermitian(checked.matrix())?;
    let mut v = eig.vectors.clone();
    for (k, &p) in eig.values.iter().enumerate() {
        let w = C64::from(p.max(0.0).sqrt());
        for i in 0..4 {
            v[(i, k)] *= w;
        }
    }
    let tau = v.adjoint() * spin_flip() * v.conjugate();
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Bipartite cut of a three-party state: one party against the other two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cut {
    /// `A|BC`
    A,
    /// `B|AC`
    B,
}

impl Cut {
    pub fn party(self) -> usize {
        match self {
            Cut::A => 0,
            Cut::B => 1,
        }
    }

    pub fn other(self) -> Cut {
        match self {
            Cut::A => Cut::B,
            Cut::B => Cut::A,
        }
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::A => write!(f, "A|BC"),
            Cut::B => write!(f, "B|AC"),
        }
    }
}

/// Entanglement of a tripartite pure state across one party versus the rest.
pub fn cut_entanglement(psi: &PureState, cut: Cut, m: MonotoneSpec) -> Result<f64> {
    if psi.parties() != 3 {
        return Err(Error::input("cut entanglement expects a three-party state"));
    }
    let sf = psi.schmidt(&[cut.party()])?;
    m.evaluate_spectrum(&sf.coefficients)
}

fn pure_cut_concurrence(psi: &PureState, party: usize) -> Result<f64> {
    let r = psi.reduced(&[party])?;
    let m = r.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
    Ok(2.0 * det.sqrt())
}

/// Both centred forms of the residual tangle:
/// `C²_{X|YZ} − C²(ρ^{XY}) − C²(ρ^{XZ})` for `X = A` and `X = B`.
pub fn three_tangle_forms(psi: &PureState) -> Result<(f64, f64)> {
    if !psi.is_three_qubit() {
        return Err(Error::input("three-tangle expects a three-qubit state"));
    }
    let c_ab = wootters_concurrence(&psi.reduced(&[0, 1])?)?;
    let c_ac = wootters_concurrence(&psi.reduced(&[0, 2])?)?;
    let c_bc = wootters_concurrence(&psi.reduced(&[1, 2])?)?;
    let ca = pure_cut_concurrence(psi, 0)?;
    let cb = pure_cut_concurrence(psi, 1)?;
    Ok((ca * ca - c_ab * c_ab - c_ac * c_ac, cb * cb - c_ab * c_ab - c_bc * c_bc))
}

/// Three-tangle, A-centred. The B-centred form is computed alongside and an
/// error is returned if the two disagree by more than 1e-8, which only
/// happens on numerical breakdown.
pub fn three_tangle(psi: &PureState) -> Result<f64> {
    let (ta, tb) = three_tangle_forms(psi)?;
    if (ta - tb).abs() > 1e-8 {
        return Err(Error::Numerical {
            routine: "three_tangle",
            residual: (ta - tb).abs(),
        });
    }
    Ok(ta)
}
