use super::{eig_hermitian, hermitian_part, CMat, PureState, C64, ZERO};
use crate::tolerance;
use crate::{Error, Result};

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and trace within
    /// [`tolerance::DENSITY`].
    pub fn new(mat: CMat) -> Result<Self> {
        Self::with_tolerance(mat, tolerance::DENSITY)
    }

    pub fn with_tolerance(mat: CMat, tol: f64) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(Error::input("density matrix must be square and non-empty"));
        }
        let eig = eig_hermitian(&mat)?;
        let n = mat.nrows();
        for i in 0..n {
            for j in 0..n {
                let dev = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if dev > tol {
                    return Err(Error::NotHermitian(dev));
                }
            }
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::input(format!("trace {tr} is not 1")));
        }
        let smallest = *eig.values.last().unwrap();
        if smallest < -tol {
            return Err(Error::input(format!("negative eigenvalue {smallest}")));
        }
        Ok(DensityMatrix {
            mat: hermitian_part(&mat),
        })
    }

    /// Wraps a matrix produced by an exact construction (partial trace of a
    /// normalised state and the like). Only Hermitises; no spectral check.
    pub(crate) fn from_matrix_unchecked(mat: CMat) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::input("density matrix must be square"));
        }
        Ok(DensityMatrix {
            mat: hermitian_part(&mat),
        })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        DensityMatrix { mat: v * v.adjoint() }
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|` for normalised weights.
    pub fn mixture(items: &[(f64, &PureState)]) -> Result<Self> {
        let first = items.first().ok_or_else(|| Error::input("empty mixture"))?;
        let n = first.1.len();
        let mut mat = CMat::zeros(n, n);
        for (w, psi) in items {
            if psi.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: psi.len() });
            }
            let v = psi.amplitudes();
            mat += (v * v.adjoint()) * C64::from(*w);
        }
        Self::new(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: CMat::identity(dim, dim) * C64::from(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Eigenvalues, non-increasing.
    pub fn spectrum(&self) -> Vec<f64> {
        eig_hermitian(&self.mat)
            .map(|e| e.values)
            .unwrap_or_default()
    }

    pub fn lambda_min(&self) -> f64 {
        self.spectrum().last().copied().unwrap_or(0.0).max(0.0)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.spectrum().iter().filter(|&&x| x > tol).count()
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, dims, keep)
    }
}

/// Reduced matrix on the parties listed in `keep`, which must be increasing.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: total,
        });
    }
    let n = dims.len();
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= n) {
        return Err(Error::input(format!("invalid subsystem list {keep:?}")));
    }
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let keep_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let compose = |kept_index: usize, traced_index: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept_index;
        for &k in keep.iter().rev() {
            idx += (rem % dims[k]) * strides[k];
            rem /= dims[k];
        }
        let mut rem = traced_index;
        for &k in traced.iter().rev() {
            idx += (rem % dims[k]) * strides[k];
            rem /= dims[k];
        }
        idx
    };
    let m = rho.matrix();
    let mut out = CMat::from_element(keep_dim, keep_dim, ZERO);
    for i in 0..keep_dim {
        for j in 0..keep_dim {
            let mut acc = ZERO;
            for t in 0..traced_dim {
                acc += m[(compose(i, t), compose(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::frobenius;

    #[test]
    fn bell_reduces_to_identity_half() {
        let bell = PureState::from_real(&[2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let r = partial_trace(&bell.density(), &[2, 2], &[0]).unwrap();
        let half = DensityMatrix::maximally_mixed(2);
        assert!(frobenius(&(r.matrix() - half.matrix())) < 1e-15);
    }

    #[test]
    fn w_marginal() {
        let w = PureState::from_real(&[2, 2, 2], &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = partial_trace(&w.density(), &[2, 2, 2], &[0]).unwrap();
        assert!((r.matrix()[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.matrix()[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn product_marginal_is_pure() {
        let st = PureState::basis(&[2, 2, 2], 0).unwrap();
        let r = partial_trace(&st.density(), &[2, 2, 2], &[0]).unwrap();
        assert!((r.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(r.lambda_min() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let st = PureState::basis(&[2, 2], 0).unwrap();
        assert!(matches!(
            partial_trace(&st.density(), &[2, 2, 2], &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reduced_matches_partial_trace() {
        let st = PureState::from_real(&[2, 2, 2], &[0.1, -0.2, 0.3, 0.4, 0.5, 0.6, -0.7, 0.8]).unwrap();
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let a = st.reduced(&keep).unwrap();
            let b = partial_trace(&st.density(), &[2, 2, 2], &keep).unwrap();
            assert!(frobenius(&(a.matrix() - b.matrix())) < 1e-14, "{keep:?}");
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::from(1.2), C64::from(-0.2)]));
        assert!(DensityMatrix::new(m).is_err());
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::from(0.6), C64::from(0.6)]));
        assert!(DensityMatrix::new(m).is_err());
    }
}
