use super::{canonical_phase, CMat, CVec, C64, DensityMatrix, ZERO};
use crate::tolerance;
use crate::{Error, Result};

/// Pure state over an ordered list of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: CVec,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::input(format!(
            "subsystem dimensions must be non-empty and each at least 2, got {dims:?}"
        )));
    }
    Ok(dims.iter().product())
}

impl PureState {
    /// Builds a state, rejecting amplitudes whose norm is off by more than
    /// [`tolerance::STATE_NORM`].
    pub fn new(dims: Vec<usize>, amps: CVec) -> Result<Self> {
        let len = check_dims(&dims)?;
        if amps.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tolerance::STATE_NORM {
            return Err(Error::input(format!("state norm {norm} is not 1")));
        }
        Ok(PureState { dims, amps })
    }

    /// Builds a state from unnormalised amplitudes.
    pub fn normalized(dims: Vec<usize>, amps: CVec) -> Result<Self> {
        let len = check_dims(&dims)?;
        if amps.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::input("cannot normalise a zero or non-finite vector"));
        }
        Ok(PureState {
            dims,
            amps: amps / C64::from(norm),
        })
    }

    pub fn from_slice(dims: &[usize], amps: &[C64]) -> Result<Self> {
        Self::normalized(dims.to_vec(), CVec::from_column_slice(amps))
    }

    pub fn from_real(dims: &[usize], amps: &[f64]) -> Result<Self> {
        let v: Vec<C64> = amps.iter().map(|&x| C64::from(x)).collect();
        Self::from_slice(dims, &v)
    }

    /// Computational basis state with the given flat index.
    pub fn basis(dims: &[usize], index: usize) -> Result<Self> {
        let len = check_dims(dims)?;
        if index >= len {
            return Err(Error::input(format!("basis index {index} out of range {len}")));
        }
        let mut amps = CVec::zeros(len);
        amps[index] = C64::from(1.0);
        Ok(PureState {
            dims: dims.to_vec(),
            amps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn is_three_qubit(&self) -> bool {
        self.dims == [2, 2, 2]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Copy with the global phase fixed so the first non-zero amplitude is
    /// real positive.
    pub fn canonical(&self) -> PureState {
        let mut amps = self.amps.clone();
        canonical_phase(&mut amps);
        PureState {
            dims: self.dims.clone(),
            amps,
        }
    }

    /// Reorders subsystems: party `k` of the result is party `order[k]` of
    /// `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<PureState> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::input(format!("{order:?} is not a permutation of {n} parties")));
        }
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let old_strides = strides(&self.dims);
        let mut amps = CVec::zeros(self.len());
        let mut digits = vec![0usize; n];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            let mut rem = new_index;
            for k in (0..n).rev() {
                digits[k] = rem % new_dims[k];
                rem /= new_dims[k];
            }
            let old_index: usize = order
                .iter()
                .zip(&digits)
                .map(|(&party, &digit)| digit * old_strides[party])
                .sum();
            *slot = self.amps[old_index];
        }
        Ok(PureState { dims: new_dims, amps })
    }

    /// Swaps two subsystems.
    pub fn swapped(&self, a: usize, b: usize) -> Result<PureState> {
        let mut order: Vec<usize> = (0..self.parties()).collect();
        if a >= order.len() || b >= order.len() {
            return Err(Error::input("swap index out of range"));
        }
        order.swap(a, b);
        self.permuted(&order)
    }

    /// Applies `op` (any `d_out × dims[party]` matrix) to one subsystem and
    /// returns the resulting dimensions and unnormalised amplitudes.
    pub fn apply_on(&self, party: usize, op: &CMat) -> Result<(Vec<usize>, CVec)> {
        let d = *self
            .dims
            .get(party)
            .ok_or_else(|| Error::input(format!("party {party} out of range")))?;
        if op.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: op.ncols(),
            });
        }
        let left: usize = self.dims[..party].iter().product();
        let right: usize = self.dims[party + 1..].iter().product();
        let d_out = op.nrows();
        let mut out = CVec::zeros(left * d_out * right);
        for l in 0..left {
            for r in 0..right {
                for i in 0..d_out {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += op[(i, j)] * self.amps[(l * d + j) * right + r];
                    }
                    out[(l * d_out + i) * right + r] = acc;
                }
            }
        }
        let mut dims = self.dims.clone();
        dims[party] = d_out;
        Ok((dims, out))
    }

    /// Applies a unitary to one subsystem.
    pub fn apply_unitary(&self, party: usize, u: &CMat) -> Result<PureState> {
        let (dims, amps) = self.apply_on(party, u)?;
        PureState::normalized(dims, amps)
    }

    /// Applies one operator per subsystem.
    pub fn apply_local(&self, ops: &[CMat]) -> Result<PureState> {
        if ops.len() != self.parties() {
            return Err(Error::DimensionMismatch {
                expected: self.parties(),
                got: ops.len(),
            });
        }
        let mut dims = self.dims.clone();
        let mut amps = self.amps.clone();
        for (party, op) in ops.iter().enumerate() {
            let tmp = PureState {
                dims: dims.clone(),
                amps: amps.clone(),
            };
            let (d, a) = tmp.apply_on(party, op)?;
            dims = d;
            amps = a;
        }
        PureState::normalized(dims, amps)
    }

    /// Amplitudes as a `dim(left) × dim(right)` matrix for a contiguous split
    /// after the first `split` parties.
    pub fn as_matrix(&self, split: usize) -> CMat {
        let rows: usize = self.dims[..split].iter().product();
        let cols: usize = self.dims[split..].iter().product();
        CMat::from_fn(rows, cols, |i, j| self.amps[i * cols + j])
    }

    /// Reduced density matrix on the listed parties (in increasing order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.parties();
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= n) {
            return Err(Error::input(format!("invalid subsystem list {keep:?}")));
        }
        let mut order = keep_sorted.clone();
        order.extend((0..n).filter(|k| !keep_sorted.contains(k)));
        let perm = self.permuted(&order)?;
        let m = perm.as_matrix(keep_sorted.len());
        DensityMatrix::from_matrix_unchecked(&m * m.adjoint())
    }

    pub fn schmidt(&self, left: &[usize]) -> Result<SchmidtForm> {
        schmidt_decompose(self, left)
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Kronecker product of two states; dimensions are concatenated.
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let amps = a.amps.kronecker(&b.amps);
    PureState { dims, amps }
}

/// Schmidt decomposition across the cut `left | rest`.
///
/// `coefficients` are the squared Schmidt coefficients, non-increasing and
/// padded with zeros up to the smaller side dimension.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<CVec>,
    pub right_basis: Vec<CVec>,
    dims: Vec<usize>,
    order: Vec<usize>,
}

impl SchmidtForm {
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    pub fn lambda_min(&self) -> f64 {
        *self.coefficients.last().unwrap_or(&0.0)
    }

    /// Rebuilds the state in the original subsystem order.
    pub fn reconstruct(&self) -> Result<PureState> {
        let rows = self.left_basis.first().map_or(0, |v| v.len());
        let cols = self.right_basis.first().map_or(0, |v| v.len());
        let mut m = CMat::zeros(rows, cols);
        for ((c, u), w) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            m += (u * w.transpose()) * C64::from(c.sqrt());
        }
        let permuted_dims: Vec<usize> = self.order.iter().map(|&k| self.dims[k]).collect();
        let amps = CVec::from_iterator(rows * cols, (0..rows * cols).map(|idx| m[(idx / cols, idx % cols)]));
        let st = PureState::normalized(permuted_dims, amps)?;
        let mut inverse = vec![0usize; self.order.len()];
        for (pos, &party) in self.order.iter().enumerate() {
            inverse[party] = pos;
        }
        st.permuted(&inverse)
    }
}

pub fn schmidt_decompose(psi: &PureState, left: &[usize]) -> Result<SchmidtForm> {
    let n = psi.parties();
    if n < 2 {
        return Err(Error::input("Schmidt decomposition needs at least two subsystems"));
    }
    let mut left_sorted = left.to_vec();
    left_sorted.sort_unstable();
    left_sorted.dedup();
    if left_sorted.is_empty() || left_sorted.len() >= n || left_sorted.iter().any(|&k| k >= n) {
        return Err(Error::input(format!("{left:?} is not a proper bipartition")));
    }
    let mut order = left_sorted.clone();
    order.extend((0..n).filter(|k| !left_sorted.contains(k)));
    let perm = psi.permuted(&order)?;
    let m = perm.as_matrix(left_sorted.len());
    let k = m.nrows().min(m.ncols());
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut coefficients = Vec::with_capacity(k);
    let mut left_basis = Vec::with_capacity(k);
    let mut right_basis = Vec::with_capacity(k);
    for &i in idx.iter().take(k) {
        let s = svd.singular_values[i];
        coefficients.push(s * s);
        left_basis.push(u.column(i).into_owned());
        right_basis.push(vt.row(i).transpose());
    }
    Ok(SchmidtForm {
        coefficients,
        left_basis,
        right_basis,
        dims: psi.dims.clone(),
        order,
    })
}
