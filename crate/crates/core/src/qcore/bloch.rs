use super::{pauli, CMat, DensityMatrix, C64};
use crate::tolerance;
use crate::{Error, Result};

/// Bloch vector of a qubit state `½(I + r·σ)`; `|0⟩` maps to `(0, 0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector([x, y, z])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn cross(&self, o: &BlochVector) -> BlochVector {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = o.0;
        BlochVector([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn scale(&self, s: f64) -> BlochVector {
        BlochVector(self.0.map(|x| x * s))
    }

    pub fn add(&self, o: &BlochVector) -> BlochVector {
        BlochVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn sub(&self, o: &BlochVector) -> BlochVector {
        self.add(&o.scale(-1.0))
    }

    /// `r·σ` as a 2×2 matrix.
    pub fn dot_sigma(&self) -> CMat {
        pauli(1) * C64::from(self.0[0]) + pauli(2) * C64::from(self.0[1]) + pauli(3) * C64::from(self.0[2])
    }
}

/// Bloch vector of a 2×2 Hermitian matrix `h = ½(t·I + r·σ)`; returns `r`
/// regardless of trace.
pub(crate) fn bloch_of_matrix(h: &CMat) -> BlochVector {
    let off = h[(0, 1)] + h[(1, 0)].conj();
    BlochVector([off.re, -off.im, (h[(0, 0)] - h[(1, 1)]).re])
}

pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    Ok(bloch_of_matrix(rho.matrix()))
}

pub fn from_bloch(r: BlochVector) -> Result<DensityMatrix> {
    if r.norm() > 1.0 + tolerance::BLOCH_NORM {
        return Err(Error::input(format!("Bloch vector norm {} exceeds 1", r.norm())));
    }
    let m = (pauli(0) + r.dot_sigma()) * C64::from(0.5);
    DensityMatrix::from_matrix_unchecked(m)
}
