//! Small dense complex linear algebra and state geometry.
//!
//! Index convention: the first subsystem is the most significant digit of the
//! amplitude index, so for three qubits `index = 4a + 2b + c`.

mod bloch;
mod density;
pub mod io;
mod linalg;
mod random;
mod state;

pub use bloch::{bloch_vector, from_bloch, BlochVector};
pub(crate) use bloch::bloch_of_matrix;
pub use density::{partial_trace, DensityMatrix};
pub use linalg::{
    commutator, eig_hermitian, frobenius, hermitian_part, is_unitary, kron, pauli, psd_inv_sqrt,
    psd_sqrt, HermitianEigen,
};
pub use random::{haar_random_pure, haar_state, haar_unitary, random_density, seeded_rng};
pub use state::{schmidt_decompose, tensor, PureState, SchmidtForm};

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Multiplies `v` by a phase so that its first non-negligible entry is real
/// and positive.
pub fn canonical_phase(v: &mut CVec) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12 * scale) {
        let phase = z.conj() / z.norm();
        for w in v.iter_mut() {
            *w *= phase;
        }
    }
}
