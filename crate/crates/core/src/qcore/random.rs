use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CMat, CVec, DensityMatrix, PureState, C64};
use crate::Result;

/// Deterministic generator used everywhere randomness is needed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unitarily invariant random pure state; deterministic per seed.
pub fn haar_random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    haar_state(dims, &mut seeded_rng(seed))
}

pub fn haar_state(dims: &[usize], rng: &mut impl Rng) -> Result<PureState> {
    let len: usize = dims.iter().product();
    let amps = CVec::from_iterator(len, (0..len).map(|_| gaussian(rng)));
    PureState::normalized(dims.to_vec(), amps)
}

/// Haar unitary via QR of a Ginibre matrix with the phase correction on the
/// diagonal of `R`.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::from(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix of the given rank, drawn from the induced measure
/// (partial trace of a Haar state on `dim ⊗ rank`).
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = CMat::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix_unchecked(m / tr).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::is_unitary;

    #[test]
    fn reproducible_per_seed() {
        let a = haar_random_pure(&[2, 2, 2], 11).unwrap();
        let b = haar_random_pure(&[2, 2, 2], 11).unwrap();
        let c = haar_random_pure(&[2, 2, 2], 12).unwrap();
        assert_eq!(a, b);
        assert!((a.amplitudes().norm() - 1.0).abs() < 1e-12);
        assert!(a.fidelity(&c) < 1.0 - 1e-6);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        for n in 1..5 {
            assert!(is_unitary(&haar_unitary(n, &mut rng), 1e-12));
        }
    }

    #[test]
    fn random_density_has_requested_rank() {
        let mut rng = seeded_rng(5);
        let rho = random_density(4, 2, &mut rng);
        assert_eq!(rho.rank(1e-12), 2);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    }
}
