//! Checks against references computed here from first principles, without
//! the library's own kernels.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use eoa_core::assistance::{
    average_post_measurement, post_measurement_branches, theorem1_measurement, Measurement, Theorem1Case,
};
use eoa_core::monotones::{cut_entanglement, three_tangle, wootters_concurrence, Cut};
use eoa_core::qcore::{haar_random_pure, haar_unitary, random_density, seeded_rng};
use eoa_core::states::named;
use eoa_core::{CMat, CVec, DensityMatrix, MonotoneSpec, PureState, C64};

fn amp(psi: &PureState, a: usize, b: usize, c: usize) -> C64 {
    psi.amplitudes()[4 * a + 2 * b + c]
}

/// Cayley hyperdeterminant form of the three-tangle.
fn hyperdeterminant_tangle(psi: &PureState) -> f64 {
    let a = |i: usize, j: usize, k: usize| amp(psi, i, j, k);
    let d1 = a(0, 0, 0).powi(2) * a(1, 1, 1).powi(2)
        + a(0, 0, 1).powi(2) * a(1, 1, 0).powi(2)
        + a(0, 1, 0).powi(2) * a(1, 0, 1).powi(2)
        + a(1, 0, 0).powi(2) * a(0, 1, 1).powi(2);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm()
}

/// `2 λ_min` of the one-qubit marginal of `party`, by explicit summation.
fn marginal_e2(psi: &PureState, party: usize) -> f64 {
    let mut r = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..8 {
        for j in 0..8 {
            let bit = |x: usize| (x >> (2 - party)) & 1;
            let rest = |x: usize| x & !(1 << (2 - party));
            if rest(i) == rest(j) {
                r[bit(i)][bit(j)] += psi.amplitudes()[i] * psi.amplitudes()[j].conj();
            }
        }
    }
    let tr = r[0][0].re + r[1][1].re;
    let det = (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re;
    tr - (tr * tr - 4.0 * det).max(0.0).sqrt()
}

fn min_cut_e2(psi: &PureState) -> f64 {
    marginal_e2(psi, 0).min(marginal_e2(psi, 1))
}

/// Average `E₂` after Charlie projects onto `{|e⟩, |e⊥⟩}` with
/// `|e⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
fn projective_e2(psi: &PureState, theta: f64, phi: f64) -> f64 {
    let e = [C64::from((theta / 2.0).cos()), C64::from_polar((theta / 2.0).sin(), phi)];
    let f = [-e[1].conj(), e[0].conj()];
    let mut total = 0.0;
    for v in [e, f] {
        let m: Vec<C64> = (0..4)
            .map(|ab| v[0].conj() * psi.amplitudes()[2 * ab] + v[1].conj() * psi.amplitudes()[2 * ab + 1])
            .collect();
        let p: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if p < 1e-300 {
            continue;
        }
        let det = (m[0] * m[3] - m[1] * m[2]).norm_sqr();
        total += p * (1.0 - (1.0 - 4.0 * det / (p * p)).max(0.0).sqrt());
    }
    total
}

fn haar(seed: u64) -> PureState {
    haar_random_pure(&[2, 2, 2], seed).unwrap()
}

#[test]
fn three_tangle_matches_hyperdeterminant() {
    for seed in 0..300 {
        let psi = haar(seed);
        let t = three_tangle(&psi).unwrap();
        let h = hyperdeterminant_tangle(&psi);
        assert!((t - h).abs() < 1e-10, "seed {seed}: {t} vs {h}");
    }
    assert!((hyperdeterminant_tangle(&named::ghz()) - 1.0).abs() < 1e-12);
    assert!(hyperdeterminant_tangle(&named::w()).abs() < 1e-12);
}

#[test]
fn cut_values_match_explicit_marginals() {
    for seed in 0..200 {
        let psi = haar(100 + seed);
        for (cut, party) in [(Cut::A, 0), (Cut::B, 1)] {
            let lib = cut_entanglement(&psi, cut, MonotoneSpec::E2).unwrap();
            assert!((lib - marginal_e2(&psi, party)).abs() < 1e-12);
        }
    }
}

#[test]
fn grid_search_over_projective_measurements_reaches_min_cut() {
    for seed in 0..12 {
        let psi = haar(500 + seed);
        let bound = min_cut_e2(&psi);
        let mut best = 0.0f64;
        let n = 120;
        for i in 0..=n {
            for j in 0..2 * n {
                let v = projective_e2(&psi, PI * i as f64 / n as f64, PI * j as f64 / n as f64);
                assert!(v <= bound + 1e-12, "seed {seed}: {v} exceeds {bound}");
                best = best.max(v);
            }
        }
        let constructive = theorem1_measurement(&psi).unwrap().predicted;
        assert!((constructive - bound).abs() < 1e-9);
        assert!(bound - best < 2e-3, "seed {seed}: grid best {best}, bound {bound}");
    }
}

#[test]
fn constructive_measurement_agrees_with_direct_evaluation() {
    for seed in 0..200 {
        let psi = haar(900 + seed);
        let t = theorem1_measurement(&psi).unwrap();
        if t.case == Theorem1Case::Decoupled || t.measurement.len() != 2 {
            continue;
        }
        // Recover the Bloch angles of the first projector and evaluate by hand.
        let p = &t.measurement.elements()[0];
        let z = (p[(0, 0)] - p[(1, 1)]).re;
        let off = p[(1, 0)];
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = off.arg();
        let direct = projective_e2(&psi, theta, phi);
        assert!((direct - min_cut_e2(&psi)).abs() < 1e-9, "seed {seed}: {direct}");
    }
}

fn random_povm(rng: &mut impl rand::Rng, outcomes: usize) -> Measurement {
    // Rows of a Haar isometry C² → C^outcomes give rank-one Kraus operators.
    let u = haar_unitary(outcomes, rng);
    let elements = (0..outcomes)
        .map(|k| {
            let row = CMat::from_fn(1, 2, |_, j| u[(k, j)]);
            let mut m = CMat::zeros(2, 2);
            m.set_row(0, &row.row(0));
            m
        })
        .collect();
    Measurement::new(2, elements).unwrap()
}

#[test]
fn random_measurements_never_beat_the_min_cut() {
    let mut rng = seeded_rng(11);
    for seed in 0..200 {
        let psi = haar(2000 + seed);
        for outcomes in [2, 3, 4] {
            let meas = random_povm(&mut rng, outcomes);
            for m in [MonotoneSpec::E2, MonotoneSpec::ENTROPY, MonotoneSpec::ConcurrencePure, MonotoneSpec::GConcurrence] {
                let avg = average_post_measurement(&psi, &meas, m).unwrap();
                let bound = cut_entanglement(&psi, Cut::A, m).unwrap().min(cut_entanglement(&psi, Cut::B, m).unwrap());
                assert!(avg <= bound + 1e-10, "seed {seed}, {m}: {avg} > {bound}");
            }
        }
    }
}

#[test]
fn branches_average_back_to_the_two_party_marginal() {
    let mut rng = seeded_rng(12);
    for seed in 0..100 {
        let psi = haar(3000 + seed);
        let meas = random_povm(&mut rng, 3);
        let mut mix = CMat::zeros(4, 4);
        for b in post_measurement_branches(&psi, &meas).unwrap() {
            let v = b.state.amplitudes();
            mix += (v * v.adjoint()) * C64::from(b.probability);
        }
        // ρ_AB by direct summation over Charlie's index.
        let mut rho = CMat::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                for c in 0..2 {
                    rho[(i, j)] += psi.amplitudes()[2 * i + c] * psi.amplitudes()[2 * j + c].conj();
                }
            }
        }
        assert!((mix - rho).norm() < 1e-12);
    }
}

#[test]
fn golden_values() {
    let ghz = theorem1_measurement(&named::ghz()).unwrap();
    assert!((ghz.predicted - 1.0).abs() < 1e-9);
    let w = named::w();
    let t = theorem1_measurement(&w).unwrap();
    assert!((t.predicted - 2.0 / 3.0).abs() < 1e-8);
    assert!((average_post_measurement(&w, &t.measurement, MonotoneSpec::E2).unwrap() - 2.0 / 3.0).abs() < 1e-8);
    assert!((marginal_e2(&w, 0) - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(theorem1_measurement(&named::product()).unwrap().predicted, 0.0);
    assert!((theorem1_measurement(&named::bell_times_c()).unwrap().predicted - 1.0).abs() < 1e-12);
}

fn bell_mixture(p: f64, other: &CMat) -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    let phi = CVec::from_vec(vec![C64::from(s), C64::from(0.0), C64::from(0.0), C64::from(s)]);
    DensityMatrix::new((&phi * phi.adjoint()) * C64::from(p) + other * C64::from(1.0 - p)).unwrap()
}

#[test]
fn wootters_closed_forms() {
    let mut zero = CMat::zeros(4, 4);
    zero[(0, 0)] = C64::from(1.0);
    let c = wootters_concurrence(&bell_mixture(0.5, &zero)).unwrap();
    assert!((c - 0.5).abs() < 1e-12, "{c}");

    let mut flip = CMat::zeros(4, 4);
    flip[(1, 1)] = C64::from(1.0);
    for p in [0.1, 0.4, 0.9] {
        let c = wootters_concurrence(&bell_mixture(p, &flip)).unwrap();
        assert!((c - p).abs() < 1e-12);
    }

    let noise = CMat::identity(4, 4) * C64::from(0.25);
    for p in [0.2, 1.0 / 3.0, 0.5, 0.8] {
        let c = wootters_concurrence(&bell_mixture(p, &noise)).unwrap();
        let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
        assert!((c - expected).abs() < 1e-9, "p {p}: {c}");
    }
}

#[test]
fn wootters_is_the_pure_concurrence_on_pure_states() {
    let mut rng = seeded_rng(13);
    for _ in 0..100 {
        let rho = random_density(4, 1, &mut rng);
        let m = rho.matrix();
        let k = (0..4).max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re)).unwrap();
        let v: Vec<C64> = (0..4).map(|i| m[(i, k)] / m[(k, k)].re.sqrt()).collect();
        let direct = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
        assert!((wootters_concurrence(&rho).unwrap() - direct).abs() < 1e-9);
    }
}
