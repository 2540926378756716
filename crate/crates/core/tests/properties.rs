use eoa_core::assistance::{
    average_post_measurement, post_measurement_branches, theorem1_measurement, unital_fixed_point_check,
    verify_theorem1, Measurement, Theorem1Case,
};
use eoa_core::ensembles::{equal_concurrence_decomposition, hjw_ensemble};
use eoa_core::monotones::{cut_entanglement, three_tangle, wootters_concurrence, Cut};
use eoa_core::qcore::io::{state_from_str, state_to_string};
use eoa_core::qcore::{haar_unitary, random_density, seeded_rng};
use eoa_core::states::{generate, random_local_unitaries, FamilySpec};
use eoa_core::verify::prop2_instance;
use eoa_core::{CVec, MonotoneSpec, PureState, C64};
use proptest::prelude::*;

fn three_qubit() -> impl Strategy<Value = PureState> {
    prop::collection::vec(-1.0f64..1.0, 16)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let amps = CVec::from_iterator(8, (0..8).map(|i| C64::new(v[2 * i], v[2 * i + 1])));
            PureState::normalized(vec![2, 2, 2], amps).unwrap()
        })
}

fn monotone() -> impl Strategy<Value = MonotoneSpec> {
    prop_oneof![
        Just(MonotoneSpec::E2),
        Just(MonotoneSpec::ENTROPY),
        Just(MonotoneSpec::ConcurrencePure),
        Just(MonotoneSpec::GConcurrence),
        (0.05f64..1.0).prop_map(|alpha| MonotoneSpec::EntropyAlpha { alpha }),
    ]
}

fn min_cut(psi: &PureState, m: MonotoneSpec) -> f64 {
    cut_entanglement(psi, Cut::A, m).unwrap().min(cut_entanglement(psi, Cut::B, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructive_measurement_saturates_min_cut(psi in three_qubit()) {
        let check = verify_theorem1(&psi, 1e-7, None).unwrap();
        prop_assert!(check.gap <= 1e-7);
    }

    #[test]
    fn projective_measurements_respect_the_bound(psi in three_qubit(), m in monotone(), seed in any::<u64>()) {
        let u = haar_unitary(2, &mut seeded_rng(seed));
        let basis: Vec<CVec> = (0..2).map(|k| u.column(k).into_owned()).collect();
        let meas = Measurement::projective(2, &basis).unwrap();
        prop_assert!(average_post_measurement(&psi, &meas, m).unwrap() <= min_cut(&psi, m) + 1e-10);
    }

    #[test]
    fn e_basis_branches_share_weights(p in 0.05f64..0.95, re in -0.9f64..0.9, im in -0.3f64..0.3) {
        let psi = generate(&FamilySpec::Eq21 { p, overlap: [re, im] }).unwrap();
        let t = theorem1_measurement(&psi).unwrap();
        if t.case == Theorem1Case::EBasis {
            for b in post_measurement_branches(&psi, &t.measurement).unwrap() {
                let e = MonotoneSpec::E2.evaluate(&b.state).unwrap();
                prop_assert!((e - 2.0 * p.min(1.0 - p)).abs() < 1e-8);
            }
        }
        prop_assert!((t.predicted - min_cut(&psi, MonotoneSpec::E2)).abs() < 1e-8);
    }

    #[test]
    fn fixed_points_iff_commuting(seed in any::<u64>()) {
        let (h, mixture) = prop2_instance(seed);
        let c = unital_fixed_point_check(&h, &mixture).unwrap();
        prop_assert_eq!(c.preserved, c.commutes);
        if c.preserved {
            prop_assert!(c.shares_eigenvector);
        }
    }

    #[test]
    fn hjw_reconstructs_the_target(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density(4, rank, &mut seeded_rng(seed));
        let ens = hjw_ensemble(&rho, &Measurement::computational(2, rank.max(2))).unwrap();
        prop_assert!(ens.reconstruction_error() < 1e-10);
        let mut weights: Vec<f64> = ens.elements().iter().map(|(w, _)| *w).collect();
        weights.sort_by(|a, b| b.total_cmp(a));
        for (w, lam) in weights.iter().zip(rho.spectrum()) {
            prop_assert!((w - lam).abs() < 1e-10);
        }
    }

    #[test]
    fn equal_concurrence_elements(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density(4, rank, &mut seeded_rng(seed));
        let c = wootters_concurrence(&rho).unwrap();
        let ens = equal_concurrence_decomposition(&rho).unwrap();
        prop_assert!(ens.reconstruction_error() < 1e-10);
        for ci in ens.concurrences().unwrap() {
            prop_assert!((ci - c).abs() < 1e-8);
        }
    }

    #[test]
    fn state_json_round_trip(psi in three_qubit()) {
        let back = state_from_str(&state_to_string(&psi).unwrap()).unwrap();
        prop_assert_eq!(back.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn local_unitaries_preserve_invariants(psi in three_qubit(), seed in any::<u64>()) {
        let moved = random_local_unitaries(&psi, &mut seeded_rng(seed)).unwrap();
        for m in [MonotoneSpec::E2, MonotoneSpec::ENTROPY] {
            for cut in [Cut::A, Cut::B] {
                let before = cut_entanglement(&psi, cut, m).unwrap();
                prop_assert!((cut_entanglement(&moved, cut, m).unwrap() - before).abs() < 1e-9);
            }
        }
        prop_assert!((three_tangle(&moved).unwrap() - three_tangle(&psi).unwrap()).abs() < 1e-9);
        let a = theorem1_measurement(&psi).unwrap().predicted;
        let b = theorem1_measurement(&moved).unwrap().predicted;
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn three_tangle_in_unit_interval(psi in three_qubit()) {
        let t = three_tangle(&psi).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&t));
    }
}
