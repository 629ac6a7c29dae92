use lossguard::losscode::{
    codewords, correction_tables, decode, derive_correction_table, encode, recover,
    recover_ensemble, recover_forced, recover_verified, recovery_trace, PauliWord,
};
use lossguard::simcore::{index_to_bits, PureState};
use lossguard::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ket(terms: &[(f64, &str)]) -> PureState<f64> {
    PureState::from_kets(terms).unwrap()
}

fn outcomes() -> impl Iterator<Item = [bool; 2]> {
    (0..4).map(|k| {
        let b = index_to_bits(k, 2);
        [b[0], b[1]]
    })
}

#[test]
fn table_for_lowest_rail_matches_reference_operators() {
    let t = derive_correction_table(3).unwrap();
    assert_eq!(
        t.entries,
        [PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ]
    );
}

#[test]
fn every_position_yields_a_complete_table() {
    for pos in 0..4 {
        let t = derive_correction_table(pos).unwrap();
        assert_eq!(t.loss_position, pos);
        // Pauli words square to the identity up to phase.
        for w in t.entries {
            let s = ket(&[(1.0, "0"), (0.5, "1")]);
            let twice = w.apply(&w.apply(&s, 0).unwrap(), 0).unwrap();
            assert!((twice.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
        }
    }
    assert_eq!(correction_tables().unwrap().len(), 4);
}

#[test]
fn worked_example_outcomes() {
    let psi = ket(&[(1.0, "0110"), (1.0, "1001")]);
    let damaged = psi.to_density().partial_trace(3).unwrap();

    let o = recover_forced(&damaged, 3, [false, false]).unwrap();
    assert_eq!(o.applied_correction, PauliWord::I);
    assert!(o.corrected_state.max_abs_diff(&psi) < 1e-12);

    let o = recover_forced(&damaged, 3, [false, true]).unwrap();
    assert_eq!(o.applied_correction, PauliWord::X);
    assert!(
        (o.projected_state
            .fidelity(&ket(&[(1.0, "1000"), (1.0, "0111")]))
            .unwrap()
            - 1.0)
            .abs()
            < 1e-12
    );
    assert!((o.measurement.probability - 0.25).abs() < 1e-12);

    let o = recover_forced(&damaged, 3, [true, true]).unwrap();
    assert_eq!(o.applied_correction, PauliWord::XZ);
    assert!(
        (o.projected_state
            .fidelity(&ket(&[(1.0, "1000"), (-1.0, "0111")]))
            .unwrap()
            - 1.0)
            .abs()
            < 1e-12
    );
    assert!((o.corrected_state.fidelity(&psi).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn pre_measurement_state_matches_walkthrough() {
    let psi = ket(&[(1.0, "0110"), (1.0, "1001")]);
    let trace = recovery_trace(&psi.to_density().partial_trace(3).unwrap(), 3).unwrap();
    let branch_a = ket(&[
        (1.0, "011000"),
        (1.0, "100100"),
        (1.0, "011010"),
        (-1.0, "100110"),
    ]);
    let branch_b = ket(&[
        (1.0, "100001"),
        (1.0, "011101"),
        (1.0, "100011"),
        (-1.0, "011111"),
    ]);
    let expected =
        lossguard::simcore::DensityMatrix::from_ensemble(&[(branch_a, 0.5), (branch_b, 0.5)])
            .unwrap();
    assert!(trace.before_measurement.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn ensemble_route_matches_density_matrix_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let logical = PureState::<f64>::random(2, &mut rng).unwrap();
        let enc = encode(&logical).unwrap();
        for pos in 0..4 {
            let mut a = ChaCha8Rng::seed_from_u64(pos as u64);
            let mut b = ChaCha8Rng::seed_from_u64(pos as u64);
            let dm = recover(&enc.to_density().partial_trace(pos).unwrap(), pos, &mut a).unwrap();
            let ens = recover_ensemble(&enc, pos, &mut b).unwrap();
            assert_eq!(dm.measurement.outcome_bits, ens.measurement.outcome_bits);
            assert!((dm.measurement.probability - ens.measurement.probability).abs() < 1e-12);
            assert!(
                (dm.corrected_state.fidelity(&ens.corrected_state).unwrap() - 1.0).abs() < 1e-12
            );
            assert!((ens.corrected_state.fidelity(&enc).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn damaged_state_outside_code_space_is_rejected() {
    // A state with both ZZZZ parities present is not a code state.
    let bad = ket(&[(1.0, "0000"), (1.0, "0001")]);
    let damaged = bad.to_density().partial_trace(0).unwrap();
    // Parity readout always lands in the code space, so only the
    // verified route can notice the damage.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let res = recover_verified(&damaged, 0, &bad, &mut rng);
    assert!(matches!(res, Err(Error::RecoveryFailure { .. })), "{res:?}");
}

#[test]
fn codewords_round_trip_through_decode() {
    for (k, cw) in codewords::<f64>().iter().enumerate() {
        let back = decode(&cw.state).unwrap();
        assert!(back.max_abs_diff(&PureState::basis(2, k).unwrap()) < 1e-12);
    }
}

fn arb_state(qubits: usize) -> impl Strategy<Value = PureState<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << qubits)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            PureState::normalized(
                v.into_iter()
                    .map(|(a, b)| num_complex::Complex::new(a, b))
                    .collect(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recovery_restores_any_input(psi in arb_state(2), pos in 0usize..4) {
        let enc = encode(&psi).unwrap();
        let damaged = enc.to_density().partial_trace(pos).unwrap();
        for outcome in outcomes() {
            let o = recover_forced(&damaged, pos, outcome).unwrap();
            prop_assert!((o.measurement.probability - 0.25).abs() < 1e-12);
            prop_assert!((o.corrected_state.fidelity(&enc).unwrap() - 1.0).abs() < 1e-10);
            // Projected state is pure before correction.
            let ev = o.projected_state.to_density().eigenvalues();
            prop_assert!((ev[ev.len() - 1] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn encode_is_an_isometry(a in arb_state(2), b in arb_state(2)) {
        let before = a.inner(&b).unwrap();
        let after = encode(&a).unwrap().inner(&encode(&b).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn decode_inverts_encode(psi in arb_state(2)) {
        let back = decode(&encode(&psi).unwrap()).unwrap();
        prop_assert!((back.fidelity(&psi).unwrap() - 1.0).abs() < 1e-12);
    }
}
