mod common;

use std::f64::consts::PI;

use common::{identify, on_pair, swap_home, LABELS, PAULIS};
use num_complex::Complex64;
use osbmdi::analysis::{
    eve_information, leakage_bits, leakage_table, leakage_with_priors, mutual_information,
    noise_fidelity, run_batch, AnalysisError, LeakageMode, NoiseSpec, NoiseTarget,
};
use osbmdi::protocol::{Mode, SessionConfig};
use osbmdi::quantum::{frame_image, BellLabel, PauliLabel, QubitId, StateVector};
use proptest::prelude::*;
use BellLabel::*;

/// Posterior entropy over encodings by direct state-vector enumeration.
fn oracle_posterior_bits(
    alice: &[BellLabel],
    bob: &[BellLabel],
    m1: BellLabel,
    m2: BellLabel,
    dialogue: bool,
) -> (usize, f64) {
    let bob_ops: Vec<PauliLabel> = if dialogue {
        PAULIS.to_vec()
    } else {
        vec![PauliLabel::I]
    };
    let mut weights = std::collections::BTreeMap::new();
    for &a in alice {
        for &b in bob {
            let home = swap_home(a, b, m1);
            for ua in PAULIS {
                for &ub in &bob_ops {
                    if identify(on_pair(home, ua, ub)) == Some(m2) {
                        *weights.entry((ua, ub)).or_insert(0.0) +=
                            1.0 / (alice.len() * bob.len()) as f64;
                    }
                }
            }
        }
    }
    let total: f64 = weights.values().sum();
    let h = -weights
        .values()
        .map(|w| w / total)
        .map(|p: f64| p * p.log2())
        .sum::<f64>();
    (weights.len(), h)
}

#[test]
fn known_leakage_values() {
    let r = leakage_bits(&[PsiPlus], &[PsiPlus, PsiMinus], PsiPlus, PsiPlus).unwrap();
    assert_eq!((r.consistent, r.h_aposteriori, r.leaked), (8, 3.0, 1.0));
    let r = leakage_bits(&[PsiPlus], &BellLabel::ALL, PsiPlus, PsiPlus).unwrap();
    assert_eq!((r.consistent, r.leaked), (16, 0.0));
    let r = leakage_bits(&[PsiPlus], &[PsiPlus], PsiPlus, PsiPlus).unwrap();
    assert_eq!((r.consistent, r.leaked), (4, 2.0));
}

#[test]
fn leakage_matches_state_vector_enumeration() {
    let sets: [&[BellLabel]; 4] = [
        &[PsiPlus],
        &[PsiPlus, PsiMinus],
        &[PsiPlus, PhiPlus],
        &BellLabel::ALL,
    ];
    for alice in sets {
        for bob in sets {
            for (mode, dialogue) in [(LeakageMode::Dialogue, true), (LeakageMode::Direct, false)] {
                for (m1, m2, r) in leakage_table(alice, bob, mode).unwrap() {
                    let (count, h) = oracle_posterior_bits(alice, bob, m1, m2, dialogue);
                    assert_eq!(r.consistent, count);
                    assert!((r.h_aposteriori - h).abs() < 1e-12);
                    assert!((r.leaked - (mode.apriori_bits() - h)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn uniform_sets_of_size_one_two_four_are_equiprobable() {
    let sets: [&[BellLabel]; 3] = [&[PsiPlus], &[PsiPlus, PsiMinus], &BellLabel::ALL];
    for alice in sets {
        for bob in sets {
            let table = leakage_table(alice, bob, LeakageMode::Dialogue).unwrap();
            assert!(table.iter().all(|(_, _, r)| r.equiprobable));
        }
    }
}

#[test]
fn direct_mode_with_private_bob_init() {
    // two shared-state candidates leave two encodings per announcement
    for (_, _, r) in leakage_table(&[PsiPlus], &[PsiPlus, PsiMinus], LeakageMode::Direct).unwrap() {
        assert_eq!(r.consistent, 2);
        assert_eq!(r.leaked, 1.0);
    }
}

#[test]
fn skewed_prior_is_not_equiprobable() {
    let r = leakage_with_priors(
        &[(PsiPlus, 1.0)],
        &[(PsiPlus, 0.8), (PsiMinus, 0.2)],
        PsiPlus,
        PsiPlus,
        LeakageMode::Dialogue,
    )
    .unwrap();
    assert!(!r.equiprobable);
    assert!(r.h_aposteriori < 3.0);
}

#[test]
fn impossible_announcement_is_an_integrity_error() {
    let r = leakage_with_priors(
        &[(PsiPlus, 1.0)],
        &[(PsiPlus, 1.0)],
        PsiPlus,
        PsiPlus,
        LeakageMode::Direct,
    );
    assert!(r.is_ok());
    // a zero prior leaves nothing to explain the announcements
    let r = leakage_with_priors(
        &[(PsiPlus, 0.0)],
        &[(PsiPlus, 1.0)],
        PsiPlus,
        PsiPlus,
        LeakageMode::Direct,
    );
    assert!(matches!(r, Err(AnalysisError::Integrity(_))));
}

fn label() -> impl Strategy<Value = BellLabel> {
    (0usize..4).prop_map(|i| BellLabel::from_index(i).unwrap())
}

fn pauli() -> impl Strategy<Value = PauliLabel> {
    (0u8..4).prop_map(|i| PauliLabel::from_symbol(i).unwrap())
}

fn label_set() -> impl Strategy<Value = Vec<BellLabel>> {
    (1u8..16).prop_map(|mask| {
        LABELS
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| l)
            .collect()
    })
}

proptest! {
    #[test]
    fn leakage_is_announcement_symmetric(
        alice in label_set(), bob in label_set(), m1 in label(), m2 in label(), p in pauli(), q in pauli(),
    ) {
        let g = |l: BellLabel| frame_image(p, q, l);
        let base = leakage_bits(&alice, &bob, m1, m2).unwrap();
        let ga: Vec<BellLabel> = alice.iter().copied().map(g).collect();
        let gb: Vec<BellLabel> = bob.iter().copied().map(g).collect();
        let moved = leakage_bits(&ga, &gb, g(m1), g(m2)).unwrap();
        prop_assert_eq!(base.consistent, moved.consistent);
    }

    #[test]
    fn leakage_identities(alice in label_set(), bob in label_set(), m1 in label(), m2 in label()) {
        let r = leakage_bits(&alice, &bob, m1, m2).unwrap();
        prop_assert!((r.leaked - (r.h_apriori - r.h_aposteriori)).abs() < 1e-12);
        if r.equiprobable {
            prop_assert!((r.h_aposteriori - (r.consistent as f64).log2()).abs() < 1e-12);
        } else {
            prop_assert!(r.h_aposteriori < (r.consistent as f64).log2());
        }
        prop_assert!(r.leaked >= 0.0 && r.leaked <= 2.0 + 1e-12);
    }

    #[test]
    fn fidelity_ignores_global_phase(l in label(), phi in 0.0..2.0 * PI, theta in 0.0..2.0 * PI) {
        let (a, b) = (QubitId(0), QubitId(1));
        let target = StateVector::bell(l, a, b).unwrap();
        let noised = target.apply_unitary1q(b, &NoiseSpec::CollectiveDephasing(phi).unitary()).unwrap();
        let phase = Complex64::from_polar(1.0, theta);
        let shifted = StateVector::new(vec![a, b], noised.amplitudes().iter().map(|x| x * phase).collect()).unwrap();
        prop_assert!((noised.fidelity(&target).unwrap() - shifted.fidelity(&target).unwrap()).abs() < 1e-12);
    }
}

fn grid() -> Vec<f64> {
    (0..=32).map(|k| k as f64 * PI / 16.0).collect()
}

#[test]
fn decoherence_free_labels() {
    for (l, spec) in [
        (PhiPlus, NoiseSpec::CollectiveDephasing(0.0)),
        (PhiMinus, NoiseSpec::CollectiveDephasing(0.0)),
        (PsiPlus, NoiseSpec::CollectiveRotation(0.0)),
        (PhiMinus, NoiseSpec::CollectiveRotation(0.0)),
    ] {
        for (x, f) in noise_fidelity(l, spec, NoiseTarget::BothQubits, &grid()).unwrap() {
            assert!((f - 1.0).abs() < 1e-9, "{l} {spec} at {x}: {f}");
        }
    }
}

#[test]
fn dephasing_curves() {
    let both = noise_fidelity(
        PsiPlus,
        NoiseSpec::CollectiveDephasing(0.0),
        NoiseTarget::BothQubits,
        &grid(),
    )
    .unwrap();
    for (phi, f) in both {
        // |(1 + e^{2i phi}) / 2|^2
        let oracle =
            (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * phi)).norm_sqr() / 4.0;
        assert!((f - oracle).abs() < 1e-9);
        assert!((f - phi.cos().powi(2)).abs() < 1e-9);
    }
    let half = noise_fidelity(
        PsiMinus,
        NoiseSpec::CollectiveDephasing(0.0),
        NoiseTarget::TravelHalf,
        &grid(),
    )
    .unwrap();
    for (phi, f) in half {
        assert!((f - (phi / 2.0).cos().powi(2)).abs() < 1e-9);
    }
}

#[test]
fn noisy_sessions_keep_dfs_decoys_clean() {
    // phi decoys under dephasing pass the whole-pair check
    let cfg = SessionConfig {
        n_pairs: 16,
        split_decoys: Some(0),
        decoy_policy: "phi+".parse().unwrap(),
        noise: Some(NoiseSpec::CollectiveDephasing(0.7)),
        error_threshold: 1.0,
        master_seed: 4,
        ..Default::default()
    };
    let reports = run_batch(&cfg, 30).unwrap();
    assert!(reports
        .iter()
        .all(|r| r.transmit.whole.checks > 0 && r.transmit.whole.failures == 0));
}

fn dialogue(bob: Vec<BellLabel>, seed: u64, sessions: u64) -> Vec<osbmdi::protocol::SessionReport> {
    let cfg = SessionConfig {
        mode: Mode::Qd,
        n_pairs: 16,
        bob_states: bob,
        master_seed: seed,
        ..Default::default()
    };
    run_batch(&cfg, sessions).unwrap()
}

#[test]
fn eve_information_within_enumeration_bound() {
    let two = eve_information(&dialogue(vec![PsiPlus, PsiMinus], 21, 800)).unwrap();
    let bound = 1.0;
    assert!(two.bits <= bound + 3.0 * two.bias_bound + 0.05, "{two:?}");
    assert!(two.bits >= bound - 0.1, "{two:?}");

    let four = eve_information(&dialogue(BellLabel::ALL.to_vec(), 22, 800)).unwrap();
    assert!(four.bits <= 3.0 * four.bias_bound + 0.05, "{four:?}");
}

#[test]
fn direct_mode_information_matches_enumeration() {
    let cfg = SessionConfig {
        n_pairs: 16,
        master_seed: 23,
        ..Default::default()
    };
    let est = eve_information(&run_batch(&cfg, 400).unwrap()).unwrap();
    assert!((est.bits - 1.0).abs() < 0.1, "{est:?}");
}

#[test]
fn too_few_samples_flagged() {
    let r = eve_information(&dialogue(vec![PsiPlus, PsiMinus], 24, 3));
    assert!(matches!(r, Err(AnalysisError::InsufficientSamples { .. })));
}

#[test]
fn plug_in_estimate_basics() {
    let pairs: Vec<(u8, u8)> = (0..64).map(|i| (i % 4, (i % 4) / 2)).collect();
    assert!((mutual_information(&pairs).bits - 1.0).abs() < 1e-12);
}
