mod common;

use common::{
    bell, expand_13_24, identify, on_pair, swap_home, ExpansionLine, Real, LABELS, PAULIS,
};
use osbmdi::protocol::reference::{diff_table, simulate_table, EXPECTED_TABLE};
use osbmdi::protocol::{decode_message, Decoder};
use osbmdi::quantum::{
    bell_expand, frame_image, swapped_label, BellLabel, PairSide, PauliLabel, QubitId, StateVector,
};
use BellLabel::*;

fn library_expansion(a: BellLabel, b: BellLabel) -> [[f64; 4]; 4] {
    let q: Vec<QubitId> = (1..=4).map(QubitId).collect();
    let s = StateVector::bell(a, q[0], q[1])
        .unwrap()
        .tensor(&StateVector::bell(b, q[2], q[3]).unwrap())
        .unwrap();
    let e = bell_expand(&s, ((q[0], q[2]), (q[1], q[3]))).unwrap();
    let mut out = [[0.0; 4]; 4];
    for (i, l1) in LABELS.iter().enumerate() {
        for (j, l2) in LABELS.iter().enumerate() {
            let c = e.coeff(*l1, *l2);
            assert!(c.im.abs() < 1e-12);
            out[i][j] = c.re;
        }
    }
    out
}

fn pos(l: BellLabel) -> usize {
    LABELS.iter().position(|x| *x == l).unwrap()
}

#[test]
fn reference_expansions() {
    // psi+ psi+ and psi+ psi-, terms on (13)(24)
    let lines: [ExpansionLine; 2] = [
        (
            PsiPlus,
            [
                (PsiPlus, PsiPlus, 0.5),
                (PhiPlus, PhiPlus, 0.5),
                (PhiMinus, PhiMinus, 0.5),
                (PsiMinus, PsiMinus, 0.5),
            ],
        ),
        (
            PsiMinus,
            [
                (PsiPlus, PsiMinus, 0.5),
                (PhiPlus, PhiMinus, -0.5),
                (PhiMinus, PhiPlus, -0.5),
                (PsiMinus, PsiPlus, 0.5),
            ],
        ),
    ];
    for (bob, terms) in lines {
        let lib = library_expansion(PsiPlus, bob);
        let oracle = expand_13_24(&Real::from_pairs(&[bell(PsiPlus), bell(bob)]));
        let mut expected = [[0.0; 4]; 4];
        for (l1, l2, c) in terms {
            expected[pos(l1)][pos(l2)] = c;
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (lib[i][j] - expected[i][j]).abs() < 1e-12,
                    "{bob} [{i}][{j}]"
                );
                assert!((oracle[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn every_product_expands_into_four_halves() {
    for a in LABELS {
        for b in LABELS {
            let lib = library_expansion(a, b);
            let oracle = expand_13_24(&Real::from_pairs(&[bell(a), bell(b)]));
            let mut nonzero = 0;
            for i in 0..4 {
                for j in 0..4 {
                    assert!((lib[i][j] - oracle[i][j]).abs() < 1e-12);
                    if lib[i][j].abs() > 1e-12 {
                        assert!((lib[i][j].abs() - 0.5).abs() < 1e-12);
                        nonzero += 1;
                    }
                }
            }
            assert_eq!(nonzero, 4, "{a} x {b}");
        }
    }
}

#[test]
fn swap_table_matches_projection() {
    for a in LABELS {
        for b in LABELS {
            for m in LABELS {
                let home = identify(swap_home(a, b, m)).expect("swapping leaves a Bell pair");
                assert_eq!(swapped_label(a, b, m), home, "{a} {b} {m}");
            }
        }
    }
}

#[test]
fn frame_table_matches_matrices() {
    for p in PAULIS {
        for q in PAULIS {
            for l in LABELS {
                assert_eq!(Some(frame_image(p, q, l)), identify(on_pair(bell(l), p, q)));
            }
        }
    }
}

#[test]
fn decoding_table_reproduced() {
    let sim = simulate_table();
    assert_eq!(sim.len(), 8);
    assert!(diff_table(&sim).is_empty());
    assert!(sim.iter().all(|r| r.deterministic));

    // Exhaustive oracle over both Bob inits, four swap outcomes and four
    // encodings, compared column by column with the reference rows.
    let mut seen = 0;
    for bob in [PsiPlus, PsiMinus] {
        for m in LABELS {
            let row = EXPECTED_TABLE
                .iter()
                .find(|r| r.bob_init == bob && r.bmo1 == m)
                .expect("row present");
            let home = swap_home(PsiPlus, bob, m);
            assert_eq!(identify(home), Some(row.shared));
            for u in PAULIS {
                let bmo2 = identify(on_pair(home, u, PauliLabel::I)).unwrap();
                assert_eq!(bmo2, row.bmo2[u.symbol() as usize]);
                let decoded = decode_message(
                    Some(PsiPlus),
                    Some(bob),
                    Some(m),
                    Some(bmo2),
                    Decoder::Receiver {
                        sender_side: PairSide::First,
                    },
                )
                .unwrap();
                assert_eq!(decoded, u);
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 32);
}

#[test]
fn tampered_expectation_is_caught() {
    let mut sim = simulate_table();
    sim[3].row.bmo2.swap(0, 1);
    let d = diff_table(&sim);
    assert!(!d.is_empty());
    assert!(d.iter().all(|m| m.row == 3));
}
