//! Reference decoding table for Alice's fixed `psi+` and Bob's two choices,
//! kept as data to diff the simulator against.

use super::decode::{decode_message, Decoder};
use crate::quantum::{BellLabel, PairSide, PauliLabel, QubitId, StateVector};
use BellLabel::*;

/// One row: initial labels, swap outcome on `(2,4)`, shared label on
/// `(1,3)`, and the final outcome for each of `I`, `X`, `iY`, `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub alice_init: BellLabel,
    pub bob_init: BellLabel,
    pub bmo1: BellLabel,
    pub shared: BellLabel,
    pub bmo2: [BellLabel; 4],
}

const fn row(
    bob_init: BellLabel,
    bmo1: BellLabel,
    shared: BellLabel,
    bmo2: [BellLabel; 4],
) -> TableRow {
    TableRow {
        alice_init: PsiPlus,
        bob_init,
        bmo1,
        shared,
        bmo2,
    }
}

pub const EXPECTED_TABLE: [TableRow; 8] = [
    row(
        PsiPlus,
        PsiPlus,
        PsiPlus,
        [PsiPlus, PhiPlus, PhiMinus, PsiMinus],
    ),
    row(
        PsiPlus,
        PhiPlus,
        PhiPlus,
        [PhiPlus, PsiPlus, PsiMinus, PhiMinus],
    ),
    row(
        PsiPlus,
        PhiMinus,
        PhiMinus,
        [PhiMinus, PsiMinus, PsiPlus, PhiPlus],
    ),
    row(
        PsiPlus,
        PsiMinus,
        PsiMinus,
        [PsiMinus, PhiMinus, PhiPlus, PsiPlus],
    ),
    row(
        PsiMinus,
        PsiMinus,
        PsiPlus,
        [PsiPlus, PhiPlus, PhiMinus, PsiMinus],
    ),
    row(
        PsiMinus,
        PhiMinus,
        PhiPlus,
        [PhiPlus, PsiPlus, PsiMinus, PhiMinus],
    ),
    row(
        PsiMinus,
        PhiPlus,
        PhiMinus,
        [PhiMinus, PsiMinus, PsiPlus, PhiPlus],
    ),
    row(
        PsiMinus,
        PsiPlus,
        PsiMinus,
        [PsiMinus, PhiMinus, PhiPlus, PsiPlus],
    ),
];

/// A simulated row disagreeing with the expected data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub row: usize,
    pub column: &'static str,
    pub expected: String,
    pub got: String,
}

/// A row as the state-vector engine produces it, plus the operator the
/// decoder recovers for each final outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulatedRow {
    pub row: TableRow,
    pub decoded: [PauliLabel; 4],
    /// Whether every final outcome had probability one.
    pub deterministic: bool,
}

fn certain_outcome(s: &StateVector, a: QubitId, b: QubitId) -> Option<BellLabel> {
    let probs = s.bell_probabilities(a, b).ok()?;
    BellLabel::ALL
        .into_iter()
        .find(|l| (probs[l.index()] - 1.0).abs() < 1e-9)
}

/// Recomputes every row by swapping and encoding on explicit state vectors.
pub fn simulate_table() -> Vec<SimulatedRow> {
    let q: Vec<QubitId> = (1..=4).map(QubitId).collect();
    EXPECTED_TABLE
        .iter()
        .map(|r| {
            let product = StateVector::bell(r.alice_init, q[0], q[1])
                .and_then(|x| x.tensor(&StateVector::bell(r.bob_init, q[2], q[3])?))
                .expect("4-qubit product");
            let home = product
                .collapse_bell(q[1], q[3], r.bmo1)
                .expect("valid pair")
                .expect("every swap outcome is possible");
            let mut deterministic = true;
            let shared = home.identify_bell().unwrap_or_else(|| {
                deterministic = false;
                r.shared
            });
            let mut bmo2 = [shared; 4];
            let mut decoded = [PauliLabel::I; 4];
            for p in PauliLabel::ALL {
                let k = p.symbol() as usize;
                let encoded = home.apply_pauli(q[0], p).expect("qubit present");
                match certain_outcome(&encoded, q[0], q[2]) {
                    Some(l) => bmo2[k] = l,
                    None => deterministic = false,
                }
                decoded[k] = decode_message(
                    Some(r.alice_init),
                    Some(r.bob_init),
                    Some(r.bmo1),
                    Some(bmo2[k]),
                    Decoder::Receiver {
                        sender_side: PairSide::First,
                    },
                )
                .expect("all labels known");
            }
            SimulatedRow {
                row: TableRow { shared, bmo2, ..*r },
                decoded,
                deterministic,
            }
        })
        .collect()
}

pub fn diff_table(got: &[SimulatedRow]) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for (i, (e, sim)) in EXPECTED_TABLE.iter().zip(got).enumerate() {
        let g = &sim.row;
        if !sim.deterministic {
            out.push(Mismatch {
                row: i,
                column: "deterministic",
                expected: "true".into(),
                got: "false".into(),
            });
        }
        if e.shared != g.shared {
            out.push(Mismatch {
                row: i,
                column: "shared",
                expected: e.shared.to_string(),
                got: g.shared.to_string(),
            });
        }
        for (k, p) in PauliLabel::ALL.iter().enumerate() {
            if e.bmo2[k] != g.bmo2[k] {
                out.push(Mismatch {
                    row: i,
                    column: p.short_name(),
                    expected: e.bmo2[k].to_string(),
                    got: g.bmo2[k].to_string(),
                });
            }
            if sim.decoded[k] != *p {
                out.push(Mismatch {
                    row: i,
                    column: "decoded",
                    expected: p.to_string(),
                    got: sim.decoded[k].to_string(),
                });
            }
        }
    }
    if got.len() != EXPECTED_TABLE.len() {
        out.push(Mismatch {
            row: got.len().min(EXPECTED_TABLE.len()),
            column: "rows",
            expected: EXPECTED_TABLE.len().to_string(),
            got: got.len().to_string(),
        });
    }
    out
}
