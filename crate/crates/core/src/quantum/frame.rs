//! Label-level algebra derived from the state-vector engine: how Paulis
//! permute Bell labels, and which label entanglement swapping leaves behind.
//!
//! Tables are computed once by simulating every case, never typed in.

use std::sync::OnceLock;

use super::expand::bell_expand;
use super::labels::{BellLabel, PauliLabel};
use super::state::{QubitId, StateVector};

/// Which qubit of a pair an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    First,
    Second,
}

// [first pauli][second pauli][label] -> label
type FrameTable = [[[BellLabel; 4]; 4]; 4];
// [left init][right init][outcome on (2,4)] -> label on (1,3)
type SwapTable = [[[BellLabel; 4]; 4]; 4];

fn frame_table() -> &'static FrameTable {
    static TABLE: OnceLock<FrameTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (a, b) = (QubitId(0), QubitId(1));
        let mut t = [[[BellLabel::PsiPlus; 4]; 4]; 4];
        for p in PauliLabel::ALL {
            for q in PauliLabel::ALL {
                for l in BellLabel::ALL {
                    let s = StateVector::bell(l, a, b)
                        .and_then(|s| s.apply_pauli(a, p))
                        .and_then(|s| s.apply_pauli(b, q))
                        .expect("2-qubit pauli");
                    t[p as usize][q as usize][l.index()] = s
                        .identify_bell()
                        .expect("Pauli frame closes on Bell labels");
                }
            }
        }
        t
    })
}

fn swap_table() -> &'static SwapTable {
    static TABLE: OnceLock<SwapTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let q: Vec<QubitId> = (1..=4).map(QubitId).collect();
        let mut t = [[[BellLabel::PsiPlus; 4]; 4]; 4];
        for l in BellLabel::ALL {
            for r in BellLabel::ALL {
                let s = StateVector::bell(l, q[0], q[1])
                    .and_then(|x| x.tensor(&StateVector::bell(r, q[2], q[3])?))
                    .expect("4-qubit product");
                let e = bell_expand(&s, ((q[0], q[2]), (q[1], q[3]))).expect("valid pairing");
                for m in BellLabel::ALL {
                    let home: Vec<BellLabel> = BellLabel::ALL
                        .into_iter()
                        .filter(|&h| e.coeff(h, m).norm() > 1e-9)
                        .collect();
                    assert_eq!(home.len(), 1, "swapping leaves a unique home label");
                    t[l.index()][r.index()][m.index()] = home[0];
                }
            }
        }
        t
    })
}

/// Label after applying `first` to the first qubit and `second` to the
/// second qubit of a pair in state `label` (global phase dropped).
pub fn frame_image(first: PauliLabel, second: PauliLabel, label: BellLabel) -> BellLabel {
    frame_table()[first as usize][second as usize][label.index()]
}

pub fn pauli_image(p: PauliLabel, side: PairSide, label: BellLabel) -> BellLabel {
    match side {
        PairSide::First => frame_image(p, PauliLabel::I, label),
        PairSide::Second => frame_image(PauliLabel::I, p, label),
    }
}

/// Home-pair label after entanglement swapping.
///
/// `left` is the state of `(1, 2)`, `right` the state of `(3, 4)` and
/// `outcome` the Bell result on `(2, 4)`; the return is the state of
/// `(1, 3)`.
pub fn swapped_label(left: BellLabel, right: BellLabel, outcome: BellLabel) -> BellLabel {
    swap_table()[left.index()][right.index()][outcome.index()]
}

/// The unique operator on `side` mapping `from` to `to`.
pub fn solve_pauli(from: BellLabel, to: BellLabel, side: PairSide) -> PauliLabel {
    PauliLabel::ALL
        .into_iter()
        .find(|&p| pauli_image(p, side, from) == to)
        .expect("Pauli frame acts transitively on Bell labels")
}

/// Given the shared label, the decoder's own operator (on `own_side`) and
/// the observed label, the partner's operator on the other side.
pub fn solve_partner(
    shared: BellLabel,
    own: PauliLabel,
    own_side: PairSide,
    observed: BellLabel,
) -> PauliLabel {
    let after_own = pauli_image(own, own_side, shared);
    let other = match own_side {
        PairSide::First => PairSide::Second,
        PairSide::Second => PairSide::First,
    };
    solve_pauli(after_own, observed, other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BellLabel::*;
    use PauliLabel::*;

    #[test]
    fn first_qubit_images() {
        assert_eq!(pauli_image(X, PairSide::First, PsiPlus), PhiPlus);
        assert_eq!(pauli_image(IY, PairSide::First, PsiPlus), PhiMinus);
        assert_eq!(pauli_image(Z, PairSide::First, PsiPlus), PsiMinus);
    }

    #[test]
    fn xx_fixes_every_label() {
        for l in BellLabel::ALL {
            assert_eq!(frame_image(X, X, l), l);
        }
    }

    #[test]
    fn side_does_not_change_label_action() {
        // P on the second qubit equals +-P^T on the first; P^T ~ P up to sign
        for p in PauliLabel::ALL {
            for l in BellLabel::ALL {
                assert_eq!(
                    pauli_image(p, PairSide::First, l),
                    pauli_image(p, PairSide::Second, l)
                );
            }
        }
    }

    #[test]
    fn swapping_examples() {
        assert_eq!(swapped_label(PsiPlus, PsiPlus, PhiMinus), PhiMinus);
        assert_eq!(swapped_label(PsiPlus, PsiMinus, PsiMinus), PsiPlus);
        assert_eq!(swapped_label(PsiPlus, PsiMinus, PhiMinus), PhiPlus);
    }

    #[test]
    fn partner_solution_is_consistent() {
        for s in BellLabel::ALL {
            for a in PauliLabel::ALL {
                for b in PauliLabel::ALL {
                    let obs = frame_image(a, b, s);
                    assert_eq!(solve_partner(s, a, PairSide::First, obs), b);
                    assert_eq!(solve_partner(s, b, PairSide::Second, obs), a);
                }
            }
        }
    }
}
