//! Failure probabilities of each attack, by brute force on explicit
//! states.

use osbmdi::quantum::{BellLabel, PauliLabel};
use BellLabel::PsiPlus;

use super::{bell, identify, pauli, swap_home, Real, LABELS};

pub fn expected_parity(m: BellLabel) -> bool {
    identify(swap_home(PsiPlus, PsiPlus, m))
        .unwrap()
        .anticorrelated()
}

/// Swap-stage CaseI check when Eve keeps Bob's travel qubit and forwards
/// half of her own pair. Qubits: a1 a2 b1 b2 e1 e2.
pub fn intercept_resend_oracle() -> f64 {
    let s = Real::from_pairs(&[bell(PsiPlus), bell(PsiPlus), bell(PsiPlus)]);
    let mut fail = 0.0;
    for m in LABELS {
        for xa in 0..2 {
            for xb in 0..2 {
                if (xa != xb) != expected_parity(m) {
                    fail += s.prob(&[(1, 5, m)], &[(0, xa), (2, xb)]);
                }
            }
        }
    }
    fail
}

/// Same check when Charlie ignores the true outcome and announces a
/// uniformly random label. Qubits: a1 a2 b1 b2.
pub fn fake_bmo_oracle() -> f64 {
    let s = Real::from_pairs(&[bell(PsiPlus), bell(PsiPlus)]);
    let mut fail = 0.0;
    for m in LABELS {
        for fake in LABELS {
            for xa in 0..2 {
                for xb in 0..2 {
                    if (xa != xb) != expected_parity(fake) {
                        fail += 0.25 * s.prob(&[(1, 3, m)], &[(0, xa), (2, xb)]);
                    }
                }
            }
        }
    }
    fail
}

/// Split decoy `psi+` on (home, travel), ancilla as CNOT control on the
/// travel half; failure is a parity flip between the halves.
pub fn entangle_split_oracle(b2: f64) -> f64 {
    let s = Real::from_pairs(&[bell(PsiPlus)])
        .tensor_qubit((1.0 - b2).sqrt(), b2.sqrt())
        .cnot(2, 1);
    s.prob(&[], &[(0, 0), (1, 1)]) + s.prob(&[], &[(0, 1), (1, 0)])
}

/// Whole pair with an ancilla on each half.
pub fn entangle_whole_oracle(b2: f64) -> f64 {
    let (a, b) = ((1.0 - b2).sqrt(), b2.sqrt());
    let s = Real::from_pairs(&[bell(PsiPlus)])
        .tensor_qubit(a, b)
        .tensor_qubit(a, b)
        .cnot(2, 0)
        .cnot(3, 1);
    1.0 - s.prob(&[(0, 1, PsiPlus)], &[])
}

pub fn split_fail_after(p: PauliLabel) -> f64 {
    let s = Real::from_pairs(&[bell(PsiPlus)]).apply(1, pauli(p));
    s.prob(&[], &[(0, 0), (1, 1)]) + s.prob(&[], &[(0, 1), (1, 0)])
}

pub fn whole_fail_after(p: PauliLabel, q: PauliLabel) -> f64 {
    let s = Real::from_pairs(&[bell(PsiPlus)])
        .apply(0, pauli(p))
        .apply(1, pauli(q));
    1.0 - s.prob(&[(0, 1, PsiPlus)], &[])
}

pub const HITS: [PauliLabel; 3] = [PauliLabel::X, PauliLabel::IY, PauliLabel::Z];

/// Rank of the post-CNOT decoy-plus-ancilla state across the ancilla cut,
/// from the determinant of the 2x2 reduced Gram matrix.
pub fn ancilla_cut_rank(alpha: f64, beta: f64) -> usize {
    let s = Real::from_pairs(&[bell(PsiPlus)])
        .tensor_qubit(alpha, beta)
        .cnot(2, 1);
    // rows: ancilla bit; columns: (home, travel)
    let m: Vec<[f64; 4]> = (0..2)
        .map(|e| [0, 1, 2, 3].map(|ht| s.amps[ht * 2 + e]))
        .collect();
    let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let det = dot(&m[0], &m[0]) * dot(&m[1], &m[1]) - dot(&m[0], &m[1]).powi(2);
    let nonzero_rows = m.iter().filter(|r| dot(r, r) > 1e-12).count();
    if det > 1e-12 {
        2
    } else {
        nonzero_rows.min(1)
    }
}
