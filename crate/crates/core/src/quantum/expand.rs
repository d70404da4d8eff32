use num_complex::Complex64;

use super::labels::BellLabel;
use super::state::{QubitId, StateVector};
use super::QuantumError;

/// Coefficients of a 4-qubit state in a Bell-times-Bell basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BellExpansion {
    pub pairing: ((QubitId, QubitId), (QubitId, QubitId)),
    /// `coeffs[first.index()][second.index()]`.
    pub coeffs: [[Complex64; 4]; 4],
}

impl BellExpansion {
    pub fn coeff(&self, first: BellLabel, second: BellLabel) -> Complex64 {
        self.coeffs[first.index()][second.index()]
    }

    /// Terms with modulus above `tol`, in label order.
    pub fn nonzero(&self, tol: f64) -> Vec<(BellLabel, BellLabel, Complex64)> {
        let mut out = Vec::new();
        for a in BellLabel::ALL {
            for b in BellLabel::ALL {
                let c = self.coeff(a, b);
                if c.norm() > tol {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// Rebuilds the state from the coefficients, registered as
    /// `[p1.0, p1.1, p2.0, p2.1]`.
    pub fn resum(&self) -> Result<StateVector, QuantumError> {
        let ((a, b), (c, d)) = self.pairing;
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        for l1 in BellLabel::ALL {
            let v1 = l1.amplitudes();
            for l2 in BellLabel::ALL {
                let v2 = l2.amplitudes();
                let k = self.coeff(l1, l2);
                for x in 0..4 {
                    for y in 0..4 {
                        amps[x * 4 + y] += k * v1[x] * v2[y];
                    }
                }
            }
        }
        StateVector::new(vec![a, b, c, d], amps)
    }
}

/// Expands a 4-qubit state in the Bell basis of two disjoint pairs.
pub fn bell_expand(
    s: &StateVector,
    pairing: ((QubitId, QubitId), (QubitId, QubitId)),
) -> Result<BellExpansion, QuantumError> {
    if s.num_qubits() != 4 {
        return Err(QuantumError::InvalidRegister(format!(
            "bell expansion needs 4 qubits, got {}",
            s.num_qubits()
        )));
    }
    let ((a, b), (c, d)) = pairing;
    let order = [a, b, c, d];
    for (i, q) in order.iter().enumerate() {
        if order[..i].contains(q) || !s.contains(*q) {
            return Err(QuantumError::InvalidRegister(
                "pairing is not a partition of the register".into(),
            ));
        }
    }
    let s = s.permuted(&order)?;
    let amps = s.amplitudes();
    let mut coeffs = [[Complex64::new(0.0, 0.0); 4]; 4];
    for l1 in BellLabel::ALL {
        let v1 = l1.amplitudes();
        for l2 in BellLabel::ALL {
            let v2 = l2.amplitudes();
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..4 {
                for y in 0..4 {
                    acc += v1[x].conj() * v2[y].conj() * amps[x * 4 + y];
                }
            }
            coeffs[l1.index()][l2.index()] = acc;
        }
    }
    Ok(BellExpansion { pairing, coeffs })
}
