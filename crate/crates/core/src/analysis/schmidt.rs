use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::quantum::{BellLabel, QuantumError, QubitId, StateVector};

/// Schmidt coefficients of `state` across `cut` versus the rest, largest
/// first.
pub fn schmidt_coefficients(
    state: &StateVector,
    cut: &[QubitId],
) -> Result<Vec<f64>, QuantumError> {
    for q in cut {
        if !state.contains(*q) {
            return Err(QuantumError::UnknownQubit(*q));
        }
    }
    let rest: Vec<QubitId> = state
        .qubits()
        .iter()
        .copied()
        .filter(|q| !cut.contains(q))
        .collect();
    let order: Vec<QubitId> = cut.iter().chain(&rest).copied().collect();
    let s = state.permuted(&order)?;
    let rows = 1usize << cut.len();
    let cols = 1usize << rest.len();
    // row-major amplitudes, first qubit most significant
    let m = DMatrix::from_fn(rows, cols, |r, c| s.amplitudes()[r * cols + c]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn schmidt_rank(coeffs: &[f64], tol: f64) -> usize {
    coeffs.iter().filter(|&&c| c > tol).count()
}

/// Entangle-and-measure on one travelling half of a decoy, worked out on
/// the explicit three-qubit state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackAnalysis {
    pub beta_sq: f64,
    pub schmidt_coefficients: Vec<f64>,
    pub schmidt_rank: usize,
    /// `|beta|^2`.
    pub theoretical_rate: f64,
    /// Probability the pair no longer shows its prepared label.
    pub exact_rate: f64,
}

pub fn entangle_measure_analysis(
    alpha: Complex64,
    beta: Complex64,
    label: BellLabel,
) -> Result<AttackAnalysis, QuantumError> {
    let (h, t, e) = (QubitId(0), QubitId(1), QubitId(2));
    let s = StateVector::bell(label, h, t)?
        .tensor(&StateVector::single(e, alpha, beta)?)?
        .apply_cnot(e, t)?;
    let coeffs = schmidt_coefficients(&s, &[e])?;
    let probs = s.bell_probabilities(h, t)?;
    Ok(AttackAnalysis {
        beta_sq: beta.norm_sqr(),
        schmidt_rank: schmidt_rank(&coeffs, 1e-9),
        schmidt_coefficients: coeffs,
        theoretical_rate: beta.norm_sqr(),
        exact_rate: (1.0 - probs[label.index()]).max(0.0),
    })
}
