use num_complex::Complex64;

use super::labels::PauliLabel;
use super::{QuantumError, AMPLITUDE_TOL};

/// A validated single-qubit unitary, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary2([[Complex64; 2]; 2]);

impl Unitary2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self, QuantumError> {
        // U^dagger U == I
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - Complex64::new(want, 0.0)).norm() > AMPLITUDE_TOL {
                    return Err(QuantumError::InvalidOperator);
                }
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }

    pub fn pauli(p: PauliLabel) -> Self {
        Self(p.matrix())
    }

    /// Collective dephasing: `|0> -> |0>`, `|1> -> e^{i phi}|1>`.
    pub fn dephasing(phi: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self([
            [Complex64::new(1.0, 0.0), z],
            [z, Complex64::from_polar(1.0, phi)],
        ])
    }

    /// Collective rotation: `|0> -> cos|0> + sin|1>`, `|1> -> -sin|0> + cos|1>`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_are_unitary() {
        for x in [0.0, 0.3, 1.7, -2.2, std::f64::consts::PI] {
            assert!(Unitary2::new(*Unitary2::dephasing(x).matrix()).is_ok());
            assert!(Unitary2::new(*Unitary2::rotation(x).matrix()).is_ok());
        }
        for p in PauliLabel::ALL {
            assert!(Unitary2::new(p.matrix()).is_ok());
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(
            Unitary2::new([[o, o], [z, o]]),
            Err(QuantumError::InvalidOperator)
        );
    }
}
