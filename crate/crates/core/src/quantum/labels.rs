use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumError;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The four Bell states.
///
/// Labeling is normative for the whole crate and differs from the usual
/// textbook naming: the `Psi` pair lives on `|00>, |11>` and the `Phi` pair
/// on `|01>, |10>`.
///
/// | label      | state                 |
/// |------------|-----------------------|
/// | `PsiPlus`  | (\|00> + \|11>)/sqrt2 |
/// | `PsiMinus` | (\|00> - \|11>)/sqrt2 |
/// | `PhiPlus`  | (\|01> + \|10>)/sqrt2 |
/// | `PhiMinus` | (\|01> - \|10>)/sqrt2 |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "psi+", alias = "PsiPlus")]
    PsiPlus,
    #[serde(rename = "psi-", alias = "PsiMinus")]
    PsiMinus,
    #[serde(rename = "phi+", alias = "PhiPlus")]
    PhiPlus,
    #[serde(rename = "phi-", alias = "PhiMinus")]
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// Amplitudes over `|00>, |01>, |10>, |11>`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let z = Complex64::new(0.0, 0.0);
        let p = Complex64::new(H, 0.0);
        let m = Complex64::new(-H, 0.0);
        match self {
            BellLabel::PsiPlus => [p, z, z, p],
            BellLabel::PsiMinus => [p, z, z, m],
            BellLabel::PhiPlus => [z, p, p, z],
            BellLabel::PhiMinus => [z, p, m, z],
        }
    }

    /// Computational-basis parity of the state: `false` when both qubits
    /// always read the same bit, `true` when they always differ.
    pub fn anticorrelated(self) -> bool {
        matches!(self, BellLabel::PhiPlus | BellLabel::PhiMinus)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn short_name(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for BellLabel {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "").as_str() {
            "psi+" | "psiplus" => Ok(BellLabel::PsiPlus),
            "psi-" | "psiminus" => Ok(BellLabel::PsiMinus),
            "phi+" | "phiplus" => Ok(BellLabel::PhiPlus),
            "phi-" | "phiminus" => Ok(BellLabel::PhiMinus),
            _ => Err(QuantumError::UnknownLabel(s.to_string())),
        }
    }
}

/// Encoding operators. `IY` is `i*Y`, so every matrix is real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLabel {
    I,
    X,
    #[serde(rename = "iY")]
    IY,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::IY, PauliLabel::Z];

    /// Two-bit symbol carried by this operator: I=00, X=01, iY=10, Z=11.
    pub fn symbol(self) -> u8 {
        self as u8
    }

    pub fn from_symbol(bits: u8) -> Option<Self> {
        Self::ALL.get(bits as usize).copied()
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            PauliLabel::I => [[o, z], [z, o]],
            PauliLabel::X => [[z, o], [o, z]],
            // iY|0> = -|1>, iY|1> = |0>
            PauliLabel::IY => [[z, o], [-o, z]],
            PauliLabel::Z => [[o, z], [z, -o]],
        }
    }

    /// Flips computational-basis bits (X and iY do, I and Z do not).
    pub fn flips_bit(self) -> bool {
        matches!(self, PauliLabel::X | PauliLabel::IY)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            PauliLabel::I => "I",
            PauliLabel::X => "X",
            PauliLabel::IY => "iY",
            PauliLabel::Z => "Z",
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for PauliLabel {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "i" => Ok(PauliLabel::I),
            "X" | "x" => Ok(PauliLabel::X),
            "iY" | "IY" | "iy" => Ok(PauliLabel::IY),
            "Z" | "z" => Ok(PauliLabel::Z),
            _ => Err(QuantumError::UnknownLabel(s.to_string())),
        }
    }
}
