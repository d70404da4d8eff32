use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quantum::{make_bell, BellLabel, QuantumError, QubitId, Unitary2};

/// Collective noise: the same unitary hits every qubit crossing a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NoiseSpec {
    CollectiveDephasing(f64),
    CollectiveRotation(f64),
}

impl NoiseSpec {
    pub fn unitary(&self) -> Unitary2 {
        match *self {
            NoiseSpec::CollectiveDephasing(phi) => Unitary2::dephasing(phi),
            NoiseSpec::CollectiveRotation(theta) => Unitary2::rotation(theta),
        }
    }

    pub fn with_parameter(&self, x: f64) -> Self {
        match self {
            NoiseSpec::CollectiveDephasing(_) => NoiseSpec::CollectiveDephasing(x),
            NoiseSpec::CollectiveRotation(_) => NoiseSpec::CollectiveRotation(x),
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseSpec::CollectiveDephasing(x) | NoiseSpec::CollectiveRotation(x) => x,
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::CollectiveDephasing(x) => write!(f, "dephasing:{x}"),
            NoiseSpec::CollectiveRotation(x) => write!(f, "rotation:{x}"),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, param) = s
            .split_once(':')
            .ok_or_else(|| format!("noise {s:?} must look like NAME:PARAM"))?;
        let x = crate::cli::parse_angle(param)?;
        match name.trim() {
            "dephasing" => Ok(NoiseSpec::CollectiveDephasing(x)),
            "rotation" => Ok(NoiseSpec::CollectiveRotation(x)),
            other => Err(format!("unknown noise channel {other:?}")),
        }
    }
}

impl TryFrom<String> for NoiseSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NoiseSpec> for String {
    fn from(n: NoiseSpec) -> String {
        n.to_string()
    }
}

/// Which qubits of the pair the channel touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseTarget {
    /// Both halves travel (whole-pair decoys).
    BothQubits,
    /// Only the second half travels (split decoys).
    TravelHalf,
}

/// Fidelity of `label` after the channel, for each grid parameter.
pub fn noise_fidelity(
    label: BellLabel,
    spec: NoiseSpec,
    target: NoiseTarget,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, QuantumError> {
    let (a, b) = (QubitId(0), QubitId(1));
    let prepared = make_bell(label, a, b)?;
    grid.iter()
        .map(|&x| {
            let u = spec.with_parameter(x).unitary();
            let mut s = prepared.apply_unitary1q(b, &u)?;
            if target == NoiseTarget::BothQubits {
                s = s.apply_unitary1q(a, &u)?;
            }
            Ok((x, s.fidelity(&prepared)?))
        })
        .collect()
}
