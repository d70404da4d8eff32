use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::adversary::AttackSpec;
use crate::analysis::NoiseSpec;
use crate::quantum::BellLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One-way direct communication, Alice to Bob.
    Qsdc,
    /// Two-way dialogue over the same pairs.
    Qd,
    /// Direct communication of random bits used as key.
    Qkd,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Qsdc => "qsdc",
            Mode::Qd => "qd",
            Mode::Qkd => "qkd",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qsdc" => Ok(Mode::Qsdc),
            "qd" => Ok(Mode::Qd),
            "qkd" => Ok(Mode::Qkd),
            _ => Err(format!("unknown mode {s:?} (expected qsdc, qd or qkd)")),
        }
    }
}

/// How decoy pairs are prepared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DecoyPolicy {
    Fixed(BellLabel),
    /// Each decoy drawn uniformly from the set.
    Random(Vec<BellLabel>),
}

impl Default for DecoyPolicy {
    fn default() -> Self {
        DecoyPolicy::Fixed(BellLabel::PsiPlus)
    }
}

impl fmt::Display for DecoyPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoyPolicy::Fixed(l) => write!(f, "{l}"),
            DecoyPolicy::Random(set) => {
                let s: Vec<String> = set.iter().map(|l| l.to_string()).collect();
                write!(f, "random:{}", s.join(","))
            }
        }
    }
}

impl FromStr for DecoyPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("random:") {
            Some(rest) => Ok(DecoyPolicy::Random(parse_label_set(rest)?)),
            None if s == "random" => Ok(DecoyPolicy::Random(BellLabel::ALL.to_vec())),
            None => s.parse().map(DecoyPolicy::Fixed).map_err(|e| e.to_string()),
        }
    }
}

impl TryFrom<String> for DecoyPolicy {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<DecoyPolicy> for String {
    fn from(d: DecoyPolicy) -> String {
        d.to_string()
    }
}

pub fn parse_label_set(s: &str) -> Result<Vec<BellLabel>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let l: BellLabel = part
            .parse()
            .map_err(|e: crate::quantum::QuantumError| e.to_string())?;
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Ok(out)
}

/// Everything needed to run a session. Serializes as the `[session]` table
/// of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SessionConfig {
    /// Message pairs per party; must be positive and even.
    pub n_pairs: usize,
    pub mode: Mode,
    pub alice_states: Vec<BellLabel>,
    pub bob_states: Vec<BellLabel>,
    pub decoy_policy: DecoyPolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// A check stage aborts when its error rate exceeds this.
    pub error_threshold: f64,
    pub master_seed: u64,
    /// Reuse mixed-case slots as message pairs instead of checking them.
    pub use_cases_ii_iii_for_message: bool,
    /// Split decoys per party in the transmit stage; `None` means `n_pairs / 4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_decoys: Option<usize>,
    /// Message pairs Alice leaves unencoded for a transmit-stage check.
    pub unencoded_checks: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            n_pairs: 8,
            mode: Mode::Qsdc,
            alice_states: vec![BellLabel::PsiPlus],
            bob_states: vec![BellLabel::PsiPlus, BellLabel::PsiMinus],
            decoy_policy: DecoyPolicy::default(),
            attack: None,
            noise: None,
            error_threshold: 0.0,
            master_seed: 0,
            use_cases_ii_iii_for_message: false,
            split_decoys: None,
            unencoded_checks: 0,
        }
    }
}

impl SessionConfig {
    pub fn split_decoy_count(&self) -> usize {
        self.split_decoys.unwrap_or(self.n_pairs / 4)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |m: String| Err(ProtocolError::InvalidConfig(m));
        if self.n_pairs == 0 || !self.n_pairs.is_multiple_of(2) {
            return bad(format!(
                "n_pairs must be positive and even, got {}",
                self.n_pairs
            ));
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return bad(format!(
                "error_threshold {} outside [0, 1]",
                self.error_threshold
            ));
        }
        if self.alice_states.is_empty() || self.bob_states.is_empty() {
            return bad("state sets must be nonempty".into());
        }
        if let DecoyPolicy::Random(set) = &self.decoy_policy {
            if set.is_empty() {
                return bad("random decoy policy needs at least one label".into());
            }
        }
        if self.split_decoy_count() > self.n_pairs / 2 {
            return bad(format!(
                "split_decoys {} exceeds the {} transmit-stage decoys",
                self.split_decoy_count(),
                self.n_pairs / 2
            ));
        }
        Ok(())
    }
}
