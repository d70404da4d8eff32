use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::protocol::{Actor, Leg, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisturbMode {
    Reorder,
    RandomPauli,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    InterceptResend,
    /// Ancilla `alpha|0> + beta|1>` used as CNOT control on each travel qubit.
    EntangleMeasure {
        alpha: Complex64,
        beta: Complex64,
    },
    FlipAll,
    Disturb {
        mode: DisturbMode,
        fraction: f64,
    },
    /// Charlie announces random labels instead of measuring on a `fraction`
    /// of the indices in the listed stages.
    FakeBmo {
        stages: Vec<Stage>,
        fraction: f64,
    },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::InterceptResend => "intercept_resend",
            Strategy::EntangleMeasure { .. } => "entangle_measure",
            Strategy::FlipAll => "flip_all",
            Strategy::Disturb { .. } => "disturb",
            Strategy::FakeBmo { .. } => "fake_bmo",
        }
    }

    fn default_legs(&self) -> Vec<Leg> {
        use Actor::{Alice, Bob};
        match self {
            Strategy::InterceptResend => vec![Leg::new(Stage::Swap, Bob)],
            Strategy::EntangleMeasure { .. } | Strategy::Disturb { .. } => {
                vec![
                    Leg::new(Stage::Transmit, Alice),
                    Leg::new(Stage::Transmit, Bob),
                ]
            }
            Strategy::FlipAll => vec![
                Leg::new(Stage::Swap, Alice),
                Leg::new(Stage::Swap, Bob),
                Leg::new(Stage::Transmit, Alice),
                Leg::new(Stage::Transmit, Bob),
            ],
            Strategy::FakeBmo { .. } => Vec::new(),
        }
    }
}

/// An attack together with the channel legs it targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AttackSpec {
    pub strategy: Strategy,
    pub legs: Vec<Leg>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttackSpecError {
    #[error("unknown attack {0:?}")]
    UnknownStrategy(String),
    #[error("bad attack parameter {0:?}")]
    BadParameter(String),
    #[error("ancilla amplitudes are not normalized (|alpha|^2+|beta|^2 = {0})")]
    Unnormalized(f64),
    #[error("fraction {0} is outside (0, 1]")]
    BadFraction(f64),
}

impl AttackSpec {
    pub fn new(strategy: Strategy) -> Result<Self, AttackSpecError> {
        let legs = strategy.default_legs();
        Self::with_legs(strategy, legs)
    }

    pub fn with_legs(strategy: Strategy, legs: Vec<Leg>) -> Result<Self, AttackSpecError> {
        match &strategy {
            Strategy::EntangleMeasure { alpha, beta } => {
                let n = alpha.norm_sqr() + beta.norm_sqr();
                if (n - 1.0).abs() > 1e-9 {
                    return Err(AttackSpecError::Unnormalized(n));
                }
            }
            Strategy::Disturb { fraction, .. } | Strategy::FakeBmo { fraction, .. }
                if !(*fraction > 0.0 && *fraction <= 1.0) =>
            {
                return Err(AttackSpecError::BadFraction(*fraction));
            }
            _ => {}
        }
        Ok(Self { strategy, legs })
    }

    /// Entangle-and-measure with real amplitudes and `|beta|^2 = beta_sq`.
    pub fn entangle_measure(beta_sq: f64) -> Result<Self, AttackSpecError> {
        if !(0.0..=1.0).contains(&beta_sq) {
            return Err(AttackSpecError::BadParameter(format!("beta2={beta_sq}")));
        }
        Self::new(Strategy::EntangleMeasure {
            alpha: Complex64::new((1.0 - beta_sq).sqrt(), 0.0),
            beta: Complex64::new(beta_sq.sqrt(), 0.0),
        })
    }

    pub fn targets(&self, leg: Leg) -> bool {
        self.legs.contains(&leg)
    }
}

fn leg_code(l: &Leg) -> &'static str {
    match (l.stage, l.from) {
        (Stage::Swap, Actor::Alice) => "s1a",
        (Stage::Swap, _) => "s1b",
        (_, Actor::Alice) => "s2a",
        _ => "s2b",
    }
}

fn parse_leg(s: &str) -> Result<Leg, AttackSpecError> {
    Ok(match s {
        "s1a" => Leg::new(Stage::Swap, Actor::Alice),
        "s1b" => Leg::new(Stage::Swap, Actor::Bob),
        "s2a" => Leg::new(Stage::Transmit, Actor::Alice),
        "s2b" => Leg::new(Stage::Transmit, Actor::Bob),
        _ => return Err(AttackSpecError::BadParameter(format!("leg {s}"))),
    })
}

fn parse_f64(key: &str, v: &str) -> Result<f64, AttackSpecError> {
    v.parse()
        .map_err(|_| AttackSpecError::BadParameter(format!("{key}={v}")))
}

impl FromStr for AttackSpec {
    type Err = AttackSpecError;

    /// `NAME[:key=value,...]`, for example `entangle_measure:beta2=0.25` or
    /// `disturb:mode=random_pauli,fraction=0.5,legs=s2a+s2b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let mut kv = Vec::new();
        for part in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| AttackSpecError::BadParameter(part.to_string()))?;
            kv.push((k.trim(), v.trim()));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        for (k, _) in &kv {
            let known = matches!(*k, "legs" | "beta2" | "mode" | "fraction" | "stages");
            if !known {
                return Err(AttackSpecError::BadParameter(k.to_string()));
            }
        }

        let strategy = match name {
            "intercept_resend" => Strategy::InterceptResend,
            "entangle_measure" => {
                let b2 = get("beta2")
                    .map(|v| parse_f64("beta2", v))
                    .transpose()?
                    .unwrap_or(0.5);
                if !(0.0..=1.0).contains(&b2) {
                    return Err(AttackSpecError::BadParameter(format!("beta2={b2}")));
                }
                Strategy::EntangleMeasure {
                    alpha: Complex64::new((1.0 - b2).sqrt(), 0.0),
                    beta: Complex64::new(b2.sqrt(), 0.0),
                }
            }
            "flip_all" => Strategy::FlipAll,
            "disturb" => {
                let mode = match get("mode").unwrap_or("random_pauli") {
                    "reorder" => DisturbMode::Reorder,
                    "random_pauli" => DisturbMode::RandomPauli,
                    m => return Err(AttackSpecError::BadParameter(format!("mode={m}"))),
                };
                let fraction = get("fraction")
                    .map(|v| parse_f64("fraction", v))
                    .transpose()?
                    .unwrap_or(1.0);
                Strategy::Disturb { mode, fraction }
            }
            "fake_bmo" => {
                let stages = match get("stages") {
                    None => vec![Stage::Swap],
                    Some(v) => v
                        .split('+')
                        .map(|s| s.parse::<Stage>().map_err(AttackSpecError::BadParameter))
                        .collect::<Result<_, _>>()?,
                };
                let fraction = get("fraction")
                    .map(|v| parse_f64("fraction", v))
                    .transpose()?
                    .unwrap_or(1.0);
                Strategy::FakeBmo { stages, fraction }
            }
            other => return Err(AttackSpecError::UnknownStrategy(other.to_string())),
        };
        match get("legs") {
            Some(v) => {
                let legs = v.split('+').map(parse_leg).collect::<Result<_, _>>()?;
                Self::with_legs(strategy, legs)
            }
            None => Self::new(strategy),
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut params: Vec<String> = Vec::new();
        match &self.strategy {
            Strategy::EntangleMeasure { beta, .. } => {
                params.push(format!("beta2={}", beta.norm_sqr()))
            }
            Strategy::Disturb { mode, fraction } => {
                let m = match mode {
                    DisturbMode::Reorder => "reorder",
                    DisturbMode::RandomPauli => "random_pauli",
                };
                params.push(format!("mode={m}"));
                params.push(format!("fraction={fraction}"));
            }
            Strategy::FakeBmo { stages, fraction } => {
                let s: Vec<String> = stages.iter().map(|s| s.to_string()).collect();
                params.push(format!("stages={}", s.join("+")));
                params.push(format!("fraction={fraction}"));
            }
            _ => {}
        }
        if !self.legs.is_empty() {
            let l: Vec<&str> = self.legs.iter().map(leg_code).collect();
            params.push(format!("legs={}", l.join("+")));
        }
        if params.is_empty() {
            write!(f, "{}", self.strategy.name())
        } else {
            write!(f, "{}:{}", self.strategy.name(), params.join(","))
        }
    }
}

impl TryFrom<String> for AttackSpec {
    type Error = AttackSpecError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AttackSpec> for String {
    fn from(a: AttackSpec) -> String {
        a.to_string()
    }
}
