use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::quantum::{BellLabel, PauliLabel, QuantumRegistry, QubitId, Unitary2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Actor {
    Alice,
    Bob,
    Charlie,
    Eve,
    /// Qubits in flight on a quantum channel.
    Channel,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Actor::Alice => "alice",
            Actor::Bob => "bob",
            Actor::Charlie => "charlie",
            Actor::Eve => "eve",
            Actor::Channel => "channel",
        })
    }
}

impl FromStr for Actor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "alice" => Actor::Alice,
            "bob" => Actor::Bob,
            "charlie" => Actor::Charlie,
            "eve" => Actor::Eve,
            "channel" => Actor::Channel,
            _ => return Err(format!("unknown actor {s:?}")),
        })
    }
}

/// Protocol phases that carry announcements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// State sharing that precedes a dialogue.
    Nested,
    /// Travel-qubit transmission, swapping measurement and correlation check.
    Swap,
    /// Encoded-sequence transmission and decoy check.
    Transmit,
    /// Final measurement of the encoded pairs.
    Decode,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Nested => "nested",
            Stage::Swap => "swap",
            Stage::Transmit => "transmit",
            Stage::Decode => "decode",
        })
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "nested" => Stage::Nested,
            "swap" => Stage::Swap,
            "transmit" => Stage::Transmit,
            "decode" => Stage::Decode,
            _ => return Err(format!("unknown stage {s:?}")),
        })
    }
}

/// One quantum channel use: a party sending to Charlie in a given stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub stage: Stage,
    pub from: Actor,
}

impl Leg {
    pub fn new(stage: Stage, from: Actor) -> Self {
        Self { stage, from }
    }
}

/// Qubit registry plus custody: every live qubit is held by exactly one
/// actor, and only the holder may operate on it.
#[derive(Debug, Default)]
pub struct Network {
    reg: QuantumRegistry,
    holder: BTreeMap<QubitId, Actor>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn registry(&self) -> &QuantumRegistry {
        &self.reg
    }

    pub fn holder(&self, q: QubitId) -> Option<Actor> {
        self.holder.get(&q).copied()
    }

    pub fn held_by(&self, who: Actor) -> usize {
        self.holder.values().filter(|&&a| a == who).count()
    }

    fn require(&self, who: Actor, q: QubitId) -> Result<(), ProtocolError> {
        match self.holder.get(&q) {
            Some(&h) if h == who => Ok(()),
            Some(&h) => Err(ProtocolError::Custody {
                qubit: q,
                holder: Some(h),
                actor: who,
            }),
            None => Err(ProtocolError::Custody {
                qubit: q,
                holder: None,
                actor: who,
            }),
        }
    }

    pub fn prepare_bell(&mut self, who: Actor, label: BellLabel) -> (QubitId, QubitId) {
        let (a, b) = self.reg.prepare_bell(label);
        self.holder.insert(a, who);
        self.holder.insert(b, who);
        (a, b)
    }

    pub fn prepare_qubit(
        &mut self,
        who: Actor,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<QubitId, ProtocolError> {
        let q = self.reg.prepare_qubit(alpha, beta)?;
        self.holder.insert(q, who);
        Ok(q)
    }

    pub fn transfer(&mut self, q: QubitId, from: Actor, to: Actor) -> Result<(), ProtocolError> {
        self.require(from, q)?;
        self.holder.insert(q, to);
        Ok(())
    }

    pub fn apply_pauli(
        &mut self,
        who: Actor,
        q: QubitId,
        p: PauliLabel,
    ) -> Result<(), ProtocolError> {
        self.require(who, q)?;
        Ok(self.reg.apply_pauli(q, p)?)
    }

    pub fn apply_unitary(
        &mut self,
        who: Actor,
        q: QubitId,
        u: &Unitary2,
    ) -> Result<(), ProtocolError> {
        self.require(who, q)?;
        Ok(self.reg.apply_unitary(q, u)?)
    }

    /// CNOT with both qubits accessible to `who` (it holds the control and
    /// the target is either its own or in flight).
    pub fn apply_cnot(
        &mut self,
        who: Actor,
        control: QubitId,
        target: QubitId,
    ) -> Result<(), ProtocolError> {
        self.require(who, control)?;
        if self.require(who, target).is_err() {
            self.require(Actor::Channel, target)?;
        }
        Ok(self.reg.apply_cnot(control, target)?)
    }

    pub fn bell_measure<R: Rng + ?Sized>(
        &mut self,
        who: Actor,
        a: QubitId,
        b: QubitId,
        rng: &mut R,
    ) -> Result<BellLabel, ProtocolError> {
        self.require(who, a)?;
        self.require(who, b)?;
        let l = self.reg.bell_measure(a, b, rng)?;
        self.holder.remove(&a);
        self.holder.remove(&b);
        Ok(l)
    }

    pub fn comp_measure<R: Rng + ?Sized>(
        &mut self,
        who: Actor,
        q: QubitId,
        rng: &mut R,
    ) -> Result<bool, ProtocolError> {
        self.require(who, q)?;
        let b = self.reg.comp_measure(q, rng)?;
        self.holder.remove(&q);
        Ok(b)
    }
}
