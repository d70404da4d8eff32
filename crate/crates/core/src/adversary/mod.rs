//! Eavesdropping strategies and a dishonest Charlie, plugged into sessions
//! as a channel interceptor.

mod spec;
mod strategies;

pub use spec::{AttackSpec, AttackSpecError, DisturbMode, Strategy};
pub use strategies::{disturb, entangle_measure, fake_bmo, flip_all, intercept_resend};

use std::collections::BTreeSet;

use rand::Rng;

use crate::protocol::{
    Actor, AncillaRecord, Interceptor, InterceptorSummary, Leg, Network, ProtocolError, SessionRng,
    Stage,
};
use crate::quantum::{BellLabel, QubitId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Taken off a leg and never forwarded.
    Stolen(Leg),
    /// Home half of a pair whose other half was forwarded.
    FakePairHalf,
    Ancilla {
        target: QubitId,
    },
}

/// Eve's quantum holdings and classical notes.
#[derive(Debug, Clone, Default)]
pub struct EveState {
    pub held: Vec<(QubitId, Provenance)>,
    pub touched: BTreeSet<QubitId>,
    pub records: Vec<AncillaRecord>,
    pub fake_announcements: usize,
}

impl EveState {
    pub fn hold(&mut self, q: QubitId, p: Provenance) {
        self.held.push((q, p));
    }

    pub fn touch(&mut self, q: QubitId) {
        self.touched.insert(q);
    }
}

/// An [`AttackSpec`] in action.
#[derive(Debug, Clone)]
pub struct Adversary {
    spec: AttackSpec,
    eve: EveState,
}

impl Adversary {
    pub fn new(spec: AttackSpec) -> Self {
        Self {
            spec,
            eve: EveState::default(),
        }
    }

    pub fn eve(&self) -> &EveState {
        &self.eve
    }
}

impl Interceptor for Adversary {
    fn intercept(
        &mut self,
        leg: Leg,
        seq: &mut Vec<QubitId>,
        net: &mut Network,
        rng: &mut SessionRng,
    ) -> Result<(), ProtocolError> {
        if !self.spec.targets(leg) {
            return Ok(());
        }
        match &self.spec.strategy {
            Strategy::InterceptResend => intercept_resend(net, leg, seq, &mut self.eve),
            Strategy::EntangleMeasure { alpha, beta } => {
                for &q in seq.iter() {
                    entangle_measure(net, q, *alpha, *beta, &mut self.eve)?;
                }
                Ok(())
            }
            Strategy::FlipAll => flip_all(net, seq, &mut self.eve),
            Strategy::Disturb { mode, fraction } => {
                disturb(net, seq, *mode, *fraction, &mut self.eve, rng)
            }
            Strategy::FakeBmo { .. } => Ok(()),
        }
    }

    fn fake_announcement(&mut self, stage: Stage, rng: &mut SessionRng) -> Option<BellLabel> {
        let Strategy::FakeBmo { stages, fraction } = &self.spec.strategy else {
            return None;
        };
        if !stages.contains(&stage) {
            return None;
        }
        if *fraction < 1.0 && rng.random::<f64>() >= *fraction {
            return None;
        }
        self.eve.fake_announcements += 1;
        Some(fake_bmo(rng))
    }

    fn touched(&self, q: QubitId) -> bool {
        self.eve.touched.contains(&q)
    }

    /// Measures every ancilla in the computational basis.
    fn finish(
        &mut self,
        net: &mut Network,
        rng: &mut SessionRng,
    ) -> Result<InterceptorSummary, ProtocolError> {
        for &(q, p) in &self.eve.held {
            if let Provenance::Ancilla { target } = p {
                let bit = net.comp_measure(Actor::Eve, q, rng)?;
                self.eve.records.push(AncillaRecord { target, bit });
            }
        }
        Ok(InterceptorSummary {
            strategy: self.spec.to_string(),
            qubits_touched: self.eve.touched.len(),
            qubits_held: self.eve.held.len(),
            fake_announcements: self.eve.fake_announcements,
            ancilla_records: self.eve.records.clone(),
        })
    }
}
