use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::network::{Leg, Network, Stage};
use super::ProtocolError;
use crate::quantum::{BellLabel, QubitId};

pub type SessionRng = ChaCha8Rng;

/// A measurement Eve made on one of her ancillas, tied to the qubit the
/// ancilla was coupled to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AncillaRecord {
    pub target: QubitId,
    pub bit: bool,
}

/// What an interceptor did during a session.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InterceptorSummary {
    pub strategy: String,
    pub qubits_touched: usize,
    pub qubits_held: usize,
    pub fake_announcements: usize,
    pub ancilla_records: Vec<AncillaRecord>,
}

/// Hook between the parties and Charlie. The protocol engine calls it for
/// every channel use and every Bell announcement, and knows nothing about
/// what it does.
pub trait Interceptor {
    /// Sees (and may rewrite) a sequence in flight. All qubits in `seq` are
    /// held by [`super::Actor::Channel`] and must be again on return.
    fn intercept(
        &mut self,
        leg: Leg,
        seq: &mut Vec<QubitId>,
        net: &mut Network,
        rng: &mut SessionRng,
    ) -> Result<(), ProtocolError>;

    /// `Some(label)` makes Charlie announce `label` without measuring.
    fn fake_announcement(&mut self, _stage: Stage, _rng: &mut SessionRng) -> Option<BellLabel> {
        None
    }

    /// Whether the interceptor acted on this qubit while it was in flight.
    fn touched(&self, _q: QubitId) -> bool {
        false
    }

    /// End of session: deferred measurements and bookkeeping.
    fn finish(
        &mut self,
        _net: &mut Network,
        _rng: &mut SessionRng,
    ) -> Result<InterceptorSummary, ProtocolError> {
        Ok(InterceptorSummary::default())
    }
}

/// No adversary.
#[derive(Debug, Default, Clone, Copy)]
pub struct HonestChannel;

impl Interceptor for HonestChannel {
    fn intercept(
        &mut self,
        _: Leg,
        _: &mut Vec<QubitId>,
        _: &mut Network,
        _: &mut SessionRng,
    ) -> Result<(), ProtocolError> {
        Ok(())
    }

    fn finish(
        &mut self,
        _: &mut Network,
        _: &mut SessionRng,
    ) -> Result<InterceptorSummary, ProtocolError> {
        Ok(InterceptorSummary {
            strategy: "none".into(),
            ..Default::default()
        })
    }
}
