//! Session engine: preparation, entanglement swapping, decoy checks,
//! encoding and decoding, driven through a pluggable channel.

mod channel;
mod config;
mod decode;
mod network;
pub mod reference;
mod report;
mod sequence;
mod session;
mod transcript;

pub use channel::{AncillaRecord, HonestChannel, Interceptor, InterceptorSummary, SessionRng};
pub use config::{parse_label_set, DecoyPolicy, Mode, SessionConfig};
pub use decode::{correlation_check, decode_message, CheckInput, Decoder};
pub use network::{Actor, Leg, Network, Stage};
pub use report::{
    CaseCounts, CheckKind, DecoyCheck, LinkView, Outcome, SessionReport, SwapChecks, Tally,
    TransmitChecks,
};
pub use sequence::{classify_cases, insert_decoys, CaseTag, ExtendedSequence, SlotTag};
pub use session::{
    encode_message, prepare_session, run_session, run_session_with, session_rng, stage1_measure,
    CharlieState, DecoyPair, MessagePair, PartyState, Prepared,
};
pub use transcript::{BmoSubject, Entry, PositionKind, Record, RevealKind, Transcript};

use crate::quantum::{QuantumError, QubitId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{actor} may not act on {qubit} (held by {})", holder.map_or("nobody".to_string(), |h| h.to_string()))]
    Custody {
        qubit: QubitId,
        holder: Option<Actor>,
        actor: Actor,
    },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("sequence lengths differ: alice {alice}, bob {bob}")]
    LengthMismatch { alice: usize, bob: usize },
    #[error("expected {expected} symbols, got {got}")]
    SymbolCount { expected: usize, got: usize },
    #[error("decode integrity: {0}")]
    DecodeIntegrity(String),
    #[error("missing reveal: {0}")]
    MissingReveal(String),
    #[error("invalid check: {0}")]
    InvalidCheck(String),
    #[error("nested sharing: {0}")]
    NestedCapacity(String),
    #[error("transcript order violated: {0}")]
    Transcript(String),
    #[error("interceptor: {0}")]
    Interceptor(String),
}
