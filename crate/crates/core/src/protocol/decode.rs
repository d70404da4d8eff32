use super::sequence::CaseTag;
use super::ProtocolError;
use crate::quantum::{solve_partner, solve_pauli, swapped_label, BellLabel, PairSide, PauliLabel};

/// Who is decoding, and what they already applied themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoder {
    /// One-way: recover the operator the sender applied on `sender_side`.
    Receiver { sender_side: PairSide },
    /// Dialogue: recover the partner's operator given one's own.
    Partner { own: PauliLabel, own_side: PairSide },
}

/// Recovers an encoding from the two announcements of a message pair.
///
/// `alice_init` and `bob_init` are the labels of the pairs whose travel
/// halves Charlie swapped; `bmo1` is the swap outcome and `bmo2` the final
/// outcome on the encoded home qubits.
pub fn decode_message(
    alice_init: Option<BellLabel>,
    bob_init: Option<BellLabel>,
    bmo1: Option<BellLabel>,
    bmo2: Option<BellLabel>,
    decoder: Decoder,
) -> Result<PauliLabel, ProtocolError> {
    let (Some(a), Some(b), Some(m1), Some(m2)) = (alice_init, bob_init, bmo1, bmo2) else {
        return Err(ProtocolError::DecodeIntegrity(
            "missing label or announcement".into(),
        ));
    };
    let shared = swapped_label(a, b, m1);
    Ok(match decoder {
        Decoder::Receiver { sender_side } => solve_pauli(shared, m2, sender_side),
        Decoder::Partner { own, own_side } => solve_partner(shared, own, own_side, m2),
    })
}

/// Inputs of one swap-stage correlation check. `alice_source` and
/// `bob_source` are the labels of the pairs each side contributed at the
/// slot, as known to the checkers (decoy labels or revealed initial labels).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckInput {
    pub case: CaseTag,
    pub announced: BellLabel,
    pub alice_bit: bool,
    pub bob_bit: bool,
    pub alice_source: Option<BellLabel>,
    pub bob_source: Option<BellLabel>,
}

/// `Ok(true)` when the bits agree with the parity of the home label implied
/// by the announcement.
pub fn correlation_check(input: CheckInput) -> Result<bool, ProtocolError> {
    if input.case == CaseTag::CaseIV {
        return Err(ProtocolError::InvalidCheck(
            "case IV slots carry messages".into(),
        ));
    }
    let a = input.alice_source.ok_or_else(|| {
        ProtocolError::MissingReveal(format!("alice's label for a {:?} slot", input.case))
    })?;
    let b = input.bob_source.ok_or_else(|| {
        ProtocolError::MissingReveal(format!("bob's label for a {:?} slot", input.case))
    })?;
    let home = swapped_label(a, b, input.announced);
    Ok((input.alice_bit != input.bob_bit) == home.anticorrelated())
}
