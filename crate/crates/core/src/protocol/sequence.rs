use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use super::network::Actor;
use crate::quantum::QubitId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotTag {
    /// Qubit of message pair `pair`.
    Entangled(usize),
    /// Partner half of decoy `decoy` whose other half stays home.
    DecoyPartner(usize),
    /// Half `half` (0 or 1) of decoy `decoy`, both halves travelling.
    DecoyWholePair(usize, u8),
}

impl SlotTag {
    pub fn is_decoy(self) -> bool {
        !matches!(self, SlotTag::Entangled(_))
    }
}

/// A travel sequence with decoys mixed in. The tags are the owner's private
/// record; only the qubits go on the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSequence {
    pub owner: Actor,
    pub slots: Vec<(QubitId, SlotTag)>,
}

impl ExtendedSequence {
    pub fn qubits(&self) -> Vec<QubitId> {
        self.slots.iter().map(|(q, _)| *q).collect()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Positions holding any decoy qubit, ascending.
    pub fn decoy_positions(&self) -> Vec<usize> {
        self.positions_where(|t| t.is_decoy())
    }

    pub fn positions_where(&self, pred: impl Fn(SlotTag) -> bool) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, (_, t))| pred(*t))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn position_of(&self, tag: SlotTag) -> Option<usize> {
        self.slots.iter().position(|(_, t)| *t == tag)
    }
}

/// Mixes `decoys` into `base` at uniformly random positions. The relative
/// order of `base` is kept; the decoys are shuffled first.
pub fn insert_decoys<R: Rng + ?Sized>(
    owner: Actor,
    base: Vec<(QubitId, SlotTag)>,
    mut decoys: Vec<(QubitId, SlotTag)>,
    rng: &mut R,
) -> ExtendedSequence {
    let total = base.len() + decoys.len();
    decoys.shuffle(rng);
    let mut at = index::sample(rng, total, decoys.len()).into_vec();
    at.sort_unstable();
    let mut slots = Vec::with_capacity(total);
    let mut base = base.into_iter();
    let mut decoys = decoys.into_iter();
    let mut next = at.into_iter().peekable();
    for i in 0..total {
        if next.peek() == Some(&i) {
            next.next();
            slots.push(decoys.next().expect("one decoy per chosen position"));
        } else {
            slots.push(base.next().expect("remaining slots belong to the base"));
        }
    }
    ExtendedSequence { owner, slots }
}

/// Classification of a swap-stage index by what each side contributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    /// Decoy partner on both sides.
    CaseI,
    /// Alice entangled, Bob decoy.
    CaseII,
    /// Alice decoy, Bob entangled.
    CaseIII,
    /// Entangled on both sides.
    CaseIV,
}

/// Cases for index-aligned sequences of length `len`, given each side's
/// decoy positions.
pub fn classify_cases(alice_decoys: &[usize], bob_decoys: &[usize], len: usize) -> Vec<CaseTag> {
    let mut a = vec![false; len];
    let mut b = vec![false; len];
    for &p in alice_decoys {
        a[p] = true;
    }
    for &p in bob_decoys {
        b[p] = true;
    }
    a.into_iter()
        .zip(b)
        .map(|(da, db)| match (da, db) {
            (true, true) => CaseTag::CaseI,
            (false, true) => CaseTag::CaseII,
            (true, false) => CaseTag::CaseIII,
            (false, false) => CaseTag::CaseIV,
        })
        .collect()
}
