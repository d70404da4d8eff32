use serde::Serialize;

use super::channel::InterceptorSummary;
use super::config::Mode;
use super::network::{Actor, Stage};
use super::sequence::CaseTag;
use super::transcript::Transcript;
use crate::quantum::{BellLabel, PauliLabel};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checks: u64,
    pub failures: u64,
}

impl Tally {
    pub fn record(&mut self, passed: bool) {
        self.checks += 1;
        self.failures += u64::from(!passed);
    }

    pub fn add(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures += other.failures;
    }

    pub fn rate(&self) -> f64 {
        if self.checks == 0 {
            0.0
        } else {
            self.failures as f64 / self.checks as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CaseCounts {
    pub case_i: u64,
    pub case_ii: u64,
    pub case_iii: u64,
    pub case_iv: u64,
}

impl CaseCounts {
    pub fn bump(&mut self, c: CaseTag) {
        match c {
            CaseTag::CaseI => self.case_i += 1,
            CaseTag::CaseII => self.case_ii += 1,
            CaseTag::CaseIII => self.case_iii += 1,
            CaseTag::CaseIV => self.case_iv += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SwapChecks {
    pub case_i: Tally,
    pub case_ii: Tally,
    pub case_iii: Tally,
}

impl SwapChecks {
    pub fn total(&self) -> Tally {
        let mut t = self.case_i;
        t.add(self.case_ii);
        t.add(self.case_iii);
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    WholePair,
    Split,
    Unencoded,
}

/// One transmit-stage check, with how many of its travelling qubits the
/// interceptor acted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecoyCheck {
    pub owner: Actor,
    pub kind: CheckKind,
    pub passed: bool,
    pub touched: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TransmitChecks {
    pub whole: Tally,
    pub split: Tally,
    pub unencoded: Tally,
    pub records: Vec<DecoyCheck>,
}

impl TransmitChecks {
    pub fn push(&mut self, c: DecoyCheck) {
        match c.kind {
            CheckKind::WholePair => self.whole.record(c.passed),
            CheckKind::Split => self.split.record(c.passed),
            CheckKind::Unencoded => self.unencoded.record(c.passed),
        }
        self.records.push(c);
    }

    pub fn total(&self) -> Tally {
        let mut t = self.whole;
        t.add(self.split);
        t.add(self.unencoded);
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Outcome {
    Completed,
    Aborted { stage: Stage, error_rate: f64 },
}

/// One message pair as it went through the session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkView {
    /// Swap-stage slot the pair came from.
    pub slot: usize,
    pub case: CaseTag,
    pub bmo1: BellLabel,
    pub bmo2: Option<BellLabel>,
    pub unencoded: bool,
    pub alice_sent: Option<PauliLabel>,
    pub bob_sent: Option<PauliLabel>,
    /// Alice's operator as recovered by Bob.
    pub alice_decoded: Option<PauliLabel>,
    /// Bob's operator as recovered by Alice.
    pub bob_decoded: Option<PauliLabel>,
    /// Eve's ancilla bits tied to the pair's travelling qubits.
    pub eve_bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionReport {
    pub session_index: u64,
    pub mode: Mode,
    pub sender: Actor,
    pub outcome: Outcome,
    pub cases: CaseCounts,
    pub swap: SwapChecks,
    pub transmit: TransmitChecks,
    pub links: Vec<LinkView>,
    pub eve: InterceptorSummary,
    pub transcript: Transcript,
    pub nested: Vec<SessionReport>,
}

fn symbol_bits(p: PauliLabel) -> [bool; 2] {
    let s = p.symbol();
    [s & 2 != 0, s & 1 != 0]
}

impl SessionReport {
    pub fn aborted(&self) -> bool {
        matches!(self.outcome, Outcome::Aborted { .. })
    }

    /// Encoded links, in order.
    pub fn message_links(&self) -> impl Iterator<Item = &LinkView> {
        self.links.iter().filter(|l| !l.unencoded)
    }

    /// Symbols sent by the session's sender(s) and how many of them the
    /// other side recovered.
    pub fn symbol_accuracy(&self) -> (u64, u64) {
        let mut sent = 0;
        let mut ok = 0;
        for l in self.message_links() {
            for (s, d) in [(l.alice_sent, l.alice_decoded), (l.bob_sent, l.bob_decoded)] {
                if let Some(s) = s {
                    sent += 1;
                    ok += u64::from(d == Some(s));
                }
            }
        }
        (sent, ok)
    }

    /// Bits the sender encoded, two per symbol.
    pub fn sent_bits(&self) -> Vec<bool> {
        let from = |l: &LinkView| match self.sender {
            Actor::Bob => l.bob_sent,
            _ => l.alice_sent,
        };
        self.message_links()
            .filter_map(from)
            .flat_map(symbol_bits)
            .collect()
    }

    /// Bits the receiver decoded, two per symbol.
    pub fn decoded_bits(&self) -> Vec<bool> {
        let from = |l: &LinkView| match self.sender {
            Actor::Bob => l.bob_decoded,
            _ => l.alice_decoded,
        };
        self.message_links()
            .filter_map(from)
            .flat_map(symbol_bits)
            .collect()
    }

    /// Every check failure, nested sessions included.
    pub fn all_checks(&self) -> Tally {
        let mut t = self.swap.total();
        t.add(self.transmit.total());
        for n in &self.nested {
            t.add(n.all_checks());
        }
        t
    }
}
