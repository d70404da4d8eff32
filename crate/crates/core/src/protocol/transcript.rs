//! Append-only log of classical announcements.
//!
//! Line format, one entry per line, tab separated:
//!
//! ```text
//! <seq>\t<stage>\t<actor>\t<payload>
//! ```
//!
//! Payloads:
//!
//! | entry             | payload                                         |
//! |-------------------|-------------------------------------------------|
//! | Bell outcome      | `bmo <subject> label=<bell>`                    |
//! | decoy positions   | `positions kind=<kind> at=<i,j,...>`            |
//! | state reveal      | `reveal kind=<kind> at=<i,...> labels=<l,...>`  |
//! | receipt           | `receipt`                                       |
//! | correlation bit   | `bit index=<i> value=<0|1>`                     |
//!
//! `<subject>` is `slot=<i>`, `decoy=<i>+<j>` or `pair=<j>`.

use std::fmt;

use serde::Serialize;

use super::network::{Actor, Stage};
use crate::quantum::BellLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BmoSubject {
    /// Index into the aligned swap-stage sequences.
    Slot(usize),
    /// Two positions of a whole decoy pair in one sequence.
    DecoyPair(usize, usize),
    /// Ordinal of an encoded message pair.
    MessagePair(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PositionKind {
    /// Partner halves in a swap-stage sequence.
    Partner,
    /// Whole decoy pairs, flattened as `(first, second)` position pairs.
    WholePair,
    /// Travel halves of split decoys.
    Split,
    /// Ordinals of message pairs left unencoded for checking.
    Unencoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RevealKind {
    /// Prepared labels of swap-stage decoys, in position order.
    Decoys,
    /// Initial labels of message pairs at the listed swap slots.
    MessagePairs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Entry {
    Bmo {
        subject: BmoSubject,
        label: BellLabel,
    },
    DecoyPositions {
        kind: PositionKind,
        positions: Vec<usize>,
    },
    InitialStateReveal {
        kind: RevealKind,
        at: Vec<usize>,
        labels: Vec<BellLabel>,
    },
    Receipt,
    CorrelationRecord {
        index: usize,
        bit: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub seq: u64,
    pub stage: Stage,
    pub actor: Actor,
    pub entry: Entry,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    records: Vec<Record>,
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn split_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.parse::<T>().map_err(|_| format!("bad list item {x:?}")))
        .collect()
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t", self.seq, self.stage, self.actor)?;
        match &self.entry {
            Entry::Bmo { subject, label } => {
                let subj = match subject {
                    BmoSubject::Slot(i) => format!("slot={i}"),
                    BmoSubject::DecoyPair(i, j) => format!("decoy={i}+{j}"),
                    BmoSubject::MessagePair(j) => format!("pair={j}"),
                };
                write!(f, "bmo {subj} label={label}")
            }
            Entry::DecoyPositions { kind, positions } => {
                let k = match kind {
                    PositionKind::Partner => "partner",
                    PositionKind::WholePair => "whole",
                    PositionKind::Split => "split",
                    PositionKind::Unencoded => "unencoded",
                };
                write!(f, "positions kind={k} at={}", join(positions))
            }
            Entry::InitialStateReveal { kind, at, labels } => {
                let k = match kind {
                    RevealKind::Decoys => "decoys",
                    RevealKind::MessagePairs => "pairs",
                };
                write!(f, "reveal kind={k} at={} labels={}", join(at), join(labels))
            }
            Entry::Receipt => write!(f, "receipt"),
            Entry::CorrelationRecord { index, bit } => {
                write!(f, "bit index={index} value={}", *bit as u8)
            }
        }
    }
}

fn field<'a>(parts: &[&'a str], key: &str) -> Result<&'a str, String> {
    parts
        .iter()
        .find_map(|p| p.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| format!("missing field {key}"))
}

impl std::str::FromStr for Record {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let cols: Vec<&str> = line.splitn(4, '\t').collect();
        if cols.len() != 4 {
            return Err(format!("expected 4 tab-separated columns: {line:?}"));
        }
        let seq = cols[0]
            .parse()
            .map_err(|_| format!("bad sequence number {:?}", cols[0]))?;
        let stage = cols[1].parse()?;
        let actor = cols[2].parse()?;
        let parts: Vec<&str> = cols[3].split(' ').collect();
        let entry = match parts[0] {
            "bmo" => {
                let label = field(&parts, "label")?
                    .parse()
                    .map_err(|e| format!("{e}"))?;
                let subject = if let Ok(i) = field(&parts, "slot") {
                    BmoSubject::Slot(i.parse().map_err(|_| "bad slot".to_string())?)
                } else if let Ok(d) = field(&parts, "decoy") {
                    let (i, j) = d.split_once('+').ok_or("bad decoy subject")?;
                    BmoSubject::DecoyPair(
                        i.parse().map_err(|_| "bad decoy index".to_string())?,
                        j.parse().map_err(|_| "bad decoy index".to_string())?,
                    )
                } else {
                    BmoSubject::MessagePair(
                        field(&parts, "pair")?
                            .parse()
                            .map_err(|_| "bad pair".to_string())?,
                    )
                };
                Entry::Bmo { subject, label }
            }
            "positions" => {
                let kind = match field(&parts, "kind")? {
                    "partner" => PositionKind::Partner,
                    "whole" => PositionKind::WholePair,
                    "split" => PositionKind::Split,
                    "unencoded" => PositionKind::Unencoded,
                    k => return Err(format!("unknown position kind {k:?}")),
                };
                Entry::DecoyPositions {
                    kind,
                    positions: split_list(field(&parts, "at")?)?,
                }
            }
            "reveal" => {
                let kind = match field(&parts, "kind")? {
                    "decoys" => RevealKind::Decoys,
                    "pairs" => RevealKind::MessagePairs,
                    k => return Err(format!("unknown reveal kind {k:?}")),
                };
                Entry::InitialStateReveal {
                    kind,
                    at: split_list(field(&parts, "at")?)?,
                    labels: split_list(field(&parts, "labels")?)?,
                }
            }
            "receipt" => Entry::Receipt,
            "bit" => Entry::CorrelationRecord {
                index: field(&parts, "index")?
                    .parse()
                    .map_err(|_| "bad index".to_string())?,
                bit: match field(&parts, "value")? {
                    "0" => false,
                    "1" => true,
                    v => return Err(format!("bad bit {v:?}")),
                },
            },
            other => return Err(format!("unknown entry {other:?}")),
        };
        Ok(Record {
            seq,
            stage,
            actor,
            entry,
        })
    }
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, stage: Stage, actor: Actor, entry: Entry) {
        let seq = self.records.len() as u64;
        self.records.push(Record {
            seq,
            stage,
            actor,
            entry,
        });
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_lines(text: &str) -> Result<Self, String> {
        let records: Vec<Record> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        for (i, r) in records.iter().enumerate() {
            if r.seq != i as u64 {
                return Err(format!("sequence number {} at line {}", r.seq, i + 1));
            }
        }
        Ok(Self { records })
    }

    /// Structural ordering rules:
    ///
    /// - swap-stage positions and reveals come after every swap-stage outcome;
    /// - correlation bits of the swap stage come after the positions;
    /// - transmit-stage positions come after Charlie's receipt;
    /// - transmit/decode outcomes come after the transmit positions.
    pub fn check_ordering(&self) -> Result<(), String> {
        let first = |pred: &dyn Fn(&Record) -> bool| self.records.iter().position(pred);
        let last = |pred: &dyn Fn(&Record) -> bool| self.records.iter().rposition(pred);

        let is_swap_bmo =
            |r: &Record| r.stage == Stage::Swap && matches!(r.entry, Entry::Bmo { .. });
        let is_swap_disclosure = |r: &Record| {
            r.stage == Stage::Swap
                && matches!(
                    r.entry,
                    Entry::DecoyPositions { .. } | Entry::InitialStateReveal { .. }
                )
        };
        if let (Some(lb), Some(fd)) = (last(&is_swap_bmo), first(&is_swap_disclosure)) {
            if fd < lb {
                return Err(format!(
                    "swap-stage disclosure at {fd} before outcome at {lb}"
                ));
            }
        }
        let is_swap_bit = |r: &Record| {
            r.stage == Stage::Swap && matches!(r.entry, Entry::CorrelationRecord { .. })
        };
        let is_swap_pos =
            |r: &Record| r.stage == Stage::Swap && matches!(r.entry, Entry::DecoyPositions { .. });
        if let Some(fb) = first(&is_swap_bit) {
            match first(&is_swap_pos) {
                Some(fp) if fp < fb => {}
                _ => return Err(format!("swap-stage bit at {fb} before decoy positions")),
            }
        }

        let is_receipt = |r: &Record| r.stage == Stage::Transmit && r.entry == Entry::Receipt;
        let is_tx_pos = |r: &Record| {
            r.stage == Stage::Transmit && matches!(r.entry, Entry::DecoyPositions { .. })
        };
        if let Some(fp) = first(&is_tx_pos) {
            match first(&is_receipt) {
                Some(rc) if rc < fp => {}
                _ => return Err(format!("transmit positions at {fp} before receipt")),
            }
        }
        let is_late_bmo = |r: &Record| {
            matches!(r.stage, Stage::Transmit | Stage::Decode)
                && matches!(r.entry, Entry::Bmo { .. })
        };
        if let Some(fb) = first(&is_late_bmo) {
            match first(&is_tx_pos) {
                Some(fp) if fp < fb => {}
                _ => return Err(format!("transmit-stage outcome at {fb} before positions")),
            }
        }
        Ok(())
    }
}
