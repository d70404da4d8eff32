use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::channel::{HonestChannel, Interceptor, InterceptorSummary, SessionRng};
use super::config::{DecoyPolicy, Mode, SessionConfig};
use super::decode::{correlation_check, decode_message, CheckInput, Decoder};
use super::network::{Actor, Leg, Network, Stage};
use super::report::{
    CaseCounts, CheckKind, DecoyCheck, LinkView, Outcome, SessionReport, SwapChecks, TransmitChecks,
};
use super::sequence::{classify_cases, insert_decoys, CaseTag, ExtendedSequence, SlotTag};
use super::transcript::{BmoSubject, Entry, PositionKind, RevealKind, Transcript};
use super::ProtocolError;
use crate::quantum::{swapped_label, BellLabel, PairSide, PauliLabel, QubitId};

/// Upper bound on nested sessions spent sharing one set of labels.
const MAX_NESTED_SESSIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessagePair {
    pub home: QubitId,
    pub travel: QubitId,
    pub init: BellLabel,
}

/// `first` stays home for swap-stage and split decoys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoyPair {
    pub first: QubitId,
    pub second: QubitId,
    pub label: BellLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartyState {
    pub actor: Actor,
    pub pairs: Vec<MessagePair>,
    pub swap_decoys: Vec<DecoyPair>,
    pub transmit_decoys: Vec<DecoyPair>,
}

/// Sequences Charlie has received, by leg.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CharlieState {
    pub swap_alice: Vec<QubitId>,
    pub swap_bob: Vec<QubitId>,
    pub transmit_alice: Vec<QubitId>,
    pub transmit_bob: Vec<QubitId>,
}

#[derive(Debug)]
pub struct Prepared {
    pub net: Network,
    pub alice: PartyState,
    pub bob: PartyState,
    pub charlie: CharlieState,
    pub transcript: Transcript,
}

pub fn session_rng(master_seed: u64, session_index: u64) -> SessionRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(session_index);
    rng
}

fn pick<R: Rng + ?Sized>(set: &[BellLabel], rng: &mut R) -> BellLabel {
    set[rng.random_range(0..set.len())]
}

fn decoy_label<R: Rng + ?Sized>(policy: &DecoyPolicy, rng: &mut R) -> BellLabel {
    match policy {
        DecoyPolicy::Fixed(l) => *l,
        DecoyPolicy::Random(set) => pick(set, rng),
    }
}

fn prepare_party<R: Rng + ?Sized>(
    net: &mut Network,
    actor: Actor,
    states: &[BellLabel],
    cfg: &SessionConfig,
    rng: &mut R,
) -> PartyState {
    let pairs = (0..cfg.n_pairs)
        .map(|_| {
            let init = pick(states, rng);
            let (home, travel) = net.prepare_bell(actor, init);
            MessagePair { home, travel, init }
        })
        .collect();
    let mut decoy = || {
        let label = decoy_label(&cfg.decoy_policy, rng);
        let (first, second) = net.prepare_bell(actor, label);
        DecoyPair {
            first,
            second,
            label,
        }
    };
    let swap_decoys = (0..cfg.n_pairs / 2).map(|_| decoy()).collect();
    let transmit_decoys = (0..cfg.n_pairs / 2).map(|_| decoy()).collect();
    PartyState {
        actor,
        pairs,
        swap_decoys,
        transmit_decoys,
    }
}

/// Creates both parties' message pairs and decoys.
pub fn prepare_session<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<Prepared, ProtocolError> {
    cfg.validate()?;
    let mut net = Network::new();
    let alice = prepare_party(&mut net, Actor::Alice, &cfg.alice_states, cfg, rng);
    let bob = prepare_party(&mut net, Actor::Bob, &cfg.bob_states, cfg, rng);
    Ok(Prepared {
        net,
        alice,
        bob,
        charlie: CharlieState::default(),
        transcript: Transcript::new(),
    })
}

/// Charlie's swap-stage measurement of index-aligned slots.
pub fn stage1_measure(
    net: &mut Network,
    transcript: &mut Transcript,
    alice_seq: &[QubitId],
    bob_seq: &[QubitId],
    channel: &mut dyn Interceptor,
    rng: &mut SessionRng,
) -> Result<Vec<BellLabel>, ProtocolError> {
    if alice_seq.len() != bob_seq.len() {
        return Err(ProtocolError::LengthMismatch {
            alice: alice_seq.len(),
            bob: bob_seq.len(),
        });
    }
    let mut out = Vec::with_capacity(alice_seq.len());
    for (i, (&a, &b)) in alice_seq.iter().zip(bob_seq).enumerate() {
        let label = match channel.fake_announcement(Stage::Swap, rng) {
            Some(l) => l,
            None => net.bell_measure(Actor::Charlie, a, b, rng)?,
        };
        transcript.push(
            Stage::Swap,
            Actor::Charlie,
            Entry::Bmo {
                subject: BmoSubject::Slot(i),
                label,
            },
        );
        out.push(label);
    }
    Ok(out)
}

/// Applies one operator per home qubit.
pub fn encode_message(
    net: &mut Network,
    who: Actor,
    homes: &[QubitId],
    symbols: &[PauliLabel],
) -> Result<(), ProtocolError> {
    if homes.len() != symbols.len() {
        return Err(ProtocolError::SymbolCount {
            expected: homes.len(),
            got: symbols.len(),
        });
    }
    for (&q, &p) in homes.iter().zip(symbols) {
        net.apply_pauli(who, q, p)?;
    }
    Ok(())
}

pub fn run_session(
    cfg: &SessionConfig,
    session_index: u64,
) -> Result<SessionReport, ProtocolError> {
    let factory = |cfg: &SessionConfig| -> Box<dyn Interceptor> {
        match &cfg.attack {
            Some(spec) => Box::new(crate::adversary::Adversary::new(spec.clone())),
            None => Box::new(HonestChannel),
        }
    };
    run_session_with(cfg, session_index, &factory)
}

/// Like [`run_session`] with a caller-supplied interceptor, built once for
/// the session and once for each nested session.
pub fn run_session_with(
    cfg: &SessionConfig,
    session_index: u64,
    factory: &dyn Fn(&SessionConfig) -> Box<dyn Interceptor>,
) -> Result<SessionReport, ProtocolError> {
    cfg.validate()?;
    let mut rng = session_rng(cfg.master_seed, session_index);
    let plan = Plan {
        sender: Actor::Alice,
        dialogue: cfg.mode == Mode::Qd,
        payload: Vec::new(),
    };
    let mut report = Engine::run(cfg, plan, &mut rng, factory)?;
    report.session_index = session_index;
    Ok(report)
}

struct Plan {
    sender: Actor,
    dialogue: bool,
    /// Bits the sender must deliver first; random symbols follow.
    payload: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Pair(usize),
    Decoy(usize),
}

#[derive(Debug, Clone)]
struct Link {
    slot: usize,
    case: CaseTag,
    alice: Source,
    bob: Source,
    alice_home: QubitId,
    bob_home: QubitId,
    qubits: [QubitId; 4],
    bmo1: BellLabel,
    bmo2: Option<BellLabel>,
    unencoded: bool,
    alice_sent: Option<PauliLabel>,
    bob_sent: Option<PauliLabel>,
    alice_decoded: Option<PauliLabel>,
    bob_decoded: Option<PauliLabel>,
}

struct Engine<'a> {
    cfg: &'a SessionConfig,
    plan: Plan,
    rng: &'a mut SessionRng,
    factory: &'a dyn Fn(&SessionConfig) -> Box<dyn Interceptor>,
    channel: Box<dyn Interceptor>,
    p: Prepared,
    /// Alice's initial labels as learned by Bob, and vice versa.
    bob_knows_alice: Option<Vec<BellLabel>>,
    alice_knows_bob: Option<Vec<BellLabel>>,
    links: Vec<Link>,
    cases: CaseCounts,
    swap: SwapChecks,
    transmit: TransmitChecks,
    nested: Vec<SessionReport>,
    transmit_seqs: (Option<ExtendedSequence>, Option<ExtendedSequence>),
    /// Message positions in each received transmit-stage sequence, as
    /// Charlie infers them from the announced decoy positions.
    message_positions: (Vec<usize>, Vec<usize>),
}

fn bits_per_label(set_len: usize) -> usize {
    (usize::BITS - (set_len - 1).leading_zeros()) as usize
}

fn labels_to_bits(labels: &[BellLabel], set: &[BellLabel]) -> Vec<bool> {
    let w = bits_per_label(set.len());
    labels
        .iter()
        .flat_map(|l| {
            let i = set
                .iter()
                .position(|s| s == l)
                .expect("label drawn from its set");
            (0..w).rev().map(move |k| (i >> k) & 1 == 1)
        })
        .collect()
}

fn bits_to_labels(bits: &[bool], set: &[BellLabel], count: usize) -> Vec<BellLabel> {
    let w = bits_per_label(set.len());
    (0..count)
        .map(|j| {
            let i = bits[j * w..(j + 1) * w]
                .iter()
                .fold(0usize, |acc, &b| acc << 1 | b as usize);
            // an out-of-range index only arises from corrupted bits
            set.get(i).copied().unwrap_or(set[0])
        })
        .collect()
}

impl<'a> Engine<'a> {
    fn run(
        cfg: &'a SessionConfig,
        plan: Plan,
        rng: &'a mut SessionRng,
        factory: &'a dyn Fn(&SessionConfig) -> Box<dyn Interceptor>,
    ) -> Result<SessionReport, ProtocolError> {
        let p = prepare_session(cfg, rng)?;
        let channel = factory(cfg);
        let mut e = Engine {
            cfg,
            plan,
            rng,
            factory,
            channel,
            p,
            bob_knows_alice: None,
            alice_knows_bob: None,
            links: Vec::new(),
            cases: CaseCounts::default(),
            swap: SwapChecks::default(),
            transmit: TransmitChecks::default(),
            nested: Vec::new(),
            transmit_seqs: (None, None),
            message_positions: (Vec::new(), Vec::new()),
        };
        let outcome = e.steps()?;
        e.finish(outcome)
    }

    fn steps(&mut self) -> Result<Outcome, ProtocolError> {
        if let Some(rate) = self.share_initial_labels()? {
            return Ok(Outcome::Aborted {
                stage: Stage::Nested,
                error_rate: rate,
            });
        }
        self.swap_stage()?;
        let rate = self.swap.total().rate();
        if rate > self.cfg.error_threshold {
            return Ok(Outcome::Aborted {
                stage: Stage::Swap,
                error_rate: rate,
            });
        }
        self.encode_and_transmit()?;
        self.transmit_check()?;
        let rate = self.transmit.total().rate();
        if rate > self.cfg.error_threshold {
            return Ok(Outcome::Aborted {
                stage: Stage::Transmit,
                error_rate: rate,
            });
        }
        self.decode_stage()?;
        Ok(Outcome::Completed)
    }

    fn bob_decodes(&self) -> bool {
        self.plan.dialogue || self.plan.sender == Actor::Alice
    }

    fn alice_decodes(&self) -> bool {
        self.plan.dialogue || self.plan.sender == Actor::Bob
    }

    /// Runs nested one-way sessions so each decoder learns the partner's
    /// initial labels. Returns the error rate of an aborted nested session.
    fn share_initial_labels(&mut self) -> Result<Option<f64>, ProtocolError> {
        if self.alice_decodes() && self.cfg.bob_states.len() > 1 {
            let labels: Vec<BellLabel> = self.p.bob.pairs.iter().map(|m| m.init).collect();
            match self.share(Actor::Bob, &labels, &self.cfg.bob_states.clone())? {
                Ok(got) => self.alice_knows_bob = Some(got),
                Err(rate) => return Ok(Some(rate)),
            }
        }
        if self.bob_decodes() && self.cfg.alice_states.len() > 1 {
            let labels: Vec<BellLabel> = self.p.alice.pairs.iter().map(|m| m.init).collect();
            match self.share(Actor::Alice, &labels, &self.cfg.alice_states.clone())? {
                Ok(got) => self.bob_knows_alice = Some(got),
                Err(rate) => return Ok(Some(rate)),
            }
        }
        Ok(None)
    }

    fn share(
        &mut self,
        from: Actor,
        labels: &[BellLabel],
        set: &[BellLabel],
    ) -> Result<Result<Vec<BellLabel>, f64>, ProtocolError> {
        let bits = labels_to_bits(labels, set);
        let mut nested_cfg = self.cfg.clone();
        nested_cfg.mode = Mode::Qsdc;
        let (fixed, free) = (
            vec![BellLabel::PsiPlus],
            vec![BellLabel::PsiPlus, BellLabel::PsiMinus],
        );
        (nested_cfg.alice_states, nested_cfg.bob_states) = match from {
            Actor::Bob => (free, fixed),
            _ => (fixed, free),
        };
        let mut received = Vec::with_capacity(bits.len());
        for _ in 0..MAX_NESTED_SESSIONS {
            if received.len() >= bits.len() {
                break;
            }
            let mut child_rng = ChaCha8Rng::seed_from_u64(self.rng.random());
            let plan = Plan {
                sender: from,
                dialogue: false,
                payload: bits[received.len()..].to_vec(),
            };
            let report = Engine::run(&nested_cfg, plan, &mut child_rng, self.factory)?;
            let outcome = report.outcome;
            received.extend(report.decoded_bits());
            self.nested.push(report);
            if let Outcome::Aborted { error_rate, .. } = outcome {
                return Ok(Err(error_rate));
            }
        }
        if received.len() < bits.len() {
            return Err(ProtocolError::NestedCapacity(format!(
                "{} of {} bits delivered after {MAX_NESTED_SESSIONS} nested sessions",
                received.len(),
                bits.len()
            )));
        }
        Ok(Ok(bits_to_labels(&received, set, labels.len())))
    }

    /// Sends `qubits` from `leg.from` to Charlie through the channel.
    fn transmit(&mut self, leg: Leg, qubits: Vec<QubitId>) -> Result<Vec<QubitId>, ProtocolError> {
        let net = &mut self.p.net;
        for &q in &qubits {
            net.transfer(q, leg.from, Actor::Channel)?;
        }
        if let Some(noise) = &self.cfg.noise {
            let u = noise.unitary();
            for &q in &qubits {
                net.apply_unitary(Actor::Channel, q, &u)?;
            }
        }
        let mut seq = qubits;
        self.channel.intercept(leg, &mut seq, net, self.rng)?;
        for &q in &seq {
            net.transfer(q, Actor::Channel, Actor::Charlie)?;
        }
        Ok(seq)
    }

    fn swap_sequence(&mut self, who: Actor) -> ExtendedSequence {
        let party = if who == Actor::Alice {
            &self.p.alice
        } else {
            &self.p.bob
        };
        let base = party
            .pairs
            .iter()
            .enumerate()
            .map(|(i, m)| (m.travel, SlotTag::Entangled(i)))
            .collect();
        let decoys = party
            .swap_decoys
            .iter()
            .enumerate()
            .map(|(i, d)| (d.second, SlotTag::DecoyPartner(i)))
            .collect();
        insert_decoys(who, base, decoys, self.rng)
    }

    fn swap_stage(&mut self) -> Result<(), ProtocolError> {
        let a_seq = self.swap_sequence(Actor::Alice);
        let b_seq = self.swap_sequence(Actor::Bob);
        self.p.charlie.swap_alice =
            self.transmit(Leg::new(Stage::Swap, Actor::Alice), a_seq.qubits())?;
        self.p.charlie.swap_bob =
            self.transmit(Leg::new(Stage::Swap, Actor::Bob), b_seq.qubits())?;
        let (ra, rb) = (
            self.p.charlie.swap_alice.clone(),
            self.p.charlie.swap_bob.clone(),
        );
        let bmo = stage1_measure(
            &mut self.p.net,
            &mut self.p.transcript,
            &ra,
            &rb,
            self.channel.as_mut(),
            self.rng,
        )?;

        let t = &mut self.p.transcript;
        for (seq, party) in [(&a_seq, &self.p.alice), (&b_seq, &self.p.bob)] {
            let positions = seq.decoy_positions();
            let labels = positions
                .iter()
                .map(|&i| match seq.slots[i].1 {
                    SlotTag::DecoyPartner(d) => party.swap_decoys[d].label,
                    _ => unreachable!("decoy positions hold decoys"),
                })
                .collect();
            t.push(
                Stage::Swap,
                party.actor,
                Entry::DecoyPositions {
                    kind: PositionKind::Partner,
                    positions: positions.clone(),
                },
            );
            t.push(
                Stage::Swap,
                party.actor,
                Entry::InitialStateReveal {
                    kind: RevealKind::Decoys,
                    at: positions,
                    labels,
                },
            );
        }
        let cases = classify_cases(
            &a_seq.decoy_positions(),
            &b_seq.decoy_positions(),
            bmo.len(),
        );
        for &c in &cases {
            self.cases.bump(c);
        }

        let reuse = self.cfg.use_cases_ii_iii_for_message;
        let source = |seq: &ExtendedSequence, i: usize| match seq.slots[i].1 {
            SlotTag::Entangled(p) => Source::Pair(p),
            SlotTag::DecoyPartner(d) => Source::Decoy(d),
            SlotTag::DecoyWholePair(..) => unreachable!("no whole pairs in the swap stage"),
        };
        let checked: Vec<usize> = (0..cases.len())
            .filter(|&i| match cases[i] {
                CaseTag::CaseI => true,
                CaseTag::CaseII | CaseTag::CaseIII => !reuse,
                CaseTag::CaseIV => false,
            })
            .collect();

        // message-pair labels the checks need: Alice's where her set is not
        // public, Bob's always
        let reveal = |case: CaseTag, party: &PartyState, seq: &ExtendedSequence| {
            let at: Vec<usize> = checked
                .iter()
                .copied()
                .filter(|&i| cases[i] == case)
                .collect();
            let labels = at
                .iter()
                .map(|&i| match source(seq, i) {
                    Source::Pair(p) => party.pairs[p].init,
                    Source::Decoy(_) => unreachable!("case implies a message pair"),
                })
                .collect::<Vec<_>>();
            (at, labels)
        };
        if self.cfg.alice_states.len() > 1 {
            let (at, labels) = reveal(CaseTag::CaseII, &self.p.alice, &a_seq);
            if !at.is_empty() {
                self.p.transcript.push(
                    Stage::Swap,
                    Actor::Alice,
                    Entry::InitialStateReveal {
                        kind: RevealKind::MessagePairs,
                        at,
                        labels,
                    },
                );
            }
        }
        let (at, labels) = reveal(CaseTag::CaseIII, &self.p.bob, &b_seq);
        if !at.is_empty() {
            self.p.transcript.push(
                Stage::Swap,
                Actor::Bob,
                Entry::InitialStateReveal {
                    kind: RevealKind::MessagePairs,
                    at,
                    labels,
                },
            );
        }

        for &i in &checked {
            let (sa, sb) = (source(&a_seq, i), source(&b_seq, i));
            let (qa, la) = self.home_of(Actor::Alice, sa);
            let (qb, lb) = self.home_of(Actor::Bob, sb);
            let alice_bit = self.p.net.comp_measure(Actor::Alice, qa, self.rng)?;
            let bob_bit = self.p.net.comp_measure(Actor::Bob, qb, self.rng)?;
            self.p.transcript.push(
                Stage::Swap,
                Actor::Alice,
                Entry::CorrelationRecord {
                    index: i,
                    bit: alice_bit,
                },
            );
            self.p.transcript.push(
                Stage::Swap,
                Actor::Bob,
                Entry::CorrelationRecord {
                    index: i,
                    bit: bob_bit,
                },
            );
            let passed = correlation_check(CheckInput {
                case: cases[i],
                announced: bmo[i],
                alice_bit,
                bob_bit,
                alice_source: Some(la),
                bob_source: Some(lb),
            })?;
            match cases[i] {
                CaseTag::CaseI => self.swap.case_i.record(passed),
                CaseTag::CaseII => self.swap.case_ii.record(passed),
                CaseTag::CaseIII => self.swap.case_iii.record(passed),
                CaseTag::CaseIV => unreachable!(),
            }
        }

        for i in 0..cases.len() {
            let keep = match cases[i] {
                CaseTag::CaseIV => true,
                CaseTag::CaseII | CaseTag::CaseIII => reuse,
                CaseTag::CaseI => false,
            };
            if !keep {
                continue;
            }
            let (sa, sb) = (source(&a_seq, i), source(&b_seq, i));
            let (alice_home, _) = self.home_of(Actor::Alice, sa);
            let (bob_home, _) = self.home_of(Actor::Bob, sb);
            self.links.push(Link {
                slot: i,
                case: cases[i],
                alice: sa,
                bob: sb,
                alice_home,
                bob_home,
                qubits: [alice_home, bob_home, a_seq.slots[i].0, b_seq.slots[i].0],
                bmo1: bmo[i],
                bmo2: None,
                unencoded: false,
                alice_sent: None,
                bob_sent: None,
                alice_decoded: None,
                bob_decoded: None,
            });
        }
        Ok(())
    }

    /// The qubit a party kept for a swap-stage slot, with its true label.
    fn home_of(&self, who: Actor, s: Source) -> (QubitId, BellLabel) {
        let party = if who == Actor::Alice {
            &self.p.alice
        } else {
            &self.p.bob
        };
        match s {
            Source::Pair(p) => (party.pairs[p].home, party.pairs[p].init),
            Source::Decoy(d) => (party.swap_decoys[d].first, party.swap_decoys[d].label),
        }
    }

    /// A party's label for the pair `s` of `whose`, as `viewer` knows it.
    fn label_known_to(&self, viewer: Actor, whose: Actor, s: Source) -> Option<BellLabel> {
        let (_, truth) = self.home_of(whose, s);
        match s {
            Source::Decoy(_) => Some(truth),
            Source::Pair(_) if viewer == whose => Some(truth),
            Source::Pair(p) => {
                let (set, learned) = match whose {
                    Actor::Alice => (&self.cfg.alice_states, &self.bob_knows_alice),
                    _ => (&self.cfg.bob_states, &self.alice_knows_bob),
                };
                if set.len() == 1 {
                    Some(set[0])
                } else {
                    learned.as_ref().map(|v| v[p])
                }
            }
        }
    }

    fn next_symbol(&mut self, who: Actor) -> PauliLabel {
        if who == self.plan.sender && !self.plan.payload.is_empty() {
            let take = self.plan.payload.len().min(2);
            let mut s = 0u8;
            for b in self.plan.payload.drain(..take) {
                s = s << 1 | b as u8;
            }
            if take == 1 {
                s <<= 1;
            }
            PauliLabel::from_symbol(s).expect("two-bit symbol")
        } else {
            PauliLabel::from_symbol(self.rng.random_range(0..4)).expect("two-bit symbol")
        }
    }

    fn encode_and_transmit(&mut self) -> Result<(), ProtocolError> {
        let k = self.cfg.unencoded_checks.min(self.links.len());
        for j in index::sample(self.rng, self.links.len(), k) {
            self.links[j].unencoded = true;
        }
        let encoders: Vec<Actor> = if self.plan.dialogue {
            vec![Actor::Alice, Actor::Bob]
        } else {
            vec![self.plan.sender]
        };
        for who in encoders {
            let mut homes = Vec::new();
            let mut symbols = Vec::new();
            for j in 0..self.links.len() {
                if self.links[j].unencoded {
                    continue;
                }
                let p = self.next_symbol(who);
                let l = &mut self.links[j];
                if who == Actor::Alice {
                    l.alice_sent = Some(p);
                    homes.push(l.alice_home);
                } else {
                    l.bob_sent = Some(p);
                    homes.push(l.bob_home);
                }
                symbols.push(p);
            }
            encode_message(&mut self.p.net, who, &homes, &symbols)?;
        }

        let split = self.cfg.split_decoy_count();
        for who in [Actor::Alice, Actor::Bob] {
            let party = if who == Actor::Alice {
                &self.p.alice
            } else {
                &self.p.bob
            };
            let whole_count = party.transmit_decoys.len() - split;
            let base = self
                .links
                .iter()
                .enumerate()
                .map(|(j, l)| {
                    (
                        if who == Actor::Alice {
                            l.alice_home
                        } else {
                            l.bob_home
                        },
                        SlotTag::Entangled(j),
                    )
                })
                .collect();
            let mut decoys = Vec::new();
            for (d, dp) in party.transmit_decoys.iter().enumerate() {
                if d < whole_count {
                    decoys.push((dp.first, SlotTag::DecoyWholePair(d, 0)));
                    decoys.push((dp.second, SlotTag::DecoyWholePair(d, 1)));
                } else {
                    decoys.push((dp.second, SlotTag::DecoyPartner(d)));
                }
            }
            let seq = insert_decoys(who, base, decoys, self.rng);
            let received = self.transmit(Leg::new(Stage::Transmit, who), seq.qubits())?;
            if who == Actor::Alice {
                self.p.charlie.transmit_alice = received;
                self.transmit_seqs.0 = Some(seq);
            } else {
                self.p.charlie.transmit_bob = received;
                self.transmit_seqs.1 = Some(seq);
            }
        }
        self.p
            .transcript
            .push(Stage::Transmit, Actor::Charlie, Entry::Receipt);
        Ok(())
    }

    fn receiver(&self) -> Actor {
        if self.plan.sender == Actor::Bob && !self.plan.dialogue {
            Actor::Alice
        } else {
            Actor::Bob
        }
    }

    /// Label Charlie's outcome should show on an untouched, unencoded link,
    /// as the receiver computes it.
    fn expected_shared(&self, l: &Link) -> Result<BellLabel, ProtocolError> {
        let viewer = self.receiver();
        let a = self.label_known_to(viewer, Actor::Alice, l.alice);
        let b = self.label_known_to(viewer, Actor::Bob, l.bob);
        match (a, b) {
            (Some(a), Some(b)) => Ok(swapped_label(a, b, l.bmo1)),
            _ => Err(ProtocolError::MissingReveal(format!(
                "{viewer} lacks a label for slot {}",
                l.slot
            ))),
        }
    }

    fn charlie_bell(
        &mut self,
        stage: Stage,
        a: QubitId,
        b: QubitId,
    ) -> Result<BellLabel, ProtocolError> {
        match self.channel.fake_announcement(stage, self.rng) {
            Some(l) => Ok(l),
            None => self.p.net.bell_measure(Actor::Charlie, a, b, self.rng),
        }
    }

    fn transmit_check(&mut self) -> Result<(), ProtocolError> {
        let split = self.cfg.split_decoy_count();
        for who in [Actor::Alice, Actor::Bob] {
            let (seq, received, decoys) = if who == Actor::Alice {
                (
                    self.transmit_seqs.0.clone(),
                    self.p.charlie.transmit_alice.clone(),
                    self.p.alice.transmit_decoys.clone(),
                )
            } else {
                (
                    self.transmit_seqs.1.clone(),
                    self.p.charlie.transmit_bob.clone(),
                    self.p.bob.transmit_decoys.clone(),
                )
            };
            let seq = seq.expect("sequence sent before the check");
            let whole_count = decoys.len() - split;
            let pos = |t: SlotTag| seq.position_of(t).expect("decoy in its own sequence");
            let whole: Vec<(usize, usize)> = (0..whole_count)
                .map(|d| {
                    (
                        pos(SlotTag::DecoyWholePair(d, 0)),
                        pos(SlotTag::DecoyWholePair(d, 1)),
                    )
                })
                .collect();
            let splits: Vec<usize> = (whole_count..decoys.len())
                .map(|d| pos(SlotTag::DecoyPartner(d)))
                .collect();
            self.p.transcript.push(
                Stage::Transmit,
                who,
                Entry::DecoyPositions {
                    kind: PositionKind::WholePair,
                    positions: whole.iter().flat_map(|&(x, y)| [x, y]).collect(),
                },
            );
            self.p.transcript.push(
                Stage::Transmit,
                who,
                Entry::DecoyPositions {
                    kind: PositionKind::Split,
                    positions: splits.clone(),
                },
            );

            for (d, &(x, y)) in whole.iter().enumerate() {
                let label = self.charlie_bell(Stage::Transmit, received[x], received[y])?;
                self.p.transcript.push(
                    Stage::Transmit,
                    Actor::Charlie,
                    Entry::Bmo {
                        subject: BmoSubject::DecoyPair(x, y),
                        label,
                    },
                );
                let touched = [x, y]
                    .iter()
                    .filter(|&&p| self.channel.touched(seq.slots[p].0))
                    .count() as u8;
                self.transmit.push(DecoyCheck {
                    owner: who,
                    kind: CheckKind::WholePair,
                    passed: label == decoys[d].label,
                    touched,
                });
            }
            for (k, &p) in splits.iter().enumerate() {
                let dp = decoys[whole_count + k];
                let c = self
                    .p
                    .net
                    .comp_measure(Actor::Charlie, received[p], self.rng)?;
                self.p.transcript.push(
                    Stage::Transmit,
                    Actor::Charlie,
                    Entry::CorrelationRecord { index: p, bit: c },
                );
                let o = self.p.net.comp_measure(who, dp.first, self.rng)?;
                self.p.transcript.push(
                    Stage::Transmit,
                    who,
                    Entry::CorrelationRecord { index: p, bit: o },
                );
                self.transmit.push(DecoyCheck {
                    owner: who,
                    kind: CheckKind::Split,
                    passed: (c != o) == dp.label.anticorrelated(),
                    touched: u8::from(self.channel.touched(seq.slots[p].0)),
                });
            }

            let mut decoy_pos: Vec<usize> = whole
                .iter()
                .flat_map(|&(x, y)| [x, y])
                .chain(splits)
                .collect();
            decoy_pos.sort_unstable();
            let msg: Vec<usize> = (0..received.len())
                .filter(|p| decoy_pos.binary_search(p).is_err())
                .collect();
            if who == Actor::Alice {
                self.message_positions.0 = msg;
            } else {
                self.message_positions.1 = msg;
            }
        }

        if self.cfg.unencoded_checks > 0 {
            let ordinals: Vec<usize> = (0..self.links.len())
                .filter(|&j| self.links[j].unencoded)
                .collect();
            self.p.transcript.push(
                Stage::Transmit,
                self.plan.sender,
                Entry::DecoyPositions {
                    kind: PositionKind::Unencoded,
                    positions: ordinals.clone(),
                },
            );
            for j in ordinals {
                let (qa, qb) = self.message_qubits(j)?;
                let label = self.charlie_bell(Stage::Transmit, qa, qb)?;
                self.p.transcript.push(
                    Stage::Transmit,
                    Actor::Charlie,
                    Entry::Bmo {
                        subject: BmoSubject::MessagePair(j),
                        label,
                    },
                );
                self.links[j].bmo2 = Some(label);
                let expected = self.expected_shared(&self.links[j])?;
                let touched = [self.links[j].alice_home, self.links[j].bob_home]
                    .iter()
                    .filter(|&&q| self.channel.touched(q))
                    .count() as u8;
                self.transmit.push(DecoyCheck {
                    owner: self.plan.sender,
                    kind: CheckKind::Unencoded,
                    passed: label == expected,
                    touched,
                });
            }
        }
        Ok(())
    }

    /// Qubits Charlie pairs for message ordinal `j`.
    fn message_qubits(&self, j: usize) -> Result<(QubitId, QubitId), ProtocolError> {
        let (ma, mb) = &self.message_positions;
        let (ra, rb) = (&self.p.charlie.transmit_alice, &self.p.charlie.transmit_bob);
        match (ma.get(j), mb.get(j)) {
            (Some(&x), Some(&y)) => Ok((ra[x], rb[y])),
            _ => Err(ProtocolError::LengthMismatch {
                alice: ma.len(),
                bob: mb.len(),
            }),
        }
    }

    fn decode_stage(&mut self) -> Result<(), ProtocolError> {
        for j in 0..self.links.len() {
            if self.links[j].unencoded {
                continue;
            }
            let (qa, qb) = self.message_qubits(j)?;
            let label = self.charlie_bell(Stage::Decode, qa, qb)?;
            self.p.transcript.push(
                Stage::Decode,
                Actor::Charlie,
                Entry::Bmo {
                    subject: BmoSubject::MessagePair(j),
                    label,
                },
            );
            self.links[j].bmo2 = Some(label);
        }
        for j in 0..self.links.len() {
            let l = self.links[j].clone();
            if l.unencoded {
                continue;
            }
            if self.bob_decodes() {
                let decoder = match (self.plan.dialogue, l.bob_sent) {
                    (true, Some(own)) => Decoder::Partner {
                        own,
                        own_side: PairSide::Second,
                    },
                    _ => Decoder::Receiver {
                        sender_side: PairSide::First,
                    },
                };
                self.links[j].alice_decoded = Some(decode_message(
                    self.label_known_to(Actor::Bob, Actor::Alice, l.alice),
                    self.label_known_to(Actor::Bob, Actor::Bob, l.bob),
                    Some(l.bmo1),
                    l.bmo2,
                    decoder,
                )?);
            }
            if self.alice_decodes() {
                let decoder = match (self.plan.dialogue, l.alice_sent) {
                    (true, Some(own)) => Decoder::Partner {
                        own,
                        own_side: PairSide::First,
                    },
                    _ => Decoder::Receiver {
                        sender_side: PairSide::Second,
                    },
                };
                self.links[j].bob_decoded = Some(decode_message(
                    self.label_known_to(Actor::Alice, Actor::Alice, l.alice),
                    self.label_known_to(Actor::Alice, Actor::Bob, l.bob),
                    Some(l.bmo1),
                    l.bmo2,
                    decoder,
                )?);
            }
        }
        Ok(())
    }

    fn finish(mut self, outcome: Outcome) -> Result<SessionReport, ProtocolError> {
        let eve: InterceptorSummary = self.channel.finish(&mut self.p.net, self.rng)?;
        self.p
            .transcript
            .check_ordering()
            .map_err(ProtocolError::Transcript)?;
        let links = self
            .links
            .iter()
            .map(|l| LinkView {
                slot: l.slot,
                case: l.case,
                bmo1: l.bmo1,
                bmo2: l.bmo2,
                unencoded: l.unencoded,
                alice_sent: l.alice_sent,
                bob_sent: l.bob_sent,
                alice_decoded: l.alice_decoded,
                bob_decoded: l.bob_decoded,
                eve_bits: eve
                    .ancilla_records
                    .iter()
                    .filter(|r| l.qubits.contains(&r.target))
                    .map(|r| r.bit)
                    .collect(),
            })
            .collect();
        Ok(SessionReport {
            session_index: 0,
            mode: self.cfg.mode,
            sender: self.plan.sender,
            outcome,
            cases: self.cases,
            swap: self.swap,
            transmit: self.transmit,
            links,
            eve,
            transcript: self.p.transcript,
            nested: self.nested,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prepared_states_follow_config() {
        let cfg = SessionConfig {
            n_pairs: 4,
            ..Default::default()
        };
        let p = prepare_session(&cfg, &mut session_rng(1, 0)).unwrap();
        assert!(p.alice.pairs.iter().all(|m| m.init == BellLabel::PsiPlus));
        assert!(p
            .bob
            .pairs
            .iter()
            .all(|m| matches!(m.init, BellLabel::PsiPlus | BellLabel::PsiMinus)));
        assert_eq!(p.alice.swap_decoys.len(), 2);
        assert_eq!(p.bob.transmit_decoys.len(), 2);
        assert!(p
            .alice
            .swap_decoys
            .iter()
            .all(|d| d.label == BellLabel::PsiPlus));
    }

    #[test]
    fn label_bits_roundtrip() {
        let set = BellLabel::ALL.to_vec();
        let labels = vec![BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PhiPlus];
        let bits = labels_to_bits(&labels, &set);
        assert_eq!(bits.len(), 6);
        assert_eq!(bits_to_labels(&bits, &set, 3), labels);
        assert_eq!(bits_per_label(2), 1);
        assert_eq!(bits_per_label(3), 2);
    }

    #[test]
    fn honest_modes_complete() {
        for mode in [Mode::Qsdc, Mode::Qd, Mode::Qkd] {
            for seed in 0..20 {
                let cfg = SessionConfig {
                    mode,
                    master_seed: seed,
                    ..Default::default()
                };
                let r = run_session(&cfg, seed).unwrap();
                assert_eq!(r.outcome, Outcome::Completed, "{mode} seed {seed}");
                assert_eq!(r.all_checks().failures, 0);
                let (sent, ok) = r.symbol_accuracy();
                assert_eq!(sent, ok);
                assert_eq!(r.sent_bits(), r.decoded_bits());
            }
        }
    }

    #[test]
    fn dialogue_shares_bob_labels_first() {
        let cfg = SessionConfig {
            mode: Mode::Qd,
            ..Default::default()
        };
        let r = run_session(&cfg, 3).unwrap();
        assert!(!r.nested.is_empty());
        assert!(r
            .nested
            .iter()
            .all(|n| n.sender == Actor::Bob && n.mode == Mode::Qsdc));
    }
}
