mod common;

use osbmdi::analysis::run_batch;
use osbmdi::protocol::{
    run_session, run_session_with, Actor, DecoyPolicy, Interceptor, Leg, Mode, Network, Outcome,
    ProtocolError, SessionConfig, SessionRng, Stage,
};
use osbmdi::quantum::{BellLabel, PauliLabel, QubitId};

fn cfg(mode: Mode, n: usize, seed: u64) -> SessionConfig {
    SessionConfig {
        mode,
        n_pairs: n,
        master_seed: seed,
        ..Default::default()
    }
}

fn assert_clean(c: &SessionConfig, sessions: u64) {
    for r in run_batch(c, sessions).unwrap() {
        assert_eq!(r.outcome, Outcome::Completed, "session {}", r.session_index);
        assert_eq!(r.all_checks().failures, 0);
        let (sent, ok) = r.symbol_accuracy();
        assert!(sent > 0);
        assert_eq!(sent, ok);
        assert_eq!(r.sent_bits(), r.decoded_bits());
        r.transcript.check_ordering().unwrap();
    }
}

#[test]
fn honest_direct_and_dialogue() {
    assert_clean(&cfg(Mode::Qsdc, 16, 11), 100);
    assert_clean(&cfg(Mode::Qd, 16, 12), 100);
    assert_clean(&cfg(Mode::Qkd, 16, 13), 50);
}

#[test]
fn honest_variants() {
    let all = BellLabel::ALL.to_vec();
    assert_clean(
        &SessionConfig {
            bob_states: all.clone(),
            ..cfg(Mode::Qd, 12, 1)
        },
        40,
    );
    assert_clean(
        &SessionConfig {
            alice_states: all.clone(),
            ..cfg(Mode::Qsdc, 12, 2)
        },
        40,
    );
    assert_clean(
        &SessionConfig {
            decoy_policy: DecoyPolicy::Random(all.clone()),
            ..cfg(Mode::Qd, 12, 3)
        },
        40,
    );
    assert_clean(
        &SessionConfig {
            use_cases_ii_iii_for_message: true,
            ..cfg(Mode::Qsdc, 12, 4)
        },
        40,
    );
    assert_clean(
        &SessionConfig {
            unencoded_checks: 2,
            ..cfg(Mode::Qsdc, 16, 5)
        },
        40,
    );
    assert_clean(
        &SessionConfig {
            split_decoys: Some(0),
            ..cfg(Mode::Qd, 8, 6)
        },
        40,
    );
    assert_clean(
        &SessionConfig {
            split_decoys: Some(4),
            ..cfg(Mode::Qd, 8, 7)
        },
        40,
    );
}

/// Exact distribution of the number of indices where both sides hold a
/// decoy, for `d` decoys placed uniformly among `len` slots on each side.
fn case_i_distribution(len: usize, d: usize) -> Vec<f64> {
    let masks: Vec<u32> = (0u32..1 << len)
        .filter(|m| m.count_ones() as usize == d)
        .collect();
    let mut counts = vec![0u64; d + 1];
    for a in &masks {
        for b in &masks {
            counts[(a & b).count_ones() as usize] += 1;
        }
    }
    let total = (masks.len() * masks.len()) as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

#[test]
fn case_counts_follow_enumeration() {
    let n = 8;
    let (len, d) = (n + n / 2, n / 2);
    let dist = case_i_distribution(len, d);
    let mean: f64 = dist.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    let var: f64 = dist
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64 - mean).powi(2) * p)
        .sum();
    assert!((mean - (d * d) as f64 / len as f64).abs() < 1e-12);

    let sessions = 3000;
    let reports = run_batch(&cfg(Mode::Qsdc, n, 99), sessions).unwrap();
    let mut totals = [0u64; 4];
    for r in &reports {
        let c = r.cases;
        assert_eq!(
            (c.case_i + c.case_ii + c.case_iii + c.case_iv) as usize,
            len
        );
        // each side holds exactly d decoys
        assert_eq!((c.case_i + c.case_ii) as usize, d);
        assert_eq!((c.case_i + c.case_iii) as usize, d);
        totals[0] += c.case_i;
        totals[3] += c.case_iv;
    }
    let observed = totals[0] as f64 / sessions as f64;
    let se = (var / sessions as f64).sqrt();
    assert!(
        (observed - mean).abs() < common::SIGMAS * se,
        "mean CaseI {observed} vs {mean}"
    );
    // CaseIV = len - 2d + CaseI
    assert_eq!(totals[3], sessions * (len - 2 * d) as u64 + totals[0]);
}

#[test]
fn mixed_cases_discarded_unless_reused() {
    for r in run_batch(&cfg(Mode::Qsdc, 16, 3), 50).unwrap() {
        assert_eq!(r.links.len() as u64, r.cases.case_iv);
        assert_eq!(r.swap.case_ii.checks, r.cases.case_ii);
        assert_eq!(r.swap.case_iii.checks, r.cases.case_iii);
        assert_eq!(r.swap.case_i.checks, r.cases.case_i);
    }
    let reuse = SessionConfig {
        use_cases_ii_iii_for_message: true,
        ..cfg(Mode::Qsdc, 16, 3)
    };
    for r in run_batch(&reuse, 50).unwrap() {
        assert_eq!(
            r.links.len() as u64,
            r.cases.case_ii + r.cases.case_iii + r.cases.case_iv
        );
        assert_eq!(r.swap.case_ii.checks + r.swap.case_iii.checks, 0);
    }
}

#[test]
fn dialogue_exchanges_both_ways() {
    let r = run_session(&cfg(Mode::Qd, 16, 8), 0).unwrap();
    assert!(!r.nested.is_empty());
    for l in r.message_links().filter(|l| !l.unencoded) {
        assert_eq!(l.alice_sent, l.alice_decoded);
        assert_eq!(l.bob_sent, l.bob_decoded);
        assert!(l.alice_sent.is_some() && l.bob_sent.is_some());
    }
}

#[test]
fn session_is_a_function_of_seed_and_index() {
    let c = cfg(Mode::Qd, 12, 5);
    assert_eq!(run_session(&c, 3).unwrap(), run_session(&c, 3).unwrap());
    assert_ne!(
        run_session(&c, 3).unwrap().transcript,
        run_session(&c, 4).unwrap().transcript
    );
}

#[test]
fn invalid_config_rejected() {
    let bad = SessionConfig {
        n_pairs: 5,
        ..Default::default()
    };
    assert!(matches!(
        run_session(&bad, 0),
        Err(ProtocolError::InvalidConfig(_))
    ));
    let bad = SessionConfig {
        split_decoys: Some(9),
        ..Default::default()
    };
    assert!(matches!(
        run_session(&bad, 0),
        Err(ProtocolError::InvalidConfig(_))
    ));
}

struct DropLast;

impl Interceptor for DropLast {
    fn intercept(
        &mut self,
        leg: Leg,
        seq: &mut Vec<QubitId>,
        _: &mut Network,
        _: &mut SessionRng,
    ) -> Result<(), ProtocolError> {
        if leg == Leg::new(Stage::Swap, Actor::Bob) {
            seq.pop();
        }
        Ok(())
    }
}

struct Pocket;

impl Interceptor for Pocket {
    fn intercept(
        &mut self,
        _: Leg,
        seq: &mut Vec<QubitId>,
        net: &mut Network,
        _: &mut SessionRng,
    ) -> Result<(), ProtocolError> {
        net.transfer(seq[0], Actor::Channel, Actor::Eve)
    }
}

struct Trespass;

impl Interceptor for Trespass {
    fn intercept(
        &mut self,
        _: Leg,
        seq: &mut Vec<QubitId>,
        net: &mut Network,
        _: &mut SessionRng,
    ) -> Result<(), ProtocolError> {
        net.apply_pauli(Actor::Eve, seq[0], PauliLabel::X)
    }
}

#[test]
fn misbehaving_channels_are_errors() {
    let c = cfg(Mode::Qsdc, 8, 0);
    let e = run_session_with(&c, 0, &|_| Box::new(DropLast)).unwrap_err();
    assert!(matches!(e, ProtocolError::LengthMismatch { .. }), "{e}");
    let e = run_session_with(&c, 0, &|_| Box::new(Pocket)).unwrap_err();
    assert!(
        matches!(
            e,
            ProtocolError::Custody {
                holder: Some(Actor::Eve),
                ..
            }
        ),
        "{e}"
    );
    let e = run_session_with(&c, 0, &|_| Box::new(Trespass)).unwrap_err();
    assert!(
        matches!(
            e,
            ProtocolError::Custody {
                actor: Actor::Eve,
                ..
            }
        ),
        "{e}"
    );
}
