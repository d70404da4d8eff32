use std::path::PathBuf;

use serde::Serialize;

use crate::adversary::{AttackSpec, DisturbMode, Strategy};
use crate::analysis::{
    entangle_measure_analysis, run_batch_map, select, CheckSelector, DetectionEstimate,
};
use crate::protocol::{
    CheckKind, Outcome, ProtocolError, SessionConfig, SessionReport, Stage, Tally,
};
use crate::quantum::BellLabel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_path: String,
    pub sessions: u64,
    pub master_seed: u64,
    pub output: String,
    pub config: SessionConfig,
}

impl RunManifest {
    pub fn new(path: &Option<PathBuf>, cfg: &SessionConfig, sessions: u64, output: String) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_path: path
                .as_ref()
                .map_or_else(String::new, |p| p.display().to_string()),
            sessions,
            master_seed: cfg.master_seed,
            output,
            config: cfg.clone(),
        }
    }
}

#[derive(Serialize)]
pub(super) struct ManifestOnly {
    pub manifest: RunManifest,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub sessions: u64,
    pub completed: u64,
    pub aborted: u64,
    pub aborted_nested: u64,
    pub aborted_swap: u64,
    pub aborted_transmit: u64,
    pub nested_sessions: u64,
    pub symbols_sent: u64,
    pub symbols_correct: u64,
    pub decode_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Stage1Section {
    pub case_i_slots: u64,
    pub case_ii_slots: u64,
    pub case_iii_slots: u64,
    pub case_iv_slots: u64,
    pub case_i_checks: u64,
    pub case_i_failures: u64,
    pub case_ii_checks: u64,
    pub case_ii_failures: u64,
    pub case_iii_checks: u64,
    pub case_iii_failures: u64,
    pub error_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Stage2Section {
    pub whole_checks: u64,
    pub whole_failures: u64,
    pub split_checks: u64,
    pub split_failures: u64,
    pub unencoded_checks: u64,
    pub unencoded_failures: u64,
    pub error_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackSection {
    pub beta2: f64,
    pub schmidt_rank: usize,
    pub schmidt_coefficients: Vec<f64>,
    /// Per attacked travelling qubit.
    pub theoretical_rate: f64,
    /// Both halves of a whole pair attacked.
    pub whole_pair_theoretical_rate: f64,
    pub measured_split_checks: u64,
    pub measured_split_rate: f64,
    pub measured_whole_checks: u64,
    pub measured_whole_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub manifest: RunManifest,
    pub summary: Summary,
    pub stage1: Stage1Section,
    pub stage2: Stage2Section,
    pub detection: DetectionEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack_analysis: Option<AttackSection>,
}

/// What one session contributes to a run report.
#[derive(Debug, Clone, Default)]
struct Digest {
    outcome: Option<Outcome>,
    nested: u64,
    cases: [u64; 4],
    swap: [Tally; 3],
    stage2: [Tally; 3],
    split_single: Tally,
    whole_both: Tally,
    detection: Tally,
    symbols: (u64, u64),
}

fn digest(r: SessionReport, sel: CheckSelector) -> Digest {
    let single = CheckSelector::Kind {
        kind: CheckKind::Split,
        touched: Some(1),
    };
    let both = CheckSelector::Kind {
        kind: CheckKind::WholePair,
        touched: Some(2),
    };
    Digest {
        outcome: Some(r.outcome),
        nested: r.nested.len() as u64,
        cases: [
            r.cases.case_i,
            r.cases.case_ii,
            r.cases.case_iii,
            r.cases.case_iv,
        ],
        swap: [r.swap.case_i, r.swap.case_ii, r.swap.case_iii],
        stage2: [r.transmit.whole, r.transmit.split, r.transmit.unencoded],
        split_single: select(&r, single),
        whole_both: select(&r, both),
        detection: select(&r, sel),
        symbols: r.symbol_accuracy(),
    }
}

/// The checks that measure a strategy's characteristic rate.
pub(super) fn selector_for(spec: &AttackSpec) -> CheckSelector {
    match &spec.strategy {
        Strategy::InterceptResend | Strategy::FakeBmo { .. } => CheckSelector::SwapCaseI,
        Strategy::EntangleMeasure { .. }
        | Strategy::Disturb {
            mode: DisturbMode::RandomPauli,
            ..
        } => CheckSelector::Kind {
            kind: CheckKind::Split,
            touched: Some(1),
        },
        Strategy::Disturb {
            mode: DisturbMode::Reorder,
            ..
        } => CheckSelector::Transmit,
        Strategy::FlipAll => CheckSelector::Kind {
            kind: CheckKind::Split,
            touched: None,
        },
    }
}

pub(super) fn detection_over(
    cfg: &SessionConfig,
    sessions: u64,
    sel: CheckSelector,
) -> Result<DetectionEstimate, ProtocolError> {
    let tallies = run_batch_map(cfg, sessions, |r| Ok(select(&r, sel)))?;
    let mut t = Tally::default();
    for x in tallies {
        t.add(x);
    }
    let name = cfg.attack.as_ref().map_or("none", |a| a.strategy.name());
    Ok(DetectionEstimate::from_tally(name, t))
}

pub fn run_report(
    manifest: RunManifest,
    cfg: &SessionConfig,
    sessions: u64,
) -> Result<RunReport, ProtocolError> {
    let sel = cfg.attack.as_ref().map_or(CheckSelector::All, selector_for);
    let digests = run_batch_map(cfg, sessions, |r| Ok(digest(r, sel)))?;

    let mut summary = Summary {
        sessions,
        ..Default::default()
    };
    let mut s1 = Stage1Section::default();
    let mut s2 = Stage2Section::default();
    let (mut swap_all, mut tx_all, mut det, mut split1, mut whole2) = (
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
    );
    for d in &digests {
        match d.outcome {
            Some(Outcome::Completed) => summary.completed += 1,
            Some(Outcome::Aborted { stage, .. }) => {
                summary.aborted += 1;
                match stage {
                    Stage::Nested => summary.aborted_nested += 1,
                    Stage::Swap => summary.aborted_swap += 1,
                    _ => summary.aborted_transmit += 1,
                }
            }
            None => {}
        }
        summary.nested_sessions += d.nested;
        summary.symbols_sent += d.symbols.0;
        summary.symbols_correct += d.symbols.1;
        s1.case_i_slots += d.cases[0];
        s1.case_ii_slots += d.cases[1];
        s1.case_iii_slots += d.cases[2];
        s1.case_iv_slots += d.cases[3];
        for t in d.swap {
            swap_all.add(t);
        }
        for t in d.stage2 {
            tx_all.add(t);
        }
        s1.case_i_checks += d.swap[0].checks;
        s1.case_i_failures += d.swap[0].failures;
        s1.case_ii_checks += d.swap[1].checks;
        s1.case_ii_failures += d.swap[1].failures;
        s1.case_iii_checks += d.swap[2].checks;
        s1.case_iii_failures += d.swap[2].failures;
        s2.whole_checks += d.stage2[0].checks;
        s2.whole_failures += d.stage2[0].failures;
        s2.split_checks += d.stage2[1].checks;
        s2.split_failures += d.stage2[1].failures;
        s2.unencoded_checks += d.stage2[2].checks;
        s2.unencoded_failures += d.stage2[2].failures;
        det.add(d.detection);
        split1.add(d.split_single);
        whole2.add(d.whole_both);
    }
    summary.decode_accuracy = if summary.symbols_sent == 0 {
        1.0
    } else {
        summary.symbols_correct as f64 / summary.symbols_sent as f64
    };
    s1.error_rate = swap_all.rate();
    s2.error_rate = tx_all.rate();

    let name = cfg.attack.as_ref().map_or("none", |a| a.strategy.name());
    let attack_analysis = match cfg.attack.as_ref().map(|a| &a.strategy) {
        Some(Strategy::EntangleMeasure { alpha, beta }) => {
            let a = entangle_measure_analysis(*alpha, *beta, BellLabel::PsiPlus)?;
            Some(AttackSection {
                beta2: a.beta_sq,
                schmidt_rank: a.schmidt_rank,
                schmidt_coefficients: a.schmidt_coefficients,
                theoretical_rate: a.theoretical_rate,
                whole_pair_theoretical_rate: 2.0 * alpha.norm_sqr() * beta.norm_sqr(),
                measured_split_checks: split1.checks,
                measured_split_rate: split1.rate(),
                measured_whole_checks: whole2.checks,
                measured_whole_rate: whole2.rate(),
            })
        }
        _ => None,
    };
    Ok(RunReport {
        manifest,
        summary,
        stage1: s1,
        stage2: s2,
        detection: DetectionEstimate::from_tally(name, det),
        attack_analysis,
    })
}

pub fn render_run(r: &RunReport) -> Result<String, String> {
    toml::to_string(r).map_err(|e| e.to_string())
}
