use std::collections::BTreeMap;

use serde::Serialize;

use super::AnalysisError;
use crate::protocol::{Mode, SessionReport};
use crate::quantum::{BellLabel, PauliLabel};

/// Largest tolerated bias bound before an estimate is rejected.
pub const MAX_BIAS_BITS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiEstimate {
    pub bits: f64,
    pub samples: usize,
    /// `(|X| - 1)(|Y| - 1) / (2 N ln 2)`, the leading bias of the plug-in
    /// estimate with observed support sizes.
    pub bias_bound: f64,
}

/// Plug-in mutual information of paired samples, in bits.
pub fn mutual_information<X: Ord + Clone, Y: Ord + Clone>(pairs: &[(X, Y)]) -> MiEstimate {
    let n = pairs.len();
    if n == 0 {
        return MiEstimate {
            bits: 0.0,
            samples: 0,
            bias_bound: f64::INFINITY,
        };
    }
    let mut joint: BTreeMap<(X, Y), usize> = BTreeMap::new();
    let mut px: BTreeMap<X, usize> = BTreeMap::new();
    let mut py: BTreeMap<Y, usize> = BTreeMap::new();
    for (x, y) in pairs {
        *joint.entry((x.clone(), y.clone())).or_default() += 1;
        *px.entry(x.clone()).or_default() += 1;
        *py.entry(y.clone()).or_default() += 1;
    }
    let nf = n as f64;
    let bits = joint
        .iter()
        .map(|((x, y), &c)| {
            let pxy = c as f64 / nf;
            pxy * (pxy * nf * nf / (px[x] as f64 * py[y] as f64)).log2()
        })
        .sum::<f64>()
        .max(0.0);
    let bias_bound = ((px.len() - 1) * (py.len() - 1)) as f64 / (2.0 * nf * std::f64::consts::LN_2);
    MiEstimate {
        bits,
        samples: n,
        bias_bound,
    }
}

/// Eve's per-pair record: both announcements plus her ancilla bits.
pub type EveRecord = (BellLabel, BellLabel, Vec<bool>);

/// Samples of (Eve's record, transmitted symbols) over completed sessions.
/// Dialogue sessions pair her record with both parties' operators.
pub fn eve_samples(
    reports: &[SessionReport],
) -> Vec<(EveRecord, (PauliLabel, Option<PauliLabel>))> {
    let mut out = Vec::new();
    for r in reports.iter().filter(|r| !r.aborted()) {
        for l in r.message_links() {
            let (Some(bmo2), Some(a)) = (l.bmo2, l.alice_sent) else {
                continue;
            };
            let b = if r.mode == Mode::Qd { l.bob_sent } else { None };
            out.push(((l.bmo1, bmo2, l.eve_bits.clone()), (a, b)));
        }
    }
    out
}

/// Empirical information Eve holds about the transmitted symbols, in bits
/// per pair.
pub fn eve_information(reports: &[SessionReport]) -> Result<MiEstimate, AnalysisError> {
    let est = mutual_information(&eve_samples(reports));
    if est.bias_bound > MAX_BIAS_BITS {
        return Err(AnalysisError::InsufficientSamples {
            samples: est.samples,
            bias_bound: est.bias_bound,
        });
    }
    Ok(est)
}
