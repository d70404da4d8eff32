use std::collections::BTreeMap;

use serde::Serialize;

use super::AnalysisError;
use crate::quantum::{frame_image, swapped_label, BellLabel, PauliLabel};

/// What the announcements are about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeakageMode {
    /// Both parties encode: 4 bits per pair.
    Dialogue,
    /// Only Alice encodes: 2 bits per pair.
    Direct,
}

impl LeakageMode {
    pub fn apriori_bits(self) -> f64 {
        match self {
            LeakageMode::Dialogue => 4.0,
            LeakageMode::Direct => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub h_apriori: f64,
    pub h_aposteriori: f64,
    pub leaked: f64,
    /// Encodings with nonzero posterior.
    pub consistent: usize,
    pub equiprobable: bool,
}

fn entropy(weights: impl IntoIterator<Item = f64>) -> f64 {
    let w: Vec<f64> = weights.into_iter().filter(|&x| x > 0.0).collect();
    let total: f64 = w.iter().sum();
    -w.iter()
        .map(|&x| x / total)
        .map(|p| p * p.log2())
        .sum::<f64>()
}

fn uniform(set: &[BellLabel]) -> Vec<(BellLabel, f64)> {
    set.iter().map(|&l| (l, 1.0 / set.len() as f64)).collect()
}

/// Posterior over encodings given both announcements, with explicit priors
/// on the initial labels and uniform encodings.
pub fn leakage_with_priors(
    alice_prior: &[(BellLabel, f64)],
    bob_prior: &[(BellLabel, f64)],
    bmo1: BellLabel,
    bmo2: BellLabel,
    mode: LeakageMode,
) -> Result<LeakageReport, AnalysisError> {
    let bob_ops: &[PauliLabel] = match mode {
        LeakageMode::Dialogue => &PauliLabel::ALL,
        LeakageMode::Direct => &[PauliLabel::I],
    };
    let mut posterior: BTreeMap<(PauliLabel, PauliLabel), f64> = BTreeMap::new();
    for &(a, pa) in alice_prior {
        for &(b, pb) in bob_prior {
            let shared = swapped_label(a, b, bmo1);
            for ua in PauliLabel::ALL {
                for &ub in bob_ops {
                    if frame_image(ua, ub, shared) == bmo2 && pa * pb > 0.0 {
                        *posterior.entry((ua, ub)).or_default() += pa * pb;
                    }
                }
            }
        }
    }
    if posterior.is_empty() {
        return Err(AnalysisError::Integrity(format!(
            "no encoding explains {bmo1} then {bmo2}"
        )));
    }
    let h_post = entropy(posterior.values().copied());
    let first = *posterior.values().next().expect("nonempty");
    let equiprobable = posterior
        .values()
        .all(|&w| (w - first).abs() <= 1e-12 * first.max(1.0));
    let h_apriori = mode.apriori_bits();
    Ok(LeakageReport {
        h_apriori,
        h_aposteriori: h_post,
        leaked: h_apriori - h_post,
        consistent: posterior.len(),
        equiprobable,
    })
}

/// Dialogue leakage under uniform initial labels and encodings.
pub fn leakage_bits(
    alice_set: &[BellLabel],
    bob_set: &[BellLabel],
    bmo1: BellLabel,
    bmo2: BellLabel,
) -> Result<LeakageReport, AnalysisError> {
    leakage_with_priors(
        &uniform(alice_set),
        &uniform(bob_set),
        bmo1,
        bmo2,
        LeakageMode::Dialogue,
    )
}

/// Leakage for every announcement pair.
pub fn leakage_table(
    alice_set: &[BellLabel],
    bob_set: &[BellLabel],
    mode: LeakageMode,
) -> Result<Vec<(BellLabel, BellLabel, LeakageReport)>, AnalysisError> {
    let mut out = Vec::with_capacity(16);
    for m1 in BellLabel::ALL {
        for m2 in BellLabel::ALL {
            let r = leakage_with_priors(&uniform(alice_set), &uniform(bob_set), m1, m2, mode)?;
            out.push((m1, m2, r));
        }
    }
    Ok(out)
}
