use serde::Serialize;

use crate::protocol::{CheckKind, SessionReport, Tally};

/// Pooled failure rate with a 95% normal-approximation interval:
/// `half_width = 1.96 * sqrt(rate * (1 - rate) / checks)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionEstimate {
    pub strategy: String,
    pub checks: u64,
    pub failures: u64,
    pub rate: f64,
    pub half_width: f64,
}

impl DetectionEstimate {
    pub fn from_tally(strategy: &str, t: Tally) -> Self {
        let rate = t.rate();
        let half_width = if t.checks == 0 {
            0.0
        } else {
            1.96 * (rate * (1.0 - rate) / t.checks as f64).sqrt()
        };
        Self {
            strategy: strategy.to_string(),
            checks: t.checks,
            failures: t.failures,
            rate,
            half_width,
        }
    }

    /// Standard error of the rate under an assumed true rate `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        if self.checks == 0 {
            return f64::INFINITY;
        }
        (p * (1.0 - p) / self.checks as f64).sqrt()
    }

    /// Whether the rate lies within `k` standard errors of `p`. A zero
    /// standard error demands an exact match.
    pub fn within(&self, p: f64, k: f64) -> bool {
        let se = self.standard_error(p);
        if se == 0.0 {
            (self.rate - p).abs() < 1e-12
        } else {
            (self.rate - p).abs() <= k * se
        }
    }
}

/// Which checks to pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSelector {
    All,
    SwapCaseI,
    SwapCaseII,
    SwapCaseIII,
    Swap,
    Transmit,
    /// Transmit-stage checks of one kind with exactly `touched` travelling
    /// qubits acted on (`None` for any).
    Kind {
        kind: CheckKind,
        touched: Option<u8>,
    },
}

pub fn select(report: &SessionReport, sel: CheckSelector) -> Tally {
    match sel {
        CheckSelector::All => {
            let mut t = report.swap.total();
            t.add(report.transmit.total());
            t
        }
        CheckSelector::SwapCaseI => report.swap.case_i,
        CheckSelector::SwapCaseII => report.swap.case_ii,
        CheckSelector::SwapCaseIII => report.swap.case_iii,
        CheckSelector::Swap => report.swap.total(),
        CheckSelector::Transmit => report.transmit.total(),
        CheckSelector::Kind { kind, touched } => {
            let mut t = Tally::default();
            for c in &report.transmit.records {
                if c.kind == kind && touched.is_none_or(|k| c.touched == k) {
                    t.record(c.passed);
                }
            }
            t
        }
    }
}

/// Pools every executed check of the main sessions.
pub fn detection_rate(reports: &[SessionReport], strategy: &str) -> DetectionEstimate {
    detection_rate_for(reports, strategy, CheckSelector::All)
}

pub fn detection_rate_for(
    reports: &[SessionReport],
    strategy: &str,
    sel: CheckSelector,
) -> DetectionEstimate {
    let mut t = Tally::default();
    for r in reports {
        t.add(select(r, sel));
    }
    DetectionEstimate::from_tally(strategy, t)
}
