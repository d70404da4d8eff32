//! Batch statistics, leakage enumeration, information estimates and noise
//! sweeps.

mod batch;
mod detection;
mod information;
mod leakage;
mod noise;
mod schmidt;

pub use batch::{run_batch, run_batch_map};
pub use detection::{detection_rate, detection_rate_for, select, CheckSelector, DetectionEstimate};
pub use information::{
    eve_information, eve_samples, mutual_information, EveRecord, MiEstimate, MAX_BIAS_BITS,
};
pub use leakage::{leakage_bits, leakage_table, leakage_with_priors, LeakageMode, LeakageReport};
pub use noise::{noise_fidelity, NoiseSpec, NoiseTarget};
pub use schmidt::{entangle_measure_analysis, schmidt_coefficients, schmidt_rank, AttackAnalysis};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("integrity: {0}")]
    Integrity(String),
    #[error("{samples} samples leave a bias bound of {bias_bound:.4} bits")]
    InsufficientSamples { samples: usize, bias_bound: f64 },
}
