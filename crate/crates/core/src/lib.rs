//! Simulator for orthogonal-state-based measurement-device-independent
//! secure direct communication (QSDC) and quantum dialogue (QD).

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod protocol;
pub mod quantum;
