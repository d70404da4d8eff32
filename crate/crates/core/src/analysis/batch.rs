use rayon::prelude::*;

use crate::protocol::{run_session, ProtocolError, SessionConfig, SessionReport};

/// Runs sessions `0..sessions` in parallel; results are in index order.
pub fn run_batch(cfg: &SessionConfig, sessions: u64) -> Result<Vec<SessionReport>, ProtocolError> {
    run_batch_map(cfg, sessions, Ok)
}

/// Like [`run_batch`] but reduces each report as soon as it is produced.
pub fn run_batch_map<T: Send>(
    cfg: &SessionConfig,
    sessions: u64,
    f: impl Fn(SessionReport) -> Result<T, ProtocolError> + Sync,
) -> Result<Vec<T>, ProtocolError> {
    cfg.validate()?;
    (0..sessions)
        .into_par_iter()
        .map(|i| run_session(cfg, i).and_then(&f))
        .collect()
}
