//! The stake-path algorithm and the analyses around it.

pub mod algo;
pub mod conclude;
pub mod contact;
pub mod init;
pub mod monitor;
pub mod uturn;

use thiserror::Error;

use crate::certify::CertificateError;
use crate::geom::Direction;
use crate::model::{PathAssembly, TileAssemblySystem};
use crate::pumping::PumpError;

pub use algo::{
    algo_step, check_invariants, run_algorithm, AlgoState, AttemptResult, BranchRecord, BranchStop, InconclusiveReason,
    InvariantViolation, Mode, Outcome, Provenance, PumpAttempt, PumpDirection, RunLimits, RunReport, StakeInstance,
    StakeTile, TraceEvent, Transition,
};
pub use conclude::{conclude, ConcludeLimits, FinalReport, Stage};
pub use contact::{classify_contact, Contact};
pub use init::{default_height_budget, find_initial_pair, InitialPair};
pub use monitor::{south_pump_monitor, TrousCheck};
pub use uturn::{detect_nice_uturn, uturn_candidates, NiceUTurn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Pump(#[from] PumpError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error("invalid algorithm state: {0}")]
    InvalidState(String),
}

/// Directions from tile `m` to its predecessor and successor along the path.
///
/// The predecessor of the first tile is the seed tile it binds to. Returns
/// `None` for the last tile, or when the first tile has no bound seed tile.
pub(crate) fn path_frame(tas: &TileAssemblySystem, path: &PathAssembly, m: usize) -> Option<(Direction, Direction)> {
    if m >= path.len() {
        return None;
    }
    let here = path.pos(m);
    let prev = if m == 1 { path.anchor(tas)? } else { path.pos(m - 1) };
    Some((here.direction_to(prev)?, here.direction_to(path.pos(m + 1))?))
}
