//! Error types shared across the simulator.

use thiserror::Error;

use crate::model::NodeId;

/// Errors raised while building or validating a scenario.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("channel must have at least one node")]
    EmptyChannel,
    #[error("shares vector has {got} entries but the channel has {nodes} nodes")]
    ShareCountMismatch { got: usize, nodes: usize },
    #[error("sum of shares {sum} exceeds the window {window}")]
    SharesExceedWindow { sum: u64, window: u64 },
    #[error("window must be positive")]
    ZeroWindow,
    #[error("{algorithm} requires a channel {requirement}")]
    ChannelMismatch {
        algorithm: String,
        requirement: &'static str,
    },
    #[error("transmission sequence {0:?} must be a nonempty string of 0s and 1s")]
    BadSequence(String),
    #[error("expected {expected} transmission sequences (one per node or a single shared one), got {got}")]
    SequenceCountMismatch { expected: usize, got: usize },
    #[error("single-overload strategy requires 1/2 < a/b <= 1, got {numerator}/{denominator}")]
    OverloadRateOutOfRange { numerator: u32, denominator: u32 },
    #[error("single-overload strategy targets node {node} outside 1..={nodes}")]
    OverloadNodeOutOfRange { node: u32, nodes: u32 },
    #[error("single-overload strategy must match the declared adversary: expected share {expected} at node {node} and window {window}")]
    OverloadTypeMismatch {
        node: u32,
        expected: u64,
        window: u64,
    },
    #[error("horizon must be positive")]
    ZeroHorizon,
}

/// Errors raised by trace validation against an adversary type.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("injection event names node {0} outside the channel")]
    NodeOutOfRange(u32),
    #[error("injection event at round {round} carries a negative count")]
    NegativeCount { round: u64 },
    #[error("injection events must be sorted by ascending round")]
    UnsortedEvents,
    #[error("malformed injection CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// Errors raised by the replicated shared-state structures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SharedError {
    #[error("share upgrades must be positive")]
    ZeroUpgrade,
    #[error("main pointer is undefined while the lists are empty")]
    PointerUndefined,
    #[error("node {0} is outside the channel")]
    NodeOutOfRange(u32),
}

/// A breach of a protocol guarantee detected while stepping an algorithm.
///
/// These cannot occur when every node follows the algorithm; they signal an
/// engine or algorithm bug, never an adversary move.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolBreach {
    #[error("collision during a reserved upgrade sequence")]
    CollisionDuringReservation,
    #[error("more than three simultaneous transmitters under the cycle algorithm")]
    TooManyTransmitters,
    #[error("conflict-free algorithm produced a collision")]
    ConflictFreedomViolated,
    #[error("invariant breach: {0}")]
    Invariant(String),
}

/// Top-level failure of an engine run.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(#[from] ConfigError),
    #[error("adversary violated its type at round {round}: node {node} exceeded share {share} within the window starting at round {window_start}")]
    AdversaryViolation {
        round: u64,
        node: NodeId,
        share: u64,
        window_start: u64,
    },
    #[error("malformed injection trace: {0}")]
    Trace(#[from] TraceError),
    #[error("protocol breach at round {round}: {breach}")]
    Breach { round: u64, breach: ProtocolBreach },
    #[error("node {node} attempted to transmit a packet with an empty queue at round {round}")]
    EmptyQueueTransmit { round: u64, node: NodeId },
    #[error("duplicate transmitter {node} in a resolved round")]
    DuplicateTransmitter { node: NodeId },
    #[error("estimate invariant failed at round {round}: {detail}")]
    EstimateBreach { round: u64, detail: String },
    #[error("shared state diverged at round {round}: {detail}")]
    SharedDivergence { round: u64, detail: String },
}
