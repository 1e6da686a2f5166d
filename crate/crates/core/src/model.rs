//! Rounds, packets, messages and the channel feedback semantics.

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// A node name in `1..=n`.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Zero-based index into per-node arrays.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32 + 1)
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An abstract packet. Contents never influence an execution; the fields
/// exist for latency accounting only.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packet {
    pub id: u64,
    pub origin: NodeId,
    pub injected_at: u64,
}

/// Control payloads are capped at 8 bits; the algorithms here only need two
/// distinct helper markers.
pub const CONTROL_PLACEHOLDER: u8 = 0b01;
pub const CONTROL_HELPER: u8 = 0b10;

/// What a node puts on the channel in one round: at most one packet and
/// optionally a few control bits. A message may consist entirely of control
/// bits.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub payload: Option<Packet>,
    pub control: Option<u8>,
}

impl Message {
    pub fn packet(p: Packet) -> Self {
        Message {
            payload: Some(p),
            control: None,
        }
    }

    pub fn control(bits: u8) -> Self {
        Message {
            payload: None,
            control: Some(bits),
        }
    }
}

/// Channel feedback for one round.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Feedback {
    Silence,
    Heard(Message),
    Collision,
}

impl Feedback {
    /// A round is void when no packet is heard in it.
    pub fn is_void(&self) -> bool {
        !matches!(self, Feedback::Heard(m) if m.payload.is_some())
    }

    pub fn kind(&self) -> FeedbackKind {
        match self {
            Feedback::Silence => FeedbackKind::Silence,
            Feedback::Heard(_) => FeedbackKind::Heard,
            Feedback::Collision => FeedbackKind::Collision,
        }
    }
}

/// Feedback stripped of message contents, for traces and reports.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    Silence,
    Heard,
    Collision,
}

impl std::fmt::Display for FeedbackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FeedbackKind::Silence => "silence",
            FeedbackKind::Heard => "heard",
            FeedbackKind::Collision => "collision",
        };
        f.write_str(s)
    }
}

/// The perceived feedback handed to algorithms. Packet identity is hidden so
/// that non-adaptive state machines cannot accidentally depend on it; control
/// bits stay visible because adaptive algorithms are allowed to read them.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum Signal {
    Silence,
    Heard { has_packet: bool, control: Option<u8> },
    Collision,
}

impl Signal {
    pub fn from_feedback(f: &Feedback) -> Self {
        match f {
            Feedback::Silence => Signal::Silence,
            Feedback::Heard(m) => Signal::Heard {
                has_packet: m.payload.is_some(),
                control: m.control,
            },
            Feedback::Collision => Signal::Collision,
        }
    }
}

/// Static channel parameters.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub nodes: u32,
    pub collision_detection: bool,
}

/// Resolve one round of transmissions into channel feedback.
///
/// Empty set: silence. Singleton: the message is heard by all nodes in the
/// same round. Two or more: a collision. A node appearing twice signals an
/// engine bug.
pub fn resolve_round(transmissions: &[(NodeId, Message)]) -> Result<Feedback, SimError> {
    for (i, (node, _)) in transmissions.iter().enumerate() {
        if transmissions[..i].iter().any(|(other, _)| other == node) {
            return Err(SimError::DuplicateTransmitter { node: *node });
        }
    }
    Ok(match transmissions {
        [] => Feedback::Silence,
        [(_, m)] => Feedback::Heard(*m),
        _ => Feedback::Collision,
    })
}

/// Map true channel feedback to what nodes perceive. Without collision
/// detection a collision is perceived as a silent round.
pub fn perceive(f: Feedback, collision_detection: bool) -> Feedback {
    match f {
        Feedback::Collision if !collision_detection => Feedback::Silence,
        other => other,
    }
}
