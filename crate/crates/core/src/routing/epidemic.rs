use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::types::{Message, NodeId, SimTime};

/// Flooding: every contact replicates every message the peer lacks.
#[derive(Debug, Clone, Copy, Default)]
pub struct Epidemic;

impl Router for Epidemic {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Epidemic
    }

    fn decide(&self, _: NodeId, _: NodeId, _: &Message, _: SimTime) -> Decision {
        Decision::Replicate(TokenShare::Keep)
    }
}
