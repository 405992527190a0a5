use super::{Decision, ProtocolKind, Router};
use crate::types::{GroupLabel, Message, NodeId, Roster, SimTime};

/// Hand over iff the peer shares the destination's label and the carrier
/// does not. Unlabelled nodes match nothing.
pub fn label_rule(carrier: Option<&GroupLabel>, peer: Option<&GroupLabel>, dst: Option<&GroupLabel>) -> bool {
    match (peer, dst) {
        (Some(p), Some(d)) => p == d && carrier != Some(d),
        _ => false,
    }
}

pub struct Label {
    roster: Roster,
}

impl Label {
    pub fn new(roster: Roster) -> Self {
        Label { roster }
    }
}

impl Router for Label {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Label
    }

    fn single_copy(&self) -> bool {
        true
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, _: SimTime) -> Decision {
        let l = |n| self.roster.label(n).filter(|l| !l.as_str().is_empty());
        if label_rule(l(carrier), l(peer), l(msg.dst)) {
            Decision::Move
        } else {
            Decision::Skip
        }
    }
}
