use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::social::SocialState;
use crate::types::{Message, NodeId, SimTime};

pub struct PeopleRank {
    social: SocialState,
}

impl PeopleRank {
    pub fn new(social: SocialState) -> Self {
        PeopleRank { social }
    }
}

impl Router for PeopleRank {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::PeopleRank
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.social.on_contact_up(a, b, now);
    }

    fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        self.social.on_contact_down(a, b, start, end);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, _: &Message, _: SimTime) -> Decision {
        let rank = |n| self.social.node(n).peoplerank.rank();
        if rank(peer) > rank(carrier) {
            Decision::Replicate(TokenShare::Keep)
        } else {
            Decision::Skip
        }
    }

    fn social(&self) -> Option<&SocialState> {
        Some(&self.social)
    }
}
