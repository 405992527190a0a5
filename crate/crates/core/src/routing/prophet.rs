use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::social::{ProphetParams, ProphetState};
use crate::types::{Message, NodeId, Roster, SimTime};

pub struct Prophet {
    params: ProphetParams,
    nodes: Vec<ProphetState>,
}

impl Prophet {
    pub fn new(roster: &Roster, params: ProphetParams) -> Self {
        Prophet {
            params,
            nodes: vec![ProphetState::default(); roster.id_bound()],
        }
    }

    pub fn state(&self, n: NodeId) -> &ProphetState {
        &self.nodes[n.index()]
    }
}

impl Router for Prophet {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Prophet
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        let p = self.params;
        for n in [a, b] {
            let s = &mut self.nodes[n.index()];
            s.age(now, &p);
        }
        self.nodes[a.index()].meet(b, &p);
        self.nodes[b.index()].meet(a, &p);
        let ta = self.nodes[a.index()].table().clone();
        let tb = self.nodes[b.index()].table().clone();
        self.nodes[a.index()].transit(a, b, &tb, &p);
        self.nodes[b.index()].transit(b, a, &ta, &p);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision {
        let p = &self.params;
        let mine = self.nodes[carrier.index()].aged(msg.dst, now, p);
        let theirs = self.nodes[peer.index()].aged(msg.dst, now, p);
        if theirs > mine {
            Decision::Replicate(TokenShare::Keep)
        } else {
            Decision::Skip
        }
    }
}
