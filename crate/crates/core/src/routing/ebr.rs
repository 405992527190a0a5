use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::social::{EbrParams, EbrState};
use crate::types::{Message, NodeId, Roster, SimTime};

/// Tokens handed to the peer out of `tokens`, proportional to the peer's
/// share of the summed encounter values. The carrier always keeps one.
pub fn ebr_share(tokens: u32, ev_peer: f64, ev_carrier: f64) -> u32 {
    let total = ev_peer + ev_carrier;
    if tokens < 2 || total <= 0.0 {
        return 0;
    }
    let share = (tokens as f64 * ev_peer / total).floor() as u32;
    share.min(tokens - 1)
}

pub struct Ebr {
    params: EbrParams,
    nodes: Vec<EbrState>,
}

impl Ebr {
    pub fn new(roster: &Roster, params: EbrParams) -> Self {
        Ebr {
            params,
            nodes: vec![EbrState::default(); roster.id_bound()],
        }
    }

    pub fn encounter_value(&self, n: NodeId, now: SimTime) -> f64 {
        self.nodes[n.index()].value_at(now, &self.params)
    }
}

impl Router for Ebr {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Ebr
    }

    fn initial_tokens(&self) -> u32 {
        self.params.copies.max(1)
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        let p = self.params;
        self.nodes[a.index()].on_meet(now, &p);
        self.nodes[b.index()].on_meet(now, &p);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision {
        let (peer_ev, carrier_ev) = (self.encounter_value(peer, now), self.encounter_value(carrier, now));
        if ebr_share(msg.tokens, peer_ev, carrier_ev) == 0 {
            return Decision::Skip;
        }
        Decision::Replicate(TokenShare::Ratio {
            peer: peer_ev,
            carrier: carrier_ev,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn share_follows_encounter_values() {
        assert_eq!(ebr_share(10, 3.0, 1.0), 7);
        assert_eq!(ebr_share(2, 1.0, 1.0), 1);
        assert_eq!(ebr_share(1, 5.0, 0.0), 0);
        assert_eq!(ebr_share(10, 0.0, 0.0), 0);
        assert_eq!(ebr_share(10, 1.0, 0.0), 9);
        assert_eq!(ebr_share(10, 0.0, 4.0), 0);
    }
}
