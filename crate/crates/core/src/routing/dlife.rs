use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::social::SocialState;
use crate::types::{Message, NodeId, SimTime};

/// Replicate when the peer has the stronger tie to the destination, or an
/// equal tie and more importance.
pub fn dlife_rule(w_carrier: f64, w_peer: f64, i_carrier: f64, i_peer: f64) -> bool {
    w_peer > w_carrier || (w_peer == w_carrier && i_peer > i_carrier)
}

/// Community variant: a peer in the destination's community wins over a
/// carrier outside it, a carrier inside never hands the copy out, and
/// otherwise [`dlife_rule`] decides.
pub fn dlifecomm_rule(
    carrier_inside: bool,
    peer_inside: bool,
    w_carrier: f64,
    w_peer: f64,
    i_carrier: f64,
    i_peer: f64,
) -> bool {
    match (carrier_inside, peer_inside) {
        (false, true) => true,
        (true, false) => false,
        _ => dlife_rule(w_carrier, w_peer, i_carrier, i_peer),
    }
}

pub struct DLife {
    communities: bool,
    social: SocialState,
}

impl DLife {
    /// `communities` selects the community-aware variant.
    pub fn new(communities: bool, social: SocialState) -> Self {
        DLife {
            communities,
            social,
        }
    }
}

impl Router for DLife {
    fn kind(&self) -> ProtocolKind {
        if self.communities {
            ProtocolKind::DLifeComm
        } else {
            ProtocolKind::DLife
        }
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.social.on_contact_up(a, b, now);
    }

    fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        self.social.on_contact_down(a, b, start, end);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision {
        let (c, p) = (&self.social.node(carrier).tecd, &self.social.node(peer).tecd);
        let (wc, wp) = (c.weight(msg.dst, now), p.weight(msg.dst, now));
        let (ic, ip) = (c.importance(now), p.importance(now));
        let go = if self.communities {
            let fam = self.social.familiar();
            let inside = |n| fam.shared_community(n, msg.dst).is_some();
            dlifecomm_rule(inside(carrier), inside(peer), wc, wp, ic, ip)
        } else {
            dlife_rule(wc, wp, ic, ip)
        };
        if go {
            Decision::Replicate(TokenShare::Keep)
        } else {
            Decision::Skip
        }
    }

    fn social(&self) -> Option<&SocialState> {
        Some(&self.social)
    }
}
