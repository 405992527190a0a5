use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::social::SocialState;
use crate::types::{Message, NodeId, SimTime};

/// Where the two endpoints stand relative to the destination's community.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleView {
    /// Carrier shares a community with the destination; then `local` holds
    /// (carrier, peer) local ranks in it, or `None` if the peer is outside.
    pub carrier_inside: bool,
    pub local: Option<(f64, f64)>,
    pub peer_inside: bool,
    /// (carrier, peer) global ranks.
    pub global: (f64, f64),
}

pub fn bubble_rap_rule(v: BubbleView) -> Decision {
    if v.carrier_inside {
        match v.local {
            Some((c, p)) if p > c => Decision::Replicate(TokenShare::Keep),
            _ => Decision::Skip,
        }
    } else if v.peer_inside {
        Decision::Move
    } else if v.global.1 > v.global.0 {
        Decision::Replicate(TokenShare::Keep)
    } else {
        Decision::Skip
    }
}

pub struct BubbleRap {
    social: SocialState,
}

impl BubbleRap {
    pub fn new(social: SocialState) -> Self {
        BubbleRap { social }
    }
}

impl Router for BubbleRap {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::BubbleRap
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.social.on_contact_up(a, b, now);
    }

    fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        self.social.on_contact_down(a, b, start, end);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision {
        let s = &self.social;
        let fam = s.familiar();
        let home = fam.shared_community(carrier, msg.dst);
        let local = home
            .filter(|&c| fam.in_community(c, peer))
            .map(|c| (s.local_rank(carrier, c, now), s.local_rank(peer, c, now)));
        let view = BubbleView {
            carrier_inside: home.is_some(),
            local,
            peer_inside: fam.shared_community(peer, msg.dst).is_some(),
            global: (s.global_rank(carrier, now), s.global_rank(peer, now)),
        };
        bubble_rap_rule(view)
    }

    fn social(&self) -> Option<&SocialState> {
        Some(&self.social)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(carrier_inside: bool, local: Option<(f64, f64)>, peer_inside: bool, global: (f64, f64)) -> BubbleView {
        BubbleView {
            carrier_inside,
            local,
            peer_inside,
            global,
        }
    }

    #[test]
    fn climbs_global_ranking_outside_the_community() {
        assert_eq!(bubble_rap_rule(view(false, None, false, (2.0, 5.0))), Decision::Replicate(TokenShare::Keep));
        assert_eq!(bubble_rap_rule(view(false, None, false, (5.0, 2.0))), Decision::Skip);
    }

    #[test]
    fn hands_over_on_entering_the_community() {
        assert_eq!(bubble_rap_rule(view(false, None, true, (9.0, 0.0))), Decision::Move);
    }

    #[test]
    fn climbs_local_ranking_inside() {
        assert_eq!(bubble_rap_rule(view(true, Some((1.0, 3.0)), true, (9.0, 0.0))), Decision::Replicate(TokenShare::Keep));
        assert_eq!(bubble_rap_rule(view(true, Some((3.0, 1.0)), true, (0.0, 9.0))), Decision::Skip);
        // A peer outside the community never receives, whatever its global rank.
        assert_eq!(bubble_rap_rule(view(true, None, false, (0.0, 9.0))), Decision::Skip);
    }
}
