use serde::{Deserialize, Serialize};

use super::{Decision, ProtocolKind, Router, TokenShare};
use crate::social::SocialState;
use crate::types::{Message, NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SprayWaitParams {
    pub copies: u32,
    /// Binary mode hands over half the tokens, source mode a single one.
    pub binary: bool,
}

impl Default for SprayWaitParams {
    fn default() -> Self {
        SprayWaitParams {
            copies: 10,
            binary: true,
        }
    }
}

pub struct SprayAndWait {
    params: SprayWaitParams,
}

impl SprayAndWait {
    pub fn new(params: SprayWaitParams) -> Self {
        SprayAndWait { params }
    }
}

impl Router for SprayAndWait {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::SprayAndWait
    }

    fn initial_tokens(&self) -> u32 {
        self.params.copies.max(1)
    }

    fn decide(&self, _: NodeId, _: NodeId, msg: &Message, _: SimTime) -> Decision {
        match (msg.tokens > 1, self.params.binary) {
            (false, _) => Decision::Skip,
            (true, true) => Decision::Replicate(TokenShare::Half),
            (true, false) => Decision::Replicate(TokenShare::One),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SprayFocusParams {
    pub copies: u32,
    /// Seconds by which the peer's encounter timer must beat the carrier's.
    pub focus_threshold: SimTime,
}

impl Default for SprayFocusParams {
    fn default() -> Self {
        SprayFocusParams {
            copies: 10,
            focus_threshold: 0,
        }
    }
}

/// Focus-phase verdict from the two encounter timers (`None` = never met).
pub fn focus_rule(carrier_timer: Option<SimTime>, peer_timer: Option<SimTime>, threshold: SimTime) -> bool {
    match (carrier_timer, peer_timer) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(c), Some(p)) => c > p && c - p > threshold,
    }
}

pub struct SprayAndFocus {
    params: SprayFocusParams,
    social: SocialState,
}

impl SprayAndFocus {
    pub fn new(params: SprayFocusParams, social: SocialState) -> Self {
        SprayAndFocus { params, social }
    }
}

impl Router for SprayAndFocus {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::SprayAndFocus
    }

    fn initial_tokens(&self) -> u32 {
        self.params.copies.max(1)
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.social.on_contact_up(a, b, now);
    }

    fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        self.social.on_contact_down(a, b, start, end);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision {
        if msg.tokens > 1 {
            return Decision::Replicate(TokenShare::Half);
        }
        let c = self.social.node(carrier).history.time_since(msg.dst, now);
        let p = self.social.node(peer).history.time_since(msg.dst, now);
        if focus_rule(c, p, self.params.focus_threshold) {
            Decision::Move
        } else {
            Decision::Skip
        }
    }

    fn social(&self) -> Option<&SocialState> {
        Some(&self.social)
    }
}
