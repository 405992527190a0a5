use serde::{Deserialize, Serialize};

use super::{Decision, ProtocolKind, Router};
use crate::social::SocialState;
use crate::types::{Message, NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimBetParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SimBetParams {
    fn default() -> Self {
        SimBetParams {
            alpha: 0.5,
            beta: 0.5,
        }
    }
}

/// Utility of one node relative to another; a ratio with a zero denominator
/// contributes nothing.
pub fn simbet_utility(sim: f64, sim_other: f64, bet: f64, bet_other: f64, alpha: f64, beta: f64) -> f64 {
    let ratio = |x: f64, y: f64| if x + y > 0.0 { x / (x + y) } else { 0.0 };
    alpha * ratio(sim, sim_other) + beta * ratio(bet, bet_other)
}

pub struct SimBet {
    params: SimBetParams,
    social: SocialState,
}

impl SimBet {
    pub fn new(params: SimBetParams, social: SocialState) -> Self {
        SimBet { params, social }
    }
}

impl Router for SimBet {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::SimBet
    }

    fn single_copy(&self) -> bool {
        true
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.social.on_contact_up(a, b, now);
    }

    fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        self.social.on_contact_down(a, b, start, end);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, _: SimTime) -> Decision {
        let (c, p) = (&self.social.node(carrier).ego, &self.social.node(peer).ego);
        let (sim_c, sim_p) = (c.similarity(msg.dst) as f64, p.similarity(msg.dst) as f64);
        let (bet_c, bet_p) = (c.betweenness(), p.betweenness());
        let SimBetParams { alpha, beta } = self.params;
        let u_c = simbet_utility(sim_c, sim_p, bet_c, bet_p, alpha, beta);
        let u_p = simbet_utility(sim_p, sim_c, bet_p, bet_c, alpha, beta);
        if u_p > u_c {
            Decision::Move
        } else {
            Decision::Skip
        }
    }

    fn social(&self) -> Option<&SocialState> {
        Some(&self.social)
    }
}
