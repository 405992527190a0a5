//! Forwarding protocols.
//!
//! A [`Router`] owns the routing state of every node in a run. The engine
//! asks it for a [`Decision`] per (carrier, peer, message) after filtering
//! out the cases every protocol treats alike: the peer already holds the
//! message, the hop limit is reached, or the peer is the destination.

mod bubble_rap;
mod dlife;
mod ebr;
mod epidemic;
mod label;
mod peoplerank;
mod prophet;
mod simbet;
mod spray;

pub use bubble_rap::{bubble_rap_rule, BubbleRap};
pub use dlife::{dlife_rule, dlifecomm_rule, DLife};
pub use ebr::{ebr_share, Ebr};
pub use epidemic::Epidemic;
pub use label::{label_rule, Label};
pub use peoplerank::PeopleRank;
pub use prophet::Prophet;
pub use simbet::{simbet_utility, SimBet, SimBetParams};
pub use spray::{focus_rule, SprayAndFocus, SprayAndWait, SprayFocusParams, SprayWaitParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::social::{EbrParams, ProphetParams, SocialParams, SocialState, Tracks};
use crate::types::{Message, NodeId, Roster, SimTime};

/// How the tokens of a replicated copy are split at transfer completion,
/// given the carrier's token count `t` at that moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TokenShare {
    /// The new copy carries the same count; the carrier keeps its own.
    Keep,
    /// Peer gets `floor(t/2)`, carrier keeps `ceil(t/2)`.
    Half,
    /// Peer gets one token.
    One,
    /// Peer gets `floor(t * peer / (peer + carrier))`, at most `t - 1`.
    Ratio { peer: f64, carrier: f64 },
}

impl TokenShare {
    /// Tokens handed to the peer; 0 means the split is not possible.
    pub fn peer_tokens(self, t: u32) -> u32 {
        match self {
            TokenShare::Keep => t,
            _ if t < 2 => 0,
            TokenShare::Half => t / 2,
            TokenShare::One => 1,
            TokenShare::Ratio { peer, carrier } => ebr_share(t, peer, carrier),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    Skip,
    /// Peer is the destination.
    Deliver,
    Replicate(TokenShare),
    /// Hand the copy over; the carrier deletes it after the transfer.
    Move,
}

impl Decision {
    pub fn is_skip(&self) -> bool {
        matches!(self, Decision::Skip)
    }
}

pub trait Router: Send {
    fn kind(&self) -> ProtocolKind;

    /// Token budget of a freshly created message.
    fn initial_tokens(&self) -> u32 {
        1
    }

    /// Whether the carrier drops its copy once it reached the destination.
    fn single_copy(&self) -> bool {
        false
    }

    fn on_contact_up(&mut self, _a: NodeId, _b: NodeId, _now: SimTime) {}

    fn on_contact_down(&mut self, _a: NodeId, _b: NodeId, _start: SimTime, _end: SimTime) {}

    /// Verdict for handing `msg` (the carrier's copy) to `peer`, where
    /// `peer` lacks the message and is not its destination.
    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision;

    fn social(&self) -> Option<&SocialState> {
        None
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Epidemic,
    Prophet,
    SprayAndWait,
    SprayAndFocus,
    Ebr,
    Label,
    #[serde(rename = "simbet")]
    SimBet,
    BubbleRap,
    #[serde(rename = "peoplerank")]
    PeopleRank,
    #[serde(rename = "dlife")]
    DLife,
    #[serde(rename = "dlifecomm")]
    DLifeComm,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 11] = [
        ProtocolKind::Epidemic,
        ProtocolKind::Prophet,
        ProtocolKind::SprayAndWait,
        ProtocolKind::SprayAndFocus,
        ProtocolKind::Ebr,
        ProtocolKind::Label,
        ProtocolKind::SimBet,
        ProtocolKind::BubbleRap,
        ProtocolKind::PeopleRank,
        ProtocolKind::DLife,
        ProtocolKind::DLifeComm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Epidemic => "epidemic",
            ProtocolKind::Prophet => "prophet",
            ProtocolKind::SprayAndWait => "spray-and-wait",
            ProtocolKind::SprayAndFocus => "spray-and-focus",
            ProtocolKind::Ebr => "ebr",
            ProtocolKind::Label => "label",
            ProtocolKind::SimBet => "simbet",
            ProtocolKind::BubbleRap => "bubble-rap",
            ProtocolKind::PeopleRank => "peoplerank",
            ProtocolKind::DLife => "dlife",
            ProtocolKind::DLifeComm => "dlifecomm",
        }
    }

    /// Token-splitting protocols.
    pub fn is_spray(self) -> bool {
        matches!(
            self,
            ProtocolKind::SprayAndWait | ProtocolKind::SprayAndFocus | ProtocolKind::Ebr
        )
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name() == norm || k.name().replace('-', "") == norm.replace('-', ""))
            .ok_or_else(|| format!("unknown protocol {s:?}"))
    }
}

/// Tunables of every protocol; only the ones of the protocol being run are
/// consulted.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolParams {
    pub prophet: ProphetParams,
    pub spray_and_wait: SprayWaitParams,
    pub spray_and_focus: SprayFocusParams,
    pub ebr: EbrParams,
    pub simbet: SimBetParams,
    pub social: SocialParams,
}

pub fn build_router(kind: ProtocolKind, params: &ProtocolParams, roster: &Roster) -> Box<dyn Router> {
    let social = |tracks| SocialState::new(roster, params.social, tracks);
    match kind {
        ProtocolKind::Epidemic => Box::new(Epidemic),
        ProtocolKind::Prophet => Box::new(Prophet::new(roster, params.prophet)),
        ProtocolKind::SprayAndWait => Box::new(SprayAndWait::new(params.spray_and_wait)),
        ProtocolKind::SprayAndFocus => Box::new(SprayAndFocus::new(
            params.spray_and_focus,
            social(Tracks::default()),
        )),
        ProtocolKind::Ebr => Box::new(Ebr::new(roster, params.ebr)),
        ProtocolKind::Label => Box::new(Label::new(roster.clone())),
        ProtocolKind::SimBet => Box::new(SimBet::new(
            params.simbet,
            social(Tracks {
                ego: true,
                ..Default::default()
            }),
        )),
        ProtocolKind::BubbleRap => Box::new(BubbleRap::new(social(Tracks {
            communities: true,
            centrality: true,
            ..Default::default()
        }))),
        ProtocolKind::PeopleRank => Box::new(PeopleRank::new(social(Tracks {
            peoplerank: true,
            ..Default::default()
        }))),
        ProtocolKind::DLife => Box::new(DLife::new(
            false,
            social(Tracks {
                tecd: true,
                ..Default::default()
            }),
        )),
        ProtocolKind::DLifeComm => Box::new(DLife::new(
            true,
            social(Tracks {
                tecd: true,
                communities: true,
                ..Default::default()
            }),
        )),
    }
}

/// Wraps a router and keeps a fully tracked social state next to it, for
/// inspection of analytics independent of the protocol being run.
pub struct Observed {
    inner: Box<dyn Router>,
    social: SocialState,
}

impl Observed {
    pub fn new(inner: Box<dyn Router>, roster: &Roster, params: SocialParams) -> Self {
        Observed {
            inner,
            social: SocialState::new(roster, params, Tracks::ALL),
        }
    }
}

impl Router for Observed {
    fn kind(&self) -> ProtocolKind {
        self.inner.kind()
    }

    fn initial_tokens(&self) -> u32 {
        self.inner.initial_tokens()
    }

    fn single_copy(&self) -> bool {
        self.inner.single_copy()
    }

    fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.social.on_contact_up(a, b, now);
        self.inner.on_contact_up(a, b, now);
    }

    fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        self.social.on_contact_down(a, b, start, end);
        self.inner.on_contact_down(a, b, start, end);
    }

    fn decide(&self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> Decision {
        self.inner.decide(carrier, peer, msg, now)
    }

    fn social(&self) -> Option<&SocialState> {
        Some(&self.social)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_names_round_trip() {
        for k in ProtocolKind::ALL {
            assert_eq!(k.name().parse::<ProtocolKind>().unwrap(), k);
        }
        assert_eq!("Spray_and_Wait".parse::<ProtocolKind>().unwrap(), ProtocolKind::SprayAndWait);
        assert_eq!("bubblerap".parse::<ProtocolKind>().unwrap(), ProtocolKind::BubbleRap);
        assert!("maxprop".parse::<ProtocolKind>().is_err());
    }

    #[test]
    fn token_splits() {
        assert_eq!(TokenShare::Half.peer_tokens(10), 5);
        assert_eq!(TokenShare::Half.peer_tokens(3), 1);
        assert_eq!(TokenShare::Half.peer_tokens(1), 0);
        assert_eq!(TokenShare::One.peer_tokens(10), 1);
        assert_eq!(TokenShare::Keep.peer_tokens(1), 1);
        let r = TokenShare::Ratio {
            peer: 3.0,
            carrier: 1.0,
        };
        assert_eq!(r.peer_tokens(10), 7);
    }
}
