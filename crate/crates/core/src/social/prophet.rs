//! Delivery predictabilities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProphetParams {
    pub p_init: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Seconds per aging step.
    pub aging_interval: SimTime,
}

impl Default for ProphetParams {
    fn default() -> Self {
        ProphetParams {
            p_init: 0.75,
            beta: 0.25,
            gamma: 0.98,
            aging_interval: 30,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProphetState {
    preds: BTreeMap<NodeId, f64>,
    last_age_time: SimTime,
}

impl ProphetState {
    pub fn predictability(&self, dst: NodeId) -> f64 {
        self.preds.get(&dst).copied().unwrap_or(0.0)
    }

    pub fn table(&self) -> &BTreeMap<NodeId, f64> {
        &self.preds
    }

    pub fn last_age_time(&self) -> SimTime {
        self.last_age_time
    }

    fn steps(&self, now: SimTime, params: &ProphetParams) -> u64 {
        now.saturating_sub(self.last_age_time) / params.aging_interval.max(1)
    }

    /// Predictability for `dst` as it would read after aging to `now`.
    pub fn aged(&self, dst: NodeId, now: SimTime, params: &ProphetParams) -> f64 {
        let k = self.steps(now, params);
        self.predictability(dst) * decay(params.gamma, k)
    }

    /// Applies every whole aging interval elapsed since the last aging.
    pub fn age(&mut self, now: SimTime, params: &ProphetParams) {
        let k = self.steps(now, params);
        if k == 0 {
            return;
        }
        let f = decay(params.gamma, k);
        for p in self.preds.values_mut() {
            *p *= f;
        }
        self.last_age_time += k * params.aging_interval.max(1);
    }

    /// Direct update for an encounter with `peer`.
    pub fn meet(&mut self, peer: NodeId, params: &ProphetParams) {
        let p = self.preds.entry(peer).or_insert(0.0);
        *p += (1.0 - *p) * params.p_init;
    }

    /// Transitive update through `peer` using the peer's table.
    pub fn transit(
        &mut self,
        me: NodeId,
        peer: NodeId,
        peer_table: &BTreeMap<NodeId, f64>,
        params: &ProphetParams,
    ) {
        let via = self.predictability(peer);
        for (&c, &pc) in peer_table {
            if c == me || c == peer {
                continue;
            }
            let candidate = via * pc * params.beta;
            let cur = self.preds.entry(c).or_insert(0.0);
            if candidate > *cur {
                *cur = candidate;
            }
        }
    }
}

fn decay(gamma: f64, k: u64) -> f64 {
    if k > i32::MAX as u64 {
        0.0
    } else {
        gamma.powi(k as i32)
    }
}
