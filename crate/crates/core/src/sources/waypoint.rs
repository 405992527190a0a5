use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Contact, ContactSequence};
use crate::error::{Error, Result};
use crate::types::{GroupLabel, NodeId, Roster, SimTime, SECONDS_PER_DAY};

/// Random-waypoint mobility over a rectangular area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaypointParams {
    pub node_count: u32,
    pub width: f64,
    pub height: f64,
    /// m/s, inclusive.
    pub speed: (f64, f64),
    /// seconds, inclusive.
    pub pause: (f64, f64),
    pub radio_range: f64,
    /// Sampling step for contact detection.
    #[serde(with = "crate::config::duration")]
    pub tick: SimTime,
    #[serde(with = "crate::config::duration")]
    pub duration: SimTime,
}

impl Default for WaypointParams {
    fn default() -> Self {
        WaypointParams {
            node_count: 10,
            width: 1_000.0,
            height: 1_000.0,
            speed: (0.8, 1.4),
            pause: (0.0, 120.0),
            radio_range: 100.0,
            tick: 2,
            duration: SECONDS_PER_DAY,
        }
    }
}

impl WaypointParams {
    fn validate(&self) -> Result<()> {
        let ok = self.node_count > 0
            && self.width > 0.0
            && self.height > 0.0
            && 0.0 <= self.speed.0
            && self.speed.0 <= self.speed.1
            && 0.0 <= self.pause.0
            && self.pause.0 <= self.pause.1
            && self.radio_range > 0.0
            && self.tick > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::config("contacts", "invalid random-waypoint parameters"))
        }
    }
}

struct Walker {
    pos: (f64, f64),
    target: (f64, f64),
    speed: f64,
    pause_left: f64,
}

impl Walker {
    fn advance(&mut self, mut dt: f64, p: &WaypointParams, rng: &mut ChaCha8Rng) {
        while dt > 0.0 {
            if self.pause_left > 0.0 {
                let used = self.pause_left.min(dt);
                self.pause_left -= used;
                dt -= used;
                continue;
            }
            if self.speed <= 0.0 {
                return;
            }
            let (dx, dy) = (self.target.0 - self.pos.0, self.target.1 - self.pos.1);
            let dist = dx.hypot(dy);
            let reach = self.speed * dt;
            if reach < dist {
                self.pos.0 += dx / dist * reach;
                self.pos.1 += dy / dist * reach;
                return;
            }
            dt -= dist / self.speed;
            self.pos = self.target;
            self.pause_left = sample(rng, p.pause);
            self.target = (rng.random_range(0.0..=p.width), rng.random_range(0.0..=p.height));
            self.speed = sample(rng, p.speed);
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Seeded random-waypoint contacts: positions are sampled every `tick`
/// seconds and a pair is in contact while within `radio_range`.
pub fn gen_random_waypoint(params: &WaypointParams, seed: u64) -> Result<ContactSequence> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.node_count as usize;
    let mut walkers: Vec<Walker> = (0..n)
        .map(|_| {
            let pos = (
                rng.random_range(0.0..=params.width),
                rng.random_range(0.0..=params.height),
            );
            let target = (
                rng.random_range(0.0..=params.width),
                rng.random_range(0.0..=params.height),
            );
            Walker {
                pos,
                target,
                speed: sample(&mut rng, params.speed),
                pause_left: 0.0,
            }
        })
        .collect();
    let r2 = params.radio_range * params.radio_range;
    let mut since: Vec<Option<SimTime>> = vec![None; n * n];
    let mut out = Vec::new();
    let mut t = 0;
    loop {
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (walkers[i].pos, walkers[j].pos);
                let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
                let slot = &mut since[i * n + j];
                match (d2 <= r2, *slot) {
                    (true, None) => *slot = Some(t),
                    (false, Some(start)) => {
                        out.push(contact(i, j, start, t));
                        *slot = None;
                    }
                    _ => {}
                }
            }
        }
        if t >= params.duration {
            break;
        }
        let step = params.tick.min(params.duration - t);
        for w in &mut walkers {
            w.advance(step as f64, params, &mut rng);
        }
        t += step;
    }
    for i in 0..n {
        for j in i + 1..n {
            if let Some(start) = since[i * n + j] {
                out.push(contact(i, j, start, params.duration));
            }
        }
    }
    let roster = Roster::new(
        (0..params.node_count)
            .map(|i| (NodeId(i), GroupLabel::default()))
            .collect(),
    );
    ContactSequence::from_intervals(out, roster, params.duration)
}

fn contact(i: usize, j: usize, start: SimTime, end: SimTime) -> Contact {
    Contact {
        a: NodeId(i as u32),
        b: NodeId(j as u32),
        start,
        end,
    }
}
