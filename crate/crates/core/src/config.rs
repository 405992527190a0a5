//! Scenario files.
//!
//! A scenario is a TOML document. Durations are written either as integer
//! seconds or as strings with an `s`, `m`, `h`, `d` or `w` suffix.
//!
//! ```toml
//! protocols = ["epidemic", "prophet", "bubble-rap"]
//! ttls = ["1d", "2d", "4d", "1w", "3w"]
//! warmup = "2d"
//!
//! [contacts]
//! source = "trace"
//! path = "cambridge.csv"
//! roster = "roster.csv"
//!
//! [workload]
//! source = "generate"
//! msgs_per_day = 500
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::routing::{ProtocolKind, ProtocolParams, SimBetParams, SprayFocusParams, SprayWaitParams};
use crate::social::{EbrParams, ProphetParams, SocialParams};
use crate::sources::{
    gen_community_schedule, gen_random_waypoint, gen_workload, parse_roster, parse_trace, parse_workload,
    select_pairs, CommunityParams, ContactSequence, WaypointParams, WorkloadParams, WorkloadSequence,
};
use crate::types::{SimTime, SECONDS_PER_DAY};

/// Parses `90`, `"90s"`, `"15m"`, `"6h"`, `"2d"` or `"1w"` into seconds.
pub fn parse_duration(s: &str) -> std::result::Result<SimTime, String> {
    let s = s.trim();
    let (digits, unit) = match s.find(|c: char| !c.is_ascii_digit()) {
        Some(i) => s.split_at(i),
        None => (s, ""),
    };
    let n: SimTime = digits.parse().map_err(|_| format!("bad duration {s:?}"))?;
    let mult = match unit.trim() {
        "" | "s" => 1,
        "m" => 60,
        "h" => 3600,
        "d" => SECONDS_PER_DAY,
        "w" => 7 * SECONDS_PER_DAY,
        _ => return Err(format!("bad duration unit in {s:?}")),
    };
    n.checked_mul(mult).ok_or_else(|| format!("duration {s:?} overflows"))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DurationRepr {
    Secs(u64),
    Text(String),
}

impl DurationRepr {
    fn secs<E: serde::de::Error>(self) -> std::result::Result<SimTime, E> {
        match self {
            DurationRepr::Secs(n) => Ok(n),
            DurationRepr::Text(s) => parse_duration(&s).map_err(E::custom),
        }
    }
}

/// Serde adapter for duration fields.
pub mod duration {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::DurationRepr;
    use crate::types::SimTime;

    pub fn serialize<S: Serializer>(v: &SimTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SimTime, D::Error> {
        DurationRepr::deserialize(d)?.secs()
    }
}

mod duration_list {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::DurationRepr;
    use crate::types::SimTime;

    pub fn serialize<S: Serializer>(v: &[SimTime], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SimTime>, D::Error> {
        Vec::<DurationRepr>::deserialize(d)?
            .into_iter()
            .map(DurationRepr::secs)
            .collect()
    }
}

mod opt_duration {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::DurationRepr;
    use crate::types::SimTime;

    pub fn serialize<S: Serializer>(v: &Option<SimTime>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_u64(*v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<SimTime>, D::Error> {
        Option::<DurationRepr>::deserialize(d)?
            .map(DurationRepr::secs)
            .transpose()
    }
}

/// A byte quantity or `"unlimited"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LimitRepr", into = "LimitRepr")]
pub struct Limit(pub Option<u64>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LimitRepr {
    Bytes(u64),
    Word(String),
}

impl TryFrom<LimitRepr> for Limit {
    type Error = String;

    fn try_from(r: LimitRepr) -> std::result::Result<Self, String> {
        match r {
            LimitRepr::Bytes(0) => Err("must be positive (or \"unlimited\")".into()),
            LimitRepr::Bytes(n) => Ok(Limit(Some(n))),
            LimitRepr::Word(w) if w == "unlimited" => Ok(Limit(None)),
            LimitRepr::Word(w) => Err(format!("expected a byte count or \"unlimited\", got {w:?}")),
        }
    }
}

impl From<Limit> for LimitRepr {
    fn from(l: Limit) -> Self {
        match l.0 {
            Some(n) => LimitRepr::Bytes(n),
            None => LimitRepr::Word("unlimited".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContactSource {
    Trace {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        roster: Option<PathBuf>,
        /// Trace length; defaults to the last event.
        #[serde(default, with = "opt_duration", skip_serializing_if = "Option::is_none")]
        duration: Option<SimTime>,
    },
    Community(CommunityParams),
    RandomWaypoint(WaypointParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WorkloadSource {
    File {
        path: PathBuf,
    },
    Generate {
        #[serde(default = "default_per_day")]
        msgs_per_day: u32,
        #[serde(default = "default_size_min")]
        size_min: u64,
        #[serde(default = "default_size_max")]
        size_max: u64,
        /// Number of (src, dst) pairs drawn from; all pairs when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<usize>,
        /// Defaults to the contact duration.
        #[serde(default, with = "opt_duration", skip_serializing_if = "Option::is_none")]
        duration: Option<SimTime>,
    },
}

fn default_per_day() -> u32 {
    WorkloadParams::default().msgs_per_day
}
fn default_size_min() -> u64 {
    WorkloadParams::default().size_min
}
fn default_size_max() -> u64 {
    WorkloadParams::default().size_max
}

impl Default for WorkloadSource {
    fn default() -> Self {
        WorkloadSource::Generate {
            msgs_per_day: default_per_day(),
            size_min: default_size_min(),
            size_max: default_size_max(),
            pairs: None,
            duration: None,
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}
fn default_ttls() -> Vec<SimTime> {
    [1, 2, 4, 7, 21].map(|d| d * SECONDS_PER_DAY).to_vec()
}
fn default_seeds() -> Vec<u64> {
    (1..=10).collect()
}
fn default_buffer() -> Limit {
    Limit(Some(2_000_000))
}
fn default_bandwidth() -> Limit {
    // 11 Mbit/s
    Limit(Some(1_375_000))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub protocols: Vec<ProtocolKind>,
    #[serde(default = "default_ttls", with = "duration_list")]
    pub ttls: Vec<SimTime>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, with = "duration")]
    pub warmup: SimTime,
    /// Defaults to the contact duration.
    #[serde(default, with = "opt_duration", skip_serializing_if = "Option::is_none")]
    pub end_time: Option<SimTime>,
    #[serde(default = "default_buffer")]
    pub buffer: Limit,
    #[serde(default = "default_bandwidth")]
    pub bandwidth: Limit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hop_limit: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub contacts: ContactSource,
    #[serde(default)]
    pub workload: WorkloadSource,
    #[serde(default)]
    pub prophet: ProphetParams,
    #[serde(default)]
    pub spray_and_wait: SprayWaitParams,
    #[serde(default)]
    pub spray_and_focus: SprayFocusParams,
    #[serde(default)]
    pub ebr: EbrParams,
    #[serde(default)]
    pub simbet: SimBetParams,
    #[serde(default)]
    pub social: SocialParams,
}

/// Reads, validates and resolves a scenario file. Relative paths are taken
/// from the file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_config(&text, base)
}

pub fn parse_config(text: &str, base: &Path) -> Result<ScenarioConfig> {
    let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let at = e
            .span()
            .map(|s| format!(" (line {})", text[..s.start].matches('\n').count() + 1))
            .unwrap_or_default();
        Error::config("scenario", format!("{msg}{at}"))
    })?;
    cfg.resolve_paths(base);
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ContactSource::Trace { path, roster, .. } = &mut self.contacts {
            fix(path);
            if let Some(r) = roster {
                fix(r);
            }
        }
        if let WorkloadSource::File { path } = &mut self.workload {
            fix(path);
        }
        if let Some(out) = &mut self.output_dir {
            fix(out);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.protocols.is_empty() {
            return Err(Error::config("protocols", "at least one protocol is required"));
        }
        if self.ttls.is_empty() {
            return Err(Error::config("ttls", "at least one TTL is required"));
        }
        if self.ttls.contains(&0) {
            return Err(Error::config("ttls", "TTLs must be positive"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        if self.social.k < 2 {
            return Err(Error::config("social.k", "must be at least 2"));
        }
        if self.social.daily_samples == 0 || !SECONDS_PER_DAY.is_multiple_of(self.social.daily_samples as u64) {
            return Err(Error::config("social.daily_samples", "must divide the day evenly"));
        }
        let exists = |key: &str, p: &Path| {
            if p.is_file() {
                Ok(())
            } else {
                Err(Error::config(key, format!("{} does not exist", p.display())))
            }
        };
        if let ContactSource::Trace { path, roster, .. } = &self.contacts {
            exists("contacts.path", path)?;
            if let Some(r) = roster {
                exists("contacts.roster", r)?;
            }
        }
        if let WorkloadSource::File { path } = &self.workload {
            exists("workload.path", path)?;
        }
        Ok(())
    }

    pub fn protocol_params(&self) -> ProtocolParams {
        ProtocolParams {
            prophet: self.prophet,
            spray_and_wait: self.spray_and_wait,
            spray_and_focus: self.spray_and_focus,
            ebr: self.ebr,
            simbet: self.simbet,
            social: self.social,
        }
    }

    pub fn engine_config(&self, ttl: SimTime, contacts: &ContactSequence) -> EngineConfig {
        EngineConfig {
            buffer_capacity: self.buffer.0,
            bandwidth: self.bandwidth.0,
            hop_limit: self.hop_limit,
            ttl,
            warmup: self.warmup,
            end_time: self.end_time.unwrap_or(contacts.duration()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config is always serializable")
    }

    /// Contacts for `seed`. Trace contacts ignore the seed.
    pub fn contacts(&self, seed: u64) -> Result<ContactSequence> {
        match &self.contacts {
            ContactSource::Trace {
                path,
                roster,
                duration,
            } => {
                let seq = parse_trace(path, *duration)?;
                match roster {
                    Some(r) => seq.with_roster(parse_roster(r)?),
                    None => Ok(seq),
                }
            }
            ContactSource::Community(p) => gen_community_schedule(p, seed),
            ContactSource::RandomWaypoint(p) => gen_random_waypoint(p, seed),
        }
    }

    /// Workload for `seed` over the given contacts. A workload file ignores
    /// the seed.
    pub fn workload(&self, seed: u64, contacts: &ContactSequence) -> Result<WorkloadSequence> {
        match &self.workload {
            WorkloadSource::File { path } => parse_workload(path),
            WorkloadSource::Generate {
                msgs_per_day,
                size_min,
                size_max,
                pairs,
                duration,
            } => {
                let params = WorkloadParams {
                    msgs_per_day: *msgs_per_day,
                    size_min: *size_min,
                    size_max: *size_max,
                    duration: duration.unwrap_or(contacts.duration()),
                };
                let pairs = select_pairs(contacts.roster(), *pairs, seed);
                gen_workload(&params, &pairs, seed)
            }
        }
    }
}
