use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{MessageId, NodeId, Roster, SimTime, SECONDS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorkloadEntry {
    pub create_time: SimTime,
    pub id: MessageId,
    pub src: NodeId,
    pub dst: NodeId,
    pub size: u64,
}

/// Time-sorted message creations. TTL is assigned per run, not per entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkloadSequence {
    entries: Vec<WorkloadEntry>,
}

impl WorkloadSequence {
    pub fn new(entries: Vec<WorkloadEntry>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        let mut prev = 0;
        for (index, e) in entries.iter().enumerate() {
            let bad = |reason: &str| Error::Workload {
                index,
                reason: reason.to_string(),
            };
            if e.create_time < prev {
                return Err(bad("creation times not sorted"));
            }
            prev = e.create_time;
            if e.src == e.dst {
                return Err(bad("src equals dst"));
            }
            if e.size == 0 {
                return Err(bad("zero-sized message"));
            }
            if !ids.insert(e.id) {
                return Err(bad("duplicate message id"));
            }
        }
        Ok(WorkloadSequence { entries })
    }

    pub fn entries(&self) -> &[WorkloadEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries created at or after `from`.
    pub fn slice_from(&self, from: SimTime) -> WorkloadSequence {
        WorkloadSequence {
            entries: self
                .entries
                .iter()
                .filter(|e| e.create_time >= from)
                .copied()
                .collect(),
        }
    }

    pub fn check_nodes(&self, roster: &Roster) -> Result<()> {
        for e in &self.entries {
            for id in [e.src, e.dst] {
                if !roster.contains(id) {
                    return Err(Error::UnknownNode(id));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadParams {
    pub msgs_per_day: u32,
    /// Inclusive byte range.
    pub size_min: u64,
    pub size_max: u64,
    pub duration: SimTime,
}

impl Default for WorkloadParams {
    fn default() -> Self {
        WorkloadParams {
            msgs_per_day: 500,
            size_min: 1_000,
            size_max: 100_000,
            duration: 12 * SECONDS_PER_DAY,
        }
    }
}

/// Picks `count` distinct ordered (src, dst) pairs from the roster, or all
/// of them when `count` is `None` or exceeds the number available.
pub fn select_pairs(roster: &Roster, count: Option<usize>, seed: u64) -> Vec<(NodeId, NodeId)> {
    let ids: Vec<NodeId> = roster.ids().collect();
    let all: Vec<(NodeId, NodeId)> = ids
        .iter()
        .flat_map(|&s| ids.iter().filter(move |&&d| d != s).map(move |&d| (s, d)))
        .collect();
    match count {
        Some(n) if n < all.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            let mut picked: Vec<_> = all.choose_multiple(&mut rng, n).copied().collect();
            picked.sort_unstable();
            picked
        }
        _ => all,
    }
}

/// Generates `msgs_per_day` creations per simulated day at uniformly random
/// instants; the last partial day gets a proportional share. Pairs and sizes
/// are drawn uniformly. Message ids are 1-based in creation order.
pub fn gen_workload(
    params: &WorkloadParams,
    pairs: &[(NodeId, NodeId)],
    seed: u64,
) -> Result<WorkloadSequence> {
    if pairs.is_empty() {
        return Err(Error::Workload {
            index: 0,
            reason: "pair subset is empty".into(),
        });
    }
    if params.size_min == 0 || params.size_min > params.size_max {
        return Err(Error::Workload {
            index: 0,
            reason: "size range must be non-empty and positive".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<(SimTime, NodeId, NodeId, u64)> = Vec::new();
    let mut day_start = 0;
    while day_start < params.duration {
        let day_end = (day_start + SECONDS_PER_DAY).min(params.duration);
        let span = day_end - day_start;
        let count = if span == SECONDS_PER_DAY {
            params.msgs_per_day as u64
        } else {
            (params.msgs_per_day as u64 * span + SECONDS_PER_DAY / 2) / SECONDS_PER_DAY
        };
        for _ in 0..count {
            let t = rng.random_range(day_start..day_end);
            let (src, dst) = pairs[rng.random_range(0..pairs.len())];
            let size = rng.random_range(params.size_min..=params.size_max);
            draws.push((t, src, dst, size));
        }
        day_start = day_end;
    }
    draws.sort_by_key(|d| d.0);
    let entries = draws
        .into_iter()
        .enumerate()
        .map(|(i, (create_time, src, dst, size))| WorkloadEntry {
            create_time,
            id: MessageId(i as u64 + 1),
            src,
            dst,
            size,
        })
        .collect();
    WorkloadSequence::new(entries)
}

/// Reads `create_time_s,msg_id,src,dst,size_bytes`.
pub fn parse_workload(path: impl AsRef<Path>) -> Result<WorkloadSequence> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let mut entries = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if n == 0 && rec.get(0).is_some_and(|f| f.parse::<u64>().is_err()) {
            continue;
        }
        let num = |i: usize, name: &str| -> Result<u64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("bad or missing `{name}`"),
                })
        };
        entries.push(WorkloadEntry {
            create_time: num(0, "create_time_s")?,
            id: MessageId(num(1, "msg_id")?),
            src: NodeId(num(2, "src")? as u32),
            dst: NodeId(num(3, "dst")? as u32),
            size: num(4, "size_bytes")?,
        });
    }
    WorkloadSequence::new(entries)
}

pub fn write_workload(workload: &WorkloadSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for e in workload.entries() {
        writeln!(w, "{},{},{},{},{}", e.create_time, e.id, e.src, e.dst, e.size)
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
