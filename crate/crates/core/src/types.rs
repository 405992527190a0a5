//! Identifiers and the message unit shared by every module.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Seconds since scenario start.
pub type SimTime = u64;

pub const SECONDS_PER_DAY: SimTime = 86_400;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct MessageId(pub u64);

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Affiliation of a node, e.g. a research group or an office.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupLabel(pub String);

impl GroupLabel {
    pub fn new(s: impl Into<String>) -> Self {
        GroupLabel(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One buffered copy of a message.
///
/// Every copy of a message shares `id`, `src`, `dst`, `size`, `created_at`
/// and `ttl`; `hop_count` and `tokens` are per copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub id: MessageId,
    pub src: NodeId,
    pub dst: NodeId,
    pub size: u64,
    pub created_at: SimTime,
    pub ttl: SimTime,
    pub hop_count: u32,
    pub tokens: u32,
}

impl Message {
    /// Last instant at which the message is still alive.
    #[inline]
    pub fn deadline(&self) -> SimTime {
        self.created_at.saturating_add(self.ttl)
    }

    #[inline]
    pub fn is_expired(&self, now: SimTime) -> bool {
        now > self.deadline()
    }
}

/// Node roster: ids with their group labels, sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Roster {
    entries: Vec<(NodeId, GroupLabel)>,
    /// `labels[id]` is `Some` iff `id` is on the roster.
    labels: Vec<Option<GroupLabel>>,
}

impl Roster {
    pub fn new(mut entries: Vec<(NodeId, GroupLabel)>) -> Self {
        entries.sort_by_key(|(id, _)| *id);
        entries.dedup_by_key(|(id, _)| *id);
        let len = entries.last().map_or(0, |(id, _)| id.index() + 1);
        let mut labels = vec![None; len];
        for (id, label) in &entries {
            labels[id.index()] = Some(label.clone());
        }
        Roster { entries, labels }
    }

    /// Roster of `n` nodes `0..n`, all sharing an empty label.
    pub fn unlabeled(n: u32) -> Self {
        Roster::new((0..n).map(|i| (NodeId(i), GroupLabel::default())).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest node id; per-node tables are sized by this.
    pub fn id_bound(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.labels.get(id.index()).is_some_and(Option::is_some)
    }

    pub fn label(&self, id: NodeId) -> Option<&GroupLabel> {
        self.labels.get(id.index()).and_then(Option::as_ref)
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().map(|(id, _)| *id)
    }

    pub fn entries(&self) -> &[(NodeId, GroupLabel)] {
        &self.entries
    }
}
