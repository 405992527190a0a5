use crate::routing::Decision;
use crate::types::{MessageId, NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Created,
    RelayCompleted,
    Delivered,
    Dropped,
    Expired,
    Aborted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccountingRecord {
    pub kind: RecordKind,
    pub time: SimTime,
    pub message: MessageId,
    /// Sender of a transfer, or the node holding the copy.
    pub from: Option<NodeId>,
    pub to: Option<NodeId>,
    /// Hop count of the copy after the transfer.
    pub hops: u32,
}

impl AccountingRecord {
    pub fn at(kind: RecordKind, time: SimTime, message: MessageId, node: NodeId) -> Self {
        AccountingRecord {
            kind,
            time,
            message,
            from: Some(node),
            to: None,
            hops: 0,
        }
    }

    pub fn transfer(
        kind: RecordKind,
        time: SimTime,
        message: MessageId,
        from: NodeId,
        to: NodeId,
        hops: u32,
    ) -> Self {
        AccountingRecord {
            kind,
            time,
            message,
            from: Some(from),
            to: Some(to),
            hops,
        }
    }
}

/// One consultation of the router.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub time: SimTime,
    pub carrier: NodeId,
    pub peer: NodeId,
    pub message: MessageId,
    pub decision: Decision,
}
