use std::collections::{BTreeMap, HashMap};

use crate::types::{Message, MessageId};

/// Byte-bounded message store that evicts in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Buffer {
    /// `None` is unlimited.
    capacity: Option<u64>,
    used: u64,
    next_seq: u64,
    order: BTreeMap<u64, MessageId>,
    entries: HashMap<MessageId, (u64, Message)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insert {
    Stored { evicted: Vec<Message> },
    /// Larger than the whole buffer; nothing changed.
    Rejected,
}

impl Buffer {
    pub fn new(capacity: Option<u64>) -> Self {
        Buffer {
            capacity,
            ..Default::default()
        }
    }

    pub fn capacity(&self) -> Option<u64> {
        self.capacity
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.entries.contains_key(&id)
    }

    pub fn get(&self, id: MessageId) -> Option<&Message> {
        self.entries.get(&id).map(|(_, m)| m)
    }

    pub fn set_tokens(&mut self, id: MessageId, tokens: u32) {
        if let Some((_, m)) = self.entries.get_mut(&id) {
            m.tokens = tokens;
        }
    }

    /// Messages in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Message> + '_ {
        self.order.values().map(|id| &self.entries[id].1)
    }

    pub fn remove(&mut self, id: MessageId) -> Option<Message> {
        let (seq, m) = self.entries.remove(&id)?;
        self.order.remove(&seq);
        self.used -= m.size;
        Some(m)
    }

    /// Stores `m`, evicting the oldest entries until it fits.
    pub fn insert(&mut self, m: Message) -> Insert {
        debug_assert!(!self.contains(m.id), "duplicate copy of {}", m.id);
        let mut evicted = Vec::new();
        if let Some(cap) = self.capacity {
            if m.size > cap {
                return Insert::Rejected;
            }
            while cap - self.used < m.size {
                let (_, &oldest) = self.order.first_key_value().expect("non-empty while over capacity");
                evicted.extend(self.remove(oldest));
            }
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.used += m.size;
        self.order.insert(seq, m.id);
        self.entries.insert(m.id, (seq, m));
        debug_assert!(self.capacity.is_none_or(|c| self.used <= c));
        Insert::Stored { evicted }
    }
}
