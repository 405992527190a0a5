//! Run counters, the three headline metrics, cross-seed aggregation and
//! report files.

mod aggregate;
mod chart;

pub use aggregate::{aggregate, read_csv, emit_csv, t_quantile, AggregateRow, CellKey, Metric, CSV_HEADER};
pub use chart::emit_svg_chart;

use std::collections::{HashMap, HashSet};

use crate::engine::{AccountingRecord, RecordKind};
use crate::types::{MessageId, SimTime};

/// Counters of one run. Messages created before the warmup boundary never
/// enter any of them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    pub created: u64,
    /// Distinct messages that reached their destination.
    pub delivered: u64,
    /// Completed transfers, including the ones to the destination.
    pub relayed: u64,
    pub dropped: u64,
    pub expired: u64,
    pub aborted: u64,
    /// Per delivered message, in delivery order.
    pub latencies: Vec<SimTime>,
    pub hop_counts: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// 0 when nothing was created; see `delivery_defined`.
    pub delivery_probability: f64,
    pub delivery_defined: bool,
    /// Relays beyond the final hop per delivered message.
    pub cost: Option<f64>,
    pub latency: Option<f64>,
}

impl Metrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::DeliveryProbability => self.delivery_defined.then_some(self.delivery_probability),
            Metric::Cost => self.cost,
            Metric::Latency => self.latency,
        }
    }
}

pub fn compute_metrics(r: &RunReport) -> Metrics {
    let delivered = r.delivered as f64;
    let has_delivery = r.delivered > 0;
    Metrics {
        delivery_probability: if r.created > 0 {
            delivered / r.created as f64
        } else {
            0.0
        },
        delivery_defined: r.created > 0,
        cost: has_delivery.then(|| (r.relayed - r.delivered) as f64 / delivered),
        latency: has_delivery
            .then(|| r.latencies.iter().map(|&l| l as f64).sum::<f64>() / r.latencies.len() as f64),
    }
}

/// Turns the record stream of a run into a [`RunReport`].
#[derive(Debug, Clone, Default)]
pub struct MetricsCollector {
    warmup: SimTime,
    created_at: HashMap<MessageId, SimTime>,
    delivered: HashSet<MessageId>,
    report: RunReport,
}

impl MetricsCollector {
    pub fn new(warmup: SimTime) -> Self {
        MetricsCollector {
            warmup,
            ..Default::default()
        }
    }

    pub fn record(&mut self, rec: &AccountingRecord) {
        if rec.kind == RecordKind::Created {
            if rec.time >= self.warmup {
                self.created_at.insert(rec.message, rec.time);
                self.report.created += 1;
            }
            return;
        }
        let Some(&created) = self.created_at.get(&rec.message) else {
            return;
        };
        let r = &mut self.report;
        match rec.kind {
            RecordKind::Created => unreachable!(),
            RecordKind::RelayCompleted => r.relayed += 1,
            RecordKind::Delivered => {
                if self.delivered.insert(rec.message) {
                    r.delivered += 1;
                    r.latencies.push(rec.time - created);
                    r.hop_counts.push(rec.hops);
                }
            }
            RecordKind::Dropped => r.dropped += 1,
            RecordKind::Expired => r.expired += 1,
            RecordKind::Aborted => r.aborted += 1,
        }
    }

    pub fn report(&self) -> RunReport {
        self.report.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::NodeId;

    fn rec(kind: RecordKind, time: SimTime, m: u64) -> AccountingRecord {
        AccountingRecord::transfer(kind, time, MessageId(m), NodeId(0), NodeId(1), 1)
    }

    #[test]
    fn chain_costs_one_direct_costs_zero() {
        let chain = RunReport {
            created: 1,
            delivered: 1,
            relayed: 2,
            latencies: vec![10],
            ..Default::default()
        };
        assert_eq!(compute_metrics(&chain).cost, Some(1.0));
        let direct = RunReport {
            relayed: 1,
            ..chain.clone()
        };
        assert_eq!(compute_metrics(&direct).cost, Some(0.0));
    }

    #[test]
    fn nothing_delivered_means_absent_cost_and_latency() {
        let r = RunReport {
            created: 4,
            relayed: 9,
            ..Default::default()
        };
        let m = compute_metrics(&r);
        assert_eq!((m.delivery_probability, m.cost, m.latency), (0.0, None, None));
        let empty = compute_metrics(&RunReport::default());
        assert!(!empty.delivery_defined);
        assert_eq!(empty.get(Metric::DeliveryProbability), None);
    }

    #[test]
    fn all_delivered() {
        let r = RunReport {
            created: 6000,
            delivered: 6000,
            relayed: 6000,
            latencies: vec![1; 6000],
            ..Default::default()
        };
        assert_eq!(compute_metrics(&r).delivery_probability, 1.0);
    }

    #[test]
    fn collector_counts_first_delivery_and_skips_warmup() {
        let mut c = MetricsCollector::new(100);
        let mut created = AccountingRecord::at(RecordKind::Created, 50, MessageId(1), NodeId(0));
        c.record(&created);
        created.time = 150;
        created.message = MessageId(2);
        c.record(&created);
        for r in [
            rec(RecordKind::RelayCompleted, 160, 1),
            rec(RecordKind::Delivered, 160, 1),
            rec(RecordKind::RelayCompleted, 170, 2),
            rec(RecordKind::Delivered, 170, 2),
            rec(RecordKind::RelayCompleted, 180, 2),
            rec(RecordKind::Delivered, 180, 2),
        ] {
            c.record(&r);
        }
        let r = c.report();
        assert_eq!((r.created, r.delivered, r.relayed), (1, 1, 2));
        assert_eq!(r.latencies, vec![20]);
    }
}
