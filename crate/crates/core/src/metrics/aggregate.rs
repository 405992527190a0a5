use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{compute_metrics, Metrics, RunReport};
use crate::error::{Error, Result};
use crate::types::SimTime;

pub const CSV_HEADER: [&str; 6] = ["protocol", "ttl_s", "metric", "mean", "ci_halfwidth", "n"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub protocol: String,
    pub ttl: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    DeliveryProbability,
    Cost,
    Latency,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::DeliveryProbability, Metric::Cost, Metric::Latency];

    pub fn name(self) -> &'static str {
        match self {
            Metric::DeliveryProbability => "delivery_probability",
            Metric::Cost => "cost",
            Metric::Latency => "latency",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// Mean and 95% confidence half-width of one metric over the seeds of one
/// (protocol, TTL) cell. Runs where the metric is undefined are left out
/// of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub protocol: String,
    pub ttl: SimTime,
    pub metric: Metric,
    pub mean: Option<f64>,
    pub ci_halfwidth: Option<f64>,
    pub n: usize,
}

/// Two-sided 95% Student t critical value.
pub fn t_quantile(df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

fn summarize(mut values: Vec<f64>) -> (Option<f64>, Option<f64>) {
    // Sorted so the float sums do not depend on report order.
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let mut dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let s = (dev.iter().sum::<f64>() / (n - 1) as f64).sqrt();
    (Some(mean), Some(t_quantile(n - 1) * s / (n as f64).sqrt()))
}

pub fn aggregate(reports: &[(CellKey, RunReport)]) -> Vec<AggregateRow> {
    let mut cells: BTreeMap<&CellKey, Vec<Metrics>> = BTreeMap::new();
    for (key, r) in reports {
        cells.entry(key).or_default().push(compute_metrics(r));
    }
    let mut rows = Vec::new();
    for (key, runs) in cells {
        for metric in Metric::ALL {
            let values: Vec<f64> = runs.iter().filter_map(|m| m.get(metric)).collect();
            let n = values.len();
            let (mean, ci_halfwidth) = summarize(values);
            rows.push(AggregateRow {
                protocol: key.protocol.clone(),
                ttl: key.ttl,
                metric,
                mean,
                ci_halfwidth,
                n,
            });
        }
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn emit_csv(rows: &[AggregateRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let io = |e: csv::Error| Error::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.protocol.clone(),
            r.ttl.to_string(),
            r.metric.to_string(),
            opt(r.mean),
            opt(r.ci_halfwidth),
            r.n.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<AggregateRow>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let parse_err = |line: u64, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(parse_err(1, format!("expected header {}", CSV_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| parse_err(line, format!("bad {what}"));
        let float = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(what))
            }
        };
        rows.push(AggregateRow {
            protocol: rec[0].to_string(),
            ttl: rec[1].parse().map_err(|_| bad("ttl_s"))?,
            metric: rec[2].parse().map_err(|_| bad("metric"))?,
            mean: float(&rec[3], "mean")?,
            ci_halfwidth: float(&rec[4], "ci_halfwidth")?,
            n: rec[5].parse().map_err(|_| bad("n"))?,
        });
    }
    Ok(rows)
}
