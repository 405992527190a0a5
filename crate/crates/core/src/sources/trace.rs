use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Contact, ContactEvent, ContactKind, ContactSequence};
use crate::error::{Error, Result};
use crate::types::{GroupLabel, NodeId, Roster, SimTime};

fn reader_builder() -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'));
    b
}

fn is_header(record: &csv::StringRecord) -> bool {
    record
        .get(0)
        .is_some_and(|f| !f.is_empty() && f.parse::<f64>().is_err())
}

fn field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
    path: &Path,
    line: u64,
) -> Result<T> {
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: format!("missing field `{name}`"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: format!("bad value {raw:?} for `{name}`"),
    })
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Reads a canonical `time_s,UP|DOWN,node_a,node_b` trace from a file.
///
/// `duration` defaults to the time of the last event; Ups still open at the
/// end are closed by a Down at `duration`.
pub fn parse_trace(path: impl AsRef<Path>, duration: Option<SimTime>) -> Result<ContactSequence> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(file, path, duration)
}

/// Same as [`parse_trace`] over any reader; `name` is used in errors.
pub fn read_trace(
    input: impl Read,
    name: impl AsRef<Path>,
    duration: Option<SimTime>,
) -> Result<ContactSequence> {
    let path = name.as_ref();
    let mut rdr = reader_builder().from_reader(input);
    // `None` marks a Down that a touching Up re-opened.
    let mut events: Vec<Option<ContactEvent>> = Vec::new();
    let mut open: BTreeMap<(NodeId, NodeId), SimTime> = BTreeMap::new();
    let mut last_down: BTreeMap<(NodeId, NodeId), (usize, SimTime, SimTime)> =
        BTreeMap::new();
    let mut ids = std::collections::BTreeSet::new();
    let mut prev = 0;
    let mut first = true;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = line_of(&rec);
        if std::mem::take(&mut first) && is_header(&rec) {
            continue;
        }
        let err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let time: SimTime = field(&rec, 0, "time_s", path, line)?;
        let kind_raw = rec.get(1).unwrap_or_default();
        let kind = if kind_raw.eq_ignore_ascii_case("up") {
            ContactKind::Up
        } else if kind_raw.eq_ignore_ascii_case("down") {
            ContactKind::Down
        } else {
            return Err(err(format!("expected UP or DOWN, got {kind_raw:?}")));
        };
        let x = NodeId(field(&rec, 2, "node_a", path, line)?);
        let y = NodeId(field(&rec, 3, "node_b", path, line)?);
        if x == y {
            return Err(err(format!("self-contact of node {x}")));
        }
        if time < prev {
            return Err(err(format!("time {time} goes backwards (previous {prev})")));
        }
        prev = time;
        let ev = ContactEvent::new(time, kind, x, y);
        let key = (ev.a, ev.b);
        ids.insert(ev.a);
        ids.insert(ev.b);
        match kind {
            ContactKind::Up => {
                if open.contains_key(&key) {
                    return Err(err(format!("UP for {x}-{y} while already in contact")));
                }
                match last_down.get(&key) {
                    Some(&(idx, t, start)) if t == time => {
                        // Touching contacts: drop the Down and keep the pair open.
                        events[idx] = None;
                        open.insert(key, start);
                        last_down.remove(&key);
                    }
                    _ => {
                        open.insert(key, time);
                        events.push(Some(ev));
                    }
                }
            }
            ContactKind::Down => match open.remove(&key) {
                None => return Err(err(format!("DOWN for {x}-{y} without a prior UP"))),
                Some(start) if start == time => {
                    return Err(err(format!("zero-length contact {x}-{y} at {time}")));
                }
                Some(start) => {
                    last_down.insert(key, (events.len(), time, start));
                    events.push(Some(ev));
                }
            },
        }
    }
    let duration = duration.unwrap_or(prev).max(prev);
    let mut events: Vec<ContactEvent> = events.into_iter().flatten().collect();
    for ((a, b), start) in open {
        if start < duration {
            events.push(ContactEvent::new(duration, ContactKind::Down, a, b));
        } else if let Some(pos) = events
            .iter()
            .rposition(|e| (e.a, e.b) == (a, b) && e.kind == ContactKind::Up && e.time == start)
        {
            events.remove(pos);
        }
    }
    events.sort_by_key(|e| e.time);
    let roster = Roster::new(ids.into_iter().map(|id| (id, GroupLabel::default())).collect());
    ContactSequence::new(events, roster, duration)
}

pub fn write_trace(seq: &ContactSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for ev in seq.events() {
        let kind = match ev.kind {
            ContactKind::Up => "UP",
            ContactKind::Down => "DOWN",
        };
        writeln!(w, "{},{},{},{}", ev.time, kind, ev.a, ev.b).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a `node_id,group_label` roster.
pub fn parse_roster(path: impl AsRef<Path>) -> Result<Roster> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = reader_builder().from_reader(file);
    let mut entries = Vec::new();
    let mut first = true;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = line_of(&rec);
        if std::mem::take(&mut first) && is_header(&rec) {
            continue;
        }
        let id = NodeId(field(&rec, 0, "node_id", path, line)?);
        let label = GroupLabel::new(rec.get(1).unwrap_or_default());
        entries.push((id, label));
    }
    Ok(Roster::new(entries))
}

pub fn write_roster(roster: &Roster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (id, label) in roster.entries() {
        writeln!(w, "{id},{label}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Converts a pairwise contact listing (`node_a node_b start end [...]`,
/// whitespace- or comma-separated, as distributed with the Haggle/Cambridge
/// datasets) into the canonical trace format. Returns the number of events
/// written.
pub fn convert_pairwise(input: impl AsRef<Path>, output: impl AsRef<Path>) -> Result<usize> {
    let input = input.as_ref();
    let file = File::open(input).map_err(|e| Error::io(input, e))?;
    let mut intervals = Vec::new();
    let mut ids = std::collections::BTreeSet::new();
    let mut end_max = 0;
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(input, e))?;
        let line_no = n as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parse = |i: usize, name: &str| -> Result<u64> {
            cols.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse {
                    path: input.to_path_buf(),
                    line: line_no,
                    reason: format!("bad or missing `{name}`"),
                })
        };
        if n == 0 && cols.first().is_some_and(|c| c.parse::<u64>().is_err()) {
            continue;
        }
        let a = NodeId(parse(0, "node_a")? as u32);
        let b = NodeId(parse(1, "node_b")? as u32);
        let start = parse(2, "start")?;
        let end = parse(3, "end")?;
        if a == b || end < start {
            return Err(Error::Parse {
                path: input.to_path_buf(),
                line: line_no,
                reason: "self-contact or end before start".into(),
            });
        }
        ids.insert(a);
        ids.insert(b);
        end_max = end_max.max(end);
        intervals.push(Contact { a, b, start, end });
    }
    let roster = Roster::new(ids.into_iter().map(|id| (id, GroupLabel::default())).collect());
    let seq = ContactSequence::from_intervals(intervals, roster, end_max)?;
    write_trace(&seq, output)?;
    Ok(seq.events().len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, duration: Option<SimTime>) -> Result<ContactSequence> {
        read_trace(text.as_bytes(), "mem.csv", duration)
    }

    #[test]
    fn single_contact() {
        let seq = parse("10,UP,0,1\n20,DOWN,0,1\n", None).unwrap();
        let iv = seq.intervals();
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].end - iv[0].start, 10);
    }

    #[test]
    fn header_and_swapped_ids() {
        let seq = parse("time_s,kind,a,b\n10,up,3,1\n20,down,1,3\n", None).unwrap();
        assert_eq!(seq.intervals()[0].a, NodeId(1));
        assert_eq!(seq.roster().len(), 2);
    }

    #[test]
    fn open_contact_closed_at_trace_end() {
        let seq = parse("10,UP,0,1\n", Some(100)).unwrap();
        let iv = seq.intervals();
        assert_eq!((iv[0].start, iv[0].end), (10, 100));
    }

    #[test]
    fn down_without_up_reports_line() {
        let err = parse("5,UP,2,3\n20,DOWN,0,1\n", None).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line() {
        let err = parse("10,UP,0,1\n11,SIDEWAYS,0,1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("10,UP,0\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn touching_contacts_are_merged() {
        let seq = parse("10,UP,0,1\n20,DOWN,0,1\n20,UP,0,1\n30,DOWN,0,1\n", None).unwrap();
        let iv = seq.intervals();
        assert_eq!(iv.len(), 1);
        assert_eq!((iv[0].start, iv[0].end), (10, 30));
    }
}
