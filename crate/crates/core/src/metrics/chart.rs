use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{AggregateRow, Metric};
use crate::error::{Error, Result};
use crate::types::SimTime;

const PALETTE: [&str; 11] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
    "#1f78b4", "#b2df8a", "#fb9a99",
];

fn ttl_label(ttl: SimTime) -> String {
    match ttl {
        t if t % 604_800 == 0 => format!("{}w", t / 604_800),
        t if t % 86_400 == 0 => format!("{}d", t / 86_400),
        t if t % 3600 == 0 => format!("{}h", t / 3600),
        t => format!("{t}s"),
    }
}

/// Grouped bar chart of one metric: TTLs along x, one bar per protocol,
/// whiskers at mean ± CI half-width.
pub fn emit_svg_chart(rows: &[AggregateRow], metric: Metric, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let rows: Vec<&AggregateRow> = rows.iter().filter(|r| r.metric == metric).collect();
    if rows.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let protocols: Vec<&str> = {
        let mut seen = Vec::new();
        for r in &rows {
            if !seen.contains(&r.protocol.as_str()) {
                seen.push(r.protocol.as_str());
            }
        }
        seen
    };
    let ttls: Vec<SimTime> = rows.iter().map(|r| r.ttl).collect::<BTreeSet<_>>().into_iter().collect();

    let top = rows
        .iter()
        .filter_map(|r| r.mean.map(|m| m + r.ci_halfwidth.unwrap_or(0.0)))
        .fold(0.0f64, f64::max);
    let top = if top > 0.0 { top * 1.1 } else { 1.0 };

    let (left, right, upper, lower) = (70.0, 160.0, 40.0, 50.0);
    let bar_w = 14.0;
    let group_w = bar_w * protocols.len() as f64 + 20.0;
    let plot_w = group_w * ttls.len() as f64;
    let plot_h = 260.0;
    let (width, height) = (left + plot_w + right, upper + plot_h + lower);
    let y = |v: f64| upper + plot_h - (v / top).clamp(0.0, 1.0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{metric}</text>"#, left + plot_w / 2.0);
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{upper}" x2="{left}" y2="{}" stroke="black"/>"#,
        upper + plot_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        upper + plot_h,
        left + plot_w
    );
    for i in 0..=4 {
        let v = top * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#,
            left - 6.0,
            y(v) + 4.0,
            v
        );
    }
    for (g, &ttl) in ttls.iter().enumerate() {
        let gx = left + g as f64 * group_w + 10.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            gx + bar_w * protocols.len() as f64 / 2.0,
            upper + plot_h + 18.0,
            ttl_label(ttl)
        );
        for (p, proto) in protocols.iter().enumerate() {
            let Some(r) = rows.iter().find(|r| r.ttl == ttl && r.protocol == *proto) else {
                continue;
            };
            let Some(mean) = r.mean else { continue };
            let x = gx + p as f64 * bar_w;
            let color = PALETTE[p % PALETTE.len()];
            let _ = writeln!(
                s,
                r#"<rect class="bar" x="{x}" y="{}" width="{}" height="{}" fill="{color}"><title>{proto} {} {mean}</title></rect>"#,
                y(mean),
                bar_w - 2.0,
                upper + plot_h - y(mean),
                ttl_label(ttl)
            );
            if let Some(ci) = r.ci_halfwidth {
                let cx = x + (bar_w - 2.0) / 2.0;
                let (y0, y1) = (y(mean - ci), y(mean + ci));
                let _ = writeln!(
                    s,
                    r#"<path class="whisker" d="M{cx} {y0}V{y1}M{} {y0}h6M{} {y1}h6" stroke="black" fill="none"/>"#,
                    cx - 3.0,
                    cx - 3.0
                );
            }
        }
    }
    for (p, proto) in protocols.iter().enumerate() {
        let ly = upper + 14.0 * p as f64;
        let lx = left + plot_w + 16.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{ly}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{proto}</text>"#,
            PALETTE[p % PALETTE.len()],
            lx + 14.0,
            ly + 9.0
        );
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
