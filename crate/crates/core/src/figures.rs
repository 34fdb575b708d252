//! Plot-ready tables and minimal static SVG charts for the two figures:
//! entropy by construction (one point per participle) and entropy by
//! participle (one point per construction).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::entropy::{max_entropy, EntropyRecord};
use crate::extract::ConstructionKind;

pub const FIG1_HEADER: &str = "construction,participle,entropy_bits,max_entropy";
pub const FIG2_HEADER: &str = "participle,construction,entropy_bits,max_entropy";

#[derive(Debug, Error, PartialEq)]
pub enum FigureError {
    #[error("records mix sample sizes {0} and {1}")]
    MixedSampleSize(u64, u64),
    #[error("sample size 0")]
    ZeroSampleSize,
}

fn common_n(records: &[EntropyRecord]) -> Result<Option<u64>, FigureError> {
    let Some(first) = records.first() else {
        return Ok(None);
    };
    if let Some(r) = records.iter().find(|r| r.n != first.n) {
        return Err(FigureError::MixedSampleSize(first.n, r.n));
    }
    if first.n == 0 {
        return Err(FigureError::ZeroSampleSize);
    }
    Ok(Some(first.n))
}

fn kind_rank(k: ConstructionKind) -> usize {
    ConstructionKind::ALL.iter().position(|&x| x == k).expect("known kind")
}

/// Long format grouped by construction, participles alphabetical within.
pub fn emit_fig1_data(records: &[EntropyRecord]) -> Result<String, FigureError> {
    let mut out = format!("{FIG1_HEADER}\n");
    let Some(n) = common_n(records)? else {
        return Ok(out);
    };
    let cap = max_entropy(n).expect("n > 0");
    let mut rows: Vec<&EntropyRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        kind_rank(a.kind)
            .cmp(&kind_rank(b.kind))
            .then_with(|| a.participle.cmp(&b.participle))
    });
    for r in rows {
        writeln!(out, "{},{},{:.6},{:.6}", r.kind, r.participle, r.entropy_bits, cap).unwrap();
    }
    Ok(out)
}

/// Participles ordered by mean compound entropy ascending, ties by name.
/// Participles without compound records sort last.
pub fn participle_order(records: &[EntropyRecord]) -> Vec<String> {
    let mut sums: BTreeMap<&str, (f64, u32)> = BTreeMap::new();
    for r in records {
        let e = sums.entry(r.participle.as_str()).or_insert((0.0, 0));
        if r.kind.is_compound() {
            e.0 += r.entropy_bits;
            e.1 += 1;
        }
    }
    let mut order: Vec<(&str, f64)> = sums
        .into_iter()
        .map(|(p, (s, c))| (p, if c == 0 { f64::INFINITY } else { s / c as f64 }))
        .collect();
    order.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    order.into_iter().map(|(p, _)| p.to_string()).collect()
}

/// Long format grouped by participle in [`participle_order`].
pub fn emit_fig2_data(records: &[EntropyRecord]) -> Result<String, FigureError> {
    let mut out = format!("{FIG2_HEADER}\n");
    let Some(n) = common_n(records)? else {
        return Ok(out);
    };
    let cap = max_entropy(n).expect("n > 0");
    let rank: BTreeMap<String, usize> = participle_order(records)
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let mut rows: Vec<&EntropyRecord> = records.iter().collect();
    rows.sort_by_key(|r| (rank[&r.participle], kind_rank(r.kind)));
    for r in rows {
        writeln!(out, "{},{},{:.6},{:.6}", r.participle, r.kind, r.entropy_bits, cap).unwrap();
    }
    Ok(out)
}

const COLORS: [&str; 4] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];
const W: f64 = 720.0;
const H: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 64.0;

struct Canvas {
    svg: String,
    y_max: f64,
}

impl Canvas {
    fn new(title: &str, y_max: f64) -> Self {
        let mut svg = String::new();
        writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        )
        .unwrap();
        writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
            W / 2.0,
            title
        )
        .unwrap();
        let mut c = Canvas { svg, y_max };
        c.axes();
        c
    }

    fn y(&self, v: f64) -> f64 {
        TOP + (H - TOP - BOTTOM) * (1.0 - v / self.y_max)
    }

    fn axes(&mut self) {
        let (y0, y1) = (self.y(0.0), self.y(self.y_max));
        writeln!(
            self.svg,
            r#"<line x1="{LEFT}" y1="{y0:.1}" x2="{LEFT}" y2="{y1:.1}" stroke="black"/>"#
        )
        .unwrap();
        writeln!(
            self.svg,
            r#"<line x1="{LEFT}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="black"/>"#,
            W - RIGHT
        )
        .unwrap();
        let mut tick = 0.0;
        while tick <= self.y_max + 1e-9 {
            let y = self.y(tick);
            writeln!(
                self.svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{tick:.0}</text>"#,
                LEFT - 6.0,
                y + 4.0
            )
            .unwrap();
            tick += 1.0;
        }
        writeln!(
            self.svg,
            r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">entropy (bits)</text>"#,
            H / 2.0,
            H / 2.0
        )
        .unwrap();
    }

    fn cap_line(&mut self, cap: f64) {
        let y = self.y(cap);
        writeln!(
            self.svg,
            r#"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="gray" stroke-dasharray="4 3"/>"#,
            W - RIGHT
        )
        .unwrap();
        writeln!(
            self.svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" fill="gray">max {cap:.2}</text>"#,
            W - RIGHT,
            y - 4.0
        )
        .unwrap();
    }

    fn point(&mut self, x: f64, v: f64, color: &str) {
        writeln!(
            self.svg,
            r#"<circle cx="{x:.1}" cy="{:.1}" r="3" fill="{color}" fill-opacity="0.8"/>"#,
            self.y(v)
        )
        .unwrap();
    }

    fn x_label(&mut self, x: f64, text: &str, rotate: bool) {
        let y = H - BOTTOM + 14.0;
        if rotate {
            writeln!(
                self.svg,
                r#"<text x="{x:.1}" y="{y:.1}" transform="rotate(-60 {x:.1} {y:.1})" text-anchor="end" font-size="9">{text}</text>"#
            )
            .unwrap();
        } else {
            writeln!(
                self.svg,
                r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle">{text}</text>"#
            )
            .unwrap();
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn y_limit(records: &[EntropyRecord], cap: f64) -> f64 {
    records
        .iter()
        .map(|r| r.entropy_bits)
        .fold(cap, f64::max)
        .ceil()
        .max(1.0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Strip chart: one column per construction.
pub fn fig1_svg(records: &[EntropyRecord]) -> Result<String, FigureError> {
    let n = common_n(records)?.unwrap_or(100);
    let cap = max_entropy(n).map_err(|_| FigureError::ZeroSampleSize)?;
    let mut c = Canvas::new("Entropy by construction", y_limit(records, cap));
    c.cap_line(cap);
    let slot = (W - LEFT - RIGHT) / 4.0;
    for (i, kind) in ConstructionKind::ALL.into_iter().enumerate() {
        let center = LEFT + slot * (i as f64 + 0.5);
        let mut pts: Vec<&EntropyRecord> = records.iter().filter(|r| r.kind == kind).collect();
        pts.sort_by(|a, b| a.participle.cmp(&b.participle));
        let m = pts.len().max(1) as f64;
        for (j, r) in pts.iter().enumerate() {
            let jitter = (j as f64 / m - 0.5) * slot * 0.5;
            c.point(center + jitter, r.entropy_bits, COLORS[i]);
        }
        c.x_label(center, kind.as_str(), false);
    }
    Ok(c.finish())
}

/// One column per participle, one colored point per construction.
pub fn fig2_svg(records: &[EntropyRecord]) -> Result<String, FigureError> {
    let n = common_n(records)?.unwrap_or(100);
    let cap = max_entropy(n).map_err(|_| FigureError::ZeroSampleSize)?;
    let mut c = Canvas::new("Entropy by participle", y_limit(records, cap));
    c.cap_line(cap);
    let order = participle_order(records);
    let slot = (W - LEFT - RIGHT) / order.len().max(1) as f64;
    for (i, p) in order.iter().enumerate() {
        let center = LEFT + slot * (i as f64 + 0.5);
        for r in records.iter().filter(|r| &r.participle == p) {
            c.point(center, r.entropy_bits, COLORS[kind_rank(r.kind)]);
        }
        c.x_label(center, &escape(p), true);
    }
    for (i, kind) in ConstructionKind::ALL.into_iter().enumerate() {
        let x = LEFT + 10.0 + 120.0 * i as f64;
        writeln!(
            c.svg,
            r#"<circle cx="{x:.1}" cy="{:.1}" r="4" fill="{}"/>"#,
            TOP + 4.0,
            COLORS[i]
        )
        .unwrap();
        writeln!(
            c.svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 8.0,
            TOP + 8.0,
            kind.as_str()
        )
        .unwrap();
    }
    Ok(c.finish())
}
