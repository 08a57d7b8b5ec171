//! CSV, JSON and SVG writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "gie-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `%.{digits}g`-style formatting: shortest of fixed or scientific with
/// `digits` significant digits, trailing zeros trimmed, no negative zero.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn with_extension(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Header row then one row per record, LF endings.
pub fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: Vec<f64>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 440.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot of `series` against `t`, with a zero line and a dashed guide
/// at `guide_t` when it falls inside the range.
pub fn svg_plot(t: &[f64], series: &[Series<'_>], y_label: &str, guide_t: Option<f64>, metadata: &Value) -> String {
    let t_max = t.iter().cloned().fold(0.0, f64::max);
    let t_span = if t_max > 0.0 { t_max } else { 1.0 };
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 0.0;
    for s in series {
        for &v in &s.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let px = |x: f64| LEFT + (RIGHT - LEFT) * x / t_span;
    let py = |y: f64| BOTTOM - (BOTTOM - TOP) * (y - lo) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<metadata>{}</metadata>", escape(&serde_json::to_string(metadata).expect("JSON")));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for i in 0..=4 {
        let tv = t_span * i as f64 / 4.0;
        let x = px(tv);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="black"/>"#, BOTTOM + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            BOTTOM + 20.0,
            fmt_sig(tv, 4)
        );
        let yv = lo + (hi - lo) * i as f64 / 4.0;
        let y = py(yv);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            fmt_sig(yv, 3)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">t (s)</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 25.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        (TOP + BOTTOM) / 2.0,
        escape(y_label)
    );
    let zero = py(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{zero:.2}" x2="{RIGHT}" y2="{zero:.2}" stroke="gray" stroke-dasharray="4 3"/>"#
    );
    if let Some(g) = guide_t.filter(|g| *g > 0.0 && *g <= t_max) {
        let x = px(g);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}" stroke="gray" stroke-dasharray="2 4"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" font-size="11" fill="gray">t = {} s</text>"#,
            x + 4.0,
            TOP + 14.0,
            fmt_sig(g, 4)
        );
    }
    for series_item in series {
        let pts: Vec<String> =
            t.iter().zip(&series_item.values).map(|(&tv, &v)| format!("{:.2},{:.2}", px(tv), py(v))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            series_item.color,
            pts.join(" ")
        );
    }
    for (i, series_item) in series.iter().enumerate() {
        let y = TOP + 20.0 + 18.0 * i as f64;
        let x = RIGHT - 110.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/>"#,
            x + 25.0,
            series_item.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12">{}</text>"#,
            x + 32.0,
            y + 4.0,
            escape(series_item.label)
        );
    }
    s.push_str("</svg>\n");
    s
}
