//! Standalone SVG chart rendering.
//!
//! Self-contained documents, no external references, deterministic byte
//! output for identical input. `<rect>` elements are reserved for data
//! marks (bars, heatmap cells) so tests can count them; axes and frames
//! use `<line>` and `<path>`.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 64.0;

const SERIES_COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq)]
pub enum ChartError {
    EmptySeries,
}

impl std::fmt::Display for ChartError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChartError::EmptySeries => write!(f, "chart has no data points"),
        }
    }
}

impl std::error::Error for ChartError {}

#[derive(Debug, Clone)]
pub struct LineSeries {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BarGroup {
    pub label: String,
    pub values: Vec<f64>,
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn y(&self, value: f64) -> f64 {
        let t = (value - self.y_min) / (self.y_max - self.y_min);
        self.y0 + self.h - t * self.h
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        esc(title)
    );
    s
}

fn axes(
    svg: &mut String,
    frame: &Frame,
    x_label: &str,
    y_label: &str,
    x_ticks: &[(f64, String)],
    y_ticks: &[(f64, String)],
) {
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333" stroke-width="1"/>"##,
        frame.x0,
        frame.y0 + frame.h,
        frame.x0 + frame.w,
        frame.y0 + frame.h
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333" stroke-width="1"/>"##,
        frame.x0,
        frame.y0,
        frame.x0,
        frame.y0 + frame.h
    );
    for (x, label) in x_ticks {
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333" stroke-width="1"/>"##,
            frame.y0 + frame.h,
            frame.y0 + frame.h + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            frame.y0 + frame.h + 16.0,
            esc(label)
        );
    }
    for (y, label) in y_ticks {
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#333" stroke-width="1"/>"##,
            frame.x0 - 4.0,
            frame.x0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            frame.x0 - 8.0,
            y + 3.5,
            esc(label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        frame.x0 + frame.w / 2.0,
        HEIGHT - 16.0,
        esc(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        frame.y0 + frame.h / 2.0,
        frame.y0 + frame.h / 2.0,
        esc(y_label)
    );
}

fn legend(svg: &mut String, frame: &Frame, labels: &[String]) {
    for (i, label) in labels.iter().enumerate() {
        let y = frame.y0 + 12.0 + i as f64 * 18.0;
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="3"/>"#,
            frame.x0 + frame.w + 12.0,
            frame.x0 + frame.w + 34.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            frame.x0 + frame.w + 40.0,
            y + 3.5,
            esc(label)
        );
    }
}

fn value_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        // Degenerate span: pad so the single value sits mid-plot.
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn y_tick_values(frame: &Frame) -> Vec<(f64, String)> {
    (0..=4)
        .map(|i| {
            let value = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
            (frame.y(value), format!("{value:.2}"))
        })
        .collect()
}

fn plot_frame(y_min: f64, y_max: f64) -> Frame {
    Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
        y_min,
        y_max,
    }
}

/// Sparse x tick labels: at most ~12, evenly thinned.
fn thin_labels(labels: &[String]) -> Vec<(usize, String)> {
    let step = labels.len().div_ceil(12).max(1);
    labels
        .iter()
        .enumerate()
        .filter(|(i, _)| i % step == 0)
        .map(|(i, l)| (i, l.clone()))
        .collect()
}

/// Multi-series line chart over a categorical x axis.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_labels: &[String],
    series: &[LineSeries],
) -> Result<String, ChartError> {
    if series.is_empty() || series.iter().all(|s| s.values.is_empty()) || x_labels.is_empty() {
        return Err(ChartError::EmptySeries);
    }
    let (y_min, y_max) = value_range(series.iter().flat_map(|s| s.values.iter().copied()));
    let frame = plot_frame(y_min, y_max);
    let x_at = |i: usize| {
        if x_labels.len() == 1 {
            frame.x0 + frame.w / 2.0
        } else {
            frame.x0 + frame.w * i as f64 / (x_labels.len() - 1) as f64
        }
    };

    let mut svg = open_svg(title);
    let x_ticks: Vec<(f64, String)> = thin_labels(x_labels)
        .into_iter()
        .map(|(i, l)| (x_at(i), l))
        .collect();
    axes(
        &mut svg,
        &frame,
        x_label,
        y_label,
        &x_ticks,
        &y_tick_values(&frame),
    );
    for (si, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[si % SERIES_COLORS.len()];
        let points: Vec<String> = s
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", x_at(i), frame.y(*v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        for (i, v) in s.values.iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                x_at(i),
                frame.y(*v)
            );
        }
    }
    legend(
        &mut svg,
        &frame,
        &series.iter().map(|s| s.label.clone()).collect::<Vec<_>>(),
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Grouped bar chart: one bar per (x label, group) pair.
pub fn bar_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_labels: &[String],
    groups: &[BarGroup],
) -> Result<String, ChartError> {
    if x_labels.is_empty() || groups.is_empty() || groups.iter().all(|g| g.values.is_empty()) {
        return Err(ChartError::EmptySeries);
    }
    let (lo, hi) = value_range(groups.iter().flat_map(|g| g.values.iter().copied()));
    // Bars read from a zero baseline.
    let frame = plot_frame(lo.min(0.0), hi.max(0.0));
    let slot_w = frame.w / x_labels.len() as f64;
    let bar_w = (slot_w * 0.8) / groups.len() as f64;

    let mut svg = open_svg(title);
    let x_ticks: Vec<(f64, String)> = thin_labels(x_labels)
        .into_iter()
        .map(|(i, l)| (frame.x0 + slot_w * (i as f64 + 0.5), l))
        .collect();
    axes(
        &mut svg,
        &frame,
        x_label,
        y_label,
        &x_ticks,
        &y_tick_values(&frame),
    );
    let zero_y = frame.y(0.0);
    for (gi, g) in groups.iter().enumerate() {
        let color = SERIES_COLORS[gi % SERIES_COLORS.len()];
        for (i, v) in g.values.iter().enumerate() {
            let x = frame.x0 + slot_w * i as f64 + slot_w * 0.1 + bar_w * gi as f64;
            let top = frame.y(*v).min(zero_y);
            let height = (frame.y(*v) - zero_y).abs();
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{top:.2}" width="{bar_w:.2}" height="{height:.2}" fill="{color}"/>"#
            );
        }
    }
    if groups.len() > 1 {
        legend(
            &mut svg,
            &frame,
            &groups.iter().map(|g| g.label.clone()).collect::<Vec<_>>(),
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Labeled scatter plot.
pub fn scatter_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(String, f64, f64)],
) -> Result<String, ChartError> {
    if points.is_empty() {
        return Err(ChartError::EmptySeries);
    }
    let (y_min, y_max) = value_range(points.iter().map(|p| p.2));
    let (x_min, x_max) = value_range(points.iter().map(|p| p.1));
    let frame = plot_frame(y_min, y_max);
    let x_at = |v: f64| frame.x0 + frame.w * (v - x_min) / (x_max - x_min);

    let mut svg = open_svg(title);
    let x_ticks: Vec<(f64, String)> = (0..=4)
        .map(|i| {
            let v = x_min + (x_max - x_min) * i as f64 / 4.0;
            (x_at(v), format!("{v:.2}"))
        })
        .collect();
    axes(
        &mut svg,
        &frame,
        x_label,
        y_label,
        &x_ticks,
        &y_tick_values(&frame),
    );
    for (label, x, y) in points {
        let px = x_at(*x);
        let py = frame.y(*y);
        let _ = writeln!(
            svg,
            r##"<circle cx="{px:.2}" cy="{py:.2}" r="5" fill="#1f77b4"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            px + 8.0,
            py - 6.0,
            esc(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Correlation heatmap with a fixed [-1, 1] color scale
/// (blue through white to red); absent entries render gray.
pub fn heatmap(
    title: &str,
    labels: &[String],
    matrix: &[Vec<Option<f64>>],
) -> Result<String, ChartError> {
    let n = labels.len();
    if n == 0 || matrix.len() != n {
        return Err(ChartError::EmptySeries);
    }
    let frame = plot_frame(0.0, 1.0);
    let size = frame.w.min(frame.h);
    let cell = size / n as f64;
    let mut svg = open_svg(title);

    for (i, row) in matrix.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let x = frame.x0 + j as f64 * cell;
            let y = frame.y0 + i as f64 * cell;
            let color = match entry {
                Some(r) => correlation_color(*r),
                None => "#b0b0b0".to_string(),
            };
            let _ = writeln!(
                svg,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{color}" stroke="#ffffff" stroke-width="0.5"/>"##
            );
            if let Some(r) = entry {
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="middle">{r:.2}</text>"#,
                    x + cell / 2.0,
                    y + cell / 2.0 + 3.0
                );
            }
        }
    }
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            frame.x0 - 6.0,
            frame.y0 + i as f64 * cell + cell / 2.0 + 3.0,
            esc(label)
        );
        let cx = frame.x0 + i as f64 * cell + cell / 2.0;
        let ty = frame.y0 + n as f64 * cell + 12.0;
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.2}" y="{ty:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            esc(label)
        );
    }
    // Color scale: -1 (blue) to +1 (red), drawn as stroked segments so rect
    // stays reserved for data cells.
    let bar_x = frame.x0 + frame.w + 24.0;
    let bar_h = size * 0.8;
    let bar_y = frame.y0 + (size - bar_h) / 2.0;
    let steps = 40;
    for k in 0..steps {
        let r = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        let y = bar_y + bar_h * k as f64 / steps as f64;
        let seg_h = bar_h / steps as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{bar_x:.2}" y1="{y:.2}" x2="{bar_x:.2}" y2="{:.2}" stroke="{}" stroke-width="14"/>"#,
            y + seg_h + 0.5,
            correlation_color(r)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10">+1</text>"#,
        bar_x + 12.0,
        bar_y + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10">0</text>"#,
        bar_x + 12.0,
        bar_y + bar_h / 2.0 + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10">-1</text>"#,
        bar_x + 12.0,
        bar_y + bar_h + 4.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Blue-white-red diverging map over [-1, 1].
fn correlation_color(r: f64) -> String {
    let r = r.clamp(-1.0, 1.0);
    let lerp = |a: u8, b: u8, t: f64| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    let (red, green, blue) = if r < 0.0 {
        let t = r + 1.0; // 0 at -1, 1 at 0
        (
            lerp(0x21, 0xff, t),
            lerp(0x66, 0xff, t),
            lerp(0xac, 0xff, t),
        )
    } else {
        let t = r; // 0 at 0, 1 at +1
        (
            lerp(0xff, 0xb2, t),
            lerp(0xff, 0x18, t),
            lerp(0xff, 0x2b, t),
        )
    };
    format!("#{red:02x}{green:02x}{blue:02x}")
}
