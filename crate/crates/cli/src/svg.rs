//! Minimal self-contained SVG charts. Output depends only on the inputs: no
//! timestamps, no random ids, fixed number formatting.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Join the points with a polyline (markers only otherwise).
    pub line: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Fixed-precision coordinate.
fn c(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick positions covering `[lo, hi]` with a 1-2-5 step.
pub fn ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, usize) {
    let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    let values = (first..=last).map(|k| k as f64 * step).collect();
    (values, decimals)
}

/// Data range padded by 5%, never empty.
fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        c((WIDTH - RIGHT + LEFT) / 2.0),
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, integer_x: bool) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{} {} H{} M{} {} V{}" stroke="black" fill="none"/>"#,
        c(x0),
        c(y0),
        c(x1),
        c(x0),
        c(y0),
        c(y1)
    );
    let (xt, xd) = ticks(frame.x.0, frame.x.1, 6);
    for t in xt {
        if integer_x && t.fract() != 0.0 {
            continue;
        }
        let px = frame.px(t);
        let _ = writeln!(
            out,
            r#"<path d="M{} {} v5" stroke="black"/><text x="{}" y="{}" text-anchor="middle">{:.*}</text>"#,
            c(px),
            c(y0),
            c(px),
            c(y0 + 18.0),
            if integer_x { 0 } else { xd },
            t
        );
    }
    let (yt, yd) = ticks(frame.y.0, frame.y.1, 6);
    for t in yt {
        let py = frame.py(t);
        let _ = writeln!(
            out,
            r#"<path d="M{} {} h-5" stroke="black"/><text x="{}" y="{}" text-anchor="end">{:.*}</text>"#,
            c(x0),
            c(py),
            c(x0 - 8.0),
            c(py + 4.0),
            yd,
            t
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c((x0 + x1) / 2.0),
        c(HEIGHT - 14.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        c((y0 + y1) / 2.0),
        escape(y_label)
    );
}

fn legend(out: &mut String, labels: &[&str]) {
    for (k, label) in labels.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * k as f64;
        let x = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            c(x),
            c(y - 10.0),
            PALETTE[k % PALETTE.len()],
            c(x + 18.0),
            c(y),
            escape(label)
        );
    }
}

/// Scatter/line chart. `integer_x` suppresses fractional x ticks.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], integer_x: bool) -> String {
    let frame = Frame {
        x: extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.0))),
        y: extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.1))),
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, integer_x);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| (frame.px(x), frame.py(y)))
            .collect();
        if s.line && pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", c(*x), c(*y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in pts {
            let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, c(x), c(y));
        }
    }
    let labels: Vec<&str> = series.iter().map(|s| s.label.as_str()).collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}

/// Vertical bars at x = 1, 2, ... with heights `values`.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, values: &[f64]) -> String {
    let top = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let frame = Frame {
        x: (0.5, values.len() as f64 + 0.5),
        y: (0.0, if top > 0.0 { top * 1.05 } else { 1.0 }),
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, true);
    let width = (frame.px(1.0) - frame.px(0.0)) * 0.7;
    for (k, v) in values.iter().enumerate() {
        let x = frame.px(k as f64 + 1.0);
        let (y, base) = (frame.py(v.max(0.0)), frame.py(0.0));
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            c(x - width / 2.0),
            c(y),
            c(width),
            c(base - y),
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    out
}

/// White-to-blue cell colour for `t` in `[0, 1]`.
fn shade(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(255.0, 8.0), mix(255.0, 48.0), mix(255.0, 107.0))
}

/// Heat map of `rows` (row 1 at the top), scaled to the largest entry.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, rows: &[Vec<f64>]) -> String {
    let nr = rows.len().max(1);
    let nc = rows.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let top = rows.iter().flatten().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (TOP, HEIGHT - BOTTOM);
    let (cw, ch) = ((x1 - x0) / nc as f64, (y1 - y0) / nr as f64);
    let mut out = String::new();
    open(&mut out, title);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let t = if top > 0.0 { v / top } else { 0.0 };
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="white"/>"#,
                c(x0 + j as f64 * cw),
                c(y0 + i as f64 * ch),
                c(cw),
                c(ch),
                shade(t)
            );
        }
    }
    for j in 0..nc {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            c(x0 + (j as f64 + 0.5) * cw),
            c(y1 + 16.0),
            j + 1
        );
    }
    for i in 0..nr {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            c(x0 - 6.0),
            c(y0 + (i as f64 + 0.5) * ch + 4.0),
            i + 1
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c((x0 + x1) / 2.0),
        c(HEIGHT - 14.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        c((y0 + y1) / 2.0),
        escape(y_label)
    );
    // colour bar
    let bx = WIDTH - RIGHT + 24.0;
    for k in 0..20 {
        let t = 1.0 - k as f64 / 19.0;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="16" height="{}" fill="{}"/>"#,
            c(bx),
            c(y0 + k as f64 * (y1 - y0) / 20.0),
            c((y1 - y0) / 20.0 + 0.5),
            shade(t)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}">{:.3}</text>"#, c(bx + 22.0), c(y0 + 10.0), top);
    let _ = writeln!(out, r#"<text x="{}" y="{}">0</text>"#, c(bx + 22.0), c(y1));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Series> {
        vec![
            Series {
                label: "a & b".into(),
                points: vec![(2.0, 0.8), (3.0, 1.1), (4.0, 1.2)],
                line: true,
            },
            Series {
                label: "c".into(),
                points: vec![(2.0, 0.1), (3.0, f64::NAN)],
                line: false,
            },
        ]
    }

    #[test]
    fn output_is_deterministic_and_escaped() {
        let a = line_chart("t", "n", "D(n)", &sample(), true);
        let b = line_chart("t", "n", "D(n)", &sample(), true);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("a &amp; b"));
        assert!(!a.contains("NaN"));
        assert_eq!(a.matches("<circle").count(), 4);
    }

    #[test]
    fn ticks_use_round_steps() {
        let (t, d) = ticks(0.0, 1.0, 5);
        assert_eq!(t, vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(d, 1);
        let (t, d) = ticks(2.0, 12.0, 6);
        assert_eq!(t, vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0]);
        assert_eq!(d, 0);
    }

    #[test]
    fn degenerate_ranges_are_padded() {
        let (lo, hi) = extent([1.0, 1.0].into_iter());
        assert!(lo < 1.0 && hi > 1.0);
        assert_eq!(extent(std::iter::empty()), (0.0, 1.0));
    }

    #[test]
    fn heatmap_and_bars_have_one_shape_per_value() {
        let h = heatmap("h", "y", "x", &[vec![0.0, 1.0], vec![0.5, 0.25]]);
        assert_eq!(h.matches("stroke=\"white\"").count(), 4);
        let b = bar_chart("s", "k", "coefficient", &[0.7, 0.5, 0.1]);
        assert_eq!(b.matches("<rect").count(), 1 + 3);
    }
}
