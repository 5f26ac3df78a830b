//! Minimal standalone SVG renderers: box-plot series, histograms, and line
//! plots. Figures are derived views; every number they show comes from the
//! CSVs written next to them.

use std::fmt::Write as _;

use crate::summary::BoxStats;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 56.0;

pub struct Curve {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_y: bool,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let t = (v - self.x_min) / (self.x_max - self.x_min);
        MARGIN_L + t * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.log_y {
            (v.max(self.y_min).log10(), self.y_min.log10(), self.y_max.log10())
        } else {
            (v, self.y_min, self.y_max)
        };
        let t = (v - lo) / (hi - lo);
        HEIGHT - MARGIN_B - t * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn fmt(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 10000.0 {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn open_svg(out: &mut String, title: &str, x_label: &str, y_label: &str, frame: &Frame) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{tx}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>
<text x="{tx}" y="{bl}" font-family="sans-serif" font-size="12" text-anchor="middle">{x_label}</text>
<text x="16" y="{ty}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {ty})">{y_label}</text>
"#,
        tx = (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        bl = HEIGHT - 12.0,
        ty = (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
    );
    // axes
    let _ = write!(
        out,
        r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>
"#,
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B,
    );
    draw_ticks(out, frame);
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if span <= 0.0 {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let mut ticks = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi + step * 1e-9 {
        ticks.push(v);
        v += step;
    }
    ticks
}

fn draw_ticks(out: &mut String, frame: &Frame) {
    let b = HEIGHT - MARGIN_B;
    for t in nice_ticks(frame.x_min, frame.x_max) {
        let x = frame.x(t);
        let _ = write!(
            out,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/>
<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>
"#,
            b + 5.0,
            b + 18.0,
            fmt(t)
        );
    }
    let y_ticks = if frame.log_y {
        let lo = frame.y_min.log10().floor() as i32;
        let hi = frame.y_max.log10().ceil() as i32;
        (lo..=hi).map(|d| 10f64.powi(d)).collect::<Vec<_>>()
    } else {
        nice_ticks(frame.y_min, frame.y_max)
    };
    for t in y_ticks {
        if frame.log_y && (t < frame.y_min || t > frame.y_max) {
            continue;
        }
        let y = frame.y(t);
        let _ = write!(
            out,
            r#"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black"/>
<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>
"#,
            MARGIN_L - 5.0,
            MARGIN_L,
            MARGIN_L - 8.0,
            y + 3.5,
            fmt(t)
        );
    }
}

fn draw_curve(out: &mut String, frame: &Frame, curve: &Curve) {
    if curve.points.is_empty() {
        return;
    }
    let mut d = String::new();
    for (i, (x, y)) in curve.points.iter().enumerate() {
        let _ = write!(
            d,
            "{}{:.2},{:.2} ",
            if i == 0 { "M" } else { "L" },
            frame.x(*x),
            frame.y(*y)
        );
    }
    let _ = writeln!(
        out,
        r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
        curve.color
    );
}

fn draw_legend(out: &mut String, curves: &[Curve]) {
    for (i, c) in curves.iter().enumerate() {
        let y = MARGIN_T + 14.0 + 16.0 * i as f64;
        let x = WIDTH - MARGIN_R - 170.0;
        let _ = write!(
            out,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="1.5"/>
<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>
"#,
            x + 22.0,
            c.color,
            x + 28.0,
            y + 3.5,
            c.label
        );
    }
}

fn positive_min(values: impl Iterator<Item = f64>) -> f64 {
    values.filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min)
}

/// Box-plot series with optional overlay curves. With `log_y`, nonpositive
/// values are clamped to a floor one decade below the smallest positive
/// datum (display only).
pub fn box_plot_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, BoxStats)],
    curves: &[Curve],
    log_y: bool,
) -> String {
    let mut out = String::new();
    if points.is_empty() {
        return empty_svg(title);
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| *x).collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let data_values = points
        .iter()
        .flat_map(|(_, b)| {
            std::iter::once(b.whisker_lo)
                .chain(std::iter::once(b.whisker_hi))
                .chain(std::iter::once(b.mean))
                .chain(b.outliers.iter().copied())
        })
        .chain(curves.iter().flat_map(|c| c.points.iter().map(|p| p.1)));
    let (y_min, y_max) = if log_y {
        let floor = positive_min(data_values.clone()) / 10.0;
        let top = data_values.fold(f64::NEG_INFINITY, f64::max);
        (floor, top * 1.5)
    } else {
        let lo = data_values.clone().fold(f64::INFINITY, f64::min);
        let hi = data_values.fold(f64::NEG_INFINITY, f64::max);
        let pad = (hi - lo).max(1e-12) * 0.05;
        (lo - pad, hi + pad)
    };
    let frame = Frame {
        x_min: x_min - (x_max - x_min).max(1.0) * 0.03,
        x_max: x_max + (x_max - x_min).max(1.0) * 0.03,
        y_min,
        y_max,
        log_y,
    };
    open_svg(&mut out, title, x_label, y_label, &frame);

    let slot = (WIDTH - MARGIN_L - MARGIN_R) / points.len() as f64;
    let half = (slot * 0.35).clamp(1.5, 14.0);
    for (x, b) in points {
        let cx = frame.x(*x);
        let (ylo, yq1, ymed, yq3, yhi) = (
            frame.y(b.whisker_lo),
            frame.y(b.q1),
            frame.y(b.median),
            frame.y(b.q3),
            frame.y(b.whisker_hi),
        );
        // whisker stem and caps
        let _ = write!(
            out,
            r#"<line x1="{cx:.2}" y1="{ylo:.2}" x2="{cx:.2}" y2="{yhi:.2}" stroke="gray"/>
<line x1="{x0:.2}" y1="{ylo:.2}" x2="{x1:.2}" y2="{ylo:.2}" stroke="gray"/>
<line x1="{x0:.2}" y1="{yhi:.2}" x2="{x1:.2}" y2="{yhi:.2}" stroke="gray"/>
"#,
            x0 = cx - half * 0.6,
            x1 = cx + half * 0.6,
        );
        // box and median
        let _ = write!(
            out,
            r#"<rect x="{:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="steelblue" fill-opacity="0.55" stroke="navy" stroke-width="0.8"/>
<line x1="{:.2}" y1="{ymed:.2}" x2="{:.2}" y2="{ymed:.2}" stroke="red" stroke-width="1.5"/>
"#,
            cx - half,
            half * 2.0,
            (yq1 - yq3).max(0.5),
            cx - half,
            cx + half,
        );
        // mean marker
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" fill="blue"/>"#,
            frame.y(b.mean)
        );
        // outlier crosses
        for v in &b.outliers {
            let y = frame.y(*v);
            let _ = writeln!(
                out,
                r#"<path d="M{x0:.2},{y0:.2} L{x1:.2},{y1:.2} M{x0:.2},{y1:.2} L{x1:.2},{y0:.2}" stroke="crimson" stroke-width="0.8"/>"#,
                x0 = cx - 2.2,
                x1 = cx + 2.2,
                y0 = y - 2.2,
                y1 = y + 2.2,
            );
        }
    }
    for c in curves {
        draw_curve(&mut out, &frame, c);
    }
    draw_legend(&mut out, curves);
    out.push_str("</svg>\n");
    out
}

pub fn histogram_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    bins: &[(f64, f64, u64)],
) -> String {
    if bins.is_empty() {
        return empty_svg(title);
    }
    let x_min = bins.first().unwrap().0;
    let x_max = bins.last().unwrap().1;
    let y_max = bins.iter().map(|b| b.2).max().unwrap() as f64;
    let frame = Frame {
        x_min,
        x_max,
        y_min: 0.0,
        y_max: y_max * 1.05 + 1.0,
        log_y: false,
    };
    let mut out = String::new();
    open_svg(&mut out, title, x_label, y_label, &frame);
    for (lo, hi, count) in bins {
        let x0 = frame.x(*lo);
        let x1 = frame.x(*hi);
        let y = frame.y(*count as f64);
        let base = frame.y(0.0);
        let _ = writeln!(
            out,
            r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="steelblue" stroke="navy" stroke-width="0.5"/>"#,
            (x1 - x0).max(0.5),
            (base - y).max(0.0),
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let all: Vec<(f64, f64)> = curves.iter().flat_map(|c| c.points.iter().copied()).collect();
    if all.is_empty() {
        return empty_svg(title);
    }
    let x_min = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let y_min = all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y_max = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let pad = (y_max - y_min).max(1e-9) * 0.05;
    let frame = Frame {
        x_min,
        x_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
        log_y: false,
    };
    let mut out = String::new();
    open_svg(&mut out, title, x_label, y_label, &frame);
    for c in curves {
        draw_curve(&mut out, &frame, c);
    }
    draw_legend(&mut out, curves);
    out.push_str("</svg>\n");
    out
}

fn empty_svg(title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}"><text x="20" y="30" font-family="sans-serif">{title}: no data</text></svg>
"#
    )
}
