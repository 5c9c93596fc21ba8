//! Minimal SVG line and bar plots for experiment outputs.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    /// Draw markers instead of a polyline.
    pub markers: bool,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    (x0, x1, y0.min(0.0), y1)
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = header(title, xlabel, ylabel);
    axis_ticks(&mut s, x0, x1, y0, y1);
    for (k, ser) in series.iter().enumerate() {
        if ser.markers {
            for &(x, y) in &ser.points {
                let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="{}"/>"#, sx(x), sy(y), ser.color);
            }
        } else {
            let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#, ser.color, pts.join(" "));
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.0}" y="{:.0}" font-size="12" fill="{}">{}</text>"#,
            W - PAD - 150.0,
            PAD + 15.0 * k as f64,
            ser.color,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn bar_plot(title: &str, xlabel: &str, ylabel: &str, values: &[f64]) -> String {
    let ymax = values.iter().copied().fold(0.0, f64::max).max(1e-12);
    let n = values.len().max(1) as f64;
    let bw = (W - 2.0 * PAD) / n;
    let mut s = header(title, xlabel, ylabel);
    axis_ticks(&mut s, 0.0, n, 0.0, ymax);
    for (i, &v) in values.iter().enumerate() {
        let h = v / ymax * (H - 2.0 * PAD);
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="steelblue"/>"#,
            PAD + i as f64 * bw + 1.0,
            H - PAD - h,
            (bw - 2.0).max(1.0),
            h
        );
    }
    s.push_str("</svg>\n");
    s
}

fn header(title: &str, xlabel: &str, ylabel: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="25" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{0}" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="15" y="{0}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {0})">{1}</text>"#,
        H / 2.0,
        escape(ylabel)
    );
    s
}

fn axis_ticks(s: &mut String, x0: f64, x1: f64, y0: f64, y1: f64) {
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            PAD + f * (W - 2.0 * PAD),
            H - PAD + 15.0,
            fmt_tick(x0 + f * (x1 - x0))
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            PAD - 5.0,
            H - PAD - f * (H - 2.0 * PAD) + 4.0,
            fmt_tick(y0 + f * (y1 - y0))
        );
    }
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
