//! Minimal SVG scatter plot with confidence whiskers.

use std::fmt::Write as _;

pub struct Point {
    pub x: f64,
    pub y: f64,
    /// Half-width of the whisker.
    pub half_width: f64,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.08 * span, hi + 0.08 * span)
    } else {
        let pad = lo.abs().max(1.0) * 0.5;
        (lo - pad, hi + pad)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Points with whiskers, axes with ticks, and a dashed line at `y = 0`.
pub fn whisker_plot(title: &str, x_label: &str, y_label: &str, points: &[Point]) -> String {
    let (x_lo, x_hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    let (y_lo, y_hi) = points.iter().fold((0.0_f64, 0.0_f64), |(lo, hi), p| {
        (lo.min(p.y - p.half_width), hi.max(p.y + p.half_width))
    });
    let (x_lo, x_hi) = if points.is_empty() { (0.0, 1.0) } else { padded_range(x_lo, x_hi) };
    let (y_lo, y_hi) = padded_range(y_lo, y_hi);
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (xv, yv) = (x_lo + f * (x_hi - x_lo), y_lo + f * (y_hi - y_lo));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 19.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    );

    let zero = sy(0.0);
    let _ = writeln!(
        s,
        r##"<line class="zero" x1="{left}" y1="{zero:.2}" x2="{right}" y2="{zero:.2}" stroke="#888" stroke-dasharray="6 4"/>"##
    );
    for p in points {
        let (px, py) = (sx(p.x), sy(p.y));
        let (lo, hi) = (sy(p.y - p.half_width), sy(p.y + p.half_width));
        let _ = writeln!(
            s,
            r##"<path class="whisker" d="M{px:.2} {lo:.2} V{hi:.2} M{:.2} {lo:.2} H{:.2} M{:.2} {hi:.2} H{:.2}" stroke="#1f5fa8" fill="none"/>"##,
            px - 5.0,
            px + 5.0,
            px - 5.0,
            px + 5.0
        );
        let _ = writeln!(
            s,
            r##"<circle class="point" cx="{px:.2}" cy="{py:.2}" r="4" fill="#1f5fa8"/>"##
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
