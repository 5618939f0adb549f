//! Minimal line-chart SVG writer. Output is a pure function of its inputs.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    /// Half-height of the error bar.
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e4 || v.abs() < 1e-3 {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if (hi - lo).abs() < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Drawable point: centre and whisker ends in axis coordinates.
struct Mark {
    x: f64,
    y: f64,
    lo: f64,
    hi: f64,
}

impl Chart {
    /// Points with a non-positive value are dropped on a log axis; whiskers are clipped at `y/1000`.
    fn marks(&self) -> Vec<(String, Vec<Mark>)> {
        self.series
            .iter()
            .map(|s| {
                let marks = s
                    .points
                    .iter()
                    .filter(|p| p.x.is_finite() && p.y.is_finite() && p.err.is_finite() && (!self.log_y || p.y > 0.0))
                    .map(|p| {
                        if self.log_y {
                            let lo = (p.y - p.err).max(p.y * 1e-3);
                            Mark { x: p.x, y: p.y.log10(), lo: lo.log10(), hi: (p.y + p.err).log10() }
                        } else {
                            Mark { x: p.x, y: p.y, lo: p.y - p.err, hi: p.y + p.err }
                        }
                    })
                    .collect();
                (s.label.clone(), marks)
            })
            .collect()
    }

    /// `None` when no series has a drawable point.
    pub fn render(&self) -> Option<String> {
        let series = self.marks();
        let all: Vec<&Mark> = series.iter().flat_map(|(_, m)| m).collect();
        if all.is_empty() {
            return None;
        }
        let (x0, x1) = padded(
            all.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
            all.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
        );
        let (y0, y1) = padded(
            all.iter().map(|p| p.lo).fold(f64::INFINITY, f64::min),
            all.iter().map(|p| p.hi).fold(f64::NEG_INFINITY, f64::max),
        );
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ =
            writeln!(o, r##"<rect x="{LEFT}" y="{TOP}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333"/>"##);
        for k in 0..=TICKS {
            let f = k as f64 / TICKS as f64;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let ylab = if self.log_y { format!("1e{}", tick_label(yv)) } else { tick_label(yv) };
            let _ = writeln!(
                o,
                r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 19.0,
                tick_label(xv)
            );
            let _ = writeln!(
                o,
                r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                escape(&ylab)
            );
        }
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let y_label = if self.log_y { format!("{} (log10)", self.y_label) } else { self.y_label.clone() };
        let _ = writeln!(
            o,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&y_label)
        );

        for (i, (label, marks)) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = marks.iter().map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.y))).collect();
            if !pts.is_empty() {
                let _ = writeln!(
                    o,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            for p in marks {
                let (cx, cy) = (sx(p.x), sy(p.y));
                if p.hi > p.lo {
                    let (top, bot) = (sy(p.hi), sy(p.lo));
                    let _ = writeln!(
                        o,
                        r#"<path d="M{cx:.2} {top:.2}V{bot:.2}M{:.2} {top:.2}H{:.2}M{:.2} {bot:.2}H{:.2}" stroke="{color}"/>"#,
                        cx - 3.0,
                        cx + 3.0,
                        cx - 3.0,
                        cx + 3.0
                    );
                }
                let _ = writeln!(o, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="2.6" fill="{color}"/>"#);
            }
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = WIDTH - RIGHT + 14.0;
            let _ = writeln!(
                o,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 18.0,
                lx + 24.0,
                ly + 4.0,
                escape(label)
            );
        }
        o.push_str("</svg>\n");
        Some(o)
    }
}
