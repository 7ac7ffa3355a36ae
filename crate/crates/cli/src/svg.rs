//! Minimal SVG line plot: analytic curves as lines, Monte-Carlo points as
//! markers with 99% error bars.

use std::fmt::Write;

use crate::figures::Figure;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 7] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
/// Floor for log-scale values so zero probabilities stay on the canvas.
const LOG_FLOOR: f64 = 1e-6;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
    log_y: bool,
}

impl Axes {
    fn ty(&self, v: f64) -> f64 {
        if self.log_y {
            v.max(LOG_FLOOR).log10()
        } else {
            v
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let t = self.ty(y);
        HEIGHT - BOTTOM - (t - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn axes(figure: &Figure) -> Axes {
    let rows = figure.curves.iter().flat_map(|c| &c.rows);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let probe = Axes { x: (0.0, 1.0), y: (0.0, 1.0), log_y: figure.log_y };
    for r in rows {
        x0 = x0.min(r.x);
        x1 = x1.max(r.x);
        for v in [Some(r.analytic_y), r.mc_y, r.mc_ci_low, r.mc_ci_high].into_iter().flatten() {
            let t = probe.ty(v);
            y0 = y0.min(t);
            y1 = y1.max(t);
        }
    }
    if !x0.is_finite() {
        return Axes { x: (0.0, 1.0), y: (0.0, 1.0), log_y: figure.log_y };
    }
    let y = if figure.log_y {
        span(y0.floor(), y1.ceil())
    } else {
        let pad = 0.05 * (y1 - y0).max(1e-9);
        span(y0 - pad, y1 + pad)
    };
    Axes { x: span(x0, x1), y, log_y: figure.log_y }
}

/// Renders `figure` as a standalone SVG document.
pub fn render(figure: &Figure) -> String {
    let ax = axes(figure);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, escape(&figure.title));

    let (x_lo, x_hi) = (LEFT, WIDTH - RIGHT);
    let (y_lo, y_hi) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(s, r#"<rect x="{x_lo}" y="{y_hi}" width="{}" height="{}" fill="none" stroke="black"/>"#, x_hi - x_lo, y_lo - y_hi);

    for i in 0..=5 {
        let x = ax.x.0 + (ax.x.1 - ax.x.0) * i as f64 / 5.0;
        let px = ax.px(x);
        let _ = writeln!(s, r#"<line x1="{px:.1}" y1="{y_lo}" x2="{px:.1}" y2="{}" stroke="black"/>"#, y_lo + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#, y_lo + 18.0, trim(x));
    }
    let y_ticks: Vec<f64> = if ax.log_y {
        (ax.y.0 as i32..=ax.y.1 as i32).map(|e| 10f64.powi(e)).collect()
    } else {
        (0..=5).map(|i| ax.y.0 + (ax.y.1 - ax.y.0) * i as f64 / 5.0).collect()
    };
    for y in y_ticks {
        let py = ax.py(y);
        let label = if ax.log_y { format!("{y:.0e}") } else { trim(y) };
        let _ = writeln!(s, r#"<line x1="{}" y1="{py:.1}" x2="{x_lo}" y2="{py:.1}" stroke="black"/>"#, x_lo - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{label}</text>"#, x_lo - 8.0, py + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x_lo + x_hi) / 2.0, HEIGHT - 15.0, escape(&figure.x_label));
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (y_lo + y_hi) / 2.0,
        escape(&figure.y_label)
    );

    for (i, curve) in figure.curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = curve.rows.iter().map(|r| format!("{:.1},{:.1}", ax.px(r.x), ax.py(r.analytic_y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        for r in &curve.rows {
            let Some(mc) = r.mc_y else { continue };
            let px = ax.px(r.x);
            if let (Some(lo), Some(hi)) = (r.mc_ci_low, r.mc_ci_high) {
                let _ = writeln!(s, r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="{color}"/>"#, ax.py(lo), ax.py(hi));
            }
            let _ = writeln!(s, r#"<circle cx="{px:.1}" cy="{:.1}" r="3" fill="none" stroke="{color}"/>"#, ax.py(mc));
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"/>"#, lx + 25.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 32.0, ly + 4.0, escape(&curve.label));
    }
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    let t = format!("{v:.3}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures::{Curve, FigureId, Row};

    #[test]
    fn renders_markers_and_legend() {
        let fig = Figure {
            id: FigureId::Fig3,
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_y: true,
            curves: vec![Curve {
                name: "c".into(),
                label: "M = 40".into(),
                rows: vec![
                    Row { x: 0.0, analytic_y: 1e-3, mc_y: Some(0.0), mc_ci_low: Some(0.0), mc_ci_high: Some(2e-3) },
                    Row { x: 1.0, analytic_y: 0.5, mc_y: None, mc_ci_low: None, mc_ci_high: None },
                ],
            }],
        };
        let svg = render(&fig);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("M = 40"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
