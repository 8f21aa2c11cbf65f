//! Minimal log-log SVG chart of median error against sample size.

use std::fmt::Write;

use heatreg_core::experiment::{fit_rate, level_medians, rate_abscissa, SweepRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub label: String,
    pub rows: Vec<SweepRow>,
}

/// Points are median error² per `n`; each series also gets its fitted line
/// over the rate abscissa.
pub fn render(series: &[Series]) -> String {
    let mut pts: Vec<Vec<(f64, f64)>> = Vec::new();
    for s in series {
        pts.push(
            level_medians(&s.rows)
                .iter()
                .filter(|l| l.median_error_sq > 0.0)
                .map(|l| ((l.n as f64).log10(), l.median_error_sq.log10()))
                .collect(),
        );
    }
    let all: Vec<(f64, f64)> = pts.iter().flatten().copied().collect();
    let (x0, x1) = bounds(all.iter().map(|p| p.0));
    let (y0, y1) = bounds(all.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {top} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        top = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for d in (x0.floor() as i32)..=(x1.ceil() as i32) {
        let x = d as f64;
        if x >= x0 && x <= x1 {
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, sx(x), HEIGHT - MARGIN + 18.0);
        }
    }
    for d in (y0.floor() as i32)..=(y1.ceil() as i32) {
        let y = d as f64;
        if y >= y0 && y <= y1 {
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, MARGIN - 6.0, sy(y) + 4.0);
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n</text><text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">median error²</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (i, (s, p)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        if p.is_empty() {
            continue;
        }
        let path: Vec<String> = p.iter().map(|(x, y)| format!("{:.1},{:.1}", sx(*x), sy(*y))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="2"/>"#, path.join(" "));
        for (x, y) in p {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, sx(*x), sy(*y));
        }
        let m = s.rows.first().map(|r| r.m).unwrap_or(1);
        let mut label = s.label.clone();
        if let Ok(fit) = fit_rate(&s.rows, m) {
            let line: Vec<String> = p
                .iter()
                .map(|(x, _)| {
                    let n = 10f64.powf(*x);
                    let y = (fit.intercept + fit.slope * rate_abscissa(n, m).ln()) / std::f64::consts::LN_10;
                    format!("{:.1},{:.1}", sx(*x), sy(y))
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" stroke="{color}" fill="none" stroke-dasharray="5,4"/>"#,
                line.join(" ")
            );
            label = format!("{label} (slope {:.2})", fit.slope);
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 220.0,
            MARGIN + 16.0 * i as f64,
            escape(&label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
