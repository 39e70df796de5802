//! Minimal hand-written SVG plots.

use std::fmt::Write;

use super::checks::Series;

const W: f64 = 480.0;
const H: f64 = 360.0;
const MARGIN: f64 = 56.0;

/// Log–log plot of a mass series with the fitted slope drawn through the
/// centroid of the points and annotated.  Non-positive values are skipped.
pub fn loglog_svg(series: &Series) -> String {
    let pts: Vec<(f64, f64)> = series
        .radii
        .iter()
        .zip(&series.masses)
        .filter(|(r, m)| **r > 0.0 && **m > 0.0)
        .map(|(r, m)| (r.log2(), m.log2()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let title = escape(&format!("{} — {} (seed {})", series.construction, series.check, series.seed));
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, W / 2.0);
    if pts.is_empty() {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no positive data</text>"#, W / 2.0, H / 2.0);
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    // Axes with end labels.
    let _ = writeln!(
        svg,
        r#"<path d="M{a:.2},{b:.2} L{c:.2},{b:.2} M{a:.2},{b:.2} L{a:.2},{d:.2}" stroke="black" fill="none"/>"#,
        a = MARGIN,
        b = H - MARGIN,
        c = W - MARGIN,
        d = MARGIN
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">log2 r</text>"#, W / 2.0, H - 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">log2 mass</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{x:.2}</text>"#, sx(x), H - MARGIN + 16.0);
    }
    for y in [y0, y1] {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.2}</text>"#, MARGIN - 4.0, sy(y) + 4.0);
    }
    for &(x, y) in &pts {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
    }
    if series.slope.is_finite() {
        let n = pts.len() as f64;
        let (cx, cy) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let line = |x: f64| cy + series.slope * (x - cx);
        let _ = writeln!(
            svg,
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2}" stroke="firebrick" fill="none"/>"#,
            sx(x0),
            sy(line(x0)),
            sx(x1),
            sy(line(x1))
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="firebrick">slope = {:.4}</text>"#,
            MARGIN + 8.0,
            MARGIN + 8.0,
            series.slope
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
