//! Minimal SVG output: quiver plots of current slices and line plots of
//! sweep columns. Run metadata is embedded in a `<metadata>` element.

use std::fmt::Write;

use crate::experiments::FieldSlice;

const PANEL: f64 = 320.0;
const MARGIN: f64 = 30.0;
const LEGEND: f64 = 40.0;

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn header(out: &mut String, width: f64, height: f64, metadata: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<metadata>{}</metadata>", escape(metadata));
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

/// Side-by-side quiver panels. Arrows in each panel are scaled by that
/// panel's peak |J|, so the longest arrow spans 90% of a grid cell; the
/// legend under each panel gives n and the peak value. A dashed circle marks
/// the Compton radius.
pub fn quiver(panels: &[FieldSlice], metadata: &str) -> String {
    let width = MARGIN + panels.len() as f64 * (PANEL + MARGIN);
    let height = 2.0 * MARGIN + PANEL + LEGEND;
    let mut out = String::new();
    header(&mut out, width, height, metadata);
    for (k, slice) in panels.iter().enumerate() {
        let left = MARGIN + k as f64 * (PANEL + MARGIN);
        let top = MARGIN;
        let scale = PANEL / (2.0 * slice.half_extent);
        let cx = left + PANEL / 2.0;
        let cy = top + PANEL / 2.0;
        let _ = writeln!(out, r#"<g class="panel" data-n="{}">"#, slice.n);
        let _ = writeln!(
            out,
            r##"<rect x="{left}" y="{top}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            out,
            r##"<circle class="compton" cx="{cx}" cy="{cy}" r="{:.3}" fill="none" stroke="#c00" stroke-dasharray="6 4"/>"##,
            slice.compton_radius * scale
        );
        let cell = PANEL / slice.resolution as f64;
        for p in &slice.points {
            if slice.peak_current <= 0.0 {
                break;
            }
            let len = 0.9 * cell * p.j_abs / slice.peak_current;
            if len < 0.05 * cell {
                continue;
            }
            let x0 = cx + p.x * scale;
            let y0 = cy - p.y * scale;
            let (ux, uy) = (p.j_x / p.j_abs, -p.j_y / p.j_abs);
            let (x1, y1) = (x0 - 0.5 * len * ux, y0 - 0.5 * len * uy);
            let (x2, y2) = (x0 + 0.5 * len * ux, y0 + 0.5 * len * uy);
            let head = 0.3 * len;
            let (hx, hy) = (-uy, ux);
            let _ = writeln!(
                out,
                r##"<path d="M{x1:.2} {y1:.2}L{x2:.2} {y2:.2}M{:.2} {:.2}L{x2:.2} {y2:.2}L{:.2} {:.2}" stroke="#036" fill="none"/>"##,
                x2 - head * (ux - 0.5 * hx),
                y2 - head * (uy - 0.5 * hy),
                x2 - head * (ux + 0.5 * hx),
                y2 - head * (uy + 0.5 * hy),
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{left}" y="{:.1}">n = {} mc, peak |J| = {:.4e} ec/λ³</text>"#,
            top + PANEL + 20.0,
            slice.n,
            slice.peak_current
        );
        let _ = writeln!(
            out,
            r#"<text x="{left}" y="{:.1}">half extent {} λ, dashed: Compton radius</text>"#,
            top + PANEL + 36.0,
            slice.half_extent
        );
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

/// A named series of (x, y) points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const COLORS: [&str; 6] = ["#036", "#c60", "#080", "#808", "#c00", "#666"];

/// Line plot with markers; the x axis is logarithmic when `log_x`.
pub fn line_plot(series: &[Series], log_x: bool, x_label: &str, metadata: &str) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 60.0);
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let mut out = String::new();
    header(&mut out, w, h, metadata);
    if all.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (mut x0, mut x1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(tx(p.0)), b.max(tx(p.0))));
    let (mut y0, mut y1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    y0 = y0.min(0.0);
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    y1 += pad;
    let px = |x: f64| left + (tx(x) - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let _ = writeln!(
        out,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        w - left - right,
        h - top - bottom
    );
    for k in 0..=4 {
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#, left - 6.0, py(y) + 4.0, y);
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let label = if log_x { 10f64.powf(xv) } else { xv };
        let xpix = left + (xv - x0) / (x1 - x0) * (w - left - right);
        let _ = writeln!(out, r#"<text x="{xpix:.1}" y="{:.1}" text-anchor="middle">{label:.3}</text>"#, h - bottom + 16.0);
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + (w - left - right) / 2.0, h - 12.0, escape(x_label));
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, pts.join(" "));
        for p in &pts {
            let (a, b) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(out, r#"<circle cx="{a}" cy="{b}" r="2.5" fill="{color}"/>"#);
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            w - right - 150.0,
            top + 16.0 + 16.0 * k as f64,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
