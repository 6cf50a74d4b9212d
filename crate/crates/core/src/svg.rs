//! Static SVG scatter of a flow diagram: log μ on x, t on y, markers colored
//! by commonality score.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cmr::CommonalityReport;
use crate::error::{Error, Result};
use crate::evfd::FlowDiagram;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 48.0;
const NEUTRAL: &str = "#555555";

/// Blue for w = 0 (common) through red for w = 1.
fn score_color(w: f64) -> String {
    let w = w.clamp(0.0, 1.0);
    let r = (40.0 + 200.0 * w).round() as u8;
    let g = 60u8;
    let b = (220.0 - 180.0 * w).round() as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Renders the diagram without its trivial column. With a report, markers
/// follow the per-point scores and t* is drawn as a dashed line.
pub fn render_diagram_svg(diagram: &FlowDiagram, report: Option<&CommonalityReport>) -> Result<String> {
    if diagram.is_empty() || diagram.components() == 0 {
        return Err(Error::InvalidParameter("diagram has nothing to plot".into()));
    }
    if let Some(r) = report {
        if r.point_w.len() != diagram.len() {
            return Err(Error::DimensionMismatch(r.point_w.len(), diagram.len()));
        }
    }
    let skip = diagram.trivial_index();
    let logs: Vec<Vec<f64>> = diagram
        .values()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != skip)
                .map(|(_, v)| v.ln())
                .collect()
        })
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in logs.iter().flatten() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + (v - lo) / (hi - lo) * plot_w;
    let py = |t: f64| TOP + (1.0 - t) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let v = lo + f * (hi - lo);
        let x = px(v);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#,
            TOP + plot_h + 16.0
        );
        let y = py(f);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{f:.2}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">log eigenvalue</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">t</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let _ = writeln!(s, "<g stroke=\"none\">");
    for (i, (row, &t)) in logs.iter().zip(diagram.grid()).enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let fill = match report {
                Some(r) => score_color(r.point_w[i][c]),
                None => NEUTRAL.to_string(),
            };
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{fill}"/>"#, px(v), py(t));
        }
    }
    let _ = writeln!(s, "</g>");

    let lx = WIDTH - RIGHT + 12.0;
    if let Some(r) = report {
        let y = py(r.t_star);
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
            LEFT + plot_w
        );
        let _ = writeln!(s, r#"<text x="{lx:.2}" y="{:.2}">t* = {:.3}</text>"#, y + 4.0, r.t_star);
        let _ = writeln!(s, r#"<text x="{lx:.2}" y="{:.2}">score ({})</text>"#, TOP + 12.0, r.estimator.name());
        for (j, w) in [0.0, 0.5, 1.0].into_iter().enumerate() {
            let y = TOP + 30.0 + 16.0 * j as f64;
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"/><text x="{:.2}" y="{:.2}">w = {w:.1}</text>"#,
                lx + 4.0,
                y - 4.0,
                score_color(w),
                lx + 14.0,
                y
            );
        }
        if r.common_set.is_empty() {
            let _ = writeln!(
                s,
                r#"<text x="{lx:.2}" y="{:.2}">no common components</text>"#,
                TOP + 90.0
            );
        } else {
            let _ = writeln!(
                s,
                r#"<text x="{lx:.2}" y="{:.2}">{} common at t*</text>"#,
                TOP + 90.0,
                r.common_set.len()
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_diagram_svg(diagram: &FlowDiagram, report: Option<&CommonalityReport>, path: &Path) -> Result<()> {
    fs::write(path, render_diagram_svg(diagram, report)?)?;
    Ok(())
}
