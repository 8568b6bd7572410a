//! Self-contained SVG band diagrams.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 96.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Horizontal reference line, e.g. a forecast edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub label: String,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandPlot<'a> {
    pub title: String,
    pub k: &'a [f64],
    /// `bands[l][j]` at `k[j]`.
    pub bands: &'a [Vec<f64>],
    /// Shaded energy intervals.
    pub gaps: Vec<(f64, f64)>,
    pub references: Vec<Reference>,
    /// Vertical extent.
    pub window: (f64, f64),
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick step of the form `{1, 2, 5} * 10^n` giving about six ticks.
fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

/// Render the diagram. A grid on `[0, π]` is mirrored to the whole zone,
/// which the evenness of the bands allows.
pub fn render_band_diagram(plot: &BandPlot) -> Result<String> {
    if plot.k.is_empty() || plot.bands.is_empty() || plot.bands.iter().any(|b| b.len() != plot.k.len()) {
        return Err(CliError::Task("band diagram is empty or ragged".into()));
    }
    let (lo, hi) = plot.window;
    let px = |k: f64| LEFT + (k + PI) / (2.0 * PI) * (WIDTH - LEFT - RIGHT);
    let py = |e: f64| TOP + (hi - e) / (hi - lo) * (HEIGHT - TOP - BOTTOM);
    let mirror = plot.k[0] >= 0.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&plot.title));
    let (x0, x1, y0, y1) = (px(-PI), px(PI), py(hi), py(lo));
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&plot.title));

    let _ = writeln!(s, r#"<g class="gaps" clip-path="url(#plot)">"#);
    for &(a, b) in &plot.gaps {
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#f2c14e" fill-opacity="0.45"/>"##,
            py(b),
            x1 - x0,
            (py(a) - py(b)).max(0.5)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="bands" clip-path="url(#plot)" fill="none" stroke-width="1.6">"#);
    for (l, band) in plot.bands.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * band.len());
        if mirror {
            pts.extend(plot.k.iter().zip(band).rev().filter(|(k, _)| **k > 0.0).map(|(k, e)| (-k, *e)));
        }
        pts.extend(plot.k.iter().copied().zip(band.iter().copied()));
        let path: Vec<String> = pts.iter().map(|&(k, e)| format!("{:.2},{:.2}", px(k), py(e))).collect();
        let _ = writeln!(s, r#"<polyline stroke="{}" points="{}"/>"#, COLORS[l % COLORS.len()], path.join(" "));
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g class="references" stroke="#444" stroke-dasharray="6 4">"##);
    for r in &plot.references {
        if r.energy < lo || r.energy > hi {
            continue;
        }
        let y = py(r.energy);
        let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}"/>"#);
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" stroke="none" fill="#444">{}</text>"##, x1 + 4.0, y + 4.0, escape(&r.label));
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(s, r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/>"#, x1 - x0, y1 - y0);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="ticks" text-anchor="middle">"#);
    for (k, label) in [(-PI, "−π"), (-PI / 2.0, "−π/2"), (0.0, "0"), (PI / 2.0, "π/2"), (PI, "π")] {
        let x = px(k);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}">{label}</text>"#, y1 + 18.0);
    }
    let step = tick_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    while t <= hi + 1e-9 * step {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let v = if t.abs() < 1e-12 * step { 0.0 } else { t };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, fmt_tick(v, step));
        t += step;
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">quasimomentum k</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">energy E</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(v: f64, step: f64) -> String {
    let digits = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.digits$}")
}

pub fn emit_svg_band_diagram(plot: &BandPlot, path: &Path) -> Result<()> {
    let text = render_band_diagram(plot)?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bands() -> (Vec<f64>, Vec<Vec<f64>>) {
        let k: Vec<f64> = (0..9).map(|i| PI * i as f64 / 8.0).collect();
        let b = vec![k.iter().map(|k| k * k / 10.0).collect(), k.iter().map(|k| 2.0 - k * k / 10.0).collect()];
        (k, b)
    }

    #[test]
    fn ticks() {
        assert_eq!(tick_step(2.25), 0.5);
        assert_eq!(tick_step(0.3), 0.05);
        assert_eq!(fmt_tick(0.5, 0.5), "0.5");
        assert_eq!(fmt_tick(2.0, 1.0), "2");
    }

    #[test]
    fn mirrored_polyline_covers_the_zone() {
        let (k, b) = bands();
        let plot = BandPlot { title: "a < b".into(), k: &k, bands: &b, gaps: vec![], references: vec![], window: (0.0, 2.25) };
        let s = render_band_diagram(&plot).unwrap();
        assert!(s.contains("a &lt; b"));
        let line = s.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(line.matches(',').count(), 17);
        assert!(!s.contains("fill-opacity"));
    }

    #[test]
    fn refuses_empty() {
        let plot = BandPlot { title: String::new(), k: &[], bands: &[], gaps: vec![], references: vec![], window: (0.0, 1.0) };
        assert!(render_band_diagram(&plot).is_err());
    }
}
