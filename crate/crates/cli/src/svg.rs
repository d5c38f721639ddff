//! Self-contained SVG line plots of `Gamma(tau)` with regime shading.

use std::fmt::Write as _;

use zenoline_core::zeno::Segment;
use zenoline_core::Regime;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const ZENO_FILL: &str = "#dbe9f6";
const ANTI_ZENO_FILL: &str = "#fbe3d0";

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub tau: Vec<f64>,
    pub gamma: Vec<f64>,
    pub dashed: bool,
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
    /// Background bands; empty for none.
    pub shading: Vec<Segment>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Ticks at 1, 2 or 5 times a power of ten, about `target` of them.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        let pad = 0.05 * hi.abs().max(1e-12);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

pub fn render(plot: &Plot) -> String {
    let (x0, x1) = bounds(plot.series.iter().flat_map(|s| s.tau.iter().copied()));
    let (g0, g1) = bounds(plot.series.iter().flat_map(|s| s.gamma.iter().copied()));
    let pad = 0.05 * (g1 - g0);
    let (y0, y1) = (g0 - pad, g1 + pad);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let w = &mut out;
    // writes into a String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    for seg in &plot.shading {
        let (a, b) = (sx(seg.tau_start.max(x0)), sx(seg.tau_end.min(x1)));
        let fill = match seg.regime {
            Regime::Zeno => ZENO_FILL,
            Regime::AntiZeno => ANTI_ZENO_FILL,
        };
        let _ =
            writeln!(w, r#"<rect x="{a:.2}" y="{TOP}" width="{:.2}" height="{ph}" fill="{fill}"/>"#, (b - a).max(0.0));
    }

    // axes, grid and ticks
    let _ = writeln!(w, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for t in ticks(x0, x1, 8) {
        let x = sx(t);
        let _ =
            writeln!(w, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#333"/>"##, TOP + ph, TOP + ph + 5.0);
        let _ =
            writeln!(w, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 19.0, tick_label(t));
    }
    for t in ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(w, r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#333"/>"##, LEFT - 5.0);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd" stroke-width="0.5"/>"##,
            LEFT + pw
        );
        let _ =
            writeln!(w, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, tick_label(t));
    }
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">τ</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        w,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">Γ(τ)</text>"#,
        TOP + ph / 2.0
    );
    let _ = writeln!(
        w,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&plot.title)
    );

    for (i, s) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = s
            .tau
            .iter()
            .zip(&s.gamma)
            .filter(|(_, g)| g.is_finite())
            .map(|(t, g)| format!("{:.2},{:.2}", sx(*t), sy(*g)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&s.label));
    }
    if !plot.shading.is_empty() {
        let base = TOP + 14.0 + 18.0 * plot.series.len() as f64 + 10.0;
        let lx = LEFT + pw + 12.0;
        for (k, (fill, name)) in [(ZENO_FILL, "Zeno"), (ANTI_ZENO_FILL, "anti-Zeno")].iter().enumerate() {
            let y = base + 18.0 * k as f64;
            let _ =
                writeln!(w, r##"<rect x="{lx}" y="{}" width="24" height="12" fill="{fill}" stroke="#999"/>"##, y - 6.0);
            let _ = writeln!(w, r#"<text x="{}" y="{}">{name}</text>"#, lx + 30.0, y + 4.0);
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot() -> Plot {
        Plot {
            title: "a < b & c".into(),
            series: vec![
                Series { label: "one".into(), tau: vec![0.1, 0.2, 0.3], gamma: vec![1.0, 0.5, 0.7], dashed: false },
                Series { label: "two".into(), tau: vec![0.1, 0.2, 0.3], gamma: vec![0.9, 0.6, 0.8], dashed: true },
            ],
            shading: vec![
                Segment { tau_start: 0.1, tau_end: 0.2, regime: Regime::AntiZeno },
                Segment { tau_start: 0.2, tau_end: 0.3, regime: Regime::Zeno },
            ],
        }
    }

    #[test]
    fn self_contained_and_escaped() {
        let svg = render(&plot());
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("href"));
        assert!(svg.contains("a &lt; b &amp; c"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(ZENO_FILL) && svg.contains(ANTI_ZENO_FILL));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(0.0, 3.0, 8), vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(tick_label(0.30000000000000004), "0.3");
        assert_eq!(tick_label(-0.0), "0");
    }

    #[test]
    fn flat_series_renders() {
        let flat = Plot {
            title: String::new(),
            series: vec![Series { label: "c".into(), tau: vec![1.0, 2.0], gamma: vec![0.5, 0.5], dashed: false }],
            shading: vec![],
        };
        assert!(!render(&flat).contains("NaN"));
    }
}
