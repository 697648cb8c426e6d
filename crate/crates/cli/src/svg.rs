//! Static log-y line plot, one panel per `s` value.

use std::fmt::Write;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 40.0;
const LEGEND_H: f64 = 20.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
/// Values below this (including exact zeros) are drawn at the floor.
const FLOOR: f64 = 1e-17;

pub struct Curve {
    pub label: String,
    pub points: Vec<(usize, f64)>,
}

pub struct Panel {
    pub title: String,
    pub curves: Vec<Curve>,
}

pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let height = PANEL_H + LEGEND_H * panels.iter().map(|p| p.curves.len()).max().unwrap_or(0) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    for (k, panel) in panels.iter().enumerate() {
        draw_panel(&mut out, panel, k as f64 * PANEL_W);
    }
    out.push_str("</svg>\n");
    out
}

fn draw_panel(out: &mut String, panel: &Panel, x0: f64) {
    let n_max = panel.curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).max().unwrap_or(1).max(2);
    let logs = || panel.curves.iter().flat_map(|c| c.points.iter().map(|p| p.1.max(FLOOR).log10()));
    let lo = logs().fold(f64::INFINITY, f64::min).floor();
    let hi = logs().fold(f64::NEG_INFINITY, f64::max).ceil();
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (-1.0, 0.0) };

    let (pw, ph) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let px = |n: usize| x0 + MARGIN_L + pw * (n as f64 - 1.0) / (n_max as f64 - 1.0);
    let py = |v: f64| MARGIN_T + ph * (hi - v.max(FLOOR).log10()) / (hi - lo);

    let _ = writeln!(out, r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#, x0 + PANEL_W / 2.0, escape(&panel.title));
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#,
        x0 + MARGIN_L
    );

    let step = ((hi - lo) / 8.0).ceil().max(1.0);
    let mut e = hi;
    while e >= lo {
        let y = MARGIN_T + ph * (hi - e) / (hi - lo);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">1e{}</text>"##,
            x0 + MARGIN_L,
            x0 + MARGIN_L + pw,
            x0 + MARGIN_L - 4.0,
            y + 4.0,
            e as i32
        );
        e -= step;
    }
    for n in (0..=n_max).step_by(10).filter(|&n| n >= 1).chain(core::iter::once(1)) {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{n}</text>"#,
            px(n),
            MARGIN_T + ph + 16.0
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#, x0 + MARGIN_L + pw / 2.0, PANEL_H - 6.0);

    for (k, curve) in panel.curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = curve.points.iter().map(|&(n, v)| format!("{:.1},{:.1}", px(n), py(v))).collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = PANEL_H + LEGEND_H * k as f64 + 4.0;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x0 + MARGIN_L,
            x0 + MARGIN_L + 20.0,
            x0 + MARGIN_L + 26.0,
            ly + 4.0,
            escape(&curve.label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
