//! Static SVG overlay plots: one polyline per controller, vertical dashed
//! markers at load-step instants. Series are decimated to keep files small.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::CliError;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const MAX_POINTS: usize = 2000;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub time: &'a [f64],
    pub values: &'a [f64],
}

pub fn write_overlay(
    path: &Path,
    title: &str,
    y_label: &str,
    series: &[Series<'_>],
    event_times: &[f64],
) -> Result<(), CliError> {
    fs::write(path, render_overlay(title, y_label, series, event_times))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn render_overlay(title: &str, y_label: &str, series: &[Series<'_>], events: &[f64]) -> String {
    let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &t in s.time {
            t_min = t_min.min(t);
            t_max = t_max.max(t);
        }
        for &y in s.values {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !t_min.is_finite() || t_max <= t_min {
        t_min = 0.0;
        t_max = 1.0;
    }
    if !y_min.is_finite() || y_max <= y_min {
        y_min = 0.0;
        y_max = 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_of = |t: f64| MARGIN_L + (t - t_min) / (t_max - t_min) * plot_w;
    let y_of = |y: f64| MARGIN_T + (y_max - y) / (y_max - y_min) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        MARGIN_L + plot_w / 2.0
    );
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN_L:.1}" y="{MARGIN_T:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333" stroke-width="1"/>"##
    );

    // Axis ticks: five per axis is plenty for a survey plot.
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let t = t_min + frac * (t_max - t_min);
        let x = x_of(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ccc" stroke-width="0.5"/>"##,
            MARGIN_T,
            MARGIN_T + plot_h
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{t:.2}</text>"#,
            MARGIN_T + plot_h + 18.0
        );
        let y = y_min + frac * (y_max - y_min);
        let ypx = y_of(y);
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN_L:.1}" y1="{ypx:.1}" x2="{:.1}" y2="{ypx:.1}" stroke="#ccc" stroke-width="0.5"/>"##,
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{y:.1}</text>"#,
            MARGIN_L - 6.0,
            ypx + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">t (s)</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 18 {:.1})">{y_label}</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );

    for &t in events {
        if t >= t_min && t <= t_max {
            let x = x_of(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.1}" y1="{MARGIN_T:.1}" x2="{x:.1}" y2="{:.1}" stroke="#888" stroke-width="1" stroke-dasharray="6 4"/>"##,
                MARGIN_T + plot_h
            );
        }
    }

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let n = s.time.len().min(s.values.len());
        let stride = (n / MAX_POINTS).max(1);
        let mut points = String::new();
        for k in (0..n).step_by(stride) {
            let _ = write!(points, "{:.2},{:.2} ", x_of(s.time[k]), y_of(s.values[k]));
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.3"/>"#,
            points.trim_end()
        );
        let ly = MARGIN_T + 16.0 + 18.0 * idx as f64;
        let lx = MARGIN_L + plot_w + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 22.0,
            ly - 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            s.label
        );
    }

    out.push_str("</svg>\n");
    out
}
