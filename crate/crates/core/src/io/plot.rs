//! Minimal self-contained SVG charts for metrics tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiments::MetricsTable;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("cannot plot an empty table")]
    EmptyTable,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// One polyline per series over a numeric x axis.
    Line,
    /// Grouped bars, one group per swept value.
    Bar,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Upper axis bound and tick step: a 1/2/5 × 10^k step giving about five ticks.
fn nice_axis(max: f64) -> (f64, f64) {
    if max.is_nan() || max <= 0.0 {
        return (1.0, 0.2);
    }
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    ((max / step).ceil() * step, step)
}

fn fmt_tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

pub fn render_svg(table: &MetricsTable, kind: PlotKind) -> Result<String, PlotError> {
    if table.rows.is_empty() {
        return Err(PlotError::EmptyTable);
    }
    let series = table.series();
    let mut xs: Vec<f64> = Vec::new();
    for r in &table.rows {
        if !xs.contains(&r.swept) {
            xs.push(r.swept);
        }
    }
    let y_max = table
        .rows
        .iter()
        .map(|r| r.value(table.metric))
        .fold(0.0, f64::max);
    let (y_top, y_step) = nice_axis(y_max);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y_px = |v: f64| TOP + plot_h * (1.0 - v / y_top);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&table.title)
    );

    // y grid and labels
    let mut tick = 0.0;
    while tick <= y_top + y_step * 1e-9 {
        let y = y_px(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(tick)
        );
        tick += y_step;
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.1}" y1="{TOP:.1}" x2="{LEFT:.1}" y2="{:.1}" stroke="black"/>"#,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&table.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(table.metric.label())
    );

    match kind {
        PlotKind::Line => {
            let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = if x_max > x_min { x_max - x_min } else { 1.0 };
            let pad = 20.0;
            let x_px = |x: f64| {
                if x_max > x_min {
                    LEFT + pad + (plot_w - 2.0 * pad) * (x - x_min) / span
                } else {
                    LEFT + plot_w / 2.0
                }
            };
            for &x in &xs {
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                    x_px(x),
                    TOP + plot_h + 18.0,
                    fmt_tick(x)
                );
            }
            for (si, name) in series.iter().enumerate() {
                let color = PALETTE[si % PALETTE.len()];
                let mut pts: Vec<(f64, f64)> = table
                    .rows
                    .iter()
                    .filter(|r| r.series == *name)
                    .map(|r| (x_px(r.swept), y_px(r.value(table.metric))))
                    .collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    path.join(" ")
                );
                for (x, y) in pts {
                    let _ = writeln!(svg, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.5" fill="{color}"/>"#);
                }
            }
        }
        PlotKind::Bar => {
            let group_w = plot_w / xs.len() as f64;
            let bar_w = group_w * 0.8 / series.len() as f64;
            for (gi, &x) in xs.iter().enumerate() {
                let gx = LEFT + group_w * gi as f64;
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                    gx + group_w / 2.0,
                    TOP + plot_h + 18.0,
                    fmt_tick(x)
                );
                for (si, name) in series.iter().enumerate() {
                    let Some(row) = table.row(name, x) else { continue };
                    let v = row.value(table.metric);
                    let y = y_px(v);
                    let _ = writeln!(
                        svg,
                        r#"<rect x="{:.1}" y="{y:.1}" width="{bar_w:.1}" height="{:.1}" fill="{}"><title>{}: {}</title></rect>"#,
                        gx + group_w * 0.1 + bar_w * si as f64,
                        TOP + plot_h - y,
                        PALETTE[si % PALETTE.len()],
                        escape(&row.label),
                        fmt_tick(v)
                    );
                }
            }
        }
    }

    for (si, name) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * si as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{}"/>"#,
            y - 10.0,
            PALETTE[si % PALETTE.len()]
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, x + 18.0, escape(name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders `table` and writes it to `path`.
pub fn emit_plot(table: &MetricsTable, kind: PlotKind, path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(table, kind)?;
    fs::write(path, svg).map_err(|source| PlotError::Io {
        path: path.to_path_buf(),
        source,
    })
}
