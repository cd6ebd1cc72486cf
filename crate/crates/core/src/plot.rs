//! Headless SVG line plots of sweep tables: one panel per measure, one
//! polyline per series value, labeled axes and a legend. Output is a pure
//! function of the input rows, so identical sweeps give byte-identical
//! documents.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::sweep::{Measure, SweepRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// How to render one panel.
#[derive(Debug, Clone)]
pub struct PanelSpec {
    /// Column plotted on the y axis.
    pub measure: Measure,
    /// Render the x axis on a log10 scale (for log-spaced sweeps).
    pub x_log: bool,
    /// Label under the x axis, e.g. `temperature_K`.
    pub axis_label: String,
    /// Prefix for legend entries, e.g. `r`.
    pub series_label: String,
}

/// Deterministic short formatting for tick and legend labels.
fn fmt_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.3e}")
    }
}

fn fmt_coord(v: f64) -> String {
    format!("{v:.3}")
}

struct Series {
    value: f64,
    points: Vec<(f64, f64)>,
}

/// Renders one SVG panel from the sweep table.
///
/// Errors when the table is empty, when a series has fewer than two points
/// (no polyline to draw), or when a log x axis meets a non-positive value.
pub fn emit_plot(rows: &[SweepRow], spec: &PanelSpec) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyPlot("no rows selected".into()));
    }

    // group into series, preserving first-appearance order
    let mut series: Vec<Series> = Vec::new();
    for row in rows {
        let x = if spec.x_log {
            if row.axis_value <= 0.0 {
                return Err(Error::EmptyPlot(format!(
                    "log x axis cannot place axis value {}",
                    row.axis_value
                )));
            }
            row.axis_value.log10()
        } else {
            row.axis_value
        };
        let y = row.measure(spec.measure);
        match series.iter_mut().find(|s| s.value == row.series_value) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series { value: row.series_value, points: vec![(x, y)] }),
        }
    }
    for s in &series {
        if s.points.len() < 2 {
            return Err(Error::EmptyPlot(format!(
                "series {} has {} point(s); a polyline needs at least two",
                fmt_label(s.value),
                s.points.len()
            )));
        }
    }

    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if y_max == y_min {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px = |x: f64, y: f64| {
        (
            MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w,
            MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // frame
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(MARGIN_TOP),
        fmt_coord(plot_w),
        fmt_coord(plot_h)
    );

    // ticks and grid
    let n_ticks = 5;
    for k in 0..n_ticks {
        let f = k as f64 / (n_ticks - 1) as f64;
        let xv = x_min + f * (x_max - x_min);
        let (px, _) = to_px(xv, y_min);
        let label = if spec.x_log { fmt_label(10f64.powf(xv)) } else { fmt_label(xv) };
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y1}" x2="{x}" y2="{y2}" stroke="black" stroke-width="1"/>"#,
            x = fmt_coord(px),
            y1 = fmt_coord(MARGIN_TOP + plot_h),
            y2 = fmt_coord(MARGIN_TOP + plot_h + 6.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            x = fmt_coord(px),
            y = fmt_coord(MARGIN_TOP + plot_h + 20.0)
        );

        let yv = y_min + f * (y_max - y_min);
        let (_, py) = to_px(x_min, yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="black" stroke-width="1"/>"#,
            x1 = fmt_coord(MARGIN_LEFT - 6.0),
            x2 = fmt_coord(MARGIN_LEFT),
            y = fmt_coord(py)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            x = fmt_coord(MARGIN_LEFT - 10.0),
            y = fmt_coord(py + 4.0),
            label = fmt_label(yv)
        );
    }

    // axis labels
    let x_label = if spec.x_log {
        format!("{} (log scale)", spec.axis_label)
    } else {
        spec.axis_label.clone()
    };
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        x = fmt_coord(MARGIN_LEFT + 0.5 * plot_w),
        y = fmt_coord(HEIGHT - 14.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 {x} {y})">{label}</text>"#,
        x = fmt_coord(20.0),
        y = fmt_coord(MARGIN_TOP + 0.5 * plot_h),
        label = spec.measure.name()
    );

    // one polyline per series, plus its legend entry
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for &(x, y) in &s.points {
            let (px, py) = to_px(x, y);
            let _ = write!(points, "{},{} ", fmt_coord(px), fmt_coord(py));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.trim_end()
        );

        let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="1.5"/>"#,
            x1 = fmt_coord(lx),
            x2 = fmt_coord(lx + 22.0),
            y = fmt_coord(ly - 4.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="12">{label} = {value}</text>"#,
            x = fmt_coord(lx + 28.0),
            y = fmt_coord(ly),
            label = spec.series_label,
            value = fmt_label(s.value)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
