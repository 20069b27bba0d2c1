//! Self-contained SVG decay plots.
//!
//! Hand-rolled vector output: a framed plot area, decade gridlines on the
//! logarithmic axes, one polyline per series, and a legend. Everything is
//! derived from the data alone — no timestamps, no environment lookups —
//! so rendering the same series twice produces identical bytes.

use std::path::Path;

use pgreedy::{Error, Result};

/// One curve on a plot.
#[derive(Debug, Clone)]
pub struct Series {
    /// Legend label.
    pub label: String,
    /// Stroke color (CSS).
    pub color: &'static str,
    /// Dotted stroke (used for reference curves) instead of solid.
    pub dashed: bool,
    /// Raw `(x, y)` points; `y` must be positive to appear on the
    /// logarithmic axis (offending points are dropped).
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 76.0;
const RIGHT: f64 = 616.0;
const TOP: f64 = 46.0;
const BOTTOM: f64 = 426.0;

/// Renders a decay plot with a logarithmic y axis (and optionally a
/// logarithmic x axis) to an SVG string.
pub fn render_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    log_x: bool,
    series: &[Series],
) -> Result<String> {
    // Transform to plotting coordinates, dropping points a log axis
    // cannot show.
    let mut transformed: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| {
                y.is_finite() && *y > 0.0 && x.is_finite() && (!log_x || *x > 0.0)
            })
            .map(|&(x, y)| (if log_x { x.log10() } else { x }, y.log10()))
            .collect();
        if !pts.is_empty() {
            transformed.push((i, pts));
        }
    }
    if transformed.is_empty() {
        return Err(Error::InvalidParameter(
            "no positive data to plot".into(),
        ));
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, pts) in &transformed {
        for &(x, y) in pts {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let x_pad = 0.03 * (x_max - x_min);
    let y_pad = 0.05 * (y_max - y_min);
    let (x_min, x_max) = (x_min - x_pad, x_max + x_pad);
    let (y_min, y_max) = (y_min - y_pad, y_max + y_pad);

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            LEFT + (x - x_min) / (x_max - x_min) * (RIGHT - LEFT),
            BOTTOM - (y - y_min) / (y_max - y_min) * (BOTTOM - TOP),
        )
    };

    let mut svg = String::with_capacity(16 * 1024);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        (LEFT + RIGHT) / 2.0,
        escape(title)
    ));

    // Gridlines and tick labels.
    for k in decade_ticks(y_min, y_max) {
        let (_, py) = to_px(x_min, k as f64);
        svg.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{py:.2}\" x2=\"{RIGHT}\" y2=\"{py:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">1e{k}</text>\n",
            LEFT - 6.0,
            py + 4.0
        ));
    }
    if log_x {
        for k in decade_ticks(x_min, x_max) {
            let (px, _) = to_px(k as f64, y_min);
            svg.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{TOP}\" x2=\"{px:.2}\" y2=\"{BOTTOM}\" \
                 stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">1e{k}</text>\n",
                BOTTOM + 16.0
            ));
        }
    } else {
        let step = nice_step((x_max - x_min) / 5.0);
        let decimals = if step >= 1.0 {
            0
        } else {
            (-step.log10().floor()) as usize
        };
        let mut tick = (x_min / step).ceil() * step;
        while tick <= x_max + 1e-9 * step {
            let (px, _) = to_px(tick, y_min);
            svg.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{TOP}\" x2=\"{px:.2}\" y2=\"{BOTTOM}\" \
                 stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{:.*}</text>\n",
                BOTTOM + 16.0,
                decimals,
                tick
            ));
            tick += step;
        }
    }

    // Frame.
    svg.push_str(&format!(
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        RIGHT - LEFT,
        BOTTOM - TOP
    ));

    // Axis labels.
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 38.0,
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 20 {:.2})\">{}</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        escape(y_label)
    ));

    // Series.
    for (i, pts) in &transformed {
        let s = &series[*i];
        let dash = if s.dashed {
            " stroke-dasharray=\"5,4\""
        } else {
            ""
        };
        if pts.len() == 1 {
            let (px, py) = to_px(pts[0].0, pts[0].1);
            svg.push_str(&format!(
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{}\"/>\n",
                s.color
            ));
        } else {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = to_px(x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>\n",
                coords.join(" "),
                s.color
            ));
        }
    }

    // Legend (top right, inside the frame).
    let legend_x = RIGHT - 190.0;
    let mut legend_y = TOP + 16.0;
    svg.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"184\" height=\"{:.2}\" fill=\"white\" \
         stroke=\"#999999\" stroke-width=\"0.5\"/>\n",
        legend_x - 6.0,
        TOP + 4.0,
        18.0 * transformed.len() as f64 + 8.0
    ));
    for (i, _) in &transformed {
        let s = &series[*i];
        let dash = if s.dashed {
            " stroke-dasharray=\"5,4\""
        } else {
            ""
        };
        svg.push_str(&format!(
            "<line x1=\"{legend_x:.2}\" y1=\"{legend_y:.2}\" x2=\"{:.2}\" y2=\"{legend_y:.2}\" \
             stroke=\"{}\" stroke-width=\"1.6\"{dash}/>\n",
            legend_x + 26.0,
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
            legend_x + 32.0,
            legend_y + 4.0,
            escape(&s.label)
        ));
        legend_y += 18.0;
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders and writes a plot file.
pub fn write_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    log_x: bool,
    series: &[Series],
) -> Result<()> {
    let svg = render_plot(title, x_label, y_label, log_x, series)?;
    std::fs::write(path, svg).map_err(|e| Error::Output(format!("{}: {e}", path.display())))
}

/// Integer decades covering `[min, max]` in transformed (log10)
/// coordinates, thinned to at most ~9 labels.
fn decade_ticks(min: f64, max: f64) -> Vec<i64> {
    let lo = min.ceil() as i64;
    let hi = max.floor() as i64;
    if hi < lo {
        return vec![lo.min(hi)];
    }
    let span = (hi - lo) as usize + 1;
    let step = span.div_ceil(9).max(1) as i64;
    (lo..=hi).step_by(step as usize).collect()
}

/// Rounds a raw step to the nearest "nice" value (1, 2, or 5 times a power
/// of ten, at least the raw value).
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0, 10.0] {
        if mult * mag >= raw {
            return mult * mag;
        }
    }
    10.0 * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
