//! Minimal SVG line plots: value functions with their bounds, feedback
//! rates, and optionally an inventory path with the stopping guides.

use std::fs;
use std::io;
use std::path::Path;

use prodplan::{PolicyResult, Trajectory};

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 300.0;
const MARGIN: f64 = 48.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    dashed: bool,
    xs: &'a [f64],
    ys: &'a [f64],
}

fn data_range(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &x in s.xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        for &y in s.ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    (x_min, x_max, y_min, y_max)
}

fn panel(svg: &mut String, series: &[Series], title: &str, y_offset: f64, extra_hlines: &[f64]) {
    let (x_min, x_max, mut y_min, mut y_max) = data_range(series);
    for &h in extra_hlines {
        y_min = y_min.min(h);
        y_max = y_max.max(h);
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    let sx = (WIDTH - 2.0 * MARGIN) / (x_max - x_min);
    let sy = (PANEL_HEIGHT - 2.0 * MARGIN) / (y_max - y_min);
    let px = |x: f64| MARGIN + (x - x_min) * sx;
    let py = |y: f64| y_offset + PANEL_HEIGHT - MARGIN - (y - y_min) * sy;

    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        y_offset + 20.0,
        title
    ));
    // frame
    svg.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#888\"/>\n",
        MARGIN,
        y_offset + MARGIN,
        WIDTH - 2.0 * MARGIN,
        PANEL_HEIGHT - 2.0 * MARGIN
    ));
    // zero line if visible
    if y_min < 0.0 && y_max > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{:.2}\" x2=\"{:.1}\" y2=\"{:.2}\" stroke=\"#ccc\"/>\n",
            px(x_min),
            py(0.0),
            px(x_max),
            py(0.0)
        ));
    }
    for &h in extra_hlines {
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{:.2}\" x2=\"{:.1}\" y2=\"{:.2}\" stroke=\"#d33\" stroke-dasharray=\"6 3\"/>\n",
            px(x_min),
            py(h),
            px(x_max),
            py(h)
        ));
    }
    for (idx, s) in series.iter().enumerate() {
        let mut points = String::new();
        for (x, y) in s.xs.iter().zip(s.ys) {
            points.push_str(&format!("{:.2},{:.2} ", px(*x), py(*y)));
        }
        let dash = if s.dashed {
            " stroke-dasharray=\"5 4\""
        } else {
            ""
        };
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\"{} points=\"{}\"/>\n",
            s.color,
            dash,
            points.trim_end()
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            MARGIN + 8.0 + 90.0 * (idx as f64),
            y_offset + MARGIN - 6.0,
            s.color,
            s.label
        ));
    }
    // axis extremes
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{:.3}</text>\n",
        MARGIN,
        y_offset + PANEL_HEIGHT - MARGIN + 16.0,
        x_min
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
        WIDTH - MARGIN,
        y_offset + PANEL_HEIGHT - MARGIN + 16.0,
        x_max
    ));
}

fn document(body: &str, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Two stacked panels: values `z₁, z₂` against their bounds, and rates.
pub fn render_fields_svg(dir: &Path, policy: &PolicyResult) -> io::Result<std::path::PathBuf> {
    fs::create_dir_all(dir)?;
    let x = &policy.grid.nodes;
    let mut body = String::new();
    panel(
        &mut body,
        &[
            Series {
                label: "z1",
                color: "#1f6fb2",
                dashed: false,
                xs: x,
                ys: &policy.z1,
            },
            Series {
                label: "z2",
                color: "#2b8a3e",
                dashed: false,
                xs: x,
                ys: &policy.z2,
            },
            Series {
                label: "B1",
                color: "#e8901a",
                dashed: true,
                xs: x,
                ys: &policy.b1,
            },
            Series {
                label: "B2",
                color: "#8a4baf",
                dashed: true,
                xs: x,
                ys: &policy.b2,
            },
        ],
        "value functions and bounds",
        0.0,
        &[],
    );
    panel(
        &mut body,
        &[
            Series {
                label: "p1",
                color: "#c0392b",
                dashed: false,
                xs: x,
                ys: &policy.p1,
            },
            Series {
                label: "p2",
                color: "#7b4f2c",
                dashed: false,
                xs: x,
                ys: &policy.p2,
            },
        ],
        "feedback production rates",
        PANEL_HEIGHT,
        &[],
    );
    let path = dir.join("fields.svg");
    fs::write(&path, document(&body, 2.0 * PANEL_HEIGHT))?;
    Ok(path)
}

/// Inventory path with guides at the stopping levels `±R`.
pub fn render_trajectory_svg(
    dir: &Path,
    trajectory: &Trajectory,
    radius: f64,
) -> io::Result<std::path::PathBuf> {
    fs::create_dir_all(dir)?;
    let ts: Vec<f64> = trajectory.samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = trajectory.samples.iter().map(|s| s.1).collect();
    let mut body = String::new();
    panel(
        &mut body,
        &[Series {
            label: "y(t)",
            color: "#1f6fb2",
            dashed: false,
            xs: &ts,
            ys: &ys,
        }],
        "inventory path",
        0.0,
        &[radius, -radius],
    );
    let path = dir.join("trajectory.svg");
    fs::write(&path, document(&body, PANEL_HEIGHT))?;
    Ok(path)
}
