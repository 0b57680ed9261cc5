//! Self-contained SVG line plot of mean secrecy sum rate versus SNR, one
//! polyline per algorithm with standard-error bars. No external renderer.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::SummaryRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    /// Data range padded by 5% on each side; degenerate ranges get a unit
    /// window around the value.
    fn padded(values: impl Iterator<Item = f64>) -> Axis {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Axis { min: 0.0, max: 1.0 };
        }
        if hi - lo < 1e-12 {
            return Axis {
                min: lo - 0.5,
                max: hi + 0.5,
            };
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            min: lo - pad,
            max: hi + pad,
        }
    }
}

fn x_pixel(axis: &Axis, v: f64) -> f64 {
    MARGIN_L + (v - axis.min) / (axis.max - axis.min) * (WIDTH - MARGIN_L - MARGIN_R)
}

fn y_pixel(axis: &Axis, v: f64) -> f64 {
    HEIGHT - MARGIN_B - (v - axis.min) / (axis.max - axis.min) * (HEIGHT - MARGIN_T - MARGIN_B)
}

fn tick_values(axis: &Axis, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| axis.min + (axis.max - axis.min) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Renders the summary to an SVG string.
pub fn render_plot(summary: &[SummaryRow]) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::InvalidConfig("empty summary, nothing to plot".into()));
    }
    let x_axis = Axis::padded(summary.iter().map(|r| r.snr_db));
    let y_axis = Axis::padded(
        summary
            .iter()
            .flat_map(|r| [r.mean_ssr - r.stderr_ssr, r.mean_ssr + r.stderr_ssr]),
    );

    let mut algorithms: Vec<_> = summary.iter().map(|r| r.algorithm).collect();
    algorithms.dedup();
    algorithms.sort();
    algorithms.dedup();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = WIDTH,
        h = HEIGHT
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Frame and grid.
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (MARGIN_T, HEIGHT - MARGIN_B);
    for tv in tick_values(&x_axis, 6) {
        let x = x_pixel(&x_axis, tv);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y0:.1}\" x2=\"{x:.1}\" y2=\"{y1:.1}\" stroke=\"#dddddd\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"12\" text-anchor=\"middle\">{tv:.1}</text>\n",
            y = y1 + 18.0
        ));
    }
    for tv in tick_values(&y_axis, 6) {
        let y = y_pixel(&y_axis, tv);
        svg.push_str(&format!(
            "<line x1=\"{x0:.1}\" y1=\"{y:.1}\" x2=\"{x1:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{yy:.1}\" font-size=\"12\" text-anchor=\"end\">{tv:.2}</text>\n",
            x = x0 - 8.0,
            yy = y + 4.0
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{w:.1}\" height=\"{h:.1}\" fill=\"none\" stroke=\"black\"/>\n",
        w = x1 - x0,
        h = y1 - y0
    ));
    svg.push_str(&format!(
        "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"14\" text-anchor=\"middle\">SNR (dB)</text>\n",
        x = 0.5 * (x0 + x1),
        y = HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{y:.1}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {y:.1})\">Secrecy sum rate (bits/s/Hz)</text>\n",
        y = 0.5 * (y0 + y1)
    ));

    for (i, alg) in algorithms.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut rows: Vec<&SummaryRow> = summary.iter().filter(|r| r.algorithm == *alg).collect();
        rows.sort_by(|a, b| a.snr_db.partial_cmp(&b.snr_db).unwrap());

        let points: Vec<String> = rows
            .iter()
            .map(|r| {
                format!(
                    "{:.2},{:.2}",
                    x_pixel(&x_axis, r.snr_db),
                    y_pixel(&y_axis, r.mean_ssr)
                )
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            points.join(" "),
            color
        ));

        for r in &rows {
            let x = x_pixel(&x_axis, r.snr_db);
            let y = y_pixel(&y_axis, r.mean_ssr);
            svg.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
            ));
            if r.stderr_ssr > 0.0 {
                let y_lo = y_pixel(&y_axis, r.mean_ssr - r.stderr_ssr);
                let y_hi = y_pixel(&y_axis, r.mean_ssr + r.stderr_ssr);
                svg.push_str(&format!(
                    "<line x1=\"{x:.2}\" y1=\"{y_lo:.2}\" x2=\"{x:.2}\" y2=\"{y_hi:.2}\" stroke=\"{color}\"/>\n"
                ));
                for ye in [y_lo, y_hi] {
                    svg.push_str(&format!(
                        "<line x1=\"{a:.2}\" y1=\"{ye:.2}\" x2=\"{b:.2}\" y2=\"{ye:.2}\" stroke=\"{color}\"/>\n",
                        a = x - 4.0,
                        b = x + 4.0
                    ));
                }
            }
        }

        // Legend entry.
        let ly = MARGIN_T + 14.0 + 20.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{a:.1}\" y1=\"{ly:.1}\" x2=\"{b:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            a = x1 + 12.0,
            b = x1 + 40.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"13\">{name}</text>\n",
            x = x1 + 46.0,
            y = ly + 4.0,
            name = alg.name()
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(summary: &[SummaryRow], path: &Path) -> Result<()> {
    fs::write(path, render_plot(summary)?)?;
    Ok(())
}
