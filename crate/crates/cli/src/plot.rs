//! Standalone SVG plots of recovered series against their reference.

use std::fmt::Write;
use std::path::Path;

use qft_calculus::pipelines::RecoveredSeries;

use crate::config::PlotScale;
use crate::error::{CliError, CliResult};
use crate::experiment::atomic_write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const TICKS: usize = 5;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = lo.abs().max(1.0) * 0.5;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn transform(v: f64, scale: PlotScale) -> Option<f64> {
    match scale {
        PlotScale::Linear => v.is_finite().then_some(v),
        PlotScale::Semilog => (v > 0.0 && v.is_finite()).then(|| v.log10()),
    }
}

/// Renders the SVG document and any warnings about what was left out.
pub fn render_svg(series: &RecoveredSeries, reference: &[f64], scale: PlotScale) -> CliResult<(String, Vec<String>)> {
    if series.points.is_empty() {
        return Err(CliError::config("plot", "empty series"));
    }
    let mut warnings = Vec::new();
    let quantum: Vec<(f64, f64)> = series
        .points
        .iter()
        .filter(|p| p.retained)
        .filter_map(|p| transform(p.value_sq, scale).map(|y| (p.x, y)))
        .collect();
    if quantum.is_empty() {
        warnings.push("plot: no retained points, analytical curve only".to_string());
    }
    let curve: Vec<Option<(f64, f64)>> = series
        .points
        .iter()
        .zip(reference)
        .map(|(p, &r)| transform(r, scale).map(|y| (p.x, y)))
        .collect();
    let rule = match scale {
        PlotScale::Semilog => transform(series.resolution_epsilon, scale),
        PlotScale::Linear => None,
    };

    let xs = series.points.iter().map(|p| p.x);
    let x = padded(
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
    );
    let ys = quantum
        .iter()
        .map(|q| q.1)
        .chain(curve.iter().flatten().map(|c| c.1))
        .chain(rule);
    let y = padded(
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    );
    let frame = Frame { x, y };

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>"#
    );
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        w,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"#
    );
    let _ = writeln!(w, r#"<g class="ticks" text-anchor="middle">"#);
    for i in 0..=TICKS {
        let t = frame.x.0 + (frame.x.1 - frame.x.0) * i as f64 / TICKS as f64;
        let px = frame.px(t);
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick_label(t)
        );
    }
    for i in 0..=TICKS {
        let t = frame.y.0 + (frame.y.1 - frame.y.0) * i as f64 / TICKS as f64;
        let py = frame.py(t);
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(w, "</g>");
    let y_label = match scale {
        PlotScale::Linear => "value²",
        PlotScale::Semilog => "log10(value²)",
    };
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{y_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    // Analytical curve, broken where the transform is undefined.
    for run in curve.split(Option::is_none).filter(|r| !r.is_empty()) {
        let points: Vec<String> = run
            .iter()
            .flatten()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline class="analytical" fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }
    if let Some(r) = rule {
        let py = frame.py(r);
        let _ = writeln!(
            w,
            r#"<line class="resolution" x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="gray" stroke-dasharray="6 4"/>
<text x="{:.2}" y="{:.2}" text-anchor="end" fill="gray">ε = {} (log10 {r:.2})</text>"#,
            x1 - 4.0,
            py - 4.0,
            tick_label(series.resolution_epsilon)
        );
    }
    let _ = writeln!(w, r#"<g class="quantum" fill="firebrick">"#);
    for &(x, y) in &quantum {
        let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, frame.px(x), frame.py(y));
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(
        w,
        r#"<g class="legend"><circle cx="{:.2}" cy="{:.2}" r="3" fill="firebrick"/><text x="{:.2}" y="{:.2}">quantum</text><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="1.5"/><text x="{:.2}" y="{:.2}">analytical</text></g>"#,
        x0 + 12.0,
        TOP - 12.0,
        x0 + 20.0,
        TOP - 8.0,
        x0 + 100.0,
        TOP - 12.0,
        x0 + 118.0,
        TOP - 12.0,
        x0 + 124.0,
        TOP - 8.0
    );
    let _ = writeln!(w, "</svg>");
    Ok((s, warnings))
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    }
}

/// Writes the plot atomically and returns warnings for the metrics report.
pub fn emit_plot(series: &RecoveredSeries, reference: &[f64], path: &Path, scale: PlotScale) -> CliResult<Vec<String>> {
    let (svg, warnings) = render_svg(series, reference, scale)?;
    atomic_write(path, svg.as_bytes())?;
    Ok(warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(2.5), "2.5");
        assert_eq!(tick_label(-1.0), "-1");
        assert_eq!(tick_label(1.5e7), "1.50e7");
    }

    #[test]
    fn padding_handles_flat_ranges() {
        let (lo, hi) = padded(3.0, 3.0);
        assert!(lo < 3.0 && hi > 3.0);
        assert_eq!(padded(f64::INFINITY, f64::NEG_INFINITY), (0.0, 1.0));
    }
}
