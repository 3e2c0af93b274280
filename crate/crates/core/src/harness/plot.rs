//! Static SVG line plots of `E[d_k]` against `k`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// Value at `k = 0, 1, ...`.
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Series {
            label: label.into(),
            values,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_scale_y: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            title: String::new(),
            x_label: "iteration k".into(),
            y_label: "E[d_k]".into(),
            log_scale_y: true,
            width: 720.0,
            height: 480.0,
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Maps data coordinates to screen coordinates; screen `y` grows downwards.
struct Frame {
    x_max: f64,
    y_lo: f64,
    y_hi: f64,
    log: bool,
    width: f64,
    height: f64,
}

impl Frame {
    fn transform_y(&self, v: f64) -> f64 {
        if self.log {
            v.max(10f64.powf(self.y_lo)).log10()
        } else {
            v
        }
    }

    fn sx(&self, k: f64) -> f64 {
        let w = self.width - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + if self.x_max > 0.0 { k / self.x_max * w } else { 0.0 }
    }

    fn sy(&self, v: f64) -> f64 {
        let h = self.height - MARGIN_TOP - MARGIN_BOTTOM;
        let t = (self.transform_y(v) - self.y_lo) / (self.y_hi - self.y_lo);
        MARGIN_TOP + (1.0 - t) * h
    }
}

fn y_range(series: &[Series], log: bool) -> (f64, f64) {
    let vals = series.iter().flat_map(|s| s.values.iter().copied()).filter(|v| v.is_finite());
    let (lo, hi) = if log {
        let pos: Vec<f64> = vals.filter(|v| *v > 0.0).collect();
        if pos.is_empty() {
            (-1.0, 0.0)
        } else {
            let lo = pos.iter().copied().fold(f64::INFINITY, f64::min).log10().floor();
            let hi = pos.iter().copied().fold(0.0, f64::max).log10().ceil();
            (lo, hi)
        }
    } else {
        let v: Vec<f64> = vals.collect();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if v.is_empty() {
            (0.0, 1.0)
        } else {
            (lo, hi)
        }
    };
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    if v == v.round() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

/// Renders one polyline per series with axes, ticks and a legend.
pub fn render_svg(series: &[Series], options: &PlotOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::invalid("nothing to plot"));
    }
    if let Some(s) = series.iter().find(|s| s.values.is_empty()) {
        return Err(Error::invalid(format!("series `{}` is empty", s.label)));
    }
    let x_max = series.iter().map(|s| s.values.len() - 1).max().unwrap_or(0) as f64;
    let (y_lo, y_hi) = y_range(series, options.log_scale_y);
    let f = Frame {
        x_max,
        y_lo,
        y_hi,
        log: options.log_scale_y,
        width: options.width,
        height: options.height,
    };
    let (w, h) = (options.width, options.height);
    let (left, right) = (MARGIN_LEFT, w - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, h - MARGIN_BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
    if !options.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            w / 2.0,
            escape(&options.title)
        );
    }
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}"/></g>"#
    );

    // x ticks
    svg.push_str("<g class=\"x-ticks\">\n");
    let step = if x_max > 0.0 { nice_step(x_max).max(1.0) } else { 1.0 };
    let mut k = 0.0;
    while k <= x_max + 1e-9 {
        let x = f.sx(k);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            fmt_tick(k)
        );
        k += step;
    }
    svg.push_str("</g>\n");

    // y ticks
    svg.push_str("<g class=\"y-ticks\">\n");
    let ticks: Vec<(f64, String)> = if options.log_scale_y {
        let stride = ((y_hi - y_lo) / 8.0).ceil().max(1.0) as i64;
        (y_lo as i64..=y_hi as i64)
            .step_by(stride as usize)
            .map(|e| (10f64.powi(e as i32), format!("1e{e}")))
            .collect()
    } else {
        let step = nice_step(y_hi - y_lo);
        let mut t = (y_lo / step).ceil() * step;
        let mut out = Vec::new();
        while t <= y_hi + 1e-12 * step {
            out.push((t, fmt_tick(t)));
            t += step;
        }
        out
    };
    for (v, label) in ticks {
        let y = f.sy(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 5.0,
            left - 8.0,
            y + 4.0,
            escape(&label)
        );
    }
    svg.push_str("</g>\n");

    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        h - 15.0,
        escape(&options.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (top + bottom) / 2.0,
        escape(&options.y_label)
    );

    svg.push_str("<g class=\"series\" fill=\"none\" stroke-width=\"1.5\">\n");
    for (i, s) in series.iter().enumerate() {
        let points: Vec<String> = s
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(k, v)| format!("{:.3},{:.3}", f.sx(k as f64), f.sy(*v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline stroke="{}" points="{}"><title>{}</title></polyline>"#,
            PALETTE[i % PALETTE.len()],
            points.join(" "),
            escape(&s.label)
        );
    }
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"legend\">\n");
    for (i, s) in series.iter().enumerate() {
        let y = top + 10.0 + 18.0 * i as f64;
        let x = right - 170.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 24.0,
            PALETTE[i % PALETTE.len()],
            x + 30.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

pub fn emit_plot(series: &[Series], path: &Path, options: &PlotOptions) -> Result<()> {
    std::fs::write(path, render_svg(series, options)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup_in_labels() {
        let svg = render_svg(
            &[Series::new("a<b & c", vec![1.0, 0.5])],
            &PlotOptions::default(),
        )
        .unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
    }

    #[test]
    fn rejects_empty_series() {
        assert!(render_svg(&[], &PlotOptions::default()).is_err());
        assert!(render_svg(&[Series::new("x", vec![])], &PlotOptions::default()).is_err());
    }

    #[test]
    fn constant_series_still_has_a_range() {
        let svg = render_svg(&[Series::new("flat", vec![2.0; 4])], &PlotOptions::default()).unwrap();
        assert!(!svg.contains("NaN"));
    }
}
