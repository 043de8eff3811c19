//! Hand-rolled SVG figures: a per-probe sweep plot and the reconstruction
//! overlay. Plain string assembly — the figures are simple enough that a
//! plotting dependency would cost more than it saves, and emitting every
//! coordinate ourselves keeps the files byte-deterministic.

use heatprobe::geometry::{Rect, Shape};
use heatprobe::indicator::{IndicatorSample, SupportFit};
use heatprobe::reconstruct::{BallEnclosure, HullEstimate};

const FONT: &str = "font-family=\"monospace\"";

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Pointwise support estimates against `√τ`, with the fitted `h` as a
/// dashed reference line. Degenerate samples (vanished indicator) have no
/// pointwise estimate and are left out; an all-degenerate sweep renders as
/// an annotated empty frame.
pub fn sweep_plot(tag: &str, samples: &[IndicatorSample], fit: Option<&SupportFit>) -> String {
    let (width, height) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (64.0, 18.0, 30.0, 46.0);
    let (pw, ph) = (width - ml - mr, height - mt - mb);

    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| {
            s.support_estimate_pointwise()
                .ok()
                .map(|h| (s.tau.sqrt(), h))
        })
        .collect();

    let mut xs: Vec<f64> = samples.iter().map(|s| s.tau.sqrt()).collect();
    if xs.is_empty() {
        xs.push(1.0);
    }
    let (mut x0, mut x1) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let mut ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    if let Some(f) = fit {
        ys.push(f.h);
    }
    let (mut y0, mut y1) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| {
            (a.min(y), b.max(y))
        });
    if !y0.is_finite() {
        y0 = -1.0;
        y1 = 1.0;
    }
    let dx = (x1 - x0).max(1e-9) * 0.06;
    let dy = (y1 - y0).max(1e-9) * 0.12;
    x0 -= dx;
    x1 += dx;
    y0 -= dy;
    y1 += dy;

    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n\
         <text x=\"{ml}\" y=\"19\" {FONT} font-size=\"13\">{tag}: pointwise support estimate \
         vs sqrt(tau)</text>\n"
    );

    // Frame and ticks.
    out.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" \
         stroke=\"#444444\"/>\n"
    ));
    for k in 0..5 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let px = sx(fx);
        out.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"#444444\"/>\n\
             <text x=\"{px}\" y=\"{}\" {FONT} font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 18.0,
            tick_label(fx)
        ));
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let py = sy(fy);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{ml}\" y2=\"{py}\" stroke=\"#444444\"/>\n\
             <text x=\"{}\" y=\"{}\" {FONT} font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            ml - 5.0,
            ml - 8.0,
            py + 4.0,
            tick_label(fy)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" {FONT} font-size=\"12\" text-anchor=\"middle\">sqrt(tau)</text>\n",
        ml + pw / 2.0,
        height - 10.0
    ));

    if let Some(f) = fit {
        let py = sy(f.h);
        out.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" stroke=\"#ed553b\" \
             stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n\
             <text x=\"{}\" y=\"{}\" {FONT} font-size=\"11\" text-anchor=\"end\" \
             fill=\"#ed553b\">h_fit = {:.4}</text>\n",
            ml + pw,
            ml + pw - 6.0,
            py - 6.0,
            f.h
        ));
    }

    for &(x, y) in &points {
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#20639b\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    if points.is_empty() {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" {FONT} font-size=\"12\" text-anchor=\"middle\" \
             fill=\"#888888\">indicator vanished at every tau — nothing to plot</text>\n",
            ml + pw / 2.0,
            mt + ph / 2.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn shape_svg(
    shape: &Shape,
    sx: &dyn Fn(f64) -> f64,
    sy: &dyn Fn(f64) -> f64,
    scale: f64,
) -> String {
    const STYLE: &str =
        "fill=\"#8d99ae\" fill-opacity=\"0.5\" stroke=\"#5c677d\" stroke-width=\"1\"";
    match shape {
        Shape::Disk { center, radius } => format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {STYLE}/>\n",
            sx(center.x),
            sy(center.y),
            radius * scale
        ),
        Shape::Rect { lo, hi } => format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {STYLE}/>\n",
            sx(lo.x),
            sy(hi.y),
            (hi.x - lo.x) * scale,
            (hi.y - lo.y) * scale
        ),
        Shape::Union { members } => members
            .iter()
            .map(|m| shape_svg(m, sx, sy, scale))
            .collect::<String>(),
    }
}

/// Body outline, true cavities (when configured), hull estimate, and
/// exclusion balls in one world-coordinate picture (y axis up).
pub fn overlay(
    rect: &Rect,
    cavities: &[Shape],
    hull: Option<&HullEstimate>,
    enclosure: Option<&BallEnclosure>,
) -> String {
    let pad = 0.12 * rect.width().max(rect.height());
    let (wx0, wx1) = (rect.lo.x - pad, rect.hi.x + pad);
    let (wy0, wy1) = (rect.lo.y - pad, rect.hi.y + pad);
    let width = 480.0;
    let scale = width / (wx1 - wx0);
    let height = (wy1 - wy0) * scale;
    let sx = move |x: f64| (x - wx0) * scale;
    let sy = move |y: f64| (wy1 - y) * scale;

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    );
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#f5f7fa\" \
         stroke=\"#444444\" stroke-width=\"1.5\"/>\n",
        sx(rect.lo.x),
        sy(rect.hi.y),
        rect.width() * scale,
        rect.height() * scale
    ));

    if let Some(enc) = enclosure {
        for b in &enc.balls {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#e63946\" fill-opacity=\"0.06\" \
                 stroke=\"#e63946\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n\
                 <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#e63946\"/>\n",
                sx(b.center.x),
                sy(b.center.y),
                b.radius * scale,
                sx(b.center.x),
                sy(b.center.y)
            ));
        }
    }

    for shape in cavities {
        out.push_str(&shape_svg(shape, &sx, &sy, scale));
    }

    if let Some(h) = hull {
        let pts = h
            .vertices
            .iter()
            .map(|v| format!("{},{}", sx(v.x), sy(v.y)))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!(
            "<polygon points=\"{pts}\" fill=\"#2a9d8f\" fill-opacity=\"0.35\" \
             stroke=\"#2a9d8f\" stroke-width=\"1.5\"/>\n"
        ));
    }

    // Legend (only the layers actually drawn).
    let mut entries: Vec<(&str, &str)> = vec![("#f5f7fa", "body")];
    if !cavities.is_empty() {
        entries.push(("#8d99ae", "true cavity"));
    }
    if hull.is_some() {
        entries.push(("#2a9d8f", "hull estimate"));
    }
    if enclosure.is_some() {
        entries.push(("#e63946", "exclusion balls"));
    }
    for (i, (color, label)) in entries.iter().enumerate() {
        let y = 16.0 + 16.0 * i as f64;
        out.push_str(&format!(
            "<rect x=\"8\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\" \
             stroke=\"#444444\" stroke-width=\"0.5\"/>\n\
             <text x=\"22\" y=\"{}\" {FONT} font-size=\"11\">{label}</text>\n",
            y - 9.0,
            y
        ));
    }

    out.push_str("</svg>\n");
    out
}
