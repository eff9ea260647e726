//! Minimal SVG plots: decision histograms, band panels and objective heat maps.

use std::fmt::Write as _;

use crate::boundary::{BandBundle, ContourSet, Grid, SliceSpec};
use crate::dataset::ScaledDomain;
use crate::optimizer::Quantiles;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 45.0;
const BOTTOM: f64 = 60.0;

pub const NO_BOUNDARY: &str = "no boundary in slice";

/// Linear map from a data rectangle to the plot area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Self { x: widen(x), y: widen(y) }
    }

    fn px(&self, v: f64) -> f64 {
        LEFT + (v - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="25" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (x0, x1) = (f.px(f.x.0), f.px(f.x.1));
    let (y0, y1) = (f.py(f.y.0), f.py(f.y.1));
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let vx = f.x.0 + t * (f.x.1 - f.x.0);
        let vy = f.y.0 + t * (f.y.1 - f.y.0);
        let (px, py) = (f.px(vx), f.py(vy));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 19.0,
            tick(vx)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick(vy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn polyline(s: &mut String, f: &Frame, pts: &[(f64, f64)], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let mut d = String::with_capacity(pts.len() * 16);
    for (x, y) in pts {
        let _ = write!(d, "{:.2},{:.2} ", f.px(*x), f.py(*y));
    }
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" {style}/>"#, d.trim_end());
}

fn contours(s: &mut String, f: &Frame, set: &ContourSet, style: &str) {
    for line in &set.polylines {
        polyline(s, f, line, style);
    }
}

/// Histogram of converged optimal decisions with the median (solid) and the
/// quartiles (dashed) marked in red.
pub fn histogram(values: &[f64], range: (f64, f64), q: Option<&Quantiles>, title: &str, xlabel: &str) -> String {
    const BINS: usize = 30;
    let (lo, hi) = if values.is_empty() {
        range
    } else {
        let mn = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mx = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if mx > mn { (mn, mx) } else { (mn - 0.5 * (range.1 - range.0) / BINS as f64, mn + 0.5 * (range.1 - range.0) / BINS as f64) }
    };
    let width = (hi - lo) / BINS as f64;
    let mut counts = [0usize; BINS];
    for v in values {
        let b = (((v - lo) / width).floor() as isize).clamp(0, BINS as isize - 1) as usize;
        counts[b] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let f = Frame::new((lo, hi), (0.0, top * 1.05));
    let mut s = header(title);
    for (b, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let a = lo + b as f64 * width;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#7fa7d9" stroke="#3b5e8c"/>"##,
            f.px(a),
            f.py(c as f64),
            f.px(a + width) - f.px(a),
            f.py(0.0) - f.py(c as f64)
        );
    }
    if let Some(q) = q {
        for (v, dash) in [(q.median, ""), (q.q25, r#" stroke-dasharray="6 4""#), (q.q75, r#" stroke-dasharray="6 4""#)] {
            let x = f.px(v);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="red" stroke-width="2"{dash}/>"#,
                f.py(0.0),
                f.py(top * 1.05)
            );
        }
    }
    axes(&mut s, &f, xlabel, "count");
    s.push_str("</svg>\n");
    s
}

fn slice_frame(slice: &SliceSpec, domain: &ScaledDomain) -> (Frame, String, String) {
    let specs = domain.specs();
    let a = &specs[slice.free_dims.0];
    let b = &specs[slice.free_dims.1];
    (
        Frame::new((a.lower, a.upper), (b.lower, b.upper)),
        a.name.clone(),
        b.name.clone(),
    )
}

/// Grid point `(i, j)` drawn as the cell it represents.
fn cell_rect(f: &Frame, slice: &SliceSpec, domain: &ScaledDomain, i0: usize, i1: usize, j: usize) -> (f64, f64, f64, f64) {
    let (a0, b0) = slice.plane_point(domain, i0 as f64 - 0.5, j as f64 - 0.5);
    let (a1, b1) = slice.plane_point(domain, i1 as f64 + 0.5, j as f64 + 0.5);
    let clamp_x = |v: f64| v.clamp(f.x.0, f.x.1);
    let clamp_y = |v: f64| v.clamp(f.y.0, f.y.1);
    let (x0, x1) = (f.px(clamp_x(a0)), f.px(clamp_x(a1)));
    let (y0, y1) = (f.py(clamp_y(b1)), f.py(clamp_y(b0)));
    (x0, y0, x1 - x0, y1 - y0)
}

/// Band panel: shaded band region, its dashed outline, the mean zero contour,
/// thin gray draw contours and an optional truth contour.
pub fn band_plot(bundle: &BandBundle, domain: &ScaledDomain, truth: Option<&ContourSet>, title: &str) -> String {
    let g = &bundle.grid;
    let (f, xl, yl) = slice_frame(&g.slice, domain);
    let mut s = header(title);
    let (nx, ny) = g.slice.resolution;
    let _ = writeln!(s, r##"<g fill="#4f81bd" fill-opacity="0.35" stroke="none">"##);
    for j in 0..ny {
        let mut i = 0;
        while i < nx {
            if !g.in_band(i, j) {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < nx && g.in_band(i + 1, j) {
                i += 1;
            }
            let (x, y, w, h) = cell_rect(&f, &g.slice, domain, start, i, j);
            let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}"/>"#);
            i += 1;
        }
    }
    s.push_str("</g>\n");
    for c in &bundle.draw_contours {
        contours(&mut s, &f, c, r#"stroke="gray" stroke-width="0.6""#);
    }
    contours(&mut s, &f, &g.band_outline(domain), r#"stroke="blue" stroke-width="1.2" stroke-dasharray="6 4""#);
    if let Some(t) = truth {
        contours(&mut s, &f, t, r#"stroke="green" stroke-width="2""#);
    }
    contours(&mut s, &f, &bundle.mean_contour, r#"stroke="purple" stroke-width="2""#);
    if bundle.mean_contour.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="16" fill="black">{NO_BOUNDARY}</text>"#,
            (f.px(f.x.0) + f.px(f.x.1)) / 2.0,
            (f.py(f.y.0) + f.py(f.y.1)) / 2.0
        );
    }
    axes(&mut s, &f, &xl, &yl);
    s.push_str("</svg>\n");
    s
}

/// Heat map of a surface over a slice (darker is lower), with an optional red
/// cross marker in physical slice coordinates.
pub fn heat_map(surface: &Grid, slice: &SliceSpec, domain: &ScaledDomain, marker: Option<(f64, f64)>, title: &str) -> String {
    let (f, xl, yl) = slice_frame(slice, domain);
    let mut s = header(title);
    let vals = surface.values();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // square root compresses the range so the basin stays visible
    let shade = |v: f64| {
        let t = if hi > lo { ((v - lo) / (hi - lo)).sqrt() } else { 0.5 };
        (30.0 + 225.0 * t).round() as u8
    };
    for j in 0..surface.ny() {
        for i in 0..surface.nx() {
            let c = shade(surface.get(i, j));
            let (x, y, w, h) = cell_rect(&f, slice, domain, i, i, j);
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="rgb({c},{c},{})"/>"#,
                c.saturating_add(20)
            );
        }
    }
    if let Some((a, b)) = marker {
        let (x, y) = (f.px(a), f.py(b));
        let _ = writeln!(
            s,
            r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="red" stroke-width="3"/>"#,
            x - 8.0,
            y - 8.0,
            x + 8.0,
            y + 8.0,
            x - 8.0,
            y + 8.0,
            x + 8.0,
            y - 8.0
        );
    }
    axes(&mut s, &f, &xl, &yl);
    s.push_str("</svg>\n");
    s
}
