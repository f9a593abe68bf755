//! Minimal polyline SVG rendering and marching-squares contours.

use std::fmt::Write;

/// Axis-aligned data window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    /// Smallest window holding every point, padded by 5% per side.
    pub fn around<'a>(points: impl IntoIterator<Item = &'a (f64, f64)>) -> Self {
        let mut b = Bounds {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            b.x_min = b.x_min.min(x);
            b.x_max = b.x_max.max(x);
            b.y_min = b.y_min.min(y);
            b.y_max = b.y_max.max(y);
        }
        if !b.x_min.is_finite() {
            return Bounds {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            };
        }
        let pad = |lo: f64, hi: f64| {
            let w = if hi > lo { hi - lo } else { 1.0 };
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        (b.x_min, b.x_max) = pad(b.x_min, b.x_max);
        (b.y_min, b.y_max) = pad(b.y_min, b.y_max);
        b
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub width: f64,
}

/// One set of axes with polylines and a title.
#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub bounds: Bounds,
    pub series: Vec<Series>,
    /// Drawn underneath the series as separate segments.
    pub segments: Vec<((f64, f64), (f64, f64))>,
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 50.0;

fn render_panel(out: &mut String, panel: &Panel, top: f64, height: f64) {
    let b = panel.bounds;
    let (w, h) = (PANEL_W - 2.0 * MARGIN, height - 2.0 * MARGIN);
    let px = |x: f64| MARGIN + (x - b.x_min) / (b.x_max - b.x_min) * w;
    let py = |y: f64| top + MARGIN + (b.y_max - y) / (b.y_max - b.y_min) * h;
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{:.2}" width="{w}" height="{h:.2}" fill="none" stroke="#444" stroke-width="1"/>"##,
        top + MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        PANEL_W / 2.0,
        top + MARGIN - 12.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        PANEL_W / 2.0,
        top + height - 12.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        top + height / 2.0,
        top + height / 2.0,
        escape(&panel.y_label)
    );
    for (i, (v, anchor)) in [(b.x_min, "start"), (b.x_max, "end")].iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="{anchor}">{}</text>"#,
            if i == 0 { MARGIN } else { MARGIN + w },
            top + MARGIN + h + 14.0,
            tick(*v)
        );
    }
    for v in [b.y_min, b.y_max] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            py(v) + 4.0,
            tick(v)
        );
    }
    if !panel.segments.is_empty() {
        let mut d = String::new();
        for ((x0, y0), (x1, y1)) in &panel.segments {
            let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", px(*x0), py(*y0), px(*x1), py(*y1));
        }
        let _ = writeln!(out, r##"<path d="{d}" fill="none" stroke="#9aa" stroke-width="0.6"/>"##);
    }
    for s in &panel.series {
        let mut pts = String::new();
        for (x, y) in &s.points {
            let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            pts.trim_end(),
            s.color,
            s.width
        );
    }
}

fn tick(v: f64) -> String {
    format!("{:.3}", v)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Panels stacked vertically in one document.
pub fn render(panels: &[Panel], panel_height: Option<f64>) -> String {
    let ph = panel_height.unwrap_or(PANEL_H);
    let total = ph * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{total}" viewBox="0 0 {PANEL_W} {total}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, i as f64 * ph, ph);
    }
    out.push_str("</svg>\n");
    out
}

/// Segments of the level set `f = level` on the grid `values[iy*nx + ix]`
/// sampled at `xs` × `ys`.
pub fn marching_squares(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<((f64, f64), (f64, f64))> {
    let nx = xs.len();
    let mut segs = Vec::new();
    let lerp = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        let t = (level - a.2) / (b.2 - a.2);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    };
    for iy in 0..ys.len().saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let c = [
                (xs[ix], ys[iy], values[iy * nx + ix]),
                (xs[ix + 1], ys[iy], values[iy * nx + ix + 1]),
                (xs[ix + 1], ys[iy + 1], values[(iy + 1) * nx + ix + 1]),
                (xs[ix], ys[iy + 1], values[(iy + 1) * nx + ix]),
            ];
            let mut crossings = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                if (a.2 < level) != (b.2 < level) {
                    crossings.push(lerp(a, b));
                }
            }
            match crossings.len() {
                2 => segs.push((crossings[0], crossings[1])),
                4 => {
                    // saddle cell: pair by the centre value
                    let centre = c.iter().map(|p| p.2).sum::<f64>() / 4.0;
                    if (centre < level) == (c[0].2 < level) {
                        segs.push((crossings[0], crossings[3]));
                        segs.push((crossings[1], crossings[2]));
                    } else {
                        segs.push((crossings[0], crossings[1]));
                        segs.push((crossings[2], crossings[3]));
                    }
                }
                _ => {}
            }
        }
    }
    segs
}
