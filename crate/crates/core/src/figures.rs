//! SVG renderings of driver bundles and quadratic-differential stream fields.

use serde::Serialize;

use crate::drivers::DriverPath;
use crate::error::{Error, Result};
use crate::output::{SvgCanvas, ViewTransform};
use crate::scenarios::{self, field_csv, field_grid, quad_field, FieldSample, QuadDiffConfig};

pub const FIGURES: [&str; 4] = ["fig2", "fig3", "fig7", "fig8"];

const HIGHLIGHT: &str = "#d62728";
const DRIVER: &str = "#4c72b0";
const AXIS: &str = "#333333";

/// Stream-field window `[-2.5, 2.5] x (0, 2.5]` sampled on 200 x 100 points.
pub const FIELD_X: (f64, f64) = (-2.5, 2.5);
pub const FIELD_Y: f64 = 2.5;
pub const FIELD_NX: usize = 200;
pub const FIELD_NY: usize = 100;

/// A rendered figure with its data.
#[derive(Debug, Clone, Serialize)]
pub struct Figure {
    pub name: String,
    pub svg: String,
    pub csv: String,
    pub transform: ViewTransform,
}

/// Driver paths as polylines over `(t, V_k(t))`; `highlight` is drawn in red.
pub fn driver_bundle_svg(path: &DriverPath, highlight: Option<usize>, stamp: Option<&str>) -> (String, ViewTransform) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &path.states {
        for &v in s {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let pad = 0.05 * (hi - lo).max(1e-9);
    let t1 = path.horizon().max(1e-12);
    let tr = ViewTransform::fit((0.0, t1), (lo - pad, hi + pad));
    let mut c = SvgCanvas::new(tr);
    c.segment((0.0, lo - pad), (t1, lo - pad), AXIS, 1.0);
    c.segment((0.0, lo - pad), (0.0, hi + pad), AXIS, 1.0);
    // highlighted driver last so it sits on top
    let order = (0..path.n_drivers())
        .filter(|&k| Some(k) != highlight)
        .chain(highlight);
    for k in order {
        let pts: Vec<(f64, f64)> = path.times.iter().zip(&path.states).map(|(&t, s)| (t, s[k])).collect();
        if Some(k) == highlight {
            c.polyline(&pts, HIGHLIGHT, 1.6);
        } else {
            c.polyline(&pts, DRIVER, 0.6);
        }
    }
    (c.finish(stamp), tr)
}

/// Short segments along the trajectory direction at every sample, with the
/// double zeros and the singular points marked.
pub fn stream_field_svg(config: &QuadDiffConfig, samples: &[FieldSample], stamp: Option<&str>) -> (String, ViewTransform) {
    let tr = ViewTransform::fit(FIELD_X, (0.0, FIELD_Y));
    let mut c = SvgCanvas::new(tr);
    c.segment((FIELD_X.0, 0.0), (FIELD_X.1, 0.0), AXIS, 1.0);
    let half = 0.4 * (FIELD_X.1 - FIELD_X.0) / FIELD_NX as f64;
    for s in samples {
        let (dx, dy) = (half * s.theta.cos(), half * s.theta.sin());
        c.segment((s.z.re - dx, s.z.im - dy), (s.z.re + dx, s.z.im + dy), "#222222", 0.5);
    }
    for &x in &config.roots {
        c.circle((x, 0.0), 3.0, HIGHLIGHT);
    }
    for p in config.pole_points() {
        c.circle((p.re, p.im), 4.0, DRIVER);
    }
    (c.finish(stamp), tr)
}

/// Renders `name` with the builtin parameters; `seed` overrides the builtin seed.
pub fn render(name: &str, seed: Option<u64>, stamp: Option<&str>) -> Result<Figure> {
    match name {
        "fig2" | "fig3" => {
            let mut cfg = scenarios::builtin(name, None)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let path = cfg.simulate()?;
            let (svg, transform) = driver_bundle_svg(&path, scenarios::heavy_driver(&cfg), stamp);
            Ok(Figure {
                name: name.into(),
                svg,
                csv: path.drivers_csv(),
                transform,
            })
        }
        "fig7" | "fig8" => {
            let cfg = scenarios::builtin(name, None)?;
            let q = cfg.quad.expect("stream builtins carry a quadratic differential");
            let samples = quad_field(&q, &field_grid(FIELD_X, FIELD_Y, FIELD_NX, FIELD_NY))?;
            let (svg, transform) = stream_field_svg(&q, &samples, stamp);
            Ok(Figure {
                name: name.into(),
                svg,
                csv: field_csv(&samples),
                transform,
            })
        }
        other => Err(Error::UnknownScenario(other.into())),
    }
}

/// Counts `polyline` elements, failing on malformed XML.
pub fn count_polylines(svg: &str) -> Result<usize> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| Error::InvalidConfig(format!("malformed SVG: {e}")))?;
    Ok(doc.descendants().filter(|n| n.has_tag_name("polyline")).count())
}

/// Drops the leading timestamp comment so reruns can be compared.
pub fn strip_stamp(svg: &str) -> String {
    svg.lines()
        .filter(|l| !l.starts_with("<!-- generated"))
        .collect::<Vec<_>>()
        .join("\n")
}
