//! Text emitters: CSV tables at full double precision and a minimal SVG canvas.
//!
//! Nothing here touches the filesystem; callers own the writes.

use std::fmt::Write;

/// Formats a double with 17 significant digits (round-trips exactly).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else {
        format!("{x:.16e}")
    }
}

/// Builds a CSV table row by row.
#[derive(Debug, Clone)]
pub struct CsvTable {
    buf: String,
    columns: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum Cell<'a> {
    Num(f64),
    Int(i64),
    Text(&'a str),
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) {
        debug_assert_eq!(cells.len(), self.columns);
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                Cell::Num(x) => self.buf.push_str(&fmt_f64(*x)),
                Cell::Int(n) => write!(self.buf, "{n}").unwrap(),
                Cell::Text(s) => self.buf.push_str(s),
            }
        }
        self.buf.push('\n');
    }

    pub fn nums(&mut self, values: &[f64]) {
        let cells: Vec<Cell> = values.iter().map(|&x| Cell::Num(x)).collect();
        self.row(&cells);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub const SVG_WIDTH: f64 = 800.0;
pub const SVG_HEIGHT: f64 = 600.0;

/// Linear world-to-view map onto the fixed 800x600 viewBox (y axis flipped).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ViewTransform {
    pub scale_x: f64,
    pub offset_x: f64,
    pub scale_y: f64,
    pub offset_y: f64,
}

impl ViewTransform {
    pub fn fit(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        let sx = SVG_WIDTH / (x_range.1 - x_range.0);
        let sy = -SVG_HEIGHT / (y_range.1 - y_range.0);
        Self {
            scale_x: sx,
            offset_x: -x_range.0 * sx,
            scale_y: sy,
            offset_y: SVG_HEIGHT - y_range.0 * sy,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.scale_x * x + self.offset_x, self.scale_y * y + self.offset_y)
    }
}

#[derive(Debug, Clone)]
pub struct SvgCanvas {
    transform: ViewTransform,
    body: String,
}

impl SvgCanvas {
    pub fn new(transform: ViewTransform) -> Self {
        Self {
            transform,
            body: String::new(),
        }
    }

    pub fn transform(&self) -> ViewTransform {
        self.transform
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        let mut pts = String::with_capacity(points.len() * 16);
        for (i, &(x, y)) in points.iter().enumerate() {
            let (vx, vy) = self.transform.apply(x, y);
            if i > 0 {
                pts.push(' ');
            }
            write!(pts, "{vx:.3},{vy:.3}").unwrap();
        }
        writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{stroke}" stroke-width="{width}" points="{pts}"/>"#
        )
        .unwrap();
    }

    pub fn segment(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let (x1, y1) = self.transform.apply(a.0, a.1);
        let (x2, y2) = self.transform.apply(b.0, b.1);
        writeln!(
            self.body,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width}"/>"#
        )
        .unwrap();
    }

    pub fn circle(&mut self, c: (f64, f64), radius_px: f64, fill: &str) {
        let (cx, cy) = self.transform.apply(c.0, c.1);
        writeln!(
            self.body,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{radius_px}" fill="{fill}"/>"#
        )
        .unwrap();
    }

    pub fn text(&mut self, at: (f64, f64), text: &str) {
        let (x, y) = self.transform.apply(at.0, at.1);
        let escaped = text
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        writeln!(
            self.body,
            r#"<text x="{x:.3}" y="{y:.3}" font-family="sans-serif" font-size="14">{escaped}</text>"#
        )
        .unwrap();
    }

    /// Serializes the document. `stamp`, when given, goes into a leading
    /// comment; it is the only part allowed to differ between reruns.
    pub fn finish(&self, stamp: Option<&str>) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        if let Some(s) = stamp {
            writeln!(out, "<!-- generated {} -->", s.replace("--", "- -")).unwrap();
        }
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" width="{SVG_WIDTH}" height="{SVG_HEIGHT}">"#
        )
        .unwrap();
        out.push_str(r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
        out.push('\n');
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}
