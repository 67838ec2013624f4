//! File outputs: atomic writes, CSV tables and SVG overlays.

use std::io::Write;
use std::path::Path;

use otreg_core::{Ellipse2d, Polygon, Vec2d};

use crate::error::{CliError, Result};

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| CliError::Io(path.to_path_buf(), e);
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// A numeric table destined for one CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &[&'static str]) -> Self {
        Table { file: file.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Shortest round-trip decimal for every value, so the bytes depend only on the numbers.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v}")))?;
        }
        w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
    }
}

/// SVG drawing in world coordinates; the y-axis is flipped by the outer group
/// so the embedded coordinates are the data themselves.
#[derive(Clone, Debug)]
pub struct Svg {
    lo: Vec2d,
    hi: Vec2d,
    body: Vec<String>,
}

impl Svg {
    pub fn new(frame: &[&Polygon]) -> Self {
        let mut lo = Vec2d::new(f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in frame {
            let (a, b) = p.bounds();
            lo = Vec2d::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2d::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let pad = 0.05 * (hi - lo).norm();
        Svg { lo: lo - Vec2d::new(pad, pad), hi: hi + Vec2d::new(pad, pad), body: Vec::new() }
    }

    pub fn polygon(&mut self, p: &Polygon, class: &str) {
        let pts: Vec<String> = p.vertices().iter().map(|v| format!("{},{}", v.x, v.y)).collect();
        self.body.push(format!(r#"<polygon class="{class}" points="{}"/>"#, pts.join(" ")));
    }

    pub fn ellipse(&mut self, e: &Ellipse2d, class: &str) {
        let deg = e.e_long.y.atan2(e.e_long.x).to_degrees();
        let c = e.center;
        self.body.push(format!(
            r#"<ellipse class="{class}" cx="{}" cy="{}" rx="{}" ry="{}" transform="rotate({deg} {} {})"/>"#,
            c.x, c.y, e.semi_long, e.semi_short, c.x, c.y
        ));
    }

    pub fn ray(&mut self, origin: Vec2d, direction: Vec2d, length: f64, class: &str) {
        let end = origin + direction * length;
        self.body.push(format!(r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#, origin.x, origin.y, end.x, end.y));
    }

    pub fn point(&mut self, x: Vec2d, class: &str) {
        let r = 0.004 * (self.hi - self.lo).norm();
        self.body.push(format!(r#"<circle class="{class}" cx="{}" cy="{}" r="{r}"/>"#, x.x, x.y));
    }

    pub fn finish(&self) -> String {
        let (lo, hi) = (self.lo, self.hi);
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let mut s =
            format!("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {w} {h}\" width=\"640\" height=\"{}\">\n", lo.x, lo.y, (640.0 * h / w).round());
        s += "<style>*{fill:none;stroke-width:1;vector-effect:non-scaling-stroke}\
.domain{stroke:#000}.target{stroke:#888}.section{stroke:#1f77b4}.ellipse{stroke:#d62728}\
.ray{stroke:#2ca02c}.dual{stroke:#9467bd}circle{fill:#000;stroke:none}</style>\n";
        s += &format!("<g transform=\"matrix(1 0 0 -1 0 {})\">\n", lo.y + hi.y);
        for b in &self.body {
            s += b;
            s.push('\n');
        }
        s += "</g>\n</svg>\n";
        s
    }
}
