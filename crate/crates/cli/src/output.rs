//! Artifact persistence: atomic writes, CSV and optional SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use logsob::experiments::PlotTable;
use tempfile::NamedTempFile;

use crate::error::CliError;

/// Environment variable overriding the output directory of the config.
pub const OUT_DIR_ENV: &str = "LOGSOB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "logsob-out";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(&path))?;
    tmp.as_file().sync_all().map_err(io_err(&path))?;
    tmp.persist(&path).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e.error,
    })?;
    Ok(path)
}

pub fn table_csv(table: &PlotTable) -> Vec<u8> {
    let mut out = Vec::new();
    table.write_csv(&mut out).expect("writing to a Vec cannot fail");
    out
}

/// RFC 4180 CSV of string cells.
pub fn text_csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let field = |s: &str| {
        if s.contains([',', '"', '\n', '\r']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let mut out = String::new();
    let line = |cells: Vec<String>| cells.join(",") + "\r\n";
    out += &line(header.iter().map(|h| field(h)).collect());
    for r in rows {
        out += &line(r.iter().map(|c| field(c)).collect());
    }
    out.into_bytes()
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64> + Clone) -> Option<Axis> {
        let finite = values.filter(|v| v.is_finite());
        let lo = finite.clone().fold(f64::INFINITY, f64::min);
        let hi = finite.fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            return None;
        }
        let log = lo > 0.0 && hi / lo > 50.0;
        let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Some(Axis { lo, hi, log })
    }

    fn map(&self, v: f64, from: f64, to: f64) -> Option<f64> {
        let v = if self.log {
            (v > 0.0).then(|| v.log10())?
        } else {
            v
        };
        v.is_finite().then(|| from + (v - self.lo) / (self.hi - self.lo) * (to - from))
    }

    fn label(&self, t: f64) -> String {
        let v = self.lo + t * (self.hi - self.lo);
        let v = if self.log { 10f64.powf(v) } else { v };
        format!("{v:.3e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot of every column against the first; `metadata` (the producing
/// config) is embedded verbatim.
pub fn table_svg(table: &PlotTable, metadata: &str) -> Vec<u8> {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = write!(s, "<metadata>{}</metadata>", escape(metadata));
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(&table.name)
    );
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN / 2.0 + 10.0);
    let xs = table.rows.iter().map(|r| r[0]);
    let ys = table.rows.iter().flat_map(|r| r[1..].iter().copied());
    if let (Some(ax), Some(ay)) = (Axis::fit(xs), Axis::fit(ys)) {
        let _ = write!(s, r#"<path d="M{x0} {y1}V{y0}H{x1}" fill="none" stroke="black"/>"#);
        for t in [0.0, 0.5, 1.0] {
            let _ = write!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                x0 + t * (x1 - x0),
                y0 + 16.0,
                ax.label(t)
            );
            let _ = write!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                x0 - 4.0,
                y0 + t * (y1 - y0) + 4.0,
                ay.label(t)
            );
        }
        let _ = write!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}{}</text>"#,
            (x0 + x1) / 2.0,
            H - 12.0,
            escape(&table.columns[0]),
            if ax.log { " (log)" } else { "" }
        );
        for (c, name) in table.columns.iter().enumerate().skip(1) {
            let colour = COLOURS[(c - 1) % COLOURS.len()];
            let points: Vec<String> = table
                .rows
                .iter()
                .filter_map(|r| Some(format!("{:.2},{:.2}", ax.map(r[0], x0, x1)?, ay.map(r[c], y0, y1)?)))
                .collect();
            let _ = write!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                points.join(" ")
            );
            let _ = write!(
                s,
                r#"<text x="{}" y="{}" fill="{colour}">{}{}</text>"#,
                x0 + 8.0,
                y1 + 14.0 * c as f64,
                escape(name),
                if ay.log { " (log)" } else { "" }
            );
        }
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}
