//! Reports, exit codes and file artifacts.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use resonance_atlas::AtlasError;
use serde::Serialize;
use serde_json::Value;

/// Why a command stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad flags, config or parameter values.
    Usage(String),
    /// The solver gave up.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Numerical(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<AtlasError> for Failure {
    fn from(e: AtlasError) -> Self {
        match e {
            AtlasError::Domain(_) | AtlasError::Degenerate(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// The machine-readable result of every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub inputs: Value,
    pub outputs: Value,
    pub residuals: Value,
    pub version: &'static str,
}

impl Report {
    pub fn new(inputs: Value, outputs: Value, residuals: Value) -> Self {
        Self {
            inputs,
            outputs,
            residuals,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// What a command hands back to `main`: the report, a human summary, and
/// a failure that should still be reported alongside partial results.
pub struct Outcome {
    pub report: Report,
    pub lines: Vec<String>,
    pub failure: Option<Failure>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Failure::Usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))
}

/// CSV text with `header` and one row per entry; floats use the shortest
/// representation that round-trips.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

/// Writes every artifact, returning the paths in order.
pub fn write_all(files: &[(PathBuf, Vec<u8>)]) -> Result<Vec<PathBuf>, Failure> {
    for (p, bytes) in files {
        write_atomic(p, bytes)?;
    }
    Ok(files.iter().map(|(p, _)| p.clone()).collect())
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A bare polyline plot: a frame, the extreme values on each axis and one
/// line per series.
pub fn svg_plot(series: &[Vec<(f64, f64)>], x_label: &str, y_label: &str) -> String {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let pts = series
        .iter()
        .flatten()
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let widen = |a: f64, b: f64| {
        if b > a {
            (a, b)
        } else {
            (a - 0.5 * a.abs().max(1.0), b + 0.5 * b.abs().max(1.0))
        }
    };
    let (x0, x1) = widen(x0, x1);
    let (y0, y1) = widen(y0, y1);
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    s += &format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - 2.0 * m,
        h - 2.0 * m
    );
    let text = |x: f64, y: f64, anchor: &str, t: &str| {
        format!("<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"12\" text-anchor=\"{anchor}\">{t}</text>\n")
    };
    s += &text(m, h - m + 16.0, "start", &format!("{x0:.6}"));
    s += &text(w - m, h - m + 16.0, "end", &format!("{x1:.6}"));
    s += &text(m - 4.0, h - m, "end", &format!("{y0:.6}"));
    s += &text(m - 4.0, m + 12.0, "end", &format!("{y1:.6}"));
    s += &text(w / 2.0, h - 16.0, "middle", x_label);
    s += &text(16.0, h / 2.0, "middle", y_label);
    for (k, line) in series.iter().enumerate() {
        let coords: Vec<String> = line
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        s += &format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            COLORS[k % COLORS.len()],
            coords.join(" ")
        );
    }
    s += "</svg>\n";
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_follow_header() {
        let b = csv_bytes(&["a", "b"], vec![vec!["1".into(), "-2.5".into()]]);
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n1,-2.5\n");
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let s = svg_plot(&[vec![(0.0, 0.0), (1.0, 1.0)], vec![(0.5, 2.0)]], "x", "y");
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
    }

    #[test]
    fn flat_series_still_plots() {
        let s = svg_plot(&[vec![(1.0, 3.0), (1.0, 3.0)]], "x", "y");
        assert!(!s.contains("NaN"));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            Failure::from(AtlasError::Domain("x".into())).exit_code(),
            ExitCode::from(2)
        );
        assert_eq!(
            Failure::from(AtlasError::TrackingLost { param: 0.5 }).exit_code(),
            ExitCode::from(3)
        );
    }
}
