//! Tabular CSV/JSON artifacts.
//!
//! Floats are written as `{:.16e}` in CSV (17 significant digits, enough to
//! round-trip any `f64`) and as shortest round-trip decimals in JSON. Lines
//! end in LF. Files are written to a temporary sibling and renamed into
//! place, so readers never observe a partial artifact.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::critical::GapRow;
use crate::dynamics::{LimitingProfile, TimeSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn write_csv(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}").unwrap(),
            Cell::Num(x) if x.is_finite() => write!(out, "{x:.16e}").unwrap(),
            Cell::Num(x) if x.is_nan() => out.push_str("nan"),
            Cell::Num(x) => out.push_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Cell::Text(s) if s.contains([',', '"', '\n', '\r']) => {
                write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap()
            }
            Cell::Text(s) => out.push_str(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

/// Column names plus rows of cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// `t,dP,P1,P2,Pph`.
pub fn timeseries_table(ts: &TimeSeries) -> Table {
    let mut t = Table::new(["t", "dP", "P1", "P2", "Pph"]);
    for (&time, p) in ts.times.iter().zip(&ts.values) {
        t.push(vec![
            time.into(),
            p.imbalance().into(),
            p.mode1.into(),
            p.mode2.into(),
            p.photon.into(),
        ]);
    }
    t
}

/// `v,p,pi`.
pub fn profile_table(profile: &LimitingProfile) -> Table {
    let mut t = Table::new(["v", "p", "pi"]);
    let n = profile.n_bosons;
    let sites = (0..=n).flat_map(|v| (0..=v).map(move |p| (v, p)));
    for ((v, p), &pi) in sites.zip(&profile.values) {
        t.push(vec![v.into(), p.into(), pi.into()]);
    }
    t
}

/// `class,value` with rows `S, T, E2, E0`.
pub fn classes_table(profile: &LimitingProfile) -> Table {
    let mut t = Table::new(["class", "value"]);
    for (name, value) in [
        ("S", profile.pi_s),
        ("T", profile.pi_t),
        ("E2", profile.pi_2),
        ("E0", profile.pi_0),
    ] {
        t.push(vec![name.into(), value.into()]);
    }
    t
}

/// `G,E0,...,E{D-1}`. Rows must carry full spectra.
pub fn spectrum_table(rows: &[GapRow]) -> Result<Table> {
    let dim = rows
        .first()
        .and_then(|r| r.spectrum.as_ref())
        .map_or(0, Vec::len);
    let mut t = Table::new(std::iter::once("G".to_string()).chain((0..dim).map(|k| format!("E{k}"))));
    for r in rows {
        let spec = r
            .spectrum
            .as_ref()
            .ok_or_else(|| Error::domain("spectrum table needs full spectra"))?;
        let mut row: Vec<Cell> = vec![r.g.into()];
        row.extend(spec.iter().map(|&e| Cell::from(e)));
        t.push(row);
    }
    Ok(t)
}

/// `G,dE,E0,E1`.
pub fn gap_table(rows: &[GapRow]) -> Table {
    let mut t = Table::new(["G", "dE", "E0", "E1"]);
    for r in rows {
        t.push(vec![r.g.into(), r.gap.into(), r.e0.into(), r.e1.into()]);
    }
    t
}

/// Writes `table` to `path` atomically.
pub fn emit_table(table: &Table, path: &Path, format: Format) -> Result<PathBuf> {
    write_atomic(path, table.render(format).as_bytes())?;
    Ok(path.to_path_buf())
}

pub fn emit_timeseries(ts: &TimeSeries, path: &Path, format: Format) -> Result<PathBuf> {
    emit_table(&timeseries_table(ts), path, format)
}

pub fn emit_lattice_map(profile: &LimitingProfile, path: &Path, format: Format) -> Result<PathBuf> {
    emit_table(&profile_table(profile), path, format)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Parses a JSON artifact written by [`emit_table`].
pub fn read_json_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Populations;

    fn sample_table() -> Table {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1usize.into(), 0.1.into(), "x".into()]);
        t.push(vec![2usize.into(), (-1.0 / 3.0).into(), "with,comma".into()]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample_table().to_csv();
        assert_eq!(
            csv,
            "a,b,c\n1,1.0000000000000001e-1,x\n2,-3.3333333333333331e-1,\"with,comma\"\n"
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 5e-324] {
            let mut s = String::new();
            Cell::Num(x).write_csv(&mut s);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_round_trip() {
        let t = sample_table();
        let back: Table = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn schemas() {
        let ts = TimeSeries {
            observable: "x".into(),
            meta: vec![],
            times: vec![0.0, 1.0],
            values: vec![
                Populations { photon: 0.0, mode1: 3.0, mode2: 0.0 },
                Populations { photon: 1.0, mode1: 1.0, mode2: 1.0 },
            ],
        };
        let t = timeseries_table(&ts);
        assert_eq!(t.columns, ["t", "dP", "P1", "P2", "Pph"]);
        assert_eq!(t.rows[0][1], Cell::Num(3.0));
        let rows = vec![GapRow { g: 0.5, gap: 1.0, e0: -1.0, e1: 0.0, spectrum: Some(vec![-1.0, 0.0, 2.0]) }];
        assert_eq!(spectrum_table(&rows).unwrap().columns, ["G", "E0", "E1", "E2"]);
        assert_eq!(gap_table(&rows).columns, ["G", "dE", "E0", "E1"]);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "old").unwrap();
        emit_table(&sample_table(), &path, Format::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), sample_table().to_csv());
        let json = dir.path().join("t.json");
        emit_table(&sample_table(), &json, Format::Json).unwrap();
        assert_eq!(read_json_table(&json).unwrap(), sample_table());
        let missing = dir.path().join("nope").join("t.csv");
        assert!(matches!(emit_table(&sample_table(), &missing, Format::Csv), Err(Error::Io { .. })));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
