//! Reading and writing distance matrices, map words, circles and charts.
//!
//! Distance matrices come as JSON
//! `{"points": [...], "infinite_point": id | null, "distances": [[...]]}`
//! with entries that are numbers or `"inf"`, or as CSV with a header row of
//! ids followed by the rows of the table.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::metric::{parse_token, validate, ExtDistance, ExtendedMetricSpace, ValidationReport};
use crate::model::{CircleOrLine, MapWord};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFormat {
    Json,
    Csv,
}

impl SpaceFormat {
    /// From the file extension; anything but `.csv` is read as JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => SpaceFormat::Csv,
            _ => SpaceFormat::Json,
        }
    }
}

/// Failure to load a space: unreadable or malformed input, or a table that
/// parses but violates the extended-metric axioms.
#[derive(Debug)]
pub enum LoadError {
    Parse(Error),
    Invalid(Box<ValidationReport>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Parse(e) => write!(f, "{e}"),
            LoadError::Invalid(r) => write!(f, "not an extended metric space: {} violation(s)", r.violations.len()),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<Error> for LoadError {
    fn from(e: Error) -> Self {
        LoadError::Parse(e)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SpaceJson {
    points: Vec<String>,
    #[serde(default)]
    infinite_point: Option<String>,
    distances: Vec<Vec<ExtDistance>>,
}

pub fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_space_json(text: &str) -> Result<ExtendedMetricSpace, Error> {
    let raw: SpaceJson = serde_json::from_str(text).map_err(|e| Error::Input(format!("bad space JSON: {e}")))?;
    ExtendedMetricSpace::new(raw.points, raw.distances, raw.infinite_point.as_deref())
}

/// CSV: header row of ids, then one row per point. The infinitely remote
/// point is the unique row whose off-diagonal entries are all `inf`.
pub fn parse_space_csv(text: &str) -> Result<ExtendedMetricSpace, Error> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let ids: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Input(format!("bad CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::with_capacity(ids.len());
    for record in reader.records() {
        let record = record.map_err(|e| Error::Input(format!("bad CSV row: {e}")))?;
        rows.push(record.iter().map(parse_token).collect::<Result<Vec<_>, _>>()?);
    }
    let n = ids.len();
    let candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            n > 1
                && rows.get(i).is_some_and(|row: &Vec<ExtDistance>| {
                    row.len() == n && row.iter().enumerate().all(|(j, d)| j == i || d.is_infinite())
                })
        })
        .collect();
    let omega = match candidates.as_slice() {
        [only] => Some(ids[*only].clone()),
        _ => None,
    };
    ExtendedMetricSpace::new(ids, rows, omega.as_deref())
}

pub fn parse_space(text: &str, format: SpaceFormat) -> Result<ExtendedMetricSpace, Error> {
    match format {
        SpaceFormat::Json => parse_space_json(text),
        SpaceFormat::Csv => parse_space_csv(text),
    }
}

/// Parses without checking the axioms.
pub fn read_space(path: &Path) -> Result<ExtendedMetricSpace, Error> {
    parse_space(&read_text(path)?, SpaceFormat::from_path(path))
}

/// Parses and validates.
pub fn load_space(path: &Path, tol: Tolerance) -> Result<ExtendedMetricSpace, LoadError> {
    let space = read_space(path)?;
    let report = validate(&space, tol);
    if report.is_valid() {
        Ok(space)
    } else {
        Err(LoadError::Invalid(Box::new(report)))
    }
}

pub fn space_to_json(space: &ExtendedMetricSpace) -> String {
    let raw = SpaceJson {
        points: space.ids().to_vec(),
        infinite_point: space.infinite_point().map(str::to_string),
        distances: space.rows(),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

pub fn space_to_csv(space: &ExtendedMetricSpace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(space.ids()).expect("in-memory write");
    for row in space.rows() {
        w.write_record(row.iter().map(|d| d.to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
}

pub fn read_map_word(path: &Path) -> Result<MapWord, Error> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Input(format!("bad map word JSON: {e}")))
}

/// A single circle object or a list of them.
pub fn read_circles(path: &Path) -> Result<Vec<CircleOrLine>, Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        Many(Vec<CircleOrLine>),
        One(CircleOrLine),
    }
    let text = read_text(path)?;
    match serde_json::from_str(&text) {
        Ok(OneOrMany::Many(v)) => Ok(v),
        Ok(OneOrMany::One(c)) => Ok(vec![c]),
        Err(_) => {
            // re-parse as a single object for a precise message
            serde_json::from_str::<CircleOrLine>(&text)
                .map(|c| vec![c])
                .map_err(|e| Error::Input(format!("bad circle JSON: {e}")))
        }
    }
}
