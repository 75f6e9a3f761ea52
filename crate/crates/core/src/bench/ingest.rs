//! CSV ingestion of `oid,x,y,t` rows.
//!
//! Lines starting with `#` and blank lines are skipped, a leading header row
//! is optional, and CRLF endings are accepted. Malformed rows are rejected
//! individually with their line number.

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;

use crate::error::{HstiError, Result};
use crate::geo::{normalize_dataset, RawRecord, STObject, WorldBounds};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejected {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct IngestReport {
    pub objects: Vec<STObject>,
    pub rejected: Vec<Rejected>,
}

impl IngestReport {
    pub fn rows(&self) -> usize {
        self.objects.len()
    }
}

fn parse_row(line: &str) -> std::result::Result<RawRecord, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    }
    let oid = fields[0].parse::<u64>().map_err(|e| format!("bad oid {:?}: {e}", fields[0]))?;
    let num = |name: &str, s: &str| -> std::result::Result<f64, String> {
        let v = s.parse::<f64>().map_err(|e| format!("bad {name} {s:?}: {e}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite {name}"))
        }
    };
    Ok(RawRecord { oid, x: num("x", fields[1])?, y: num("y", fields[2])?, t: num("t", fields[3])? })
}

pub fn ingest_reader(reader: impl BufRead, world: &WorldBounds) -> Result<IngestReport> {
    let mut raw = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = HashSet::new();
    let mut first_data_line = true;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let is_header = first_data_line && line.trim_start().to_ascii_lowercase().starts_with("oid");
        first_data_line = false;
        if is_header {
            continue;
        }
        match parse_row(line) {
            Ok(r) if !seen.insert(r.oid) => {
                rejected.push(Rejected { line: lineno, reason: format!("duplicate oid {}", r.oid) })
            }
            Ok(r) => raw.push(r),
            Err(reason) => rejected.push(Rejected { line: lineno, reason }),
        }
    }
    let objects = normalize_dataset(&raw, world)?;
    Ok(IngestReport { objects, rejected })
}

pub fn ingest(path: impl AsRef<Path>, world: &WorldBounds) -> Result<IngestReport> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| HstiError::Io(format!("{}: {e}", path.as_ref().display())))?;
    ingest_reader(std::io::BufReader::new(file), world)
}
