//! Association records and their flat-file encodings.
//!
//! One record is one (album, collaborator, raw role) triple. A collaborator
//! holding several roles on the same album produces several records that
//! share the same association.

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact, ordered CSV header.
pub const CSV_HEADER: [&str; 7] = [
    "album_id",
    "album_title",
    "main_artist",
    "release_year",
    "collaborator_id",
    "collaborator_name",
    "role_raw",
];

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: invalid field `{field}`: {reason}")]
    Field {
        line: u64,
        field: &'static str,
        reason: String,
    },
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("unknown input format `{0}` (expected `csv` or `jsonl`)")]
    UnknownFormat(String),
    #[error("input is not valid UTF-8: {0}")]
    Encoding(String),
    #[error("dataset is empty: {0}")]
    EmptyDataset(&'static str),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    JsonLines,
}

impl FromStr for InputFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "jsonl" | "json-lines" | "jsonlines" | "ndjson" => Ok(InputFormat::JsonLines),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssociationRecord {
    pub album_id: String,
    pub album_title: String,
    pub main_artist: String,
    pub release_year: Option<i32>,
    pub collaborator_id: String,
    pub collaborator_name: String,
    pub role_raw: String,
}

impl AssociationRecord {
    fn validate(&self, line: u64) -> Result<(), IngestError> {
        let empty = |field| IngestError::Field {
            line,
            field,
            reason: "must not be empty".into(),
        };
        if self.album_id.is_empty() {
            return Err(empty("album_id"));
        }
        if self.collaborator_id.is_empty() {
            return Err(empty("collaborator_id"));
        }
        if self.role_raw.trim().is_empty() {
            return Err(empty("role_raw"));
        }
        if let Some(year) = self.release_year {
            if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
                return Err(IngestError::Field {
                    line,
                    field: "release_year",
                    reason: format!("{year} outside [{MIN_YEAR}, {MAX_YEAR}]"),
                });
            }
        }
        Ok(())
    }
}

/// Validated, deduplicated record collection with its derived counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub records: Vec<AssociationRecord>,
    pub album_count: usize,
    pub collaborator_count: usize,
    /// Distinct (album, collaborator) pairs.
    pub association_count: usize,
    /// Total records, i.e. (association, role) pairs.
    pub role_instance_count: usize,
    /// Identical rows dropped during ingestion.
    pub duplicates_collapsed: usize,
}

impl Dataset {
    /// Builds a dataset, dropping exact duplicate rows (first occurrence wins).
    pub fn from_records<I>(records: I) -> Self
    where
        I: IntoIterator<Item = AssociationRecord>,
    {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut duplicates = 0;
        for record in records {
            if seen.contains(&record) {
                duplicates += 1;
                continue;
            }
            seen.insert(record.clone());
            kept.push(record);
        }

        let albums: HashSet<&str> = kept.iter().map(|r| r.album_id.as_str()).collect();
        let collaborators: HashSet<&str> =
            kept.iter().map(|r| r.collaborator_id.as_str()).collect();
        let associations: HashSet<(&str, &str)> = kept
            .iter()
            .map(|r| (r.album_id.as_str(), r.collaborator_id.as_str()))
            .collect();

        Dataset {
            album_count: albums.len(),
            collaborator_count: collaborators.len(),
            association_count: associations.len(),
            role_instance_count: kept.len(),
            duplicates_collapsed: duplicates,
            records: kept,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records sorted into a canonical order, for order-insensitive comparison.
    pub fn sorted_records(&self) -> Vec<AssociationRecord> {
        let mut records = self.records.clone();
        records.sort();
        records
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub collaborators_per_album: f64,
    pub roles_per_collaborator_in_album: f64,
}

pub fn dataset_summary(d: &Dataset) -> Result<DatasetSummary, IngestError> {
    if d.album_count == 0 {
        return Err(IngestError::EmptyDataset("no albums"));
    }
    if d.association_count == 0 {
        return Err(IngestError::EmptyDataset("no associations"));
    }
    Ok(DatasetSummary {
        collaborators_per_album: d.association_count as f64 / d.album_count as f64,
        roles_per_collaborator_in_album: d.role_instance_count as f64 / d.association_count as f64,
    })
}

pub fn parse_records<R: Read>(mut input: R, format: InputFormat) -> Result<Dataset, IngestError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes).map_err(|e| IngestError::Encoding(e.to_string()))?;
    match format {
        InputFormat::Csv => parse_csv(&text),
        InputFormat::JsonLines => parse_json_lines(&text),
    }
}

/// Parses using a textual format tag (`csv`, `jsonl`).
pub fn parse_records_tagged<R: Read>(input: R, format: &str) -> Result<Dataset, IngestError> {
    parse_records(input, format.parse()?)
}

fn parse_year(raw: &str, line: u64) -> Result<Option<i32>, IngestError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<i32>().map(Some).map_err(|e| IngestError::Field {
        line,
        field: "release_year",
        reason: format!("`{raw}` is not an integer year ({e})"),
    })
}

fn parse_csv(text: &str) -> Result<Dataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader.headers()?.clone();
    if header.is_empty() && text.trim().is_empty() {
        return Err(IngestError::Row {
            line: 1,
            reason: "missing CSV header".into(),
        });
    }
    let found: Vec<&str> = header.iter().collect();
    if found != CSV_HEADER {
        return Err(IngestError::Row {
            line: 1,
            reason: format!(
                "unexpected header `{}`, expected `{}`",
                found.join(","),
                CSV_HEADER.join(",")
            ),
        });
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != CSV_HEADER.len() {
            return Err(IngestError::Row {
                line,
                reason: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
            });
        }
        let record = AssociationRecord {
            album_id: row[0].to_string(),
            album_title: row[1].to_string(),
            main_artist: row[2].to_string(),
            release_year: parse_year(&row[3], line)?,
            collaborator_id: row[4].to_string(),
            collaborator_name: row[5].to_string(),
            role_raw: row[6].to_string(),
        };
        record.validate(line)?;
        records.push(record);
    }
    Ok(Dataset::from_records(records))
}

fn json_string(
    obj: &serde_json::Map<String, serde_json::Value>,
    field: &'static str,
    line: u64,
) -> Result<String, IngestError> {
    match obj.get(field) {
        Some(serde_json::Value::String(s)) => Ok(s.clone()),
        Some(serde_json::Value::Number(n)) => Ok(n.to_string()),
        Some(other) => Err(IngestError::Field {
            line,
            field,
            reason: format!("expected string, found {other}"),
        }),
        None => Err(IngestError::Field {
            line,
            field,
            reason: "missing".into(),
        }),
    }
}

fn parse_json_lines(text: &str) -> Result<Dataset, IngestError> {
    let mut records = Vec::new();
    for (idx, raw_line) in text.as_bytes().lines().enumerate() {
        let line = idx as u64 + 1;
        let raw_line = raw_line?;
        if raw_line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&raw_line).map_err(|e| IngestError::Row {
                line,
                reason: format!("invalid JSON: {e}"),
            })?;
        let obj = value.as_object().ok_or_else(|| IngestError::Row {
            line,
            reason: "expected a JSON object".into(),
        })?;
        let release_year = match obj.get("release_year") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::Number(n)) => {
                let year = n.as_i64().ok_or_else(|| IngestError::Field {
                    line,
                    field: "release_year",
                    reason: format!("`{n}` is not an integer year"),
                })?;
                Some(i32::try_from(year).map_err(|_| IngestError::Field {
                    line,
                    field: "release_year",
                    reason: format!("{year} out of range"),
                })?)
            }
            Some(serde_json::Value::String(s)) => parse_year(s, line)?,
            Some(other) => {
                return Err(IngestError::Field {
                    line,
                    field: "release_year",
                    reason: format!("expected integer, found {other}"),
                })
            }
        };
        let record = AssociationRecord {
            album_id: json_string(obj, "album_id", line)?,
            album_title: json_string(obj, "album_title", line)?,
            main_artist: json_string(obj, "main_artist", line)?,
            release_year,
            collaborator_id: json_string(obj, "collaborator_id", line)?,
            collaborator_name: json_string(obj, "collaborator_name", line)?,
            role_raw: json_string(obj, "role_raw", line)?,
        };
        record.validate(line)?;
        records.push(record);
    }
    Ok(Dataset::from_records(records))
}

/// Writes the dataset in the ingest CSV schema. Missing years become empty fields.
pub fn write_csv<W: Write>(d: &Dataset, out: W) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in &d.records {
        let year = r.release_year.map(|y| y.to_string()).unwrap_or_default();
        writer.write_record([
            r.album_id.as_str(),
            r.album_title.as_str(),
            r.main_artist.as_str(),
            year.as_str(),
            r.collaborator_id.as_str(),
            r.collaborator_name.as_str(),
            r.role_raw.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json_lines<W: Write>(d: &Dataset, mut out: W) -> Result<(), IngestError> {
    for r in &d.records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
