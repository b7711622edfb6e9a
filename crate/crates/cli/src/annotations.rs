//! Annotation files: a JSON array of object records.
//!
//! ```json
//! [{"id": 7, "label": "car", "center": [12.0, -4.0, 0.85],
//!   "size": [1.9, 4.6, 1.7], "yaw": 0.4, "frame": "000123",
//!   "split": "train", "points": "clouds/7.bin"}]
//! ```
//!
//! `size` is `[width, length, height]` or an object with those names.
//! `split` and `points` are optional; `points` is relative to the annotation
//! file's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use shapesig::{Box3D64, BoxSize, Point3};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub id: String,
    pub label: String,
    pub bbox: Box3D64,
    pub frame: String,
    pub split: Option<String>,
    /// Explicit point file, already resolved against the annotation directory.
    pub points: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Key {
    Text(String),
    Number(serde_json::Number),
}

impl Key {
    fn into_string(self) -> String {
        match self {
            Key::Text(s) => s,
            Key::Number(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSize {
    Ordered([f64; 3]),
    Named { width: f64, length: f64, height: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: Key,
    label: String,
    center: [f64; 3],
    size: RawSize,
    yaw: f64,
    frame: Key,
    #[serde(default)]
    split: Option<String>,
    #[serde(default)]
    points: Option<PathBuf>,
}

pub fn parse_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_annotation_text(&text, base).map_err(|e| match e {
        CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_annotation_text(text: &str, base: &Path) -> Result<Vec<AnnotationRecord>> {
    let values: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| {
        CliError::Validation(format!("line {}: expected a JSON array of records: {e}", e.line()))
    })?;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(values.len());
    for (i, value) in values.into_iter().enumerate() {
        let hint = value.get("id").map(|v| v.to_string());
        let name = match &hint {
            Some(id) => format!("record {i} (id {id})"),
            None => format!("record {i}"),
        };
        let rec = record_from(value, base).map_err(|msg| CliError::Validation(format!("{name}: {msg}")))?;
        if !seen.insert(rec.id.clone()) {
            return Err(CliError::Validation(format!("{name}: duplicate id")));
        }
        records.push(rec);
    }
    Ok(records)
}

fn record_from(value: serde_json::Value, base: &Path) -> std::result::Result<AnnotationRecord, String> {
    let raw: RawRecord = serde_json::from_value(value).map_err(|e| e.to_string())?;
    if raw.label.trim().is_empty() {
        return Err("label is empty".into());
    }
    let size = match raw.size {
        RawSize::Ordered([width, length, height]) | RawSize::Named { width, length, height } => BoxSize {
            width,
            length,
            height,
        },
    };
    let [x, y, z] = raw.center;
    let bbox = Box3D64::new(Point3::new(x, y, z), size, raw.yaw).map_err(|e| e.to_string())?;
    Ok(AnnotationRecord {
        id: raw.id.into_string(),
        label: raw.label,
        bbox,
        frame: raw.frame.into_string(),
        split: raw.split,
        points: raw.points.map(|p| base.join(p)),
    })
}

/// The record with `id`, or the only record when `id` is absent.
pub fn select<'a>(records: &'a [AnnotationRecord], id: Option<&str>) -> Result<&'a AnnotationRecord> {
    match id {
        Some(id) => records
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| CliError::Validation(format!("no annotation with id `{id}`"))),
        None if records.len() == 1 => Ok(&records[0]),
        None => Err(CliError::Validation(format!(
            "{} annotations present; choose one with --id",
            records.len()
        ))),
    }
}
