//! Signature tables (CSV, the embedding-export schema plus `id,source`) and
//! prototype tables (JSON).

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use shapesig::analysis::{embedding_header, format_sig9};
use shapesig::signature::Prototype;
use shapesig::{
    DistanceBucket, FitConfig, PrototypeTable64, Signature, SignatureConfig, SignatureSource, SymmetryMode,
    View,
};

use crate::error::{CliError, Location, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureRow {
    pub label: String,
    pub bucket: Option<DistanceBucket>,
    pub values: Vec<f64>,
    pub id: Option<String>,
    pub source: Option<SignatureSource>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTable {
    pub views: [View; 3],
    pub per_view: usize,
    pub rows: Vec<SignatureRow>,
}

/// Streams rows to a CSV sink. With `extras`, rows end in `id,source`.
pub struct TableWriter<W: Write> {
    inner: csv::Writer<W>,
    extras: bool,
}

impl<W: Write> TableWriter<W> {
    pub fn new(sink: W, views: &[View; 3], per_view: usize, extras: bool) -> csv::Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        let mut header: Vec<String> = embedding_header(views, per_view).split(',').map(String::from).collect();
        if extras {
            header.extend(["id".into(), "source".into()]);
        }
        inner.write_record(&header)?;
        Ok(Self { inner, extras })
    }

    pub fn write(&mut self, row: &SignatureRow) -> csv::Result<()> {
        let mut fields = Vec::with_capacity(row.values.len() + 4);
        fields.push(row.label.clone());
        fields.push(row.bucket.map_or("", |b| b.name()).to_string());
        fields.extend(row.values.iter().map(|v| format_sig9(*v)));
        if self.extras {
            fields.push(row.id.clone().unwrap_or_default());
            fields.push(row.source.map_or("", |s| s.name()).to_string());
        }
        self.inner.write_record(&fields)
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| e.into_error())
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let at = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        kind => CliError::parse(path, Location::Line(at), format!("{kind:?}")),
    }
}

fn coefficient_column(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let view = chars.next().filter(|c| matches!(c, 'b' | 's' | 'f'))?;
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((view, rest.parse().ok()?))
}

/// Reads a signature table or an embedding export; columns are found by name.
pub fn read_table<R: Read>(reader: R, path: &Path) -> Result<SignatureTable> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let find = |name: &str| header.iter().position(|h| h == name);
    let label_col = find("label")
        .ok_or_else(|| CliError::parse(path, Location::Line(1), "missing `label` column"))?;
    let (bucket_col, id_col, source_col) = (find("dist_bucket"), find("id"), find("source"));

    let coeffs: Vec<(usize, char, usize)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| coefficient_column(h).map(|(v, j)| (i, v, j)))
        .collect();
    let per_view = coeffs.len() / 3;
    let mut views = Vec::new();
    for (_, v, _) in &coeffs {
        if !views.contains(v) {
            views.push(*v);
        }
    }
    let layout_ok = per_view > 0
        && views.len() == 3
        && coeffs
            .iter()
            .enumerate()
            .all(|(k, &(_, v, j))| v == views[k / per_view] && j == k % per_view);
    if !layout_ok {
        return Err(CliError::parse(
            path,
            Location::Line(1),
            "coefficient columns must be b0.., s0.., f0.. in blocks of equal length",
        ));
    }
    let view_of = |c: char| View::ALL.into_iter().find(|v| v.prefix() == c).expect("known prefix");
    let views = [view_of(views[0]), view_of(views[1]), view_of(views[2])];

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |msg: String| CliError::parse(path, Location::Line(line), msg);
        let label = record.get(label_col).unwrap_or("").to_string();
        if label.is_empty() {
            return Err(bad("empty label".into()));
        }
        let bucket = match bucket_col.and_then(|c| record.get(c)).unwrap_or("") {
            "" => None,
            s => Some(DistanceBucket::parse(s).ok_or_else(|| bad(format!("unknown distance bucket `{s}`")))?),
        };
        let values = coeffs
            .iter()
            .map(|&(c, _, _)| {
                let s = record.get(c).unwrap_or("");
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("invalid coefficient `{s}` in column {}", &header[c])))
            })
            .collect::<Result<Vec<_>>>()?;
        let id = id_col.and_then(|c| record.get(c)).filter(|s| !s.is_empty()).map(String::from);
        let source = match source_col.and_then(|c| record.get(c)).unwrap_or("") {
            "" => None,
            "computed" => Some(SignatureSource::Computed),
            "prototype" => Some(SignatureSource::Prototype),
            s => return Err(bad(format!("unknown source `{s}`"))),
        };
        rows.push(SignatureRow {
            label,
            bucket,
            values,
            id,
            source,
        });
    }
    Ok(SignatureTable { views, per_view, rows })
}

impl SignatureTable {
    pub fn signatures(&self) -> Result<Vec<Signature<f64>>> {
        self.rows
            .iter()
            .map(|r| Ok(Signature::new(r.values.clone(), self.per_view)?))
            .collect()
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
enum SymmetryName {
    Planar,
    Full3d,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
enum ViewName {
    Bird,
    Side,
    Front,
}

impl From<View> for ViewName {
    fn from(v: View) -> Self {
        match v {
            View::Bird => ViewName::Bird,
            View::Side => ViewName::Side,
            View::Front => ViewName::Front,
        }
    }
}

impl From<ViewName> for View {
    fn from(v: ViewName) -> Self {
        match v {
            ViewName::Bird => View::Bird,
            ViewName::Side => View::Side,
            ViewName::Front => View::Front,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    symmetry: SymmetryName,
    degree: usize,
    keep: usize,
    min_points: usize,
    n_angles: usize,
    views: [ViewName; 3],
    clip_to_box: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    count: usize,
    signature: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrototypeDoc {
    config: ConfigDoc,
    classes: BTreeMap<String, ClassDoc>,
    /// Degenerate samples seen per class, including omitted classes.
    #[serde(default)]
    degenerate: BTreeMap<String, usize>,
}

impl From<&SignatureConfig> for ConfigDoc {
    fn from(c: &SignatureConfig) -> Self {
        Self {
            symmetry: match c.symmetry {
                SymmetryMode::Planar => SymmetryName::Planar,
                SymmetryMode::Full3d => SymmetryName::Full3d,
            },
            degree: c.fit.degree,
            keep: c.fit.keep,
            min_points: c.min_points,
            n_angles: c.n_angles,
            views: c.views.map(ViewName::from),
            clip_to_box: c.clip_to_box,
        }
    }
}

impl From<&ConfigDoc> for SignatureConfig {
    fn from(d: &ConfigDoc) -> Self {
        Self {
            symmetry: match d.symmetry {
                SymmetryName::Planar => SymmetryMode::Planar,
                SymmetryName::Full3d => SymmetryMode::Full3d,
            },
            fit: FitConfig {
                degree: d.degree,
                keep: d.keep,
            },
            n_angles: d.n_angles,
            min_points: d.min_points,
            views: d.views.map(View::from),
            clip_to_box: d.clip_to_box,
        }
    }
}

/// Signatures are written with shortest round-trip formatting, so a table
/// read back is identical to the one written.
pub fn write_prototypes<W: Write>(table: &PrototypeTable64, sink: W) -> serde_json::Result<()> {
    let doc = PrototypeDoc {
        config: table.config().into(),
        classes: table
            .classes()
            .map(|(label, p)| {
                let class = ClassDoc {
                    count: p.count,
                    signature: p.signature.values().to_vec(),
                };
                (label.to_string(), class)
            })
            .collect(),
        degenerate: table.degenerate_counts().clone(),
    };
    serde_json::to_writer_pretty(sink, &doc)
}

pub fn read_prototypes<R: Read>(reader: R, path: &Path) -> Result<PrototypeTable64> {
    let doc: PrototypeDoc = serde_json::from_reader(reader).map_err(|e| {
        if e.is_io() {
            CliError::io(path, e.into())
        } else {
            CliError::parse(path, Location::Line(e.line() as u64), e.to_string())
        }
    })?;
    let config = SignatureConfig::from(&doc.config);
    config.validate()?;
    let mut classes = BTreeMap::new();
    for (label, class) in doc.classes {
        let signature = Signature::new(class.signature, config.fit.keep)
            .map_err(|e| CliError::Validation(format!("{}: prototype `{label}`: {e}", path.display())))?;
        classes.insert(
            label,
            Prototype {
                signature,
                count: class.count,
            },
        );
    }
    Ok(PrototypeTable64::from_parts(config, classes, doc.degenerate)?)
}
