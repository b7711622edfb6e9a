use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use shapesig::chebyshev::{DEFAULT_DEGREE, DEFAULT_KEEP};
use shapesig::signature::DEFAULT_MIN_POINTS;
use shapesig::{
    build_prototypes, compute_signature, perturbation_sensitivity, resolve_signature, silhouette_separation,
    DistanceBucket, FitConfig, LabeledObject, LabeledSignatureSet, PerturbationSpec, PointCloud64,
    PrototypeTable64, Signature, SignatureConfig, SignatureOutcome, SignatureSource, SymmetryMode,
};

use crate::annotations::{parse_annotations, select, AnnotationRecord};
use crate::error::{CliError, Result};
use crate::points::parse_points;
use crate::tables::{read_prototypes, read_table, write_prototypes, SignatureRow, SignatureTable, TableWriter};

/// Objects handed to the worker pool per round; rows are written between rounds.
const BATCH_CHUNK: usize = 512;

#[derive(Parser, Debug)]
#[command(name = "shapesig", version, about = "Chebyshev hull signatures for annotated lidar objects")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signature of one object, printed as 3k numbers
    Compute(ComputeArgs),
    /// Signature table for every object of a dataset
    Batch(BatchArgs),
    /// Per-class mean signatures, used for degenerate objects
    Prototypes(PrototypeArgs),
    /// Silhouette report for a signature table
    EvalSeparation(TableArgs),
    /// Signature change under random jitter and point dropout
    Sensitivity(SensitivityArgs),
    /// Signature table reduced to the plotting schema
    ExportEmbedding(TableArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Planar,
    Full3d,
}

#[derive(Args, Debug, Clone)]
pub struct SignatureArgs {
    /// How the unseen half of the object is completed
    #[arg(long, value_enum, default_value_t = Symmetry::Planar)]
    pub sym: Symmetry,
    /// Chebyshev fit degree
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub degree: usize,
    /// Coefficients kept per view
    #[arg(long, default_value_t = DEFAULT_KEEP)]
    pub k: usize,
    /// Objects with at most this many points use their class prototype
    #[arg(long, default_value_t = DEFAULT_MIN_POINTS)]
    pub min_points: usize,
    /// Drop points outside the box grown by 10 %
    #[arg(long)]
    pub clip: bool,
}

impl SignatureArgs {
    pub fn config(&self) -> SignatureConfig {
        SignatureConfig {
            symmetry: match self.sym {
                Symmetry::Planar => SymmetryMode::Planar,
                Symmetry::Full3d => SymmetryMode::Full3d,
            },
            fit: FitConfig {
                degree: self.degree,
                keep: self.k,
            },
            min_points: self.min_points,
            clip_to_box: self.clip,
            ..SignatureConfig::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Point file (.csv or .bin)
    #[arg(long)]
    pub points: PathBuf,
    /// Annotation file
    #[arg(long)]
    pub ann: PathBuf,
    /// Object id; optional when the file holds one record
    #[arg(long)]
    pub id: Option<String>,
    /// Prototype table for degenerate objects
    #[arg(long)]
    pub prototypes: Option<PathBuf>,
    /// Write here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sig: SignatureArgs,
}

#[derive(Args, Debug)]
pub struct DatasetArgs {
    /// Annotation file
    #[arg(long)]
    pub ann: PathBuf,
    /// Directory holding `<id>.csv` or `<id>.bin` per object
    #[arg(long)]
    pub points: PathBuf,
    /// Only use records with this split
    #[arg(long)]
    pub split: Option<String>,
    /// Worker threads (default: one per core)
    #[arg(long, value_parser = parse_jobs)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Prototype table for degenerate objects
    #[arg(long)]
    pub prototypes: Option<PathBuf>,
    /// Signature table to write (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sig: SignatureArgs,
}

#[derive(Args, Debug)]
pub struct PrototypeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Prototype table to write (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sig: SignatureArgs,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Signature table (CSV)
    #[arg(long)]
    pub table: PathBuf,
    /// Write here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SensitivityArgs {
    /// Point file (.csv or .bin)
    #[arg(long)]
    pub points: PathBuf,
    /// Annotation file
    #[arg(long)]
    pub ann: PathBuf,
    #[arg(long)]
    pub id: Option<String>,
    /// Standard deviation of the coordinate jitter, in meters
    #[arg(long, default_value_t = 0.02)]
    pub sigma: f64,
    /// Fraction of points dropped per trial
    #[arg(long, default_value_t = 0.0)]
    pub drop: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_jobs)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sig: SignatureArgs,
}

fn parse_jobs(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("`{s}` is not a positive worker count")),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Compute(a) => compute(a, out, err),
        Command::Batch(a) => batch(a, out, err),
        Command::Prototypes(a) => prototypes(a, out, err),
        Command::EvalSeparation(a) => eval_separation(a, out),
        Command::Sensitivity(a) => sensitivity(a, out),
        Command::ExportEmbedding(a) => export_embedding(a, out),
    }
}

/// Runs `body` against `--out` when given, else against `out`, mapping write
/// failures to I/O errors on the right path.
fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|e| CliError::io(p, e))
        }
        None => {
            body(out)?;
            out.flush().map_err(stdout_error)
        }
    }
}

fn stdout_error(e: io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))
}

fn load_prototypes(path: &Path, cfg: &SignatureConfig) -> Result<PrototypeTable64> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let table = read_prototypes(BufReader::new(file), path)?;
    if table.config() != cfg {
        return Err(CliError::Validation(format!(
            "{}: prototype table was built with a different signature configuration",
            path.display()
        )));
    }
    Ok(table)
}

fn dataset(args: &DatasetArgs) -> Result<Vec<AnnotationRecord>> {
    let mut records = parse_annotations(&args.ann)?;
    if let Some(split) = &args.split {
        records.retain(|r| r.split.as_deref() == Some(split.as_str()));
    }
    Ok(records)
}

/// The record's point file: its `points` entry, else `<id>.csv` or `<id>.bin`.
fn point_file(rec: &AnnotationRecord, dir: &Path) -> Result<PathBuf> {
    if let Some(p) = &rec.points {
        return Ok(p.clone());
    }
    ["csv", "bin"]
        .iter()
        .map(|ext| dir.join(format!("{}.{ext}", rec.id)))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            CliError::io(
                dir.join(format!("{}.{{csv,bin}}", rec.id)),
                io::Error::new(io::ErrorKind::NotFound, "no point file for this object"),
            )
        })
}

/// Own signature, or the class prototype when the object is degenerate.
fn signature_for(
    rec: &AnnotationRecord,
    cloud: &PointCloud64,
    cfg: &SignatureConfig,
    protos: Option<&PrototypeTable64>,
) -> Result<(Signature<f64>, SignatureSource)> {
    let context = |e: shapesig::Error| CliError::Validation(format!("object {}: {e}", rec.id));
    if let Some(table) = protos {
        let r = resolve_signature(cloud, &rec.bbox, &rec.label, table, cfg).map_err(context)?;
        return Ok((r.signature, r.source));
    }
    match compute_signature(cloud, &rec.bbox, cfg).map_err(context)? {
        SignatureOutcome::Shape(s) => Ok((s, SignatureSource::Computed)),
        SignatureOutcome::Degenerate { points } => Err(CliError::Validation(format!(
            "object {} is degenerate ({points} points); pass --prototypes to fall back on its class",
            rec.id
        ))),
    }
}

fn compute(a: ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = a.sig.config();
    cfg.validate()?;
    let records = parse_annotations(&a.ann)?;
    let rec = select(&records, a.id.as_deref())?;
    let cloud = parse_points(&a.points)?;
    let protos = a.prototypes.as_deref().map(|p| load_prototypes(p, &cfg)).transpose()?;
    let (sig, source) = signature_for(rec, &cloud, &cfg, protos.as_ref())?;
    if source == SignatureSource::Prototype {
        writeln!(err, "note: object {} is degenerate; using the `{}` prototype", rec.id, rec.label)
            .map_err(stdout_error)?;
    }
    // Debug formatting is the shortest text that parses back to the same bits
    let line = sig.values().iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
    emit(a.out.as_deref(), out, |w| writeln!(w, "{line}").map_err(stdout_error))
}

fn batch(a: BatchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = a.sig.config();
    cfg.validate()?;
    let records = dataset(&a.data)?;
    let protos = a.prototypes.as_deref().map(|p| load_prototypes(p, &cfg)).transpose()?;
    let pool = pool(a.data.jobs)?;
    let dir = a.data.points.as_path();
    let row_for = |rec: &AnnotationRecord| -> Result<SignatureRow> {
        let cloud = parse_points(&point_file(rec, dir)?)?;
        let (sig, source) = signature_for(rec, &cloud, &cfg, protos.as_ref())?;
        Ok(SignatureRow {
            label: rec.label.clone(),
            bucket: Some(DistanceBucket::of(rec.bbox.range())),
            values: sig.into_values(),
            id: Some(rec.id.clone()),
            source: Some(source),
        })
    };

    let mut from_prototypes = 0;
    emit(a.out.as_deref(), out, |sink| {
        let target = a.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
        let io_err = |e: csv::Error| CliError::io(&target, e.into());
        let mut writer = TableWriter::new(sink, &cfg.views, cfg.fit.keep, true).map_err(io_err)?;
        for chunk in records.chunks(BATCH_CHUNK) {
            let rows: Vec<Result<SignatureRow>> = pool.install(|| chunk.par_iter().map(row_for).collect());
            // the only writer; rows arrive in dataset order
            for row in rows {
                let row = row?;
                if row.source == Some(SignatureSource::Prototype) {
                    from_prototypes += 1;
                }
                writer.write(&row).map_err(io_err)?;
            }
        }
        writer.finish().map(|_| ()).map_err(|e| CliError::io(&target, e))
    })?;
    log::info!("batch: {} objects", records.len());
    writeln!(err, "{} signatures, {from_prototypes} from prototypes", records.len()).map_err(stdout_error)
}

fn prototypes(a: PrototypeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = a.sig.config();
    cfg.validate()?;
    let records = dataset(&a.data)?;
    let pool = pool(a.data.jobs)?;
    let dir = a.data.points.as_path();
    let table = pool.install(|| -> Result<PrototypeTable64> {
        let objects = records
            .par_iter()
            .map(|rec| {
                Ok(LabeledObject {
                    cloud: parse_points(&point_file(rec, dir)?)?,
                    bbox: rec.bbox,
                    label: rec.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(build_prototypes(&objects, &cfg)?)
    })?;

    let omitted = table.omitted_classes();
    for class in &omitted {
        let n = table.degenerate_counts()[*class];
        writeln!(err, "warning: class `{class}` has only degenerate samples ({n}); no prototype written")
            .map_err(stdout_error)?;
    }
    emit(a.out.as_deref(), out, |w| {
        write_prototypes(&table, &mut *w).map_err(|e| stdout_error(e.into()))?;
        writeln!(w).map_err(stdout_error)
    })?;
    writeln!(err, "{} prototypes, {} warnings", table.len(), omitted.len()).map_err(stdout_error)
}

fn open_table(path: &Path) -> Result<SignatureTable> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_table(BufReader::new(file), path)
}

fn separation_of(table: &SignatureTable, keep: impl Fn(&SignatureRow) -> bool) -> Result<(usize, f64)> {
    let rows: Vec<&SignatureRow> = table.rows.iter().filter(|r| keep(r)).collect();
    let sigs = rows
        .iter()
        .map(|r| Signature::new(r.values.clone(), table.per_view))
        .collect::<shapesig::Result<Vec<_>>>()?;
    let labels = rows.iter().map(|r| r.label.clone()).collect();
    let set = LabeledSignatureSet::new(sigs, labels, None)?;
    Ok((rows.len(), silhouette_separation(&set)?.score))
}

fn eval_separation(a: TableArgs, out: &mut dyn Write) -> Result<()> {
    let table = open_table(&a.table)?;
    let set = LabeledSignatureSet::new(
        table.signatures()?,
        table.rows.iter().map(|r| r.label.clone()).collect(),
        None,
    )?;
    let sep = silhouette_separation(&set)?;
    let mut report = format!("samples {}\nclasses {}\n", set.len(), set.class_counts().len());
    for (class, n) in set.class_counts() {
        report += &format!("class {class} {n}\n");
    }
    report += &format!("silhouette {:?}\n", sep.score);
    if sep.degenerate {
        report += "degenerate all samples coincide\n";
    }
    for bucket in [DistanceBucket::Near, DistanceBucket::Far] {
        let line = match separation_of(&table, |r| r.bucket == Some(bucket)) {
            Ok((n, score)) => format!("{score:?} over {n} samples"),
            Err(e) => format!("n/a ({e})"),
        };
        report += &format!("silhouette_{} {line}\n", bucket.name());
    }
    emit(a.out.as_deref(), out, |w| w.write_all(report.as_bytes()).map_err(stdout_error))
}

fn sensitivity(a: SensitivityArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.sig.config();
    cfg.validate()?;
    let records = parse_annotations(&a.ann)?;
    let rec = select(&records, a.id.as_deref())?;
    let cloud = parse_points(&a.points)?;
    let spec = PerturbationSpec::new(a.sigma, a.drop, a.seed)?;
    let stats = pool(a.jobs)?
        .install(|| perturbation_sensitivity(&cloud, &rec.bbox, &cfg, &spec, a.trials))
        .map_err(|e| CliError::Validation(format!("object {}: {e}", rec.id)))?;
    let report = format!("trials {}\nmean {:?}\np99 {:?}\n", stats.trials, stats.mean, stats.p99);
    emit(a.out.as_deref(), out, |w| w.write_all(report.as_bytes()).map_err(stdout_error))
}

fn export_embedding(a: TableArgs, out: &mut dyn Write) -> Result<()> {
    let table = open_table(&a.table)?;
    emit(a.out.as_deref(), out, |sink| {
        let io_err = |e: csv::Error| stdout_error(e.into());
        let mut w = TableWriter::new(sink, &table.views, table.per_view, false).map_err(io_err)?;
        for row in &table.rows {
            w.write(row).map_err(io_err)?;
        }
        w.finish().map(|_| ()).map_err(stdout_error)
    })
}
