//! Point files: CSV text (`x,y,z[,intensity]`) or raw little-endian `f32`
//! quadruples (`.bin`). The format follows the file extension.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian, WriteBytesExt};
use shapesig::analysis::format_sig9;
use shapesig::{Point3, PointCloud64};

use crate::error::{CliError, Location, Result};

const RECORD_BYTES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Bin,
}

impl PointFormat {
    pub fn of(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("csv") => Ok(PointFormat::Csv),
            Some("bin") => Ok(PointFormat::Bin),
            _ => Err(CliError::Validation(format!(
                "{}: unknown point format (expected .csv or .bin)",
                path.display()
            ))),
        }
    }
}

pub fn parse_points(path: &Path) -> Result<PointCloud64> {
    let format = PointFormat::of(path)?;
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let points = match format {
        PointFormat::Csv => read_csv(file, path)?,
        PointFormat::Bin => {
            let mut bytes = Vec::new();
            BufReader::new(file)
                .read_to_end(&mut bytes)
                .map_err(|e| CliError::io(path, e))?;
            decode_bin(&bytes, path)?
        }
    };
    Ok(PointCloud64::sensor(points)?)
}

/// Blank lines and lines starting with `#` are skipped.
pub fn read_csv<R: Read>(reader: R, path: &Path) -> Result<Vec<Point3<f64>>> {
    let mut points = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let n = i as u64 + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(CliError::parse(
                path,
                Location::Line(n),
                format!("expected 3 or 4 fields, found {}", fields.len()),
            ));
        }
        let mut xyz = [0.0f64; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| CliError::parse(path, Location::Line(n), format!("invalid number `{field}`")))?;
        }
        if xyz.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Validation(format!(
                "{}: line {n}: non-finite coordinate",
                path.display()
            )));
        }
        points.push(Point3::new(xyz[0], xyz[1], xyz[2]));
    }
    Ok(points)
}

pub fn decode_bin(bytes: &[u8], path: &Path) -> Result<Vec<Point3<f64>>> {
    if bytes.len() % RECORD_BYTES != 0 {
        let tail = bytes.len() - bytes.len() % RECORD_BYTES;
        return Err(CliError::parse(
            path,
            Location::Byte(tail as u64),
            format!(
                "length {} is not a multiple of {RECORD_BYTES}; trailing partial record",
                bytes.len()
            ),
        ));
    }
    bytes
        .chunks_exact(RECORD_BYTES)
        .enumerate()
        .map(|(i, rec)| {
            let mut q = [0f32; 4];
            LittleEndian::read_f32_into(rec, &mut q);
            if let Some(j) = q[..3].iter().position(|v| !v.is_finite()) {
                return Err(CliError::Validation(format!(
                    "{}: byte {}: non-finite coordinate",
                    path.display(),
                    i * RECORD_BYTES + 4 * j
                )));
            }
            Ok(Point3::new(q[0] as f64, q[1] as f64, q[2] as f64))
        })
        .collect()
}

/// Writes points in the format implied by `path`. `.bin` stores `f32` with
/// zero intensity; CSV stores 9 significant digits.
pub fn write_points(path: &Path, points: &[Point3<f64>]) -> Result<()> {
    let format = PointFormat::of(path)?;
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let written = match format {
        PointFormat::Csv => write_csv(&mut w, points),
        PointFormat::Bin => write_bin(&mut w, points),
    };
    written.and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_csv<W: Write>(w: &mut W, points: &[Point3<f64>]) -> io::Result<()> {
    for p in points {
        writeln!(w, "{},{},{}", format_sig9(p.x), format_sig9(p.y), format_sig9(p.z))?;
    }
    Ok(())
}

pub fn write_bin<W: Write>(w: &mut W, points: &[Point3<f64>]) -> io::Result<()> {
    for p in points {
        for v in [p.x as f32, p.y as f32, p.z as f32, 0.0] {
            w.write_f32::<LittleEndian>(v)?;
        }
    }
    Ok(())
}
