#![allow(dead_code)]

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use shapesig::synth::{lattice_box_points, synthetic_fleet, FleetSpec, ObjectDims};
use shapesig::{Box3D64, Point3};
use shapesig_cli::points::write_points;
use shapesig_cli::run_command;
use tempfile::TempDir;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("shapesig").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn record(id: &str, label: &str, bbox: &Box3D64) -> Value {
    let (c, z) = (bbox.center(), bbox.size());
    json!({
        "id": id,
        "label": label,
        "center": [c.x, c.y, c.z],
        "size": [z.width, z.length, z.height],
        "yaw": bbox.yaw(),
        "frame": "0",
    })
}

/// A dataset directory: `ann.json` plus one `.bin` per object under `points/`.
pub struct Dataset {
    pub dir: TempDir,
    records: Vec<Value>,
}

impl Dataset {
    pub fn new() -> Self {
        let dir = TempDir::new().unwrap();
        std::fs::create_dir(dir.path().join("points")).unwrap();
        Self {
            dir,
            records: Vec::new(),
        }
    }

    pub fn add(&mut self, id: &str, label: &str, bbox: &Box3D64, points: &[Point3<f64>]) -> &mut Self {
        write_points(&self.points().join(format!("{id}.bin")), points).unwrap();
        self.records.push(record(id, label, bbox));
        self
    }

    /// `count` objects per synthetic class.
    pub fn fleet(per_class: usize, seed: u64) -> Self {
        let mut ds = Self::new();
        let spec = FleetSpec {
            per_class,
            points: 200,
            ..FleetSpec::default()
        };
        for (i, obj) in synthetic_fleet(&spec, seed).iter().enumerate() {
            let o = &obj.object;
            ds.add(&format!("o{i}"), &o.label, &o.bbox, o.cloud.points());
        }
        ds
    }

    pub fn points(&self) -> PathBuf {
        self.dir.path().join("points")
    }

    pub fn ann(&self) -> PathBuf {
        let path = self.dir.path().join("ann.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.records).unwrap()).unwrap();
        path
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

pub fn box_at(x: f64, y: f64, dims: ObjectDims, yaw: f64) -> Box3D64 {
    Box3D64::from_parts(Point3::new(x, y, 0.0), dims.width, dims.length, dims.height, yaw).unwrap()
}

/// Lattice points of `dims` posed by `bbox`.
pub fn posed_lattice(dims: ObjectDims, bbox: &Box3D64) -> Vec<Point3<f64>> {
    lattice_box_points::<f64>(dims, 0.2)
        .into_iter()
        .map(|p| p.rotate_z(bbox.yaw()).add(&bbox.center()))
        .collect()
}

pub fn parse_floats(line: &str) -> Vec<f64> {
    line.split_whitespace().map(|t| t.parse().unwrap()).collect()
}
