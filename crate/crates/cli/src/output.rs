//! CSV and JSON emitters, read-back, and the per-run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use gkdv_core::{DecayFit, Snapshot, TrajectoryRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::format::fmt_f64;

pub const TRAJECTORY_HEADER: [&str; 12] = [
    "t",
    "mass_u",
    "mass_v",
    "l2",
    "hamiltonian",
    "hs_u",
    "hs_v",
    "rho_u",
    "rho_v",
    "rho_joint",
    "fit_r2_u",
    "fit_r2_v",
];

pub const DECAY_HEADER: [&str; 4] = ["t_min", "K_fit", "alpha_fit", "r2"];

/// One row of the trajectory CSV.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRow(pub [f64; 12]);

impl TrajectoryRow {
    pub fn from_snapshot(s: &Snapshot) -> Self {
        let i = &s.invariants;
        Self([
            s.t,
            i.mass_u,
            i.mass_v,
            i.l2,
            i.hamiltonian,
            s.hs_u,
            s.hs_v,
            s.radius_u.rho_hat,
            s.radius_v.rho_hat,
            s.radius_joint.rho_hat,
            s.radius_u.r_squared,
            s.radius_v.r_squared,
        ])
    }

    /// Bitwise equality, so `NaN` rows compare equal to themselves.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn csv_bytes<const K: usize>(header: [&str; K], rows: impl Iterator<Item = [f64; K]>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_f64(x))).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn trajectory_csv(traj: &TrajectoryRecord) -> Vec<u8> {
    csv_bytes(
        TRAJECTORY_HEADER,
        traj.snapshots.iter().map(|s| TrajectoryRow::from_snapshot(s).0),
    )
}

pub fn decay_csv(fits: &[DecayFit]) -> Vec<u8> {
    csv_bytes(
        DECAY_HEADER,
        fits.iter().map(|f| [f.t_min, f.k_fit, f.alpha_fit, f.r_squared]),
    )
}

fn read_rows<const K: usize>(path: &Path, header: [&str; K]) -> Result<Vec<[f64; K]>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let got = r.headers().map_err(|e| e.to_string())?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(format!("{}: unexpected header {:?}", path.display(), got));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let mut row = [0.0; K];
        if rec.len() != K {
            return Err(format!("{}: row {} has {} fields", path.display(), i + 1, rec.len()));
        }
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| format!("{}: row {}: bad number {field:?}", path.display(), i + 1))?;
        }
        out.push(row);
    }
    Ok(out)
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRow>, String> {
    Ok(read_rows(path, TRAJECTORY_HEADER)?.into_iter().map(TrajectoryRow).collect())
}

/// `(t_min, K_fit, alpha_fit, r2)` rows.
pub fn read_decay_csv(path: &Path) -> Result<Vec<[f64; 4]>, String> {
    read_rows(path, DECAY_HEADER)
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed { category: String, exit_code: i32, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub kind: String,
    pub seed: u64,
    /// Rendered configuration, parseable with `parse_config`.
    pub config: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outcome: RunStatus,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Output directory that records what it wrote.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
        let path = self.root.join(name);
        write_atomic(&path, bytes)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(std::io::Error::other)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// One compact JSON object per line.
    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, values: &[T]) -> std::io::Result<PathBuf> {
        let mut bytes = Vec::new();
        for v in values {
            serde_json::to_writer(&mut bytes, v).map_err(std::io::Error::other)?;
            bytes.push(b'\n');
        }
        self.write(name, &bytes)
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn finish(self, mut manifest: RunManifest) -> std::io::Result<RunManifest> {
        manifest.files = self.files;
        manifest.files.sort_by(|a, b| a.name.cmp(&b.name));
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
        bytes.push(b'\n');
        write_atomic(&self.root.join(MANIFEST_NAME), &bytes)?;
        Ok(manifest)
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, String> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME)).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

/// Recomputes every checksum listed in the manifest.
pub fn verify_manifest(dir: &Path) -> Result<RunManifest, String> {
    let m = read_manifest(dir)?;
    for f in &m.files {
        let bytes = fs::read(dir.join(&f.name)).map_err(|e| format!("{}: {e}", f.name))?;
        if bytes.len() as u64 != f.bytes || sha256_hex(&bytes) != f.sha256 {
            return Err(format!("{}: checksum mismatch", f.name));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trajectory_is_header_only() {
        let traj = TrajectoryRecord::new(1, Default::default());
        let text = String::from_utf8(trajectory_csv(&traj)).unwrap();
        assert_eq!(text, format!("{}\n", TRAJECTORY_HEADER.join(",")));
        assert_eq!(String::from_utf8(decay_csv(&[])).unwrap(), "t_min,K_fit,alpha_fit,r2\n");
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("a.txt", b"hello").unwrap();
        out.write("a.txt", b"hello!").unwrap();
        let m = out
            .finish(RunManifest {
                version: "0".into(),
                kind: "simulate".into(),
                seed: 0,
                config: String::new(),
                started_unix: 0.0,
                finished_unix: 0.0,
                outcome: RunStatus::Ok,
                files: vec![],
            })
            .unwrap();
        assert_eq!(m.files.len(), 1);
        assert_eq!(verify_manifest(dir.path()).unwrap(), m);
        fs::write(dir.path().join("a.txt"), b"tampered").unwrap();
        assert!(verify_manifest(dir.path()).is_err());
    }
}
