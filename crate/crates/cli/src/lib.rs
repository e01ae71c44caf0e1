//! Configuration-driven runner for the `pqc-core` experiments.

pub mod config;
pub mod experiment;
pub mod plot;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pqc_core::rmt::{derive_seed, Stream};
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::ExperimentConfig;
use experiment::{execute, PointRecord};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedRecord {
    pub master_seed: u64,
    pub derivation: &'static str,
    /// `(hamiltonian, kraus)` seed of each realization.
    pub realizations: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub seeds: SeedRecord,
    pub artifacts: Vec<ArtifactRecord>,
    pub points: Vec<PointRecord>,
    pub metadata: BTreeMap<String, String>,
    pub worker_threads: usize,
    pub wall_seconds: f64,
}

impl Manifest {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    std::fs::write(path, bytes).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn seed_record(cfg: &ExperimentConfig) -> SeedRecord {
    let realizations = if matches!(cfg.mode, config::Mode::PhaseGrid) {
        Vec::new()
    } else {
        (0..cfg.realizations as u64)
            .map(|i| {
                (
                    derive_seed(cfg.master_seed, i, Stream::Hamiltonian),
                    derive_seed(cfg.master_seed, i, Stream::Kraus),
                )
            })
            .collect()
    };
    SeedRecord {
        master_seed: cfg.master_seed,
        derivation: "splitmix64 of (master_seed, 4 * realization + stream)",
        realizations,
    }
}

/// Executes `cfg` and writes its artifacts and manifest into `out_dir`.
///
/// Per-point failures are recorded in the manifest; only I/O errors abort.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Manifest, RunError> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let exec = execute(cfg);
    let mut artifacts = Vec::with_capacity(exec.artifacts.len());
    for a in &exec.artifacts {
        write(&out_dir.join(&a.name), &a.bytes)?;
        artifacts.push(ArtifactRecord {
            path: a.name.clone(),
            sha256: sha256_hex(&a.bytes),
            bytes: a.bytes.len(),
        });
    }
    let manifest = Manifest {
        tool: "pqc",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        seeds: seed_record(cfg),
        artifacts,
        points: exec.points,
        metadata: exec.metadata,
        worker_threads: rayon::current_num_threads(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    text.push(b'\n');
    write(&out_dir.join(MANIFEST_NAME), &text)?;
    Ok(manifest)
}
