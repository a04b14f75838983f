//! Versioned JSON records of optimization campaigns.
//!
//! A file holds `{checksum, created_at, payload}`. `payload` is the record
//! without its timestamp; `checksum` is the SHA-256 of the payload serialized
//! compactly with sorted keys, so two runs of the same campaign share a
//! checksum even when they were made at different times. Floats are written in
//! shortest round-trip form and read back exactly.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::optimize::{OptimizationRun, OptimizerConfig};
use crate::regression::FitResult;
use crate::spectral::ViolationEigenpair;
use crate::{Amplitude, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding [`DEFAULT_RESULTS_DIR`].
pub const RESULTS_DIR_ENV: &str = "BELLMZI_RESULTS_DIR";
pub const DEFAULT_RESULTS_DIR: &str = "results";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unsupported schema version {found} (this build reads version {expected})")]
    SchemaMismatch { found: u64, expected: u32 },
    #[error("corrupt record {path}: {reason}")]
    CorruptFile { path: PathBuf, reason: String },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignKind {
    General,
    Ecs,
    Tmsv,
    TmsvRScan,
    Eigvec,
    Fit,
}

impl CampaignKind {
    pub fn name(self) -> &'static str {
        match self {
            CampaignKind::General => "general",
            CampaignKind::Ecs => "ecs",
            CampaignKind::Tmsv => "tmsv",
            CampaignKind::TmsvRScan => "tmsv_r_scan",
            CampaignKind::Eigvec => "eigvec",
            CampaignKind::Fit => "fit",
        }
    }
}

/// Top eigenpair of one optimum, with complex entries stored as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredEigenpair {
    pub n: usize,
    pub value: f64,
    pub violation: f64,
    pub betas: Vec<[f64; 2]>,
    pub gammas: Vec<[f64; 2]>,
    /// Row-major `n x n` amplitudes in the orthonormal basis, Lab X index first.
    pub vector_orthonormal: Vec<[f64; 2]>,
    /// Row-major coefficients on `beta_i (x) gamma_j`.
    pub vector_coherent: Option<Vec<[f64; 2]>>,
    pub schmidt: Vec<f64>,
}

fn pair<C: Scalar<Real = f64>>(z: &C) -> [f64; 2] {
    [z.real(), z.imaginary()]
}

impl StoredEigenpair {
    pub fn new<C: Scalar<Real = f64>>(pair_: &ViolationEigenpair<C>, betas: &[Amplitude], gammas: &[Amplitude]) -> Self {
        Self {
            n: pair_.n,
            value: pair_.value,
            violation: pair_.violation,
            betas: betas.iter().map(|z| [z.re, z.im]).collect(),
            gammas: gammas.iter().map(|z| [z.re, z.im]).collect(),
            vector_orthonormal: pair_.vector_orthonormal.iter().map(pair).collect(),
            vector_coherent: pair_
                .vector_coherent
                .as_ref()
                .map(|v| v.iter().map(pair).collect()),
            schmidt: pair_.schmidt.clone(),
        }
    }
}

/// One campaign: a set of runs over a range of chain lengths plus derived data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub schema_version: u32,
    pub kind: CampaignKind,
    /// Inclusive range of chain lengths.
    pub n_range: [usize; 2],
    pub config: OptimizerConfig,
    pub runs: Vec<OptimizationRun>,
    #[serde(default)]
    pub eigen: Vec<StoredEigenpair>,
    #[serde(default)]
    pub fit: Option<FitResult>,
    /// Chain lengths whose optimization failed, with the error message.
    #[serde(default)]
    pub failures: Vec<(usize, String)>,
    pub tool_version: String,
    /// Seconds since the Unix epoch; kept outside the checksummed payload.
    #[serde(skip)]
    pub created_at: u64,
}

impl CampaignRecord {
    pub fn new(kind: CampaignKind, n_range: [usize; 2], config: OptimizerConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            n_range,
            config,
            runs: Vec::new(),
            eigen: Vec::new(),
            fit: None,
            failures: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_at: 0,
        }
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(StoreError::SchemaMismatch {
                found: self.schema_version.into(),
                expected: SCHEMA_VERSION,
            });
        }
        let [lo, hi] = self.n_range;
        if lo > hi {
            return Err(StoreError::InvalidRecord(format!("empty n range {lo}..={hi}")));
        }
        let outside = self
            .runs
            .iter()
            .map(|r| r.n)
            .chain(self.eigen.iter().map(|e| e.n))
            .find(|n| !(lo..=hi).contains(n));
        if let Some(n) = outside {
            return Err(StoreError::InvalidRecord(format!("n = {n} outside {lo}..={hi}")));
        }
        Ok(())
    }

    /// Canonical compact payload (sorted keys, no timestamp).
    pub fn payload(&self) -> Result<String, StoreError> {
        let value = serde_json::to_value(self).map_err(|e| StoreError::InvalidRecord(e.to_string()))?;
        Ok(value.to_string())
    }

    pub fn checksum(&self) -> Result<String, StoreError> {
        Ok(digest(&self.payload()?))
    }

    /// The file contents [`save`] writes.
    pub fn to_file_string(&self) -> Result<String, StoreError> {
        self.validate()?;
        let payload = serde_json::to_value(self).map_err(|e| StoreError::InvalidRecord(e.to_string()))?;
        let checksum = digest(&payload.to_string());
        let file = serde_json::json!({
            "checksum": checksum,
            "created_at": self.created_at,
            "payload": payload,
        });
        let mut text = serde_json::to_string_pretty(&file).map_err(|e| StoreError::InvalidRecord(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_file_str(text: &str, path: &Path) -> Result<Self, StoreError> {
        let corrupt = |reason: String| StoreError::CorruptFile {
            path: path.to_path_buf(),
            reason,
        };
        let file: Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
        let payload = file.get("payload").ok_or_else(|| corrupt("missing payload".into()))?;
        let version = payload
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| corrupt("missing schema_version".into()))?;
        if version != u64::from(SCHEMA_VERSION) {
            return Err(StoreError::SchemaMismatch {
                found: version,
                expected: SCHEMA_VERSION,
            });
        }
        let stored = file
            .get("checksum")
            .and_then(Value::as_str)
            .ok_or_else(|| corrupt("missing checksum".into()))?;
        let actual = digest(&payload.to_string());
        if stored != actual {
            return Err(corrupt(format!("checksum mismatch (stored {stored}, computed {actual})")));
        }
        let created_at = file
            .get("created_at")
            .and_then(Value::as_u64)
            .ok_or_else(|| corrupt("missing created_at".into()))?;
        let mut record: CampaignRecord =
            serde_json::from_value(payload.clone()).map_err(|e| corrupt(e.to_string()))?;
        record.created_at = created_at;
        record.validate()?;
        Ok(record)
    }
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Writes `record` to `path` atomically (temporary file, then rename).
pub fn save(record: &CampaignRecord, path: &Path) -> Result<(), StoreError> {
    let text = record.to_file_string()?;
    write_atomic(path, text.as_bytes())
}

pub fn load(path: &Path) -> Result<CampaignRecord, StoreError> {
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    CampaignRecord::from_file_str(&text, path)
}

/// Creates parent directories, writes a sibling temporary file and renames it
/// over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let io = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Results root: `$BELLMZI_RESULTS_DIR` or `./results`.
pub fn results_root() -> PathBuf {
    std::env::var_os(RESULTS_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_RESULTS_DIR))
}

/// `<root>/<kind>/<n>_<seed>.json`, or `<lo>-<hi>_<seed>.json` for ranges.
pub fn record_path(root: &Path, kind: CampaignKind, n_range: [usize; 2], seed: u64) -> PathBuf {
    let [lo, hi] = n_range;
    let stem = if lo == hi {
        format!("{lo}_{seed}")
    } else {
        format!("{lo}-{hi}_{seed}")
    };
    root.join(kind.name()).join(format!("{stem}.json"))
}
