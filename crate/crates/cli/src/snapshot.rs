//! Versioned monitor snapshots and atomic persistence.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use itemwatch::tracking::{MonitoredItem, PoolMonitor};
use itemwatch::MonitorConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Snapshot layout version written by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything the monitor needs between two administrations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSnapshot {
    pub schema_version: u32,
    /// Number of processed batches.
    pub time: u64,
    pub config: MonitorConfig,
    /// Item registry with each item's stream state.
    pub items: Vec<MonitoredItem>,
}

impl MonitorSnapshot {
    pub fn from_monitor(monitor: &PoolMonitor) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            time: monitor.time,
            config: monitor.config,
            items: monitor.items.clone(),
        }
    }

    pub fn into_monitor(self) -> Result<PoolMonitor> {
        let mut monitor = PoolMonitor::new(self.config)?;
        monitor.time = self.time;
        for item in &self.items {
            if monitor.contains(item.spec.id) || item.spec.id != item.tracker.item_id() {
                return Err(CliError::Batch(format!(
                    "snapshot entry for item {} is duplicated or inconsistent",
                    item.spec.id
                )));
            }
            monitor.items.push(item.clone());
        }
        Ok(monitor)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("snapshot serializes");
        text.push('\n');
        text
    }

    /// Parses a snapshot, refusing any `schema_version` other than
    /// [`SCHEMA_VERSION`] before looking at the rest.
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let json_err = |source| CliError::Json {
            path: path.to_path_buf(),
            source,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
        match value.get("schema_version") {
            Some(v) if v.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
            other => {
                return Err(CliError::SchemaVersion {
                    path: path.to_path_buf(),
                    found: other.map_or_else(|| "missing".to_string(), |v| v.to_string()),
                    expected: SCHEMA_VERSION,
                })
            }
        }
        serde_json::from_value(value).map_err(json_err)
    }
}

/// Reads the snapshot at `path`; `None` if the file does not exist.
pub fn load_snapshot(path: &Path) -> Result<Option<MonitorSnapshot>> {
    match std::fs::read_to_string(path) {
        Ok(text) => MonitorSnapshot::from_json(&text, path).map(Some),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::io(path)(e)),
    }
}

/// Replaces `path` with the bytes produced by `write`: they go to a
/// temporary file in the same directory, which is renamed over `path` only
/// once fully written and synced. On any failure `path` is left as it was.
pub fn write_atomic_with(
    path: &Path,
    write: impl FnOnce(&mut File) -> std::io::Result<()>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    write(tmp.as_file_mut()).map_err(CliError::io(tmp.path()))?;
    tmp.as_file().sync_all().map_err(CliError::io(tmp.path()))?;
    tmp.persist(path).map_err(|e| CliError::io(path)(e.error))?;
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic_with(path, |f| f.write_all(bytes))
}

pub fn save_snapshot(path: &Path, snapshot: &MonitorSnapshot) -> Result<()> {
    write_atomic(path, snapshot.to_json().as_bytes())
}

/// Advisory lock: a `<state>.lock` file that exists while a monitor run
/// owns the state. Removed on drop.
#[derive(Debug)]
pub struct StateLock {
    path: PathBuf,
}

impl StateLock {
    pub fn lock_path(state: &Path) -> PathBuf {
        let mut name = state.file_name().unwrap_or_default().to_os_string();
        name.push(".lock");
        state.with_file_name(name)
    }

    pub fn acquire(state: &Path) -> Result<Self> {
        let path = Self::lock_path(state);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                // informational only
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked {
                path: state.to_path_buf(),
            }),
            Err(e) => Err(CliError::io(&path)(e)),
        }
    }
}

impl Drop for StateLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}
