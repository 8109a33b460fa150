//! Dataset manifests.
//!
//! A manifest is `{"name":str, "source_kind":str, "threads":[{"path":str,
//! "label":"accurate"|"inaccurate"|"unlabeled"}]}`. Relative thread paths
//! resolve against the manifest's directory. Source manifests (input to
//! label unification) share the layout but carry raw source labels or
//! `"ratings"` arrays instead of resolved labels.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use threadcred_core::align::{SourceEntry, SourceManifest};
use threadcred_core::ingest::{DatasetManifest, ManifestEntry, SourceKind};
use threadcred_core::Label;

use crate::error::{read_to_string, write_string, IoError, IoResult};

#[derive(Serialize, Deserialize)]
struct WireEntry {
    path: String,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct WireManifest {
    name: String,
    source_kind: String,
    threads: Vec<WireEntry>,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Loads a manifest, resolving thread paths and checking that each exists.
pub fn load_manifest(path: &Path) -> IoResult<DatasetManifest> {
    let text = read_to_string(path)?;
    let wire: WireManifest = serde_json::from_str(&text).map_err(|e| IoError::format(path, e.to_string()))?;
    let base = base_dir(path);
    let source_kind: SourceKind = wire.source_kind.parse()?;
    let mut threads = Vec::with_capacity(wire.threads.len());
    for entry in wire.threads {
        let label: Label = entry.label.parse()?;
        let resolved = resolve(&base, &entry.path);
        if !resolved.is_file() {
            return Err(IoError::format(
                path,
                format!("missing thread file {}", resolved.display()),
            ));
        }
        threads.push(ManifestEntry {
            path: resolved.to_string_lossy().into_owned(),
            label,
        });
    }
    Ok(DatasetManifest {
        name: wire.name,
        source_kind,
        threads,
    })
}

/// Writes a manifest. Thread paths under the manifest's directory are stored
/// relative to it.
pub fn write_manifest(path: &Path, manifest: &DatasetManifest) -> IoResult<()> {
    let base = base_dir(path);
    let wire = WireManifest {
        name: manifest.name.clone(),
        source_kind: manifest.source_kind.as_str().to_string(),
        threads: manifest
            .threads
            .iter()
            .map(|e| WireEntry {
                path: relative_to(&base, Path::new(&e.path)),
                label: e.label.as_str().to_string(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&wire).expect("manifest serializes");
    text.push('\n');
    write_string(path, &text)
}

fn relative_to(base: &Path, p: &Path) -> String {
    let stripped = if base.as_os_str().is_empty() {
        Some(p)
    } else {
        p.strip_prefix(base).ok()
    };
    stripped.unwrap_or(p).to_string_lossy().into_owned()
}

/// Loads a source manifest; thread paths are resolved but not checked.
pub fn load_source_manifest(path: &Path) -> IoResult<SourceManifest> {
    let text = read_to_string(path)?;
    let mut m: SourceManifest = serde_json::from_str(&text).map_err(|e| IoError::format(path, e.to_string()))?;
    let base = base_dir(path);
    for entry in &mut m.threads {
        entry.path = resolve(&base, &entry.path).to_string_lossy().into_owned();
    }
    Ok(m)
}

pub fn write_source_manifest(path: &Path, manifest: &SourceManifest) -> IoResult<()> {
    let base = base_dir(path);
    let m = SourceManifest {
        threads: manifest
            .threads
            .iter()
            .map(|e| SourceEntry {
                path: relative_to(&base, Path::new(&e.path)),
                ..e.clone()
            })
            .collect(),
        ..manifest.clone()
    };
    let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    text.push('\n');
    write_string(path, &text)
}
