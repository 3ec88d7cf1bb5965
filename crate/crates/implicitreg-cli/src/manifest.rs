//! Run manifests: every command writes `<out>.manifest.json` echoing the
//! fully resolved configuration, so reruns are reproducible byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Write the manifest next to `out`. `params` should contain every resolved
/// option of the run; key order in the output is sorted (serde_json maps),
/// so identical configurations serialize identically.
pub fn write_manifest(
    out: &Path,
    command: &str,
    graph_hash: Option<u64>,
    seed: Option<u64>,
    params: Value,
) -> std::io::Result<PathBuf> {
    let mut doc = json!({
        "artifact_version": ARTIFACT_VERSION,
        "command": command,
        "params": params,
    });
    if let Some(h) = graph_hash {
        doc["graph_hash"] = json!(format!("{h:016x}"));
    }
    if let Some(s) = seed {
        doc["seed"] = json!(s);
    }
    let path = manifest_path(out);
    fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(path)
}
