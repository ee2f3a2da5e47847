//! Serialisation and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{CliError, SCHEMA_VERSION};

/// Pretty JSON with sorted keys, a `schema_version` field and a trailing
/// newline.
pub fn json_bytes(command: &str, body: impl Serialize) -> Vec<u8> {
    let mut obj = match serde_json::to_value(body).expect("report serialises") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
    obj.insert("command".into(), Value::String(command.into()));
    // serde_json's default map is ordered, so keys come out sorted.
    let mut out = serde_json::to_vec_pretty(&Value::Object(obj)).expect("value serialises");
    out.push(b'\n');
    out
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Send `bytes` to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}
