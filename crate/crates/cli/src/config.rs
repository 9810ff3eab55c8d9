//! Merging a JSON config file under the command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Flags present on the command line override the file's values key by key.
/// Keys the command does not know are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = config else {
        return Ok(flags);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut merged: Map<String, Value> = match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => m,
        Ok(_) => return Err(CliError::Usage(format!("config {} is not a JSON object", path.display()))),
        Err(e) => return Err(CliError::Usage(format!("config {}: {e}", path.display()))),
    };
    merged.retain(|_, v| !v.is_null());
    let file_keys: Vec<String> = merged.keys().cloned().collect();
    if let Value::Object(given) = to_value(&flags)? {
        merged.extend(given);
    }
    let result: T = serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(known) = to_value(&result)? else {
        unreachable!("argument records serialize to objects")
    };
    if let Some(k) = file_keys.iter().find(|k| !known.contains_key(*k)) {
        return Err(CliError::Usage(format!("config {}: unknown key {k:?}", path.display())));
    }
    Ok(result)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::InferArgs;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = file(r#"{"order": 3, "alpha": 0.05, "mode": "pte", "symbols": true}"#);
        let mut flags = InferArgs::default();
        flags.estimation.order = Some(1);
        let merged = merge(flags, Some(f.path())).unwrap();
        assert_eq!(merged.estimation.order, Some(1));
        assert_eq!(merged.testing.alpha, Some(0.05));
        assert_eq!(merged.estimation.mode, Some(crate::args::Mode::Pte));
        assert!(merged.estimation.symbols);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let f = file(r#"{"ordr": 3}"#);
        assert!(matches!(merge(InferArgs::default(), Some(f.path())), Err(CliError::Usage(_))));
        let f = file("[1, 2]");
        assert!(matches!(merge(InferArgs::default(), Some(f.path())), Err(CliError::Usage(_))));
        let f = file(r#"{"order": "three"}"#);
        assert!(matches!(merge(InferArgs::default(), Some(f.path())), Err(CliError::Usage(_))));
    }
}
