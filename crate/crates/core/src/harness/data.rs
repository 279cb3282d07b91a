use std::path::Path;

use crate::error::{Error, Result};
use crate::posterior::Dataset;

/// Endurance of 23 deep-groove ball bearings, in millions of revolutions (Lawless, 1982).
pub const BEARINGS: [f64; 23] = [
    17.88, 28.92, 33.00, 41.52, 42.12, 45.60, 48.40, 51.84, 51.96, 54.12, 55.56, 67.80, 68.64,
    68.64, 68.88, 84.12, 93.12, 98.64, 105.12, 105.84, 127.92, 128.04, 173.40,
];

pub fn bearings() -> Dataset {
    Dataset::new(BEARINGS.to_vec()).expect("built-in data is valid")
}

/// Parses one positive decimal per line; blank lines and `#` comments are skipped.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not a number: {line:?}"),
        })?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!(
                "line {}: observation {v} must be finite and positive",
                i + 1
            )));
        }
        values.push(v);
    }
    Dataset::new(values)
}

/// Loads `source`, which is either the built-in name `bearings` or a file path.
pub fn load_dataset(source: &str) -> Result<Dataset> {
    if source == "bearings" {
        return Ok(bearings());
    }
    let text = std::fs::read_to_string(Path::new(source))?;
    parse_dataset(&text)
}
