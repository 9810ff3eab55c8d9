//! Output files: CSV with a leading `# run_config:` line, or JSON with the
//! run config embedded.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Statistics are printed with 15 significant digits.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    let magnitude = rounded.abs();
    if (1e-4..1e15).contains(&magnitude) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

pub fn config_line<C: Serialize>(config: &C) -> String {
    format!("run_config: {}", serde_json::to_string(config).expect("configs serialize"))
}

/// Rows of already formatted cells under a header, after the run config comment.
pub fn write_csv<C: Serialize>(path: Option<&Path>, config: &C, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = open(path)?;
    writeln!(out, "# {}", config_line(config))?;
    let mut w = csv::Writer::from_writer(&mut out);
    let data_err = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(header).map_err(data_err)?;
    for r in rows {
        w.write_record(r).map_err(data_err)?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

pub fn write_json<C: Serialize, R: Serialize>(path: Option<&Path>, config: &C, result: &R) -> Result<(), CliError> {
    let doc: Value = json!({ "run_config": config, "result": result });
    let mut out = open(path)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::number;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(number(0.0), "0");
        assert_eq!(number(2.0), "2");
        assert_eq!(number(-12345.678901234567), "-12345.6789012346");
        assert_eq!(number(1.0 / 3.0 * 1e-6), "3.33333333333333e-7");
        assert_eq!(number(0.005), "0.005");
    }
}
