//! CSV time series: a header row of variable names, then one row per step.
//! Lines starting with `#` are comments.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimation::{RealSeries, SymbolSeries};

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn parse_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

/// Reads columns of cells parsed by `parse`, reporting 1-based data rows.
fn read_columns<R: Read, T>(input: R, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<(Vec<String>, Vec<Vec<T>>)> {
    let mut rdr = reader(input);
    let names: Vec<String> = rdr.headers().map_err(parse_err)?.iter().map(str::to_owned).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(Error::Parse("missing header row".into()));
    }
    let mut columns: Vec<Vec<T>> = names.iter().map(|_| Vec::new()).collect();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(parse_err)?;
        if record.len() != names.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, header has {}",
                row + 1,
                record.len(),
                names.len()
            )));
        }
        for (col, cell) in columns.iter_mut().zip(record.iter()) {
            col.push(parse(cell).ok_or_else(|| Error::Parse(format!("row {}: {cell:?} is not {what}", row + 1)))?);
        }
    }
    Ok((names, columns))
}

pub fn read_series<R: Read>(input: R) -> Result<RealSeries> {
    let (names, values) = read_columns(input, |s| s.parse::<f64>().ok().filter(|v| v.is_finite()), "a finite number")?;
    RealSeries::new(names, values, None)
}

/// Symbols are non-negative integers; each alphabet is `0..=max` of its column.
pub fn read_symbols<R: Read>(input: R) -> Result<(Vec<String>, SymbolSeries)> {
    let (names, symbols) = read_columns(input, |s| s.parse::<u32>().ok(), "a non-negative integer")?;
    Ok((names, SymbolSeries::from_symbols(symbols)?))
}

pub fn read_series_file(path: &Path) -> Result<RealSeries> {
    read_series(File::open(path)?)
}

pub fn read_symbols_file(path: &Path) -> Result<(Vec<String>, SymbolSeries)> {
    read_symbols(File::open(path)?)
}

/// Writes `columns[v][t]` under `names`, preceded by `# ` comment lines.
fn write_columns<W: Write, T: ToString>(mut out: W, comments: &[String], names: &[String], columns: &[&[T]]) -> Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(names).map_err(parse_err)?;
    let len = columns.first().map_or(0, |c| c.len());
    let mut row = Vec::with_capacity(columns.len());
    for t in 0..len {
        row.clear();
        row.extend(columns.iter().map(|c| c[t].to_string()));
        w.write_record(&row).map_err(parse_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Values are written in shortest round-trip form, so reading back is exact.
pub fn write_series<W: Write>(series: &RealSeries, comments: &[String], out: W) -> Result<()> {
    let cols: Vec<&[f64]> = series.values().iter().map(Vec::as_slice).collect();
    write_columns(out, comments, series.names(), &cols)
}

pub fn write_symbols<W: Write>(names: &[String], symbols: &SymbolSeries, comments: &[String], out: W) -> Result<()> {
    if names.len() != symbols.n_vars() {
        return Err(Error::ShapeMismatch(format!("{} names for {} variables", names.len(), symbols.n_vars())));
    }
    let cols: Vec<&[u32]> = symbols.symbols().iter().map(Vec::as_slice).collect();
    write_columns(out, comments, names, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_comments_and_header() {
        let text = "# made by hand\nx, y\n1.5,2\n# mid\n-3e-2,4\n";
        let s = read_series(text.as_bytes()).unwrap();
        assert_eq!(s.names(), ["x", "y"]);
        assert_eq!(s.variable(0), [1.5, -0.03]);
        assert_eq!(s.variable(1), [2.0, 4.0]);
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(matches!(read_series("x,y\n1,nan\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_series("x,y\n1,abc\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_series("x,y\n1\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_symbols("a\n-1\n".as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn round_trips() {
        let s = RealSeries::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.1, 1.0 / 3.0, -2.5e-300], vec![1e10, 0.0, 7.25]],
            None,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_series(&s, &["run_config: {\"k\":1}".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# run_config: {\"k\":1}\na,b\n"));
        assert_eq!(read_series(buf.as_slice()).unwrap(), s);

        let sym = SymbolSeries::from_symbols(vec![vec![0, 2, 1], vec![1, 1, 0]]).unwrap();
        let mut buf = Vec::new();
        write_symbols(&["p".into(), "q".into()], &sym, &[], &mut buf).unwrap();
        let (names, back) = read_symbols(buf.as_slice()).unwrap();
        assert_eq!(names, ["p", "q"]);
        assert_eq!(back, sym);
    }
}
