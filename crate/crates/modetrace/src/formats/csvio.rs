use csv::{ReaderBuilder, StringRecord, Terminator, WriterBuilder};

use crate::error::FormatError;

/// Reads `text` as CSV whose first line must equal `header`. Returns the
/// data rows with their 1-based line numbers.
pub(crate) fn read_rows(text: &str, header: &'static str) -> Result<Vec<(u64, StringRecord)>, FormatError> {
    let first = text.lines().next().unwrap_or("");
    if first.trim_end_matches('\r') != header {
        return Err(FormatError::Header { expected: header, found: first.to_string() });
    }
    let width = header.split(',').count();
    let mut reader = ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(FormatError::at(line, format!("expected {width} columns, found {}", record.len())));
        }
        rows.push((line, record));
    }
    Ok(rows)
}

pub(crate) fn writer() -> csv::Writer<Vec<u8>> {
    WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(Vec::new())
}

pub(crate) fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String, FormatError> {
    let bytes = writer.into_inner().map_err(|e| FormatError::Validation(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FormatError::Validation(e.to_string()))
}

pub(crate) fn field<T: std::str::FromStr>(line: u64, name: &str, raw: &str) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| FormatError::at(line, format!("{name} {raw:?}: {e}")))
}
