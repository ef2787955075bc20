//! Line-oriented JSON helpers shared by the file readers and writers.

use std::io::{self, BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

/// A non-blank line of a JSONL stream, tagged with its 1-based line number.
pub struct NumberedLine {
    pub number: usize,
    pub text: String,
}

/// Iterates non-blank lines with their 1-based line numbers.
pub fn numbered_lines<R: BufRead>(reader: R) -> impl Iterator<Item = io::Result<NumberedLine>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(text) if text.trim().is_empty() => None,
            Ok(text) => Some(Ok(NumberedLine { number: i + 1, text })),
            Err(e) => Some(Err(e)),
        })
}

/// Parses every non-blank line into `T`, reporting the first failing line.
pub fn read_all<T, R>(reader: R) -> Result<Vec<T>, LineError>
where
    T: DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for line in numbered_lines(reader) {
        let line = line.map_err(|e| LineError { line: 0, message: e.to_string() })?;
        let value = serde_json::from_str(&line.text)
            .map_err(|e| LineError { line: line.number, message: e.to_string() })?;
        out.push(value);
    }
    Ok(out)
}

/// Writes one compact JSON document per line.
pub fn write_all<T, W, I>(mut writer: W, records: I) -> io::Result<()>
where
    T: Serialize,
    W: Write,
    I: IntoIterator<Item = T>,
{
    for record in records {
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}
