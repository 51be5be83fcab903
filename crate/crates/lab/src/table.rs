//! CSV documents with a `#` metadata preamble, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::{LabError, Result};

pub const TOOL: &str = concat!("requant-lab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvDoc {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(command: &str, header: &[&str]) -> Self {
        Self {
            meta: vec![
                ("tool".into(), TOOL.into()),
                ("command".into(), command.into()),
            ],
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            // keep each entry on one comment line
            let v = v.replace(['\n', '\r'], " ");
            writeln!(out, "# {k}: {v}").expect("write to Vec");
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner()
            .map_err(|e| LabError::Csv(e.into_error().into()))
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every `(path, bytes)` pair or none of them.
///
/// Contents are staged in temporary files next to their targets and renamed
/// into place only after all of them were written.
pub fn write_all_atomic(outputs: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut staged = Vec::with_capacity(outputs.len());
    for (path, bytes) in outputs {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir).map_err(io_err(path))?;
        tmp.write_all(bytes).map_err(io_err(path))?;
        tmp.as_file().sync_all().map_err(io_err(path))?;
        staged.push((tmp, path));
    }
    let mut done: Vec<&PathBuf> = Vec::new();
    for (tmp, path) in staged {
        if let Err(e) = tmp.persist(path) {
            for p in done {
                let _ = std::fs::remove_file(p);
            }
            return Err(io_err(path)(e.error));
        }
        done.push(path);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preamble_then_rows() {
        let mut d = CsvDoc::new("demo", &["a", "b"]);
        d.meta("note", "two\nlines");
        d.push(vec!["1".into(), "x,y".into()]);
        let text = String::from_utf8(d.to_bytes().unwrap()).unwrap();
        assert_eq!(
            text,
            format!("# tool: {TOOL}\n# command: demo\n# note: two lines\na,b\n1,\"x,y\"\n")
        );
    }

    #[test]
    fn failed_batch_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.csv");
        let bad = dir.path().join("missing").join("bad.csv");
        let err = write_all_atomic(&[(good.clone(), b"x".to_vec()), (bad, b"y".to_vec())]);
        assert!(err.is_err());
        assert!(!good.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
        write_all_atomic(&[(good.clone(), b"x".to_vec())]).unwrap();
        assert_eq!(std::fs::read(&good).unwrap(), b"x");
    }
}
