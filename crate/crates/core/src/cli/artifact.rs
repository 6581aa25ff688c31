//! Output files with an embedded provenance header.
//!
//! JSONL artifacts start with `{"_meta": {...}}`; CSV artifacts start with
//! a `#` comment line; model files carry a `#` line after their magic line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &str, config_hash: String, seed: u64) -> Self {
        Self {
            tool: format!("risk-evidence {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            config_hash,
            seed,
        }
    }

    pub fn comment_line(&self) -> String {
        format!(
            "# tool={} command={} config_hash={} seed={}",
            self.tool.replace(' ', "/"),
            self.command,
            self.config_hash,
            self.seed
        )
    }
}

#[derive(Serialize, Deserialize)]
struct MetaLine {
    _meta: Provenance,
}

pub fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_jsonl<T: Serialize>(
    path: &Path,
    meta: &Provenance,
    rows: &[T],
) -> std::io::Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer(
        &mut out,
        &MetaLine {
            _meta: meta.clone(),
        },
    )?;
    out.write_all(b"\n")?;
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Writes `body` (already-rendered CSV) after a provenance comment line.
pub fn write_csv(path: &Path, meta: &Provenance, body: &[u8]) -> std::io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{}", meta.comment_line())?;
    out.write_all(body)?;
    out.flush()
}

/// Reads a JSONL artifact, skipping the provenance header if present.
pub fn read_jsonl<T: DeserializeOwned>(
    path: &Path,
) -> Result<(Option<Provenance>, Vec<T>), String> {
    let file = File::open(path).map_err(|e| format!("failed to open {}: {e}", path.display()))?;
    let mut meta = None;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| format!("{}: {e}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 && line.starts_with("{\"_meta\"") {
            let m: MetaLine = serde_json::from_str(&line)
                .map_err(|e| format!("{} line 1: bad header: {e}", path.display()))?;
            meta = Some(m._meta);
            continue;
        }
        rows.push(
            serde_json::from_str(&line)
                .map_err(|e| format!("{} line {}: {e}", path.display(), i + 1))?,
        );
    }
    Ok((meta, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        a: u32,
    }

    #[test]
    fn header_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/x.jsonl");
        let meta = Provenance::new("score", "abc".into(), 9);
        write_jsonl(&path, &meta, &[Row { a: 1 }, Row { a: 2 }]).unwrap();
        let (m, rows): (_, Vec<Row>) = read_jsonl(&path).unwrap();
        assert_eq!(m, Some(meta));
        assert_eq!(rows, [Row { a: 1 }, Row { a: 2 }]);
    }

    #[test]
    fn headerless_files_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.jsonl");
        std::fs::write(&path, "{\"a\":3}\n\n").unwrap();
        let (m, rows): (_, Vec<Row>) = read_jsonl(&path).unwrap();
        assert!(m.is_none());
        assert_eq!(rows, [Row { a: 3 }]);
    }
}
