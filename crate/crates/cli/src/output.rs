use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// A failure mapped to the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or environment: exit 1.
    Usage(String),
    /// Unreadable, malformed or corrupt data, or an I/O failure: exit 2.
    Data(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        Failure::Data(format!("{}: {err}", path.display()))
    }

    pub fn codec(path: &Path, err: mwp::Error) -> Self {
        let msg = format!("{}: {err}", path.display());
        if err.is_data_error() {
            Failure::Data(msg)
        } else {
            Failure::Usage(msg)
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn read(path: &Path) -> Outcome<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so `path` never holds a partial result.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome {
    let mut tmp = tempfile::NamedTempFile::new_in(parent_dir(path)).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Failure::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}
