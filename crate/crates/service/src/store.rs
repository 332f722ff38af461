use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::session::{CreateSession, SessionCore};
use crate::ServiceError;

/// Append-only move logs, one file per session: the creation parameters as a JSON line, then
/// one move per line in the corpus notation.
#[derive(Debug, Clone)]
pub struct MoveLog {
    dir: PathBuf,
}

fn io(e: std::io::Error) -> ServiceError {
    ServiceError::Storage(e.to_string())
}

impl MoveLog {
    pub fn open(dir: &Path) -> Result<MoveLog, ServiceError> {
        fs::create_dir_all(dir).map_err(io)?;
        Ok(MoveLog { dir: dir.to_path_buf() })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.log"))
    }

    pub fn create(&self, id: &str, params: &CreateSession) -> Result<(), ServiceError> {
        let line = serde_json::to_string(params).map_err(|e| ServiceError::Storage(e.to_string()))?;
        fs::write(self.path(id), format!("{line}\n")).map_err(io)
    }

    pub fn append(&self, id: &str, mv: &str) -> Result<(), ServiceError> {
        let mut f = OpenOptions::new().append(true).open(self.path(id)).map_err(io)?;
        writeln!(f, "{mv}").map_err(io)?;
        f.sync_data().map_err(io)
    }

    pub fn remove(&self, id: &str) -> Result<(), ServiceError> {
        match fs::remove_file(self.path(id)) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(io(e)),
            _ => Ok(()),
        }
    }

    /// Rebuilds one session from its log.
    pub fn load(&self, id: &str) -> Result<SessionCore, ServiceError> {
        let text = fs::read_to_string(self.path(id)).map_err(io)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| ServiceError::Storage(format!("{id}: empty log")))?;
        let params: CreateSession =
            serde_json::from_str(header).map_err(|e| ServiceError::Storage(format!("{id}: {e}")))?;
        let mut core = SessionCore::new(id.to_string(), params)?;
        for line in lines.map(str::trim).filter(|l| !l.is_empty()) {
            core.restore_move(line)
                .map_err(|e| ServiceError::Storage(format!("{id}: {line:?}: {e}")))?;
        }
        Ok(core)
    }

    /// Every session in the directory.
    pub fn load_all(&self) -> Result<Vec<SessionCore>, ServiceError> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)
            .map_err(io)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let p = e.path();
                (p.extension()? == "log").then(|| p.file_stem()?.to_str().map(String::from))?
            })
            .collect();
        ids.sort();
        ids.iter().map(|id| self.load(id)).collect()
    }
}
