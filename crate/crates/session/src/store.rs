use std::io::Write;
use std::path::{Path, PathBuf};

use commshare_core::sim::EpisodeLog;

/// Flat directory of episode logs, one file per session run.
#[derive(Clone, Debug)]
pub struct LogStore {
    dir: PathBuf,
}

impl LogStore {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, session_id: &str, run: u32) -> PathBuf {
        self.dir.join(format!("{session_id}-{run}.jsonl"))
    }

    /// Writes a log without overwriting an existing one.
    pub fn write(&self, session_id: &str, run: u32, log: &EpisodeLog) -> std::io::Result<PathBuf> {
        let path = self.path_for(session_id, run);
        let mut file = std::fs::OpenOptions::new().write(true).create_new(true).open(&path)?;
        file.write_all(log.to_jsonl().as_bytes())?;
        file.sync_all()?;
        Ok(path)
    }
}
