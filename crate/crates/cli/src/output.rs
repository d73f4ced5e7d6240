use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// A file produced by an analysis, not yet written.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, content: String) -> Self {
        Artifact {
            name: name.into(),
            content,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Written {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes artifacts into one directory and remembers what it wrote.
pub struct OutputDir {
    root: PathBuf,
    pub written: Vec<Written>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("cannot create {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: vec![],
        })
    }

    pub fn write(&mut self, a: &Artifact) -> Result<Written> {
        let path = self.root.join(&a.name);
        fs::write(&path, &a.content).with_context(|| format!("cannot write {}", path.display()))?;
        let w = Written {
            path: a.name.clone(),
            sha256: sha256_hex(a.content.as_bytes()),
            bytes: a.content.len(),
        };
        self.written.push(w.clone());
        Ok(w)
    }

    pub fn write_all(&mut self, artifacts: &[Artifact]) -> Result<()> {
        for a in artifacts {
            let w = self.write(a)?;
            eprintln!("wrote {}", self.root.join(&w.path).display());
        }
        Ok(())
    }
}
