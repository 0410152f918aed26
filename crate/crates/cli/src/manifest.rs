use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> std::io::Result<Self> {
        Ok(FileDigest {
            path: path.to_owned(),
            sha256: sha256_hex(&fs::read(path)?),
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub ftle_cli: &'static str,
    pub ftle_core: &'static str,
    pub parallel: bool,
}

/// Record of one CLI invocation. Everything except `duration_secs` and
/// `threads` is a pure function of the inputs and parameters.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub inputs: Vec<FileDigest>,
    pub parameters: serde_json::Value,
    pub versions: Versions,
    pub threads: usize,
    pub duration_secs: f64,
    pub outputs: Vec<FileDigest>,
    /// Digest of the report printed to stdout, when there is one.
    pub report_sha256: Option<String>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, parameters: serde_json::Value) -> Self {
        RunManifest {
            subcommand,
            inputs: Vec::new(),
            parameters,
            versions: Versions {
                ftle_cli: env!("CARGO_PKG_VERSION"),
                ftle_core: ftle_core::VERSION,
                parallel: cfg!(feature = "parallel"),
            },
            threads: current_threads(),
            duration_secs: 0.0,
            outputs: Vec::new(),
            report_sha256: None,
        }
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.duration_secs = elapsed.as_secs_f64();
    }
}

pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
