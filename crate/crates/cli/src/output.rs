//! Run artifacts. Every CSV starts with two `#` lines: the first carries the
//! command, config hash and seed, the second the timestamp and nothing else.
//! The JSON summary keeps its timestamp on a line of its own for the same
//! reason, so two runs of one config differ on exactly those lines.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub struct RunOutput {
    dir: PathBuf,
    command: &'static str,
    config: String,
    hash: String,
    seed: u64,
    generated_unix: u64,
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    generated_unix: u64,
    command: &'a str,
    config_sha256: &'a str,
    seed: u64,
    pass: bool,
    config: &'a str,
    result: &'a T,
}

impl RunOutput {
    pub fn create(dir: &Path, command: &'static str, config: String, seed: u64) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        let hash = crate::config::sha256_hex(&config);
        let generated_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let out = RunOutput {
            dir: dir.to_path_buf(),
            command,
            config,
            hash,
            seed,
            generated_unix,
        };
        out.write("config.toml", out.config.as_bytes())?;
        Ok(out)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(path.display().to_string(), e))
    }

    /// Writes `name` with the two header lines followed by `body`.
    pub fn csv(&self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> CliResult<()>) -> CliResult<()> {
        let mut buf = format!(
            "# jointcok {} config_sha256={} seed={}\n# generated_unix={}\n",
            self.command, self.hash, self.seed, self.generated_unix
        )
        .into_bytes();
        body(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn summary<T: Serialize>(&self, pass: bool, result: &T) -> CliResult<()> {
        let s = Summary {
            generated_unix: self.generated_unix,
            command: self.command,
            config_sha256: &self.hash,
            seed: self.seed,
            pass,
            config: &self.config,
            result,
        };
        let mut text = serde_json::to_string_pretty(&s)?;
        text.push('\n');
        self.write("summary.json", text.as_bytes())
    }
}

/// A CSV writer appending to `buf`.
pub fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::Writer::from_writer(buf)
}
