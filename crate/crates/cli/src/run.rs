use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// How a run failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or parameters outside an admissible range (exit 2).
    Usage(String),
    /// Anything that went wrong while running (exit 1).
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "usage error: {msg}"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<grenboot::Error> for Failure {
    fn from(e: grenboot::Error) -> Self {
        use grenboot::Error::*;
        match e {
            InvalidParameter(_) | Domain { .. } | KernelCondition { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

pub fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Runtime {
    wall_clock_seconds: f64,
    threads: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, P: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    params: &'a P,
    seed: Option<u64>,
    inputs: &'a [InputDigest],
    outputs: &'a [String],
    /// Varies between identical runs; everything else is reproducible.
    runtime: Runtime,
}

/// Output directory plus the bookkeeping for its manifest.
pub struct Run {
    dir: PathBuf,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn new(dir: &Path) -> Outcome<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> Outcome<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes)
            .with_context(|| format!("{} is not UTF-8", path.display()))
            .map_err(Failure::from)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Outcome<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value).context("serializing JSON")?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish<P: Serialize>(mut self, subcommand: &str, params: &P, seed: Option<u64>) -> Outcome<()> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            params,
            seed,
            inputs: &self.inputs,
            outputs: &[self.outputs.clone(), vec!["manifest.json".into()]].concat(),
            runtime: Runtime {
                wall_clock_seconds: self.started.elapsed().as_secs_f64(),
                threads: rayon::current_num_threads(),
            },
        };
        let mut text = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.clear();
        Ok(())
    }
}
