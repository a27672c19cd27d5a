//! Experiment runner for the `spm` binary: config parsing, one function per
//! subcommand, and output routing. Commands return CSV bodies; headers with
//! the config hash, seed and version are added when writing.

pub mod build;
pub mod commands;
pub mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{Config, ConfigError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Failure = 1,
    Config = 2,
    NonConvergence = 3,
    BudgetExhausted = 4,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(spm_core::Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<spm_core::Error> for CliError {
    fn from(e: spm_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::Config,
            // invalid scheme parameters come from the config as well
            CliError::Core(spm_core::Error::Parameter(_) | spm_core::Error::Constellation(_)) => ExitCode::Config,
            CliError::Core(spm_core::Error::BudgetExhausted { .. }) => ExitCode::BudgetExhausted,
            _ => ExitCode::Failure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Codebook,
    Select,
    Ber,
    Bound,
    Rate,
    RateMc,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Codebook => "codebook",
            Command::Select => "select",
            Command::Ber => "ber",
            Command::Bound => "bound",
            Command::Rate => "rate",
            Command::RateMc => "rate-mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocKind {
    Csv,
    /// Pattern export of `codebook`.
    Book,
}

/// One output file worth of text.
#[derive(Debug, Clone, PartialEq)]
pub struct Doc {
    pub scheme: Option<String>,
    pub kind: DocKind,
    pub body: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Run {
    pub docs: Vec<Doc>,
    pub non_converged: bool,
    pub budget_exhausted: bool,
}

impl Run {
    pub fn exit_code(&self) -> ExitCode {
        if self.budget_exhausted {
            ExitCode::BudgetExhausted
        } else if self.non_converged {
            ExitCode::NonConvergence
        } else {
            ExitCode::Success
        }
    }
}

/// Comment header carried by every output.
pub fn header(command: Command, cfg: &Config, scheme: Option<&str>) -> String {
    let mut h = format!(
        "# spm {VERSION}\n# command: {}\n# config_sha256: {}\n# seed: {}\n",
        command.name(),
        cfg.hash,
        cfg.seed
    );
    if let Some(s) = scheme {
        h.push_str(&format!("# scheme: {s}\n"));
    }
    h
}

/// Text without the leading `#` header lines.
pub fn body_of(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with('#') {
        rest = rest.find('\n').map_or("", |i| &rest[i + 1..]);
    }
    rest
}

fn doc_path(base: &Path, doc: &Doc, multi_scheme: bool) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = base.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    let mut name = stem;
    if multi_scheme {
        if let Some(s) = &doc.scheme {
            name.push('_');
            name.push_str(s);
        }
    }
    match doc.kind {
        DocKind::Csv => name.push_str(&format!(".{ext}")),
        DocKind::Book => name.push_str(".book.txt"),
    }
    base.with_file_name(name)
}

/// Writes every doc under `out` (see the README for naming), or concatenates
/// them to stdout when `out` is `None`. Returns the written paths.
pub fn write_outputs(command: Command, cfg: &Config, run: &Run, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let multi = run.docs.iter().filter_map(|d| d.scheme.as_ref()).collect::<std::collections::BTreeSet<_>>().len() > 1;
    let mut written = Vec::new();
    let mut stdout = String::new();
    for doc in &run.docs {
        let text = format!("{}{}", header(command, cfg, doc.scheme.as_deref()), doc.body);
        match out {
            Some(base) => {
                let path = doc_path(base, doc, multi);
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
                }
                fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
                written.push(path);
            }
            None => {
                if !stdout.is_empty() {
                    stdout.push('\n');
                }
                stdout.push_str(&text);
            }
        }
    }
    if out.is_none() {
        print!("{stdout}");
    }
    Ok(written)
}

/// Reads and parses a config file; `SPM_SEED` is passed in by the caller.
pub fn load_config(path: &Path, seed_override: Option<u64>) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut cfg = config::parse(&text, seed_override)?;
    // a relative graph path is taken relative to the config file
    if let (Some(g), Some(dir)) = (&cfg.graph, path.parent()) {
        if g.is_relative() {
            cfg.graph = Some(dir.join(g));
        }
    }
    Ok(cfg)
}

pub fn run(command: Command, cfg: &Config) -> Result<Run, CliError> {
    match command {
        Command::Codebook => commands::codebook(cfg),
        Command::Select => commands::select(cfg),
        Command::Ber => commands::ber(cfg),
        Command::Bound => commands::bound(cfg),
        Command::Rate => commands::rate(cfg),
        Command::RateMc => commands::rate_mc(cfg),
    }
}
