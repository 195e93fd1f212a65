use std::path::{Path, PathBuf};

use serde_json::json;

use crate::corpus::CorpusError;
use crate::grouping::GroupingError;
use crate::llmclient::LlmError;
use crate::metrics::MetricsError;
use crate::taxonomy::TaxonomyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// `--help` or `--version`: not a failure, the message is the output.
    Help,
    Usage,
    Io,
    Validation,
    Upstream,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    pub path: Option<PathBuf>,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), path: None }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Usage, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError { kind: ErrorKind::Io, message: format!("{}: {err}", path.display()), path: Some(path.into()) }
    }

    /// Attaches the input file that failed validation.
    pub fn in_file(mut self, path: &Path) -> Self {
        if self.path.is_none() {
            self.message = format!("{}: {}", path.display(), self.message);
            self.path = Some(path.into());
        }
        self
    }

    pub fn from_clap(err: clap::Error) -> Self {
        use clap::error::ErrorKind as K;
        match err.kind() {
            K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand => {
                Self::new(ErrorKind::Help, err.render().to_string())
            }
            _ => {
                let text = err.render().to_string();
                let first = text.lines().next().unwrap_or("invalid arguments");
                Self::usage(first.trim_start_matches("error: ").to_string())
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Help => 0,
            ErrorKind::Usage => 1,
            ErrorKind::Io => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Upstream => 4,
        }
    }

    pub fn json_line(&self) -> String {
        let kind = match self.kind {
            ErrorKind::Help => "help",
            ErrorKind::Usage => "usage",
            ErrorKind::Io => "io",
            ErrorKind::Validation => "validation",
            ErrorKind::Upstream => "upstream",
        };
        let mut v = json!({"error": kind, "exit_code": self.exit_code(), "message": self.message});
        if let Some(p) = &self.path {
            v["path"] = json!(p.display().to_string());
        }
        v.to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { path, source } => CliError::io(Path::new(&path), source),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<TaxonomyError> for CliError {
    fn from(e: TaxonomyError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<GroupingError> for CliError {
    fn from(e: GroupingError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::Io { path, source } => CliError::io(&path, source),
            e @ (LlmError::Upstream { .. } | LlmError::CacheMiss(_)) => CliError::new(ErrorKind::Upstream, e.to_string()),
            e @ (LlmError::NotConfigured(_) | LlmError::Config(_)) => CliError::usage(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}
