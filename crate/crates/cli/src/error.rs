use std::path::{Path, PathBuf};
use std::process::ExitCode;

use noiseaudit::Error;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) if e.is_io() => "io",
            CliError::Io { .. } => "io",
            CliError::Core(_) => "validation",
        }
    }

    fn code(&self) -> u8 {
        match self.kind() {
            "usage" => 2,
            "io" => 4,
            _ => 3,
        }
    }

    fn path(&self) -> Option<&Path> {
        match self {
            CliError::Io { path, .. } => Some(path),
            CliError::Core(Error::Io { path, .. } | Error::File { path, .. }) => Some(path),
            _ => None,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
            CliError::Io { path, source } => format!("{}: {source}", path.display()),
        }
    }

    pub fn report(&self) -> ExitCode {
        let mut body = json!({ "kind": self.kind(), "message": self.message() });
        if let Some(p) = self.path() {
            body["path"] = json!(p.display().to_string());
        }
        eprintln!("{}", json!({ "error": body }));
        ExitCode::from(self.code())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
