use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::{CliError, CliResult};

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization is infallible") + "\n"
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> CliResult {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Renders `value` in `format` to `out`, or to stdout when no path is given.
pub fn emit<T: Serialize>(value: &T, text: impl FnOnce() -> String, format: Format, out: Option<&Path>) -> CliResult {
    let body = match format {
        Format::Json => to_json(value),
        Format::Text => text(),
    };
    deliver(body, out)
}

pub fn deliver(body: String, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => write_file(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
