use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Errors carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unparsable values, IO failures: exit 1.
    Usage(String),
    /// Turning points, branch crossings, failed tolerances: exit 2.
    Degenerate(String),
    /// A determinant identity produced a nonzero residual: exit 3.
    Identity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Degenerate(_) => 2,
            CliError::Identity(_) => 3,
        }
    }

    pub fn usage(msg: impl fmt::Display) -> CliError {
        CliError::Usage(msg.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Degenerate(m) | CliError::Identity(m) => {
                write!(f, "{m}")
            }
        }
    }
}

/// Writes to the path or to stdout when no path was given.
pub fn write_output(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::usage(format!("cannot write {p}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}

/// Sibling path for the secondary (profile) artifact of `eval`:
/// `states.csv` -> `states.profile.csv`.
pub fn profile_path(out: &str) -> String {
    let path = Path::new(out);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    let mut sibling = PathBuf::from(path);
    sibling.set_file_name(format!("{stem}.profile.{ext}"));
    sibling.to_string_lossy().into_owned()
}
