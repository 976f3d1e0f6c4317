use std::fmt;

/// A failed run, classified by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or config file (exit 2).
    Config(String),
    /// The mesh could not be read or failed validation (exit 3).
    Mesh(String),
    /// The discrete problem could not be solved (exit 4).
    Solver(String),
    /// Writing an output failed (exit 1).
    Io(String),
    /// An acceptance check failed under `--assert` (exit 5).
    Check(Vec<String>),
}

impl CliError {
    pub fn config(key: &str, msg: impl fmt::Display) -> Self {
        CliError::Config(format!("{key}: {msg}"))
    }

    pub fn mesh(e: bdflow::Error) -> Self {
        CliError::Mesh(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Mesh(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Check(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Mesh(m) => write!(f, "mesh error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Check(failed) => {
                write!(f, "{} acceptance check(s) failed", failed.len())?;
                for c in failed {
                    write!(f, "\n  {c}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<bdflow::Error> for CliError {
    fn from(e: bdflow::Error) -> Self {
        use bdflow::Error as E;
        match e {
            E::Argument(_) | E::Config(_) => CliError::Config(e.to_string()),
            E::Parse { .. } | E::InvalidCell { .. } | E::InvalidMesh(_) => CliError::Mesh(e.to_string()),
            E::Io(_) => CliError::Io(e.to_string()),
            E::Unisolvence { .. } | E::Compatibility { .. } | E::Solver(_) | E::NonFinite { .. } => {
                CliError::Solver(e.to_string())
            }
        }
    }
}
