use fermi_kramers::Error as SolverError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or environment overrides.
    Validation(String),
    /// The solver could not meet its tolerances.
    Numerical(String),
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io { path, source } => write!(f, "cannot write {path}: {source}"),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Domain(_) | SolverError::InvalidConfig(_) | SolverError::MissingDensity => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
