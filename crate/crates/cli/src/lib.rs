//! Pipeline runner around the `heatprobe` library.
//!
//! The binary drives the measurement-to-reconstruction chain from a single
//! JSON configuration: `forward` simulates the boundary measurements (and
//! the cavity-free reference run of the same body), `indicator` turns the
//! traces into indicator sweeps and support/distance fits, `oracle`
//! cross-checks against the stationary two-path gap, and `reconstruct`
//! intersects the fitted constraints into a cavity enclosure with CSV and
//! SVG artifacts. `all` chains them.
//!
//! Stage boundaries are file-shaped on purpose: the indicator stage
//! consumes only the body description and the `forward` artifacts — never
//! the cavity geometry — so a reconstruction is honestly computed from
//! boundary data alone, and externally measured data with the same CSV
//! schema can be dropped in.

pub mod artifacts;
pub mod config;
pub mod stages;
pub mod svg;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable/invalid configuration or output location (exit 2).
    Config(String),
    /// A forward or stationary solve failed (exit 3).
    Solver(String),
    /// The reconstruction is empty or impossible (exit 4).
    EmptyReconstruction(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::EmptyReconstruction(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Solver(msg) => write!(f, "solver error: {msg}"),
            CliError::EmptyReconstruction(msg) => write!(f, "empty reconstruction: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// IO problems count as configuration/environment errors: the run config
/// promises writable paths.
pub fn io_err(context: &str, e: std::io::Error) -> CliError {
    CliError::Config(format!("{context}: {e}"))
}
