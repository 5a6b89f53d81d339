use thiserror::Error;

/// Errors raised across the laboratory.
///
/// The variants map one-to-one onto the failure modes the CLI turns into
/// exit codes (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", .0.join("; "))]
    ConfigInvalid(Vec<String>),

    #[error("ellipticity violated: margin a+(rz) - a-(rz) = {margin}{}", remedy_suffix(.remedy))]
    EllipticityViolated {
        margin: f64,
        remedy: Option<String>,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("secular function has a pole at lambda = {lambda} (mode {n})")]
    PoleAtLambda { n: i64, lambda: f64 },

    #[error("invalid mesh: {0}")]
    MeshInvalid(String),

    #[error("unsupported transmission convention: {0}")]
    UnsupportedConvention(String),

    #[error("mass matrix is not positive definite (pivot {pivot} at row {row})")]
    MassNotSpd { row: usize, pivot: f64 },

    #[error("dimension {dim} exceeds dense cap {cap}; use the windowed solver")]
    UseWindowedSolver { dim: usize, cap: usize },

    #[error("shift {shift} is too close to an eigenvalue (pivot {pivot} at row {row})")]
    ShiftTooClose { shift: f64, row: usize, pivot: f64 },

    #[error("mode outside the elliptic region: k* = {k_star} <= 1")]
    EllipticRegionViolated { k_star: f64 },

    #[error("symbol is singular: k* + epsilon = {value}")]
    SingularSymbol { value: f64 },

    #[error("transport equation is degenerate: dS/dx(0) = 0")]
    TransportDegenerate,

    #[error("expansion inconsistent: log-log slope {slope} outside [{lo}, {hi}]")]
    ExpansionInconsistent { slope: f64, lo: f64, hi: f64 },

    #[error("no interface mode for n = {n}: {reason}")]
    NoInterfaceMode { n: u32, reason: String },

    #[error("first-order correction failed for n = {n}: discriminant {discriminant}")]
    CorrectionFailed { n: u32, discriminant: f64 },

    #[error("not enough eigenvalues in fit window: {have} {sign} (need {need})")]
    NotEnoughEigenvalues {
        sign: &'static str,
        have: usize,
        need: usize,
    },

    #[error("invalid input: {0}")]
    InputInvalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn remedy_suffix(remedy: &Option<String>) -> String {
    match remedy {
        Some(r) => format!(" (remedy: {r})"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code: 1 config, 2 ellipticity, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid(_)
            | Error::UnsupportedConvention(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::InputInvalid(_) => 1,
            Error::EllipticityViolated { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
