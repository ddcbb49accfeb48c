use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("enumeration budget exceeded: {required_bits} free bits needed, budget allows {allowed_bits}")]
    Budget { required_bits: u32, allowed_bits: u32 },

    #[error("rank error: {0}")]
    Rank(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("model {0} has no gauge symmetry")]
    NoGaugeSymmetry(String),

    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    #[error("undefined Binder cumulant: <m^2> vanishes")]
    UndefinedCumulant,

    #[error("infeasible syndrome: no error chain has this boundary")]
    InfeasibleSyndrome,

    #[error("ambiguous branch: {0}")]
    Branch(String),

    #[error("unfittable: {reason}; excluded points: {excluded:?}")]
    Unfittable { reason: String, excluded: Vec<String> },

    #[error("no crossing in range: {0}")]
    NoCrossing(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Parse(_) => 2,
            Error::Resource(_) | Error::Budget { .. } => 3,
            Error::NoCrossing(_) | Error::Unfittable { .. } => 4,
            _ => 1,
        }
    }
}
