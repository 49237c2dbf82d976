use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "{requested} decimation steps requested but lattice {lengths:?} supports at most {max}"
    )]
    TooManySteps {
        requested: usize,
        max: usize,
        lengths: Vec<usize>,
    },

    #[error("lattice mismatch: expected {expected} sites, found {found}")]
    LatticeMismatch { expected: usize, found: usize },

    #[error("frame mismatch: dataset is at step {dataset_steps}, mask is for step {mask_steps}")]
    FrameMismatch {
        dataset_steps: usize,
        mask_steps: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error(
        "Wolff updates are not valid for a model with a longitudinal field; use Metropolis only"
    )]
    WolffWithField,

    #[error("{sites} sites is too many for exact enumeration (max {max})")]
    TooLargeForEnumeration { sites: usize, max: usize },

    #[error("no Binder-cumulant crossing in beta range [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed dataset: {0}")]
    Format(String),

    #[error("truncated dataset body: expected {expected} records, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("need at least {needed} unique snapshots, found {found}")]
    TooFewSnapshots { needed: usize, found: usize },

    #[error("snapshot length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("separation {max_d} exceeds half the period {period} of the current frame")]
    SeparationTooLarge { max_d: usize, period: usize },

    #[error("correlation is not exponentially decaying: {0}")]
    NotExponential(String),

    #[error("no admissible power-law window: {0}")]
    NoPowerLawWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
