use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid dual: {0}")]
    InvalidDual(String),

    #[error("invalid cochain: {0}")]
    InvalidCochain(String),

    #[error("not a cocycle (max defect {defect:.3e})")]
    NotACocycle { defect: f64 },

    #[error("trivializations are not cohomologous (max defect {defect:.3e})")]
    NotCohomologous { defect: f64 },

    #[error("exhaustive search over a group of order {order} exceeds the cap {cap}")]
    SearchTooLarge { order: usize, cap: usize },

    #[error("unsupported tau map: {0}")]
    UnsupportedTau(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("translation by {0:?} does not preserve the lattice")]
    OffLattice(Vec<f64>),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
