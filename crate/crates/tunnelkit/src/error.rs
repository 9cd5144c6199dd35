use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TunnelError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tolerance {tol} is below what {digits} digits can resolve")]
    ToleranceTooSmall { tol: String, digits: u32 },
    #[error("dimension {n} exceeds the dense solver limit {limit}")]
    DenseLimit { n: usize, limit: usize },
    #[error("parity reduction needs k = 0 or k = K/2, got k = {k} with K = {sectors}")]
    InvalidSector { k: usize, sectors: usize },
    #[error("integration overflowed at x = {x} before reaching the unstable region")]
    Overflow { x: f64 },
    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureNoConvergence { error: f64 },
    #[error("no monotone instanton solution: {0}")]
    NoProfile(String),
    #[error("plateau too noisy to fit (relative spread {spread:e})")]
    PlateauNoisy { spread: f64 },
    #[error("unsupported potential for this operation: {0}")]
    Unsupported(String),
    #[error("least squares system is rank deficient")]
    RankDeficient,
    #[error("no interior minimum in the search window")]
    NoInteriorMinimum,
    #[error("horizon T = {0} too short for exponential regime separation")]
    HorizonTooShort(f64),
    #[error("nonpositive splitting in input at index {0}")]
    NonPositive(usize),
    #[error("splitting {splitting:e} is below the resolution {resolution:e} of {digits} digits")]
    Unresolved { splitting: f64, resolution: f64, digits: u32 },
}

pub type Result<T> = std::result::Result<T, TunnelError>;
