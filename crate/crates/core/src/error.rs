use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("Bloch vector norm {norm} exceeds 1")]
    UnphysicalBloch { norm: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("trace {trace} is not 1")]
    TraceNotUnit { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BathError {
    #[error("invalid bath parameter: {0}")]
    InvalidParams(String),
    #[error("spectral density is defined for omega >= 0, got {0}")]
    NegativeFrequency(f64),
    #[error("KMS ratio undefined at T = {temperature}, omega = {omega}")]
    KmsUndefined { temperature: f64, omega: f64 },
    #[error("adaptive quadrature did not converge within {max_subdivisions} subdivisions (error estimate {error_estimate:e})")]
    NonConvergence {
        max_subdivisions: usize,
        error_estimate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid qubit parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Bath(#[from] BathError),
    #[error("stationary state is not unique (null space dimension {dimension})")]
    NonUniqueStationaryState { dimension: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("polar angle {0} outside [0, pi]")]
    ThetaOutOfRange(f64),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("positivity violated at t = {time} (min eigenvalue {min_eigenvalue:e})")]
    PositivityViolation { time: f64, min_eigenvalue: f64 },
    #[error("state correction {correction:e} at t = {time} exceeds 1e-9")]
    DriftExceeded { time: f64, correction: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("trajectory needs at least 2 points, got {0}")]
    TooShort(usize),
    #[error("ambiguous branch matching at step {step}")]
    BranchAmbiguity { step: usize },
    #[error("retained branch {branch} passes through a degeneracy at step {step}")]
    DegeneratePhase { branch: usize, step: usize },
    #[error("visibility {magnitude:e} too small for a defined phase")]
    VanishingVisibility { magnitude: f64 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

/// Umbrella error for the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Bath(#[from] BathError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 1 for configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
