use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("near-defective matrix: eigenvector condition estimate {condition:.3e}")]
    NearDefective { condition: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("not a valid state: {0}")]
    InvalidState(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("psi = {psi} lies outside the anticommutator class (requires pi/2)")]
    OutsideAnticommutatorClass { psi: f64 },

    #[error("broken PT phase or exceptional point: r = {r}, s = {s}")]
    BrokenOrExceptional { r: f64, s: f64 },

    #[error("exceptional point: biorthonormality violated (r = {r}, s = {s})")]
    ExceptionalPoint { r: f64, s: f64 },

    #[error("invalid state coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("non-physical energy: imaginary part {imag:.3e}")]
    NonPhysicalEnergy { imag: f64 },

    #[error("index {index} out of range for trajectory of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
}
