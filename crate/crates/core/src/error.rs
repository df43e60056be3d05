use thiserror::Error;

/// Errors produced by the symbol calculus, kernel evaluation and
/// compression machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("denominator vanishes at the evaluation point (|<z,c>+d| = {0:.3e})")]
    DenominatorVanishes(f64),
    #[error("denominator of the map vanishes at the origin")]
    DenominatorVanishesAtOrigin,
    #[error("parameter vector lies outside the open unit ball (norm = {0})")]
    NotInBall(f64),
    #[error("evaluation point outside the domain of the kernel (|<z,w>| = {0})")]
    OutOfDomain(f64),
    #[error("operands have mismatched dimension or degree cap: {0}")]
    DimensionMismatch(String),
    #[error("conjugation spec is invalid: {0}")]
    InvalidConjugation(String),
    #[error("operation requires the {expected} space, got {got}")]
    WrongSpace { expected: String, got: String },
    #[error("matrix is not symmetric (|A - A^T| = {0:.3e})")]
    NotSymmetric(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("I - A is singular (|det| = {0:.3e})")]
    SingularIminusA(f64),
    #[error("symbol pair is outside the supported closed family: {0}")]
    UnsupportedFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
