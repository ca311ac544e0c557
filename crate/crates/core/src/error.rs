//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A level `N` was required to be squarefree and is not.
    #[error("level {0} is not squarefree")]
    NotSquarefree(u64),

    /// A requested tolerance cannot be met by the configured scheme.
    #[error("precision error: {0}")]
    Precision(String),

    /// Numerical instability (non-finite intermediate) was detected.
    #[error("instability: {0}")]
    Instability(String),

    /// A Hecke eigenvalue for a needed prime was never ingested.
    #[error("insufficient data: prime {0} not present in coefficient table")]
    InsufficientData(u64),

    /// Coefficient file is malformed at a specific line (1-based).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Header of a coefficient file violates k-even / N-squarefree rules.
    #[error("header error: {0}")]
    Header(String),

    /// An unramified coefficient violates the Deligne bound |λ_f(p)| ≤ 2.
    #[error("Deligne bound violated at line {line}: |λ_f({p})| = {value} > 2")]
    DeligneViolation { line: usize, p: u64, value: f64 },

    /// A ramified coefficient is not ±p^{−1/2} after normalization.
    #[error("ramified prime {p} at line {line}: λ = {value}, expected ±{expected}")]
    RamifiedNormalization {
        line: usize,
        p: u64,
        value: f64,
        expected: f64,
    },

    /// A prime dividing the level was used where an unramified prime is required.
    #[error("prime {0} divides the level; operation requires an unramified prime")]
    RamifiedPrime(u64),
}
