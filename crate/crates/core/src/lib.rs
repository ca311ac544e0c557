//! Numerical machinery for the value distribution of symmetric power
//! L-functions `L(1, sym^m f)` for orders `m = 1..4`.
//!
//! The library has three layers:
//!
//! * deterministic analysis — prime sieves and analytic constants
//!   ([`primes`]), the local algebra of `sym^m` classes ([`symrep`]),
//!   extremal constants `A_m`, `B_m` ([`constants`]), and moment/asymptotic
//!   evaluation ([`moments`]);
//! * a random Euler product model with reproducible counter-based sampling
//!   ([`montecarlo`]);
//! * ingestion and evaluation of actual newform Hecke eigenvalue data
//!   ([`hecke`]).
//!
//! Everything is pure and thread-safe; the Monte Carlo layer is
//! deterministic for a fixed seed regardless of thread count.

pub mod constants;
pub mod error;
pub mod hecke;
pub mod moments;
pub mod montecarlo;
pub mod primes;
pub mod quad;
pub mod symrep;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Sign selector for extremal/tail quantities (`+` = large values of
/// `L(1, sym^m f)`, `−` = small values).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1.0` or `−1.0`.
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Parse `"+"`/`"plus"`/`"-"`/`"minus"` (case-insensitive).
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            other => Err(Error::Domain(format!("unknown sign {other:?}"))),
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Validate a symmetric power order, returning it on success.
pub fn check_order(m: u32) -> Result<u32> {
    if (1..=4).contains(&m) {
        Ok(m)
    } else {
        Err(Error::Domain(format!(
            "symmetric power order must be in 1..=4, got {m}"
        )))
    }
}
