//! Arbitrary-precision integers, rationals, directed-rounding dyadic
//! intervals, and real-number oracles with certified refinement.
//!
//! All values are immutable after construction; refinement is a pure function
//! of `(oracle, precision)`, so results never depend on evaluation order or
//! thread count.

mod decide;
mod dyadic;
mod oracle;

pub use decide::{decide_below, RefineStream, Verdict};
pub use dyadic::{Dyadic, DyadicInterval};
pub use oracle::{AlgebraicReal, OracleRepr, Provenance, RealOracle};

pub use num_bigint::BigInt;

/// Exact rational numbers, kept in canonical form (positive denominator,
/// reduced) by construction.
pub type Rational = num_rational::BigRational;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("oracle refinement did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("interval endpoints out of order")]
    EndpointsOutOfOrder,
    #[error("minimal polynomial has no sign change on the supplied interval")]
    NoSignChange,
    #[error("supplied interval could not be certified to isolate a single root")]
    NotIsolating,
    #[error("zero polynomial cannot define an algebraic number")]
    ZeroPolynomial,
    #[error("resource budget exceeded: {0}")]
    Budget(String),
}

/// Parse a decimal-string integer, the wire format used for every `BigInt`.
pub fn bigint_from_str(s: &str) -> Option<BigInt> {
    s.parse().ok()
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn rational_from_str(s: &str) -> Option<Rational> {
    use num_traits::Zero;
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.trim().parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}
