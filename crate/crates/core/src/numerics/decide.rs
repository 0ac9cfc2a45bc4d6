//! Three-valued threshold decisions over refinement streams.

use super::dyadic::DyadicInterval;
use super::{NumericsError, Rational};

/// Anything that can produce certified enclosures of one fixed real at
/// requested precision. Implemented by oracles and by polynomial-at-point
/// evaluations.
pub trait RefineStream {
    fn refine(&self, p: u32) -> Result<DyadicInterval, NumericsError>;
}

impl RefineStream for super::RealOracle {
    fn refine(&self, p: u32) -> Result<DyadicInterval, NumericsError> {
        // inherent method
        super::RealOracle::refine(self, p)
    }
}

/// Outcome of a comparison against a threshold. `Undecided` is an explicit
/// result, never a silent guess; exact ties are resolved upstream by exact
/// arithmetic where available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

/// Decide whether the represented value is below `threshold`, refining up to
/// width `2^-p_max`.
pub fn decide_below<S: RefineStream + ?Sized>(
    stream: &S,
    threshold: &Rational,
    p_max: u32,
) -> Result<Verdict, NumericsError> {
    let mut p = 8u32;
    loop {
        let enc = stream.refine(p)?;
        if enc.hi().to_rational() < *threshold {
            return Ok(Verdict::Yes);
        }
        if enc.lo().to_rational() > *threshold {
            return Ok(Verdict::No);
        }
        if p >= p_max {
            return Ok(Verdict::Undecided);
        }
        p = (p * 2).min(p_max);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RealOracle;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zero_below_quarter() {
        let o = RealOracle::from_rational(rat(0, 1));
        assert_eq!(decide_below(&o, &rat(1, 4), 64).unwrap(), Verdict::Yes);
    }

    #[test]
    fn half_not_below_quarter() {
        let o = RealOracle::from_rational(rat(1, 2));
        assert_eq!(decide_below(&o, &rat(1, 4), 64).unwrap(), Verdict::No);
    }

    #[test]
    fn equality_is_undecided() {
        let o = RealOracle::from_rational(rat(1, 4));
        assert_eq!(decide_below(&o, &rat(1, 4), 64).unwrap(), Verdict::Undecided);
    }
}
