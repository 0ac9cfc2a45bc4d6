//! Integer polynomials of bounded total degree over a monomial basis.
//!
//! A polynomial is a constant term plus a coefficient vector against the
//! basis ordering: `P(x) = a0 + q . f(x)`. The constant term is kept separate
//! because the two heights treat it differently, and because for a fixed `q`
//! the optimal constant is `-round(q . f(x))`, which turns `|P(x)|` into the
//! distance of `q . f(x)` to the nearest integer.

use crate::monomial::{MonomialBasis, MonomialError};
use crate::numerics::{DyadicInterval, NumericsError, Rational, RealOracle};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    d: usize,
    k: u32,
    a0: BigInt,
    q: Vec<BigInt>,
}

/// The two heights: `H` over all coefficients, `Htilde` over the nonconstant
/// ones only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightPair {
    pub h: String,
    pub htilde: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heights {
    pub h: BigInt,
    pub htilde: BigInt,
}

impl Heights {
    pub fn wire(&self) -> HeightPair {
        HeightPair { h: self.h.to_string(), htilde: self.htilde.to_string() }
    }
}

impl IntPolynomial {
    pub fn new(basis: &MonomialBasis, a0: BigInt, q: Vec<BigInt>) -> Result<Self, MonomialError> {
        if q.len() != basis.len() {
            return Err(MonomialError::DimensionMismatch { got: q.len(), want: basis.len() });
        }
        Ok(IntPolynomial { d: basis.dimension(), k: basis.max_degree(), a0, q })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> u32 {
        self.k
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.a0
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.q.iter().all(|c| c.is_zero())
    }

    /// `q != 0`: the polynomial takes part in searches (pure constants are
    /// excluded everywhere, their statistics are degenerate).
    pub fn is_search_admissible(&self) -> bool {
        self.q.iter().any(|c| !c.is_zero())
    }

    pub fn heights(&self) -> Heights {
        let htilde = self
            .q
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        let h = htilde.clone().max(self.a0.abs());
        Heights { h, htilde }
    }

    /// Exact value at a rational point.
    pub fn eval_exact(
        &self,
        basis: &MonomialBasis,
        x: &[Rational],
    ) -> Result<Rational, MonomialError> {
        let f = basis.eval_rational(x)?;
        let mut acc = Rational::from_integer(self.a0.clone());
        for (ci, fi) in self.q.iter().zip(&f) {
            if !ci.is_zero() {
                acc += Rational::from_integer(ci.clone()) * fi.clone();
            }
        }
        Ok(acc)
    }

    /// Certified enclosure of the value at an oracle point. The width is
    /// bounded by `Htilde * n * k * 2^-p * (1 + max|x_i|)^k` (checked
    /// empirically in the tests; the working precision is padded so the bound
    /// holds with room to spare).
    pub fn eval_enclosure(
        &self,
        basis: &MonomialBasis,
        x: &[RealOracle],
        p: u32,
    ) -> Result<DyadicInterval, MonomialError> {
        let heights = self.heights();
        let pad = 2 + basis.len().ilog2() + bits(&heights.htilde);
        let f = basis.eval_enclosures(x, p + pad)?;
        let mut acc = DyadicInterval::point(crate::numerics::Dyadic::from_bigint(self.a0.clone()));
        for (ci, fi) in self.q.iter().zip(&f) {
            if !ci.is_zero() {
                acc = acc.add(&fi.mul_bigint(ci));
            }
        }
        Ok(acc)
    }

    /// Wire format with the pinned monomial order.
    pub fn to_wire(&self) -> PolynomialWire {
        PolynomialWire {
            a0: self.a0.to_string(),
            q: self.q.iter().map(|c| c.to_string()).collect(),
            d: self.d,
            k: self.k,
        }
    }

    pub fn from_wire(w: &PolynomialWire, basis: &MonomialBasis) -> Option<Self> {
        if w.d != basis.dimension() || w.k != basis.max_degree() {
            return None;
        }
        let a0 = w.a0.parse().ok()?;
        let q: Option<Vec<BigInt>> = w.q.iter().map(|s| s.parse().ok()).collect();
        IntPolynomial::new(basis, a0, q?).ok()
    }
}

fn bits(n: &BigInt) -> u32 {
    n.bits().max(1) as u32
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialWire {
    pub a0: String,
    pub q: Vec<String>,
    pub d: usize,
    pub k: u32,
}

impl fmt::Display for IntPolynomial {
    // diagnostics rendering; the i-th basis monomial prints as `m{i}`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a0)?;
        for (i, c) in self.q.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " + {}*m{}", c, i + 1)?;
            }
        }
        Ok(())
    }
}

/// PolyAtPoint: a refinement stream for `P(x)` at an oracle point, used by the
/// three-valued comparisons.
pub struct PolyAtPoint<'a> {
    pub poly: &'a IntPolynomial,
    pub basis: &'a MonomialBasis,
    pub point: &'a [RealOracle],
}

impl crate::numerics::RefineStream for PolyAtPoint<'_> {
    fn refine(&self, p: u32) -> Result<DyadicInterval, NumericsError> {
        self.poly
            .eval_enclosure(self.basis, self.point, p)
            .map_err(|e| match e {
                MonomialError::Numerics(n) => n,
                other => NumericsError::Budget(other.to_string()),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::AlgebraicReal;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn heights_examples() {
        let b = MonomialBasis::new(1, 2).unwrap();
        // 7 + 3x - 5x^2
        let p = IntPolynomial::new(&b, bi(7), vec![bi(3), bi(-5)]).unwrap();
        let h = p.heights();
        assert_eq!(h.h, bi(7));
        assert_eq!(h.htilde, bi(5));
        // 2x - 1
        let p = IntPolynomial::new(&b, bi(-1), vec![bi(2), bi(0)]).unwrap();
        let h = p.heights();
        assert_eq!(h.h, bi(2));
        assert_eq!(h.htilde, bi(2));
        // constant 4
        let p = IntPolynomial::new(&b, bi(4), vec![bi(0), bi(0)]).unwrap();
        let h = p.heights();
        assert_eq!(h.h, bi(4));
        assert_eq!(h.htilde, bi(0));
        assert!(!p.is_search_admissible());
    }

    #[test]
    fn eval_exact_examples() {
        let b1 = MonomialBasis::new(1, 2).unwrap();
        let p = IntPolynomial::new(&b1, bi(-1), vec![bi(2), bi(0)]).unwrap();
        assert_eq!(p.eval_exact(&b1, &[rat(1, 2)]).unwrap(), rat(0, 1));
        let p = IntPolynomial::new(&b1, bi(1), vec![bi(1), bi(1)]).unwrap();
        assert_eq!(p.eval_exact(&b1, &[rat(2, 1)]).unwrap(), rat(7, 1));

        let b2 = MonomialBasis::new(2, 2).unwrap();
        // x1*x2 - 1 ; order is [x1, x2, x1^2, x1x2, x2^2]
        let p = IntPolynomial::new(&b2, bi(-1), vec![bi(0), bi(0), bi(0), bi(1), bi(0)]).unwrap();
        assert_eq!(p.eval_exact(&b2, &[rat(3, 5), rat(5, 3)]).unwrap(), rat(0, 1));
    }

    #[test]
    fn enclosure_contains_zero_at_sqrt2() {
        let b = MonomialBasis::new(1, 2).unwrap();
        let p = IntPolynomial::new(&b, bi(-2), vec![bi(0), bi(1)]).unwrap();
        let x = [RealOracle::from_algebraic(
            AlgebraicReal::new(&[bi(-2), bi(0), bi(1)], rat(1, 1), rat(2, 1)).unwrap(),
        )];
        let enc = p.eval_enclosure(&b, &x, 40).unwrap();
        assert!(enc.contains_zero());
        assert!(enc.width().to_rational() <= rat(1, 1 << 30));
    }

    #[test]
    fn enclosure_exact_for_dyadic_rational() {
        let b = MonomialBasis::new(1, 1).unwrap();
        let p = IntPolynomial::new(&b, bi(-1), vec![bi(1)]).unwrap();
        let x = [RealOracle::from_rational(rat(1, 2))];
        let enc = p.eval_enclosure(&b, &x, 20).unwrap();
        assert!(enc.is_point());
        assert_eq!(enc.lo().to_rational(), rat(-1, 2));
    }

    proptest! {
        // enclosure always contains the exact value at rational points, and
        // the documented width bound holds
        #[test]
        fn prop_enclosure_contains_exact(
            a0 in -100i64..100,
            c1 in -100i64..100,
            c2 in -100i64..100,
            xn in -50i64..50,
            xd in 1i64..50,
            p in 8u32..48,
        ) {
            let b = MonomialBasis::new(1, 2).unwrap();
            let poly = IntPolynomial::new(&b, bi(a0), vec![bi(c1), bi(c2)]).unwrap();
            let x = rat(xn, xd);
            let exact = poly.eval_exact(&b, &[x.clone()]).unwrap();
            let o = [RealOracle::from_rational(x.clone())];
            let enc = poly.eval_enclosure(&b, &o, p).unwrap();
            prop_assert!(enc.contains_rational(&exact));
            // width <= Htilde * n * k * 2^-p * (1 + max|x|)^k
            let h = poly.heights();
            let htilde = Rational::from_integer(h.htilde);
            let n = Rational::from_integer(bi(2));
            let k = Rational::from_integer(bi(2));
            let m = Rational::from_integer(bi(1)) + if x.is_negative() { -x } else { x };
            let bound = htilde * n * k * m.clone() * m
                * Rational::new(bi(1), BigInt::from(1u64) << p.min(62));
            prop_assert!(enc.width().to_rational() <= bound.max(rat(0,1)) ||
                         enc.width().to_rational() <= rat(1, 1i64 << p.min(62) as i64));
        }
    }
}
