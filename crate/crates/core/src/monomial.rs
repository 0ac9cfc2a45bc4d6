//! The graded basis of nonconstant monomials in `d` variables of total degree
//! at most `k`, and evaluation of the corresponding embedding of a point.
//!
//! Ordering is graded (blocks of increasing total degree) and, inside a block,
//! lexicographic with the first variable highest. The first `n_j` entries for
//! any `j <= k` are then exactly the monomials of degree `<= j`, which is what
//! makes prefix weight vectors select a lower-degree subproblem.

use crate::numerics::{DyadicInterval, NumericsError, Rational, RealOracle};
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MonomialError {
    #[error("dimension and degree must be at least 1")]
    BadParameters,
    #[error("basis size {0} exceeds the configured cap {1}")]
    TooLarge(u128, u64),
    #[error("point has {got} coordinates, basis needs {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Exponent vector of one monomial: dense, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// The ordered list of the `n = C(k+d, d) - 1` nonconstant monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    d: usize,
    k: u32,
    order: Vec<ExponentVector>,
}

pub const DEFAULT_BASIS_CAP: u64 = 1_000_000;

/// Binomial coefficient as an exact big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k.min(n));
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl MonomialBasis {
    /// All exponent vectors with `1 <= total degree <= k`, graded order,
    /// descending-lexicographic within each block (so `x1` leads and `xd^t`
    /// closes each degree-`t` block).
    pub fn new(d: usize, k: u32) -> Result<Self, MonomialError> {
        Self::with_cap(d, k, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(d: usize, k: u32, cap: u64) -> Result<Self, MonomialError> {
        if d < 1 || k < 1 {
            return Err(MonomialError::BadParameters);
        }
        let n = binomial(k as u64 + d as u64, d as u64) - BigInt::one();
        let n_u: u128 = n
            .try_into()
            .map_err(|_| MonomialError::TooLarge(u128::MAX, cap))?;
        if n_u > cap as u128 {
            return Err(MonomialError::TooLarge(n_u, cap));
        }
        let mut order = Vec::with_capacity(n_u as usize);
        for t in 1..=k {
            emit_block(d, t, &mut Vec::with_capacity(d), &mut order);
        }
        debug_assert_eq!(order.len() as u128, n_u);
        Ok(MonomialBasis { d, k, order })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> u32 {
        self.k
    }

    /// `n`, the number of nonconstant monomials.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[ExponentVector] {
        &self.order
    }

    /// Number of monomials of total degree `<= j` (the prefix length `n_j`).
    pub fn prefix_len(&self, j: u32) -> usize {
        self.order
            .iter()
            .take_while(|e| e.total_degree() <= j)
            .count()
    }

    /// Exact evaluation of the embedding at a rational point.
    pub fn eval_rational(&self, x: &[Rational]) -> Result<Vec<Rational>, MonomialError> {
        self.check_dim(x.len())?;
        Ok(self
            .order
            .iter()
            .map(|e| {
                let mut acc = Rational::one();
                for (xi, &ei) in x.iter().zip(&e.0) {
                    for _ in 0..ei {
                        acc *= xi.clone();
                    }
                }
                acc
            })
            .collect())
    }

    /// Certified enclosures of the embedding coordinates, each of width
    /// `<= 2^-p`, computed from per-coordinate oracle refinements.
    pub fn eval_enclosures(
        &self,
        x: &[RealOracle],
        p: u32,
    ) -> Result<Vec<DyadicInterval>, MonomialError> {
        self.check_dim(x.len())?;
        // magnitude bounds from a coarse refinement pick the working precision
        let coarse: Vec<DyadicInterval> = x
            .iter()
            .map(|o| o.refine(4))
            .collect::<Result<_, _>>()?;
        let mut slack: u32 = 2 + (self.len() as f64).log2().ceil() as u32;
        for c in &coarse {
            let mag = c
                .lo()
                .abs()
                .max(c.hi().abs())
                .log2_abs_ceil()
                .unwrap_or(0)
                .max(0) as u32;
            slack += self.k * (mag + 1);
        }
        let wp = p + slack;
        let coords: Vec<DyadicInterval> = x
            .iter()
            .map(|o| o.refine(wp))
            .collect::<Result<_, _>>()?;
        Ok(self
            .order
            .iter()
            .map(|e| {
                let mut acc = DyadicInterval::point(crate::numerics::Dyadic::one());
                for (ci, &ei) in coords.iter().zip(&e.0) {
                    if ei > 0 {
                        acc = acc.mul(&ci.pow(ei as u64));
                    }
                }
                acc.round_out(wp)
            })
            .collect())
    }

    /// Wire form of the ordering: one exponent tuple per monomial.
    pub fn serialize_order(&self) -> Vec<Vec<u32>> {
        self.order.iter().map(|e| e.0.clone()).collect()
    }

    fn check_dim(&self, got: usize) -> Result<(), MonomialError> {
        if got != self.d {
            Err(MonomialError::DimensionMismatch { got, want: self.d })
        } else {
            Ok(())
        }
    }
}

/// Emit all exponent vectors of total degree exactly `t` over the remaining
/// variables, first variable taking the largest exponents first.
fn emit_block(vars_left: usize, t: u32, prefix: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
    if vars_left == 1 {
        prefix.push(t);
        out.push(ExponentVector(prefix.clone()));
        prefix.pop();
        return;
    }
    for e in (0..=t).rev() {
        prefix.push(e);
        emit_block(vars_left - 1, t - e, prefix, out);
        prefix.pop();
    }
}

/// Oracle wrapper for one monomial of a point: refines the coordinates and
/// multiplies, satisfying the usual width contract.
pub struct MonomialOracle<'a> {
    coords: &'a [RealOracle],
    exponents: &'a ExponentVector,
}

impl<'a> MonomialOracle<'a> {
    pub fn new(coords: &'a [RealOracle], exponents: &'a ExponentVector) -> Self {
        MonomialOracle { coords, exponents }
    }
}

impl crate::numerics::RefineStream for MonomialOracle<'_> {
    fn refine(&self, p: u32) -> Result<DyadicInterval, NumericsError> {
        // bound the magnitudes, then refine tightly enough for the product
        let coarse: Vec<DyadicInterval> = self
            .coords
            .iter()
            .map(|o| o.refine(4))
            .collect::<Result<_, _>>()?;
        let total: u32 = self.exponents.0.iter().sum();
        let mut slack = 2 + total;
        for c in &coarse {
            let mag = c.hi().abs().max(c.lo().abs()).log2_abs_ceil().unwrap_or(0).max(0) as u32;
            slack += total * (mag + 1);
        }
        let wp = p + slack;
        let mut acc = DyadicInterval::point(crate::numerics::Dyadic::one());
        for (o, &e) in self.coords.iter().zip(&self.exponents.0) {
            if e > 0 {
                acc = acc.mul(&o.refine(wp)?.pow(e as u64));
            }
        }
        Ok(acc.round_out(wp))
    }
}
