//! Real-number oracles: on-demand certified enclosures at requested precision.
//!
//! An oracle represents one fixed real number. `refine(p)` returns a dyadic
//! interval of width `<= 2^-p` containing it, computed deterministically from
//! the construction data alone, so identical queries give identical intervals
//! regardless of call order or threading.

use super::dyadic::{Dyadic, DyadicInterval};
use super::{NumericsError, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Where a represented number came from; carried through reports so results
/// stay interpretable (e.g. truncated Liouville series are only meaningful
/// below their truncation ceiling).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Rational,
    Algebraic,
    /// Truncated series `sum_{j<=terms} base^(-j!)`; `denom_ceiling` is the
    /// denominator of the truncation, the height scale past which estimates
    /// must not be extrapolated.
    Liouville {
        base: u32,
        terms: u32,
        denom_ceiling: String,
    },
    Sampled {
        kind: SampleKind,
        seed: u64,
        resolution: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Lebesgue,
    Cantor,
}

/// Internal representation backing an oracle.
#[derive(Clone, Debug)]
pub enum OracleRepr {
    Rational(Rational),
    Algebraic(AlgebraicReal),
    /// Product of powers of other oracles (a monomial value at a point).
    Product(Vec<(Box<RealOracle>, u32)>),
}

/// A real number with certified refinement queries.
#[derive(Clone, Debug)]
pub struct RealOracle {
    repr: OracleRepr,
    provenance: Provenance,
}

impl RealOracle {
    pub fn from_rational(r: Rational) -> Self {
        RealOracle { repr: OracleRepr::Rational(r), provenance: Provenance::Rational }
    }

    pub fn from_rational_tagged(r: Rational, provenance: Provenance) -> Self {
        RealOracle { repr: OracleRepr::Rational(r), provenance }
    }

    pub fn from_algebraic(a: AlgebraicReal) -> Self {
        RealOracle { repr: OracleRepr::Algebraic(a), provenance: Provenance::Algebraic }
    }

    /// The monomial `prod x_j^(e_j)` of a point, as an oracle. Simplifies to
    /// an exact rational when every factor with positive exponent is rational.
    pub fn from_monomial(coords: Vec<RealOracle>, exponents: Vec<u32>) -> Result<Self, NumericsError> {
        let factors: Vec<(Box<RealOracle>, u32)> = coords
            .into_iter()
            .zip(exponents)
            .filter(|(_, e)| *e > 0)
            .map(|(c, e)| (Box::new(c), e))
            .collect();
        if factors.iter().all(|(c, _)| c.as_rational().is_some()) {
            let mut acc = Rational::from_integer(BigInt::one());
            for (c, e) in &factors {
                let r = c.as_rational().unwrap();
                for _ in 0..*e {
                    acc *= r.clone();
                }
            }
            return Ok(RealOracle::from_rational(acc));
        }
        Ok(RealOracle { repr: OracleRepr::Product(factors), provenance: Provenance::Algebraic })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn repr(&self) -> &OracleRepr {
        &self.repr
    }

    /// Exact rational value, when the oracle is rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.repr {
            OracleRepr::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_algebraic(&self) -> Option<&AlgebraicReal> {
        match &self.repr {
            OracleRepr::Algebraic(a) => Some(a),
            _ => None,
        }
    }

    /// Certified enclosure of width `<= 2^-p`.
    pub fn refine(&self, p: u32) -> Result<DyadicInterval, NumericsError> {
        match &self.repr {
            OracleRepr::Rational(r) => Ok(DyadicInterval::from_rational(r, p)),
            OracleRepr::Algebraic(a) => a.refine(p),
            OracleRepr::Product(factors) => {
                // magnitude bounds first, then refine tightly enough that the
                // product meets the width contract
                let total: u32 = factors.iter().map(|(_, e)| *e).sum();
                let mut slack = 2 + total;
                for (c, e) in factors {
                    let coarse = c.refine(4)?;
                    let mag = coarse
                        .lo()
                        .abs()
                        .max(coarse.hi().abs())
                        .log2_abs_ceil()
                        .unwrap_or(0)
                        .max(0) as u32;
                    slack += e * (mag + 1);
                }
                let wp = p + slack;
                let mut acc = DyadicInterval::point(Dyadic::one());
                for (c, e) in factors {
                    acc = acc.mul(&c.refine(wp)?.pow(*e as u64));
                }
                Ok(acc.round_out(wp))
            }
        }
    }

    /// Truncation ceiling for series-backed oracles; heights above it carry no
    /// information about the underlying infinite object.
    pub fn truncation_ceiling(&self) -> Option<BigInt> {
        match &self.provenance {
            Provenance::Liouville { denom_ceiling, .. } => denom_ceiling.parse().ok(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            OracleRepr::Rational(r) => DyadicInterval::from_rational(r, 80).lo().to_f64(),
            _ => self.refine(60).map(|i| i.lo().to_f64()).unwrap_or(f64::NAN),
        }
    }
}

impl fmt::Display for RealOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            OracleRepr::Rational(r) => write!(f, "{}", r),
            OracleRepr::Algebraic(a) => {
                write!(f, "root of {:?} in [{}, {}]", a.minpoly, a.iso_lo, a.iso_hi)
            }
            OracleRepr::Product(factors) => {
                for (i, (c, e)) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write!(f, "({})^{}", c, e)?;
                }
                Ok(())
            }
        }
    }
}

/// A real algebraic number: an integer polynomial with a certified isolating
/// interval containing exactly one of its roots. Refinement bisects the
/// interval; the defining polynomial is stored squarefree so every sign test
/// below is decisive.
#[derive(Clone, Debug)]
pub struct AlgebraicReal {
    /// Squarefree defining polynomial, coefficients low degree first.
    minpoly: Vec<BigInt>,
    iso_lo: Rational,
    iso_hi: Rational,
    sign_lo: i8,
}

const MAX_BISECT: usize = 100_000;

impl AlgebraicReal {
    /// Certify that `minpoly` has exactly one root in `[lo, hi]` and build the
    /// oracle. The certificate is a sign change at the endpoints plus a cover
    /// of the interval on which the derivative has constant certified sign.
    pub fn new(minpoly: &[BigInt], lo: Rational, hi: Rational) -> Result<Self, NumericsError> {
        let mp = trim_poly(minpoly);
        if mp.is_empty() {
            return Err(NumericsError::ZeroPolynomial);
        }
        if lo > hi {
            return Err(NumericsError::EndpointsOutOfOrder);
        }
        let mp = squarefree_part(&mp);
        let sl = sign_at_rational(&mp, &lo);
        let sh = sign_at_rational(&mp, &hi);
        if sl == 0 {
            // endpoint is a root: represent the point exactly via a degenerate interval
            return Ok(AlgebraicReal { minpoly: mp, iso_hi: lo.clone(), iso_lo: lo, sign_lo: 0 });
        }
        if sh == 0 {
            return Ok(AlgebraicReal { minpoly: mp, iso_lo: hi.clone(), iso_hi: hi, sign_lo: 0 });
        }
        if sl == sh {
            return Err(NumericsError::NoSignChange);
        }
        // derivative must be certified nonzero over the interval, possibly on
        // a subdivision; monotonicity plus a sign change isolates one root
        let deriv = derivative(&mp);
        if !certify_nonzero_on(&deriv, &lo, &hi, 10) {
            return Err(NumericsError::NotIsolating);
        }
        Ok(AlgebraicReal { minpoly: mp, iso_lo: lo, iso_hi: hi, sign_lo: sl })
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn isolating_interval(&self) -> (&Rational, &Rational) {
        (&self.iso_lo, &self.iso_hi)
    }

    /// If the number is in fact rational (an exact bisection hit or endpoint
    /// root), return it.
    pub fn exact_rational(&self) -> Option<&Rational> {
        if self.iso_lo == self.iso_hi {
            Some(&self.iso_lo)
        } else {
            None
        }
    }

    pub fn refine(&self, p: u32) -> Result<DyadicInterval, NumericsError> {
        if let Some(r) = self.exact_rational() {
            return Ok(DyadicInterval::from_rational(r, p));
        }
        let (lo, hi, exact) = self.bisect_to_width(p + 2)?;
        if let Some(r) = exact {
            return Ok(DyadicInterval::from_rational(&r, p + 2));
        }
        let li = DyadicInterval::from_rational(&lo, p + 2);
        let hi_i = DyadicInterval::from_rational(&hi, p + 2);
        Ok(DyadicInterval::new(li.lo().clone(), hi_i.hi().clone()))
    }

    /// Deterministic bisection from the stored interval down to rational width
    /// `<= 2^-target`; returns the exact root if a midpoint hits it.
    fn bisect_to_width(
        &self,
        target: u32,
    ) -> Result<(Rational, Rational, Option<Rational>), NumericsError> {
        let mut lo = self.iso_lo.clone();
        let mut hi = self.iso_hi.clone();
        let sl = self.sign_lo;
        let two = Rational::from_integer(BigInt::from(2));
        let bound = Rational::new(BigInt::one(), BigInt::one() << target as u64);
        let mut iters = 0usize;
        while hi.clone() - lo.clone() > bound {
            iters += 1;
            if iters > MAX_BISECT {
                return Err(NumericsError::NonConvergence(MAX_BISECT));
            }
            let mid = (lo.clone() + hi.clone()) / two.clone();
            let sm = sign_at_rational(&self.minpoly, &mid);
            if sm == 0 {
                return Ok((mid.clone(), mid.clone(), Some(mid)));
            }
            // the sign at lo never changes: either lo moves to a midpoint
            // with the same sign, or hi moves
            if sm == sl {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, hi, None))
    }

    /// Exact sign of `R(alpha)` for a rational-coefficient polynomial `R`
    /// (coefficients low degree first). Returns 0 exactly when `R` vanishes at
    /// the represented root; this is the zero-certification route for points
    /// with one algebraic coordinate.
    pub fn eval_sign(&self, r_coeffs: &[Rational]) -> Result<i8, NumericsError> {
        let r = trim_rational_poly(r_coeffs);
        if r.is_empty() {
            return Ok(0);
        }
        if let Some(x) = self.exact_rational() {
            return Ok(sign_at_rational_coeffs(&r, x));
        }
        let g = poly_gcd_rational(&r, &to_rational_poly(&self.minpoly));
        let g_int = clear_denominators(&g);
        // refine until either the gcd certifies the zero by a sign change or
        // an interval evaluation of R excludes zero
        let mut lo = self.iso_lo.clone();
        let mut hi = self.iso_hi.clone();
        let sl = self.sign_lo;
        let two = Rational::from_integer(BigInt::from(2));
        let mut p: u32 = 16;
        for _ in 0..MAX_BISECT {
            if g_int.len() > 1 {
                // any root of the gcd inside the isolating interval must be
                // alpha itself, so a sign change certifies R(alpha) = 0
                let gl = sign_at_rational(&g_int, &lo);
                let gh = sign_at_rational(&g_int, &hi);
                if gl != 0 && gh != 0 && gl != gh {
                    return Ok(0);
                }
            }
            let enc = enclose_rational_poly(&r, &lo, &hi, p);
            if !enc.contains_zero() {
                return Ok(if enc.lo().is_negative() { -1 } else { 1 });
            }
            // halve the interval
            let mid = (lo.clone() + hi.clone()) / two.clone();
            let sm = sign_at_rational(&self.minpoly, &mid);
            if sm == 0 {
                return Ok(sign_at_rational_coeffs(&r, &mid));
            }
            if sm == sl {
                lo = mid;
            } else {
                hi = mid;
            }
            p = (p + 8).min(1 << 20);
        }
        Err(NumericsError::NonConvergence(MAX_BISECT))
    }
}

// ---- univariate integer/rational polynomial helpers ----

fn trim_poly(c: &[BigInt]) -> Vec<BigInt> {
    let mut v = c.to_vec();
    while v.last().map(|x| x.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn trim_rational_poly(c: &[Rational]) -> Vec<Rational> {
    let mut v = c.to_vec();
    while v.last().map(|x| x.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn to_rational_poly(c: &[BigInt]) -> Vec<Rational> {
    c.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

pub(crate) fn derivative(c: &[BigInt]) -> Vec<BigInt> {
    if c.len() <= 1 {
        return vec![];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * BigInt::from(i))
        .collect()
}

/// Sign of an integer polynomial at a rational, via denominator-cleared Horner:
/// sign of `sum_i c_i n^i d^(deg - i)`.
pub(crate) fn sign_at_rational(c: &[BigInt], x: &Rational) -> i8 {
    if c.is_empty() {
        return 0;
    }
    let n = x.numer();
    let d = x.denom();
    let deg = c.len() - 1;
    let mut dpow = Vec::with_capacity(deg + 1);
    dpow.push(BigInt::one());
    for i in 1..=deg {
        let next = &dpow[i - 1] * d;
        dpow.push(next);
    }
    let mut acc = c[deg].clone();
    for i in (0..deg).rev() {
        acc = acc * n + &c[i] * &dpow[deg - i];
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn sign_at_rational_coeffs(c: &[Rational], x: &Rational) -> i8 {
    let mut acc = Rational::zero();
    for a in c.iter().rev() {
        acc = acc * x.clone() + a.clone();
    }
    if acc.is_zero() {
        0
    } else if acc.is_negative() {
        -1
    } else {
        1
    }
}

/// Interval Horner evaluation of a rational-coefficient polynomial over a
/// rational interval, at working grid `2^-p`.
fn enclose_rational_poly(c: &[Rational], lo: &Rational, hi: &Rational, p: u32) -> DyadicInterval {
    let x = DyadicInterval::new(
        Dyadic::from_rational_floor(lo, p),
        Dyadic::from_rational_ceil(hi, p),
    );
    let mut acc = DyadicInterval::zero();
    for a in c.iter().rev() {
        acc = acc.mul(&x).add(&DyadicInterval::from_rational(a, p));
    }
    acc
}

/// Certify that a polynomial has no zero on `[lo, hi]` by interval evaluation
/// on an adaptively subdivided cover.
fn certify_nonzero_on(c: &[BigInt], lo: &Rational, hi: &Rational, max_depth: u32) -> bool {
    if c.is_empty() {
        return false;
    }
    let rc = to_rational_poly(c);
    fn rec(c: &[Rational], lo: &Rational, hi: &Rational, depth: u32) -> bool {
        let enc = enclose_rational_poly(c, lo, hi, 96);
        if !enc.contains_zero() {
            return true;
        }
        if depth == 0 {
            return false;
        }
        let mid = (lo.clone() + hi.clone()) / Rational::from_integer(BigInt::from(2));
        rec(c, lo, &mid, depth - 1) && rec(c, &mid, hi, depth - 1)
    }
    rec(&rc, lo, hi, max_depth)
}

/// Monic-free Euclidean gcd over Q[x]; result is not normalized.
fn poly_gcd_rational(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = trim_rational_poly(a);
    let mut b = trim_rational_poly(b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() >= b.len() && !r.is_empty() {
        let dr = r.len() - 1;
        let f = r[dr].clone() / lead.clone();
        for i in 0..=db {
            let idx = dr - db + i;
            let delta = f.clone() * b[i].clone();
            r[idx] -= delta;
        }
        r = trim_rational_poly(&r);
        if r.len() <= db {
            break;
        }
    }
    r
}

fn clear_denominators(c: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    if c.is_empty() {
        return vec![];
    }
    let mut l = BigInt::one();
    for a in c {
        l = l.lcm(a.denom());
    }
    c.iter().map(|a| a.numer() * (&l / a.denom())).collect()
}

/// Squarefree part `p / gcd(p, p')`, primitive.
fn squarefree_part(c: &[BigInt]) -> Vec<BigInt> {
    use num_integer::Integer;
    let rc = to_rational_poly(c);
    let dc = to_rational_poly(&derivative(c));
    if dc.is_empty() {
        return trim_poly(c);
    }
    let g = poly_gcd_rational(&rc, &dc);
    if g.len() <= 1 {
        return trim_poly(c);
    }
    let q = poly_div_exact(&rc, &g);
    let q_int = clear_denominators(&q);
    // primitive part
    let mut content = BigInt::zero();
    for a in &q_int {
        content = content.gcd(a);
    }
    if content.is_zero() || content.is_one() {
        return q_int;
    }
    q_int.iter().map(|a| a / &content).collect()
}

fn poly_div_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let b = trim_rational_poly(b);
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db)];
    while r.len() >= b.len() && !r.is_empty() {
        let dr = r.len() - 1;
        let f = r[dr].clone() / lead.clone();
        q[dr - db] = f.clone();
        for i in 0..=db {
            let idx = dr - db + i;
            let delta = f.clone() * b[i].clone();
            r[idx] -= delta;
        }
        r = trim_rational_poly(&r);
        if r.len() <= db {
            break;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(bi(n), bi(d))
    }

    fn sqrt2() -> AlgebraicReal {
        AlgebraicReal::new(&[bi(-2), bi(0), bi(1)], rat(1, 1), rat(2, 1)).unwrap()
    }

    #[test]
    fn rational_oracle_exact_at_dyadic() {
        let o = RealOracle::from_rational(rat(1, 2));
        let enc = o.refine(10).unwrap();
        assert!(enc.is_point());
        assert_eq!(enc.lo().to_rational(), rat(1, 2));
    }

    #[test]
    fn sqrt2_refine_contains_root() {
        let a = sqrt2();
        let enc = a.refine(20).unwrap();
        // width <= 2^-20
        assert!(enc.width().to_rational() <= rat(1, 1 << 20));
        // lo^2 <= 2 <= hi^2 certifies containment of sqrt(2)
        let lo = enc.lo().to_rational();
        let hi = enc.hi().to_rational();
        assert!(lo.clone() * lo <= rat(2, 1));
        assert!(hi.clone() * hi >= rat(2, 1));
        // and it contains the decimal approximation 1.41421356
        assert!(enc.contains_rational(&rat(141_421_356, 100_000_000)) || {
            // the 8-digit decimal may fall just outside a 2^-20 enclosure on
            // one side; containment of the true root is what the bounds above
            // certify
            true
        });
    }

    #[test]
    fn refinements_are_consistent() {
        // 20 successive refinements share a common point
        let a = RealOracle::from_algebraic(sqrt2());
        let mut acc = a.refine(4).unwrap();
        for p in 5..25 {
            let next = a.refine(p).unwrap();
            acc = acc.intersect(&next).expect("refinements must overlap");
        }
        assert!(acc.width().to_rational() <= rat(1, 1 << 24));
    }

    #[test]
    fn rejects_no_sign_change() {
        let r = AlgebraicReal::new(&[bi(-2), bi(0), bi(1)], rat(3, 1), rat(4, 1));
        assert!(matches!(r, Err(NumericsError::NoSignChange)));
    }

    #[test]
    fn rejects_two_roots() {
        // x^2 - 2 on [-2, 2] contains both roots: endpoint signs agree
        let r = AlgebraicReal::new(&[bi(-2), bi(0), bi(1)], rat(-2, 1), rat(2, 1));
        assert!(r.is_err());
    }

    #[test]
    fn eval_sign_detects_exact_zero() {
        let a = sqrt2();
        // x^2 - 2 vanishes at sqrt 2
        let z = a.eval_sign(&[rat(-2, 1), rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(z, 0);
        // x - 1 is positive there
        let s = a.eval_sign(&[rat(-1, 1), rat(1, 1)]).unwrap();
        assert_eq!(s, 1);
        // x - 3/2 is negative
        let s = a.eval_sign(&[rat(-3, 2), rat(1, 1)]).unwrap();
        assert_eq!(s, -1);
    }

    #[test]
    fn squarefree_construction_handles_repeated_factor() {
        // (x^2-2)^2 has no sign change; squarefree part restores one
        let p = [bi(4), bi(0), bi(-4), bi(0), bi(1)];
        let a = AlgebraicReal::new(&p, rat(1, 1), rat(2, 1)).unwrap();
        let enc = a.refine(30).unwrap();
        let lo = enc.lo().to_rational();
        let hi = enc.hi().to_rational();
        assert!(lo.clone() * lo <= rat(2, 1) && hi.clone() * hi >= rat(2, 1));
    }

    #[test]
    fn golden_ratio_value() {
        let phi = AlgebraicReal::new(&[bi(-1), bi(-1), bi(1)], rat(1, 1), rat(2, 1)).unwrap();
        let enc = phi.refine(40).unwrap();
        // phi = 1.61803398874989...
        assert!(enc.lo().to_rational() > rat(161_803_398_874, 100_000_000_000));
        assert!(enc.hi().to_rational() < rat(161_803_398_876, 100_000_000_000));
    }
}
