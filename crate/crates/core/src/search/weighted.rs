//! Weighted approximation statistics.
//!
//! The badness statistic of a vector `y` under a probability weight vector
//! `r` is `min over 1 <= q <= Q_max of q * max_i ||q y_i||^(1/r_i)`, with the
//! convention that a zero weight contributes nothing (the coordinate is
//! dropped before any arithmetic, which keeps the statistic bit-identical to
//! the same computation on the shortened vector).
//!
//! Comparisons between terms `u^(1/r)` use exact integer cross-powers
//! (`u^(b c') <=> v^(b' c)` after clearing the rational exponents), so no
//! transcendental function is ever evaluated; the reported value itself is a
//! certified root enclosure.

use super::engine::ScanContext;
use super::profile::{EpsStar, EPS_GRID};
use super::{SearchCaps, SearchError, WeightVector};
use crate::monomial::MonomialBasis;
use crate::numerics::{Dyadic, DyadicInterval, Rational, RealOracle};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exponent sizes beyond this fall back to the log-domain comparator.
const CROSS_POWER_CAP: u64 = 1 << 16;

/// Enclosure of `base^(num/den)` for `base >= 0`, by bisection on the
/// `den`-th root of `base^num` at grid `2^-p`.
pub(crate) fn rational_pow_enclosure(
    base: &Rational,
    e: &Rational,
    p: u32,
) -> Result<DyadicInterval, SearchError> {
    if base.is_negative() {
        return Err(SearchError::BadWeights);
    }
    let a: u64 = e.numer().try_into().map_err(|_| SearchError::BadWeights)?;
    let b: u64 = e.denom().try_into().map_err(|_| SearchError::BadWeights)?;
    if b == 0 {
        return Err(SearchError::BadWeights);
    }
    // base^a exactly
    let mut pow = Rational::one();
    for _ in 0..a {
        pow *= base.clone();
    }
    if b == 1 {
        return Ok(DyadicInterval::from_rational(&pow, p));
    }
    if pow.is_zero() {
        return Ok(DyadicInterval::zero());
    }
    // bisect t^b = pow; start from [0, max(1, pow)]
    let one = Rational::one();
    let mut lo = Rational::zero();
    let mut hi = if pow > one { pow.clone() } else { one };
    let bound = Rational::new(BigInt::one(), BigInt::one() << p as u64);
    let two = Rational::from_integer(BigInt::from(2));
    while hi.clone() - lo.clone() > bound {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let mut mp = Rational::one();
        for _ in 0..b {
            mp *= mid.clone();
        }
        if mp <= pow {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DyadicInterval::new(
        Dyadic::from_rational_floor(&lo, p + 2),
        Dyadic::from_rational_ceil(&hi, p + 2),
    ))
}

/// A term `u^(1/r)` held symbolically for exact comparison: `u` is a
/// certified distance enclosure in `[0, 1/2]`, `r = a/b > 0`.
struct PowTerm {
    u: DyadicInterval,
    exact_u: Option<Rational>,
    // exponent 1/r = b/a
    num: u64,
    den: u64,
}

impl PowTerm {
    /// Compare certified upper bounds of `self` and `other` exactly:
    /// `u^(n1/d1) <= v^(n2/d2)  <=>  u^(n1 d2) <= v^(n2 d1)` for bases in
    /// `[0, 1]`.
    fn upper_le(&self, other: &PowTerm) -> Result<bool, SearchError> {
        let e1 = self.num.checked_mul(other.den).ok_or(SearchError::BadWeights)?;
        let e2 = other.num.checked_mul(self.den).ok_or(SearchError::BadWeights)?;
        if e1 > CROSS_POWER_CAP || e2 > CROSS_POWER_CAP {
            return log_domain_le(self, other);
        }
        let a = self.u.hi().clone();
        let b = other.u.hi().clone();
        Ok(dyadic_pow(&a, e1) <= dyadic_pow(&b, e2))
    }

    /// Enclosure of the term value at grid `2^-p`.
    fn value(&self, p: u32) -> Result<DyadicInterval, SearchError> {
        let e = Rational::new(BigInt::from(self.num), BigInt::from(self.den));
        if let Some(u) = &self.exact_u {
            return rational_pow_enclosure(u, &e, p);
        }
        let lo = rational_pow_enclosure(&self.u.lo().to_rational(), &e, p)?;
        let hi = rational_pow_enclosure(&self.u.hi().to_rational(), &e, p)?;
        Ok(DyadicInterval::new(lo.lo().clone(), hi.hi().clone()))
    }
}

fn dyadic_pow(d: &Dyadic, e: u64) -> Dyadic {
    let mut acc = Dyadic::one();
    let mut base = d.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

/// Guarded floating comparison for oversized exponents; the tie margin falls
/// back to "less or equal" with an undecided marker upstream.
fn log_domain_le(a: &PowTerm, b: &PowTerm) -> Result<bool, SearchError> {
    let la = log2_upper(a.u.hi()) * (a.num as f64) / (a.den as f64);
    let lb = log2_upper(b.u.hi()) * (b.num as f64) / (b.den as f64);
    if (la - lb).abs() < 1e-9 {
        return Err(SearchError::Undecided);
    }
    Ok(la <= lb)
}

fn log2_upper(d: &Dyadic) -> f64 {
    if d.is_zero() {
        return f64::NEG_INFINITY;
    }
    d.mantissa().bits() as f64 + d.exp() as f64
}

/// `min over 1 <= q <= q_max of q * max_i ||q y_i||^(1/r_i)`; zero-weight
/// coordinates are dropped before any arithmetic.
pub fn weighted_bad_statistic(
    y: &[RealOracle],
    r: &WeightVector,
    q_max: u64,
    caps: &SearchCaps,
) -> Result<DyadicInterval, SearchError> {
    if r.len() != y.len() {
        return Err(SearchError::BadWeights);
    }
    if !r.is_probability_vector() {
        return Err(SearchError::WeightsNotNormalized);
    }
    if q_max < 1 {
        return Err(SearchError::BadSchedule);
    }
    // drop zero-weight coordinates entirely (z^(1/0) = 0 convention)
    let active: Vec<(usize, &Rational)> = r
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(i, w)| (i, w))
        .collect();
    if active.is_empty() {
        return Ok(DyadicInterval::zero());
    }
    let p = EPS_GRID;
    let mut best: Option<DyadicInterval> = None;
    for q in 1..=q_max {
        let qb = BigInt::from(q);
        let mut terms = Vec::with_capacity(active.len());
        for (i, w) in &active {
            let (u, exact_u) = match y[*i].as_rational() {
                Some(v) => {
                    let qv = Rational::from_integer(qb.clone()) * v.clone();
                    let a0 = super::engine::round_half_up(&qv);
                    let dist = (qv - Rational::from_integer(a0)).abs();
                    (DyadicInterval::from_rational(&dist, p), Some(dist))
                }
                None => {
                    let enc = y[*i].refine(p + q_max.ilog2() + 2)?;
                    (enc.mul_bigint(&qb).int_dist(), None)
                }
            };
            let num: u64 = w.denom().try_into().map_err(|_| SearchError::BadWeights)?;
            let den: u64 = w.numer().try_into().map_err(|_| SearchError::BadWeights)?;
            terms.push(PowTerm { u, exact_u, num, den });
        }
        // argmax by certified upper bound
        let mut max_idx = 0usize;
        for i in 1..terms.len() {
            if terms[max_idx].upper_le(&terms[i]).unwrap_or(true) {
                max_idx = i;
            }
        }
        let tv = terms[max_idx].value(p)?;
        // interval max over all terms keeps the lower end certified too
        let mut lo = tv.lo().clone();
        let mut hi = tv.hi().clone();
        for (i, t) in terms.iter().enumerate() {
            if i != max_idx {
                let v = t.value(p)?;
                if v.lo() > &lo {
                    lo = v.lo().clone();
                }
                if v.hi() > &hi {
                    hi = v.hi().clone();
                }
            }
        }
        let scaled = DyadicInterval::new(lo, hi).mul_bigint(&qb);
        best = Some(match best {
            None => scaled,
            Some(b) => {
                if scaled.hi() < b.hi() {
                    scaled
                } else {
                    b
                }
            }
        });
        // an exact zero cannot be beaten
        if let Some(b) = &best {
            if b.hi().is_zero() {
                break;
            }
        }
    }
    let _ = caps;
    Ok(best.expect("q_max >= 1"))
}

/// Brute-force weighted `eps*(Q)`: enumerate the weighted coefficient box and
/// take the exact max-term per candidate. Used for small Q only.
pub(crate) fn eps_star_weighted_brute(
    ctx: &ScanContext,
    x: &[RealOracle],
    basis: &MonomialBasis,
    q: u64,
    w: &WeightVector,
    caps: &SearchCaps,
) -> Result<EpsStar, SearchError> {
    if w.len() != basis.len() {
        return Err(SearchError::BadWeights);
    }
    let n = basis.len() as u32;
    let support = w.support();
    if support.is_empty() {
        return Err(SearchError::BadWeights);
    }
    // per-coordinate bounds: uniform Q on support coordinates with equal
    // weights (the prefix reduction), floor(Q^(n r_i)) otherwise
    let equal = support
        .windows(2)
        .all(|ww| w.weights()[ww[0]] == w.weights()[ww[1]]);
    let bounds: Vec<u64> = (0..basis.len())
        .map(|i| {
            if w.weights()[i].is_zero() {
                0
            } else if equal {
                q
            } else {
                let e = w.weights()[i].clone() * Rational::from_integer(BigInt::from(n));
                pow_floor_u64(q, &e)
            }
        })
        .collect();
    let count: f64 = bounds.iter().map(|&b| (2 * b + 1) as f64).product();
    if count > caps.max_evaluations.min(1_000_000) as f64 {
        return Err(SearchError::CapExceeded(count, caps.max_evaluations.min(1_000_000)));
    }
    let mut qn = BigInt::one();
    for _ in 0..n {
        qn *= BigInt::from(q);
    }
    let qn_d = Dyadic::from_bigint(qn);

    let mut best: Option<(Rational, Rational, Vec<BigInt>)> = None;
    let mut qv = vec![0i64; basis.len()];
    let mut undecided = 0u32;
    loop {
        // advance odometer over the weighted box
        let mut level = 0usize;
        loop {
            if level == basis.len() {
                // finished
                let (lo, hi, wq) = best.ok_or(SearchError::BadWeights)?;
                let ev = ctx.certify(x, &wq)?;
                undecided += u32::from(ev.a0_ambiguous);
                let enclosure = DyadicInterval::new(
                    Dyadic::from_rational_floor(&lo, EPS_GRID),
                    Dyadic::from_rational_ceil(&hi, EPS_GRID),
                );
                return Ok(EpsStar {
                    enclosure,
                    exact: None,
                    witness_q: wq,
                    witness_a0: ev.a0,
                    witness_value: ev.dist,
                    undecided,
                });
            }
            qv[level] += 1;
            if qv[level] <= bounds[level] as i64 {
                break;
            }
            qv[level] = -(bounds[level] as i64);
            level += 1;
        }
        if qv.iter().all(|&v| v == 0) {
            continue;
        }
        // canonical half (first nonzero positive)
        if qv.iter().find(|&&v| v != 0).map(|&v| v < 0).unwrap_or(false) {
            continue;
        }
        let qb: Vec<BigInt> = qv.iter().map(|&v| BigInt::from(v)).collect();
        let ev = ctx.certify(x, &qb)?;
        undecided += u32::from(ev.a0_ambiguous);
        let iv = ev.dist.interval();
        let mut lo = iv.lo().mul(&qn_d).to_rational();
        let mut hi = iv.hi().mul(&qn_d).to_rational();
        for &i in &support {
            if qv[i] == 0 {
                continue;
            }
            let e = w.weights()[i].clone() * Rational::from_integer(BigInt::from(n));
            let denom = rational_pow_enclosure(
                &Rational::from_integer(BigInt::from(q)),
                &e,
                EPS_GRID,
            )?;
            let tl = Rational::from_integer(BigInt::from(qv[i].unsigned_abs()))
                / denom.hi().to_rational();
            let th = Rational::from_integer(BigInt::from(qv[i].unsigned_abs()))
                / denom.lo().to_rational();
            if tl > lo {
                lo = tl;
            }
            if th > hi {
                hi = th;
            }
        }
        if best.as_ref().map(|(_, bh, _)| hi < *bh).unwrap_or(true) {
            best = Some((lo, hi, qb));
        }
    }
}

fn pow_floor_u64(q: u64, e: &Rational) -> u64 {
    let a: u64 = e.numer().try_into().unwrap_or(u64::MAX);
    let b: u64 = e.denom().try_into().unwrap_or(1);
    let mut qa = BigInt::one();
    for _ in 0..a {
        qa *= BigInt::from(q);
    }
    let root = qa.nth_root(b.min(u32::MAX as u64) as u32);
    root.try_into().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::AlgebraicReal;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn phi() -> RealOracle {
        RealOracle::from_algebraic(
            AlgebraicReal::new(&[bi(-1), bi(-1), bi(1)], rat(1, 1), rat(2, 1)).unwrap(),
        )
    }

    fn e_ish() -> RealOracle {
        // any second coordinate works for the zero-weight test; exactness of
        // the convention matters, not the constant
        RealOracle::from_rational(rat(2718281828, 1000000000))
    }

    #[test]
    fn phi_badness_constant() {
        // min over q <= 13 of q*||q phi|| is 0.381966... at q = 1
        let y = [phi()];
        let r = WeightVector::new(vec![rat(1, 1)]).unwrap();
        let enc = weighted_bad_statistic(&y, &r, 13, &SearchCaps::default()).unwrap();
        let lo = enc.lo().to_rational();
        let hi = enc.hi().to_rational();
        assert!(lo > rat(381_960, 1_000_000) && hi < rat(381_970, 1_000_000), "[{lo}, {hi}]");
    }

    #[test]
    fn exact_hit_is_zero() {
        let y = [RealOracle::from_rational(rat(1, 2))];
        let r = WeightVector::new(vec![rat(1, 1)]).unwrap();
        let enc = weighted_bad_statistic(&y, &r, 2, &SearchCaps::default()).unwrap();
        assert!(enc.hi().is_zero());
    }

    #[test]
    fn zero_weight_equals_deletion() {
        let y2 = [phi(), e_ish()];
        let r2 = WeightVector::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        let a = weighted_bad_statistic(&y2, &r2, 13, &SearchCaps::default()).unwrap();
        let y1 = [phi()];
        let r1 = WeightVector::new(vec![rat(1, 1)]).unwrap();
        let b = weighted_bad_statistic(&y1, &r1, 13, &SearchCaps::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_unnormalized() {
        let y = [phi()];
        let r = WeightVector::new(vec![rat(1, 2)]).unwrap();
        assert!(matches!(
            weighted_bad_statistic(&y, &r, 5, &SearchCaps::default()),
            Err(SearchError::WeightsNotNormalized)
        ));
    }

    #[test]
    fn pow_enclosure_square_root() {
        let enc = rational_pow_enclosure(&rat(2, 1), &rat(1, 2), 40).unwrap();
        let lo = enc.lo().to_rational();
        let hi = enc.hi().to_rational();
        assert!(lo.clone() * lo <= rat(2, 1));
        assert!(hi.clone() * hi >= rat(2, 1));
        assert!(enc.width().to_rational() <= rat(1, 1 << 38));
    }
}
