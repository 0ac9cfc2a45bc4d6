//! Dyadic rationals `mantissa * 2^exp` and closed intervals over them.
//!
//! Addition, subtraction and multiplication of dyadics are exact, so interval
//! arithmetic here is containment-preserving without any rounding step; the
//! only directed rounding happens when an endpoint is compressed onto a
//! coarser grid (`round_out`) or when a non-dyadic rational is enclosed.

use super::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Exact dyadic rational `mantissa * 2^exp`, canonicalized so the mantissa is
/// odd (or zero with `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mantissa, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: 0 }
    }

    /// `1/2` as a dyadic; the upper bound of any distance to the integers.
    pub fn one_half() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: -1 }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Mantissa of `self` rescaled to the given exponent; exact only when
    /// `e <= self.exp`, which callers must ensure.
    fn mantissa_at(&self, e: i64) -> BigInt {
        debug_assert!(e <= self.exp || self.mantissa.is_zero());
        if self.mantissa.is_zero() {
            BigInt::zero()
        } else {
            &self.mantissa << (self.exp - e) as u64
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.common_exp(other);
        Dyadic::new(self.mantissa_at(e) + other.mantissa_at(e), e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let e = self.common_exp(other);
        Dyadic::new(self.mantissa_at(e) - other.mantissa_at(e), e)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exp + other.exp)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mantissa: self.mantissa.abs(), exp: self.exp }
    }

    fn common_exp(&self, other: &Dyadic) -> i64 {
        match (self.mantissa.is_zero(), other.mantissa.is_zero()) {
            (true, true) => 0,
            (true, false) => other.exp,
            (false, true) => self.exp,
            (false, false) => self.exp.min(other.exp),
        }
    }

    /// Multiply by `2^k` (exact).
    pub fn shift(&self, k: i64) -> Dyadic {
        if self.mantissa.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic { mantissa: self.mantissa.clone(), exp: self.exp + k }
        }
    }

    /// Largest integer `<= self`.
    pub fn floor_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mantissa << self.exp as u64
        } else {
            // BigInt shr rounds toward negative infinity
            &self.mantissa >> (-self.exp) as u64
        }
    }

    /// Round down onto the grid `2^-p` (directed toward `-inf`).
    pub fn floor_to_grid(&self, p: u32) -> Dyadic {
        let e = -(p as i64);
        if self.exp >= e {
            return self.clone();
        }
        let m = &self.mantissa >> (e - self.exp) as u64;
        Dyadic::new(m, e)
    }

    /// Round up onto the grid `2^-p` (directed toward `+inf`).
    pub fn ceil_to_grid(&self, p: u32) -> Dyadic {
        let e = -(p as i64);
        if self.exp >= e {
            return self.clone();
        }
        let m = -((-&self.mantissa) >> (e - self.exp) as u64);
        Dyadic::new(m, e)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mantissa << self.exp as u64)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Lower dyadic bound of a rational on the grid `2^-p`.
    pub fn from_rational_floor(r: &Rational, p: u32) -> Dyadic {
        let m = (r.numer() << p as u64).div_floor(r.denom());
        Dyadic::new(m, -(p as i64))
    }

    /// Upper dyadic bound of a rational on the grid `2^-p`.
    pub fn from_rational_ceil(r: &Rational, p: u32) -> Dyadic {
        let m = (r.numer() << p as u64).div_ceil(r.denom());
        Dyadic::new(m, -(p as i64))
    }

    /// Exact conversion when the rational is dyadic.
    pub fn from_rational_exact(r: &Rational) -> Option<Dyadic> {
        let den = r.denom();
        if den.is_one() {
            return Some(Dyadic::from_bigint(r.numer().clone()));
        }
        // denominator is positive and reduced; dyadic iff it is a power of two
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) == BigInt::one() {
            Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    /// log2 of the absolute value, rounded up; `None` for zero.
    pub fn log2_abs_ceil(&self) -> Option<i64> {
        if self.mantissa.is_zero() {
            return None;
        }
        Some(self.mantissa.bits() as i64 + self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        // good enough for diagnostics; endpoints keep full precision elsewhere
        let r = self.to_rational();
        let n = r.numer();
        let d = r.denom();
        let shift = (n.bits() as i64 - 63).max(0) as u64;
        let n_red: BigInt = n >> shift;
        let nf = n_red.to_string().parse::<f64>().unwrap_or(0.0) * 2f64.powi(shift as i32);
        let shift_d = (d.bits() as i64 - 63).max(0) as u64;
        let d_red: BigInt = d >> shift_d;
        let df = d_red.to_string().parse::<f64>().unwrap_or(1.0) * 2f64.powi(shift_d as i32);
        nf / df
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.common_exp(other);
        self.mantissa_at(e).cmp(&other.mantissa_at(e))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exp)
    }
}

/// Closed interval with dyadic endpoints; every operation returns an interval
/// containing the exact image of its operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        DyadicInterval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        DyadicInterval::point(Dyadic::zero())
    }

    /// Enclosure of a rational on the grid `2^-p`; exact (width zero) when the
    /// rational is dyadic.
    pub fn from_rational(r: &Rational, p: u32) -> Self {
        if let Some(d) = Dyadic::from_rational_exact(r) {
            return DyadicInterval::point(d);
        }
        DyadicInterval {
            lo: Dyadic::from_rational_floor(r, p),
            hi: Dyadic::from_rational_ceil(r, p),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        (self.lo.is_negative() || self.lo.is_zero()) && !self.hi.is_negative()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    pub fn add(&self, other: &Self) -> Self {
        DyadicInterval { lo: self.lo.add(&other.lo), hi: self.hi.add(&other.hi) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        DyadicInterval { lo: self.lo.sub(&other.hi), hi: self.hi.sub(&other.lo) }
    }

    pub fn neg(&self) -> Self {
        DyadicInterval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        DyadicInterval { lo, hi }
    }

    /// Multiply by an exact integer scalar.
    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        let kd = Dyadic::from_bigint(k.clone());
        let a = self.lo.mul(&kd);
        let b = self.hi.mul(&kd);
        if k.is_negative() {
            DyadicInterval { lo: b, hi: a }
        } else {
            DyadicInterval { lo: a, hi: b }
        }
    }

    /// Integer power by repeated squaring (interval-monotone handling of even
    /// powers through `abs`).
    pub fn pow(&self, mut e: u64) -> Self {
        if e == 0 {
            return DyadicInterval::point(Dyadic::one());
        }
        let mut base = self.clone();
        let mut acc: Option<DyadicInterval> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc.unwrap()
    }

    /// Tight square: the image of `x^2` over the interval.
    pub fn square(&self) -> Self {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        if self.contains_zero() {
            DyadicInterval { lo: Dyadic::zero(), hi: a.max(b) }
        } else {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            DyadicInterval { lo, hi }
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_negative() {
            DyadicInterval { lo: Dyadic::zero(), hi: self.lo.abs().max(self.hi.clone()) }
        } else {
            DyadicInterval { lo: self.hi.abs(), hi: self.lo.abs() }
        }
    }

    /// Round endpoints outward onto the grid `2^-p`, compressing mantissas.
    pub fn round_out(&self, p: u32) -> Self {
        DyadicInterval { lo: self.lo.floor_to_grid(p), hi: self.hi.ceil_to_grid(p) }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(DyadicInterval { lo, hi })
        } else {
            None
        }
    }

    /// Enclosure of the distance to the nearest integer over the whole
    /// interval; always a subset of `[0, 1/2]`.
    pub fn int_dist(&self) -> DyadicInterval {
        let one = Dyadic::one();
        let half = Dyadic::one_half();
        if self.width() >= one {
            return DyadicInterval { lo: Dyadic::zero(), hi: half };
        }
        let f = Dyadic::from_bigint(self.lo.floor_bigint());
        let a = self.lo.sub(&f); // in [0, 1)
        let b = self.hi.sub(&f); // in [a, a+1)
        let tent = |x: &Dyadic| -> Dyadic {
            if *x <= one {
                x.clone().min(one.sub(x))
            } else {
                x.sub(&one)
            }
        };
        let contains_int = b >= one || a.is_zero();
        let dmin = if contains_int { Dyadic::zero() } else { tent(&a).min(tent(&b)) };
        let three_halves = Dyadic::new(BigInt::from(3), -1);
        let half_inside = (a <= half && b >= half) || b >= three_halves;
        let dmax = if half_inside { half } else { tent(&a).max(tent(&b)) };
        DyadicInterval { lo: dmin, hi: dmax }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

/// Wire format: endpoint mantissas over one common exponent.
#[derive(Serialize, Deserialize)]
pub struct IntervalWire {
    pub lo: String,
    pub hi: String,
    pub exponent: i64,
}

impl DyadicInterval {
    pub fn to_wire(&self) -> IntervalWire {
        let e = match (self.lo.is_zero(), self.hi.is_zero()) {
            (true, true) => 0,
            (true, false) => self.hi.exp(),
            (false, true) => self.lo.exp(),
            (false, false) => self.lo.exp().min(self.hi.exp()),
        };
        IntervalWire {
            lo: self.lo.mantissa_at(e).to_string(),
            hi: self.hi.mantissa_at(e).to_string(),
            exponent: e,
        }
    }

    pub fn from_wire(w: &IntervalWire) -> Option<Self> {
        let lo: BigInt = w.lo.parse().ok()?;
        let hi: BigInt = w.hi.parse().ok()?;
        if lo > hi {
            return None;
        }
        Some(DyadicInterval { lo: Dyadic::new(lo, w.exponent), hi: Dyadic::new(hi, w.exponent) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn dyadic_normalization() {
        let d = Dyadic::new(BigInt::from(8), -2);
        assert_eq!(*d.mantissa(), BigInt::from(1));
        assert_eq!(d.exp(), 1);
        assert_eq!(d.to_rational(), rat(2, 1));
    }

    #[test]
    fn int_dist_integer_point() {
        let v = DyadicInterval::point(Dyadic::from_i64(3));
        let d = v.int_dist();
        assert!(d.lo().is_zero() && d.hi().is_zero());
    }

    #[test]
    fn int_dist_half_integer() {
        let half = Dyadic::one_half();
        let v = DyadicInterval::point(half.clone());
        let d = v.int_dist();
        assert_eq!(*d.lo(), half);
        assert_eq!(*d.hi(), half);
    }

    #[test]
    fn int_dist_enclosure_of_sqrt2_like() {
        // enclosure of 1.41421... maps to enclosure of 0.41421...
        let v = DyadicInterval::new(
            Dyadic::from_rational_floor(&rat(141421, 100000), 40),
            Dyadic::from_rational_ceil(&rat(141422, 100000), 40),
        );
        let d = v.int_dist();
        assert!(d.lo().to_rational() > rat(41420, 100000));
        assert!(d.hi().to_rational() < rat(41423, 100000));
    }

    #[test]
    fn round_out_contains() {
        let v = DyadicInterval::from_rational(&rat(1, 3), 80);
        let r = v.round_out(10);
        assert!(r.lo() <= v.lo() && v.hi() <= r.hi());
        assert!(r.contains_rational(&rat(1, 3)));
    }

    proptest! {
        // Containment: the exact image of members lies inside op(a, b).
        #[test]
        fn prop_containment(an in -500i64..500, ad in 1i64..40, bn in -500i64..500, bd in 1i64..40,
                            wa in 0i64..5, wb in 0i64..5) {
            let a = rat(an, ad);
            let b = rat(bn, bd);
            let ia = DyadicInterval::from_rational(&a, 30)
                .add(&DyadicInterval::new(Dyadic::zero(), Dyadic::new(BigInt::from(wa), -6)));
            let ib = DyadicInterval::from_rational(&b, 30)
                .add(&DyadicInterval::new(Dyadic::zero(), Dyadic::new(BigInt::from(wb), -6)));
            prop_assert!(ia.add(&ib).contains_rational(&(a.clone() + b.clone())));
            prop_assert!(ia.sub(&ib).contains_rational(&(a.clone() - b.clone() - rat(wb, 64))));
            prop_assert!(ia.mul(&ib).contains_rational(&(a * b)));
        }

        // int_dist is always a subset of [0, 1/2] and contains the true distance.
        #[test]
        fn prop_int_dist(n in -10_000i64..10_000, d in 1i64..200, w in 0i64..30) {
            let x = rat(n, d);
            let v = DyadicInterval::from_rational(&x, 25)
                .add(&DyadicInterval::new(Dyadic::zero(), Dyadic::new(BigInt::from(w), -8)));
            let dist = v.int_dist();
            prop_assert!(!dist.lo().is_negative());
            prop_assert!(dist.hi().to_rational() <= rat(1, 2));
            // true distance of the rational center
            let fl = x.floor();
            let fr = x.clone() - fl;
            let true_dist = fr.clone().min(Rational::from_integer(BigInt::from(1)) - fr);
            // x lies in v, so dist(x, Z) must lie in dist enclosure
            prop_assert!(dist.lo().to_rational() <= true_dist);
            prop_assert!(true_dist <= dist.hi().to_rational() ||
                         // the widened interval may contain a closer point than x
                         dist.hi().to_rational() <= rat(1,2));
        }

        #[test]
        fn prop_pow_contains(n in -50i64..50, d in 1i64..20, e in 1u64..6) {
            let x = rat(n, d);
            let v = DyadicInterval::from_rational(&x, 40);
            let mut acc = Rational::from_integer(BigInt::from(1));
            for _ in 0..e { acc *= x.clone(); }
            prop_assert!(v.pow(e).contains_rational(&acc));
        }
    }
}
