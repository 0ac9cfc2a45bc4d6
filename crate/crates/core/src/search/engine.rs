//! Scan orchestration: kernel input preparation, shell post-processing with
//! certified zero detection, and exact evaluation of witnesses.

use super::kernel::{self, KernelInput, SCALE};
use super::{box_size, SearchCaps, SearchError};
use crate::monomial::MonomialBasis;
use crate::numerics::{AlgebraicReal, Dyadic, DyadicInterval, Rational, RealOracle};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// A certified value of `|P(x)|` for the optimal constant term.
#[derive(Clone, Debug)]
pub enum CertValue {
    /// Exact rational distance (the point was rational).
    Exact(Rational),
    /// Interval enclosure; `nonzero` means the value is certified nonzero.
    Enclosure { dist: DyadicInterval, nonzero: bool },
    /// Certified exact zero.
    Zero,
}

impl CertValue {
    pub fn is_zero(&self) -> bool {
        match self {
            CertValue::Zero => true,
            CertValue::Exact(r) => r.is_zero(),
            CertValue::Enclosure { .. } => false,
        }
    }

    /// Certified upper bound of the value.
    pub fn upper(&self) -> Dyadic {
        match self {
            CertValue::Zero => Dyadic::zero(),
            CertValue::Exact(r) => Dyadic::from_rational_ceil(r, 4 * SCALE),
            CertValue::Enclosure { dist, .. } => dist.hi().clone(),
        }
    }

    /// Certified lower bound of the value.
    pub fn lower(&self) -> Dyadic {
        match self {
            CertValue::Zero => Dyadic::zero(),
            CertValue::Exact(r) => Dyadic::from_rational_floor(r, 4 * SCALE),
            CertValue::Enclosure { dist, .. } => dist.lo().clone(),
        }
    }

    pub fn interval(&self) -> DyadicInterval {
        DyadicInterval::new(self.lower(), self.upper())
    }

    pub fn certified_nonzero(&self) -> bool {
        match self {
            CertValue::Zero => false,
            CertValue::Exact(r) => !r.is_zero(),
            CertValue::Enclosure { nonzero, .. } => *nonzero,
        }
    }
}

/// Evaluation of one coefficient vector: optimal constant, certified distance.
#[derive(Clone, Debug)]
pub struct CertifiedEval {
    pub a0: BigInt,
    pub dist: CertValue,
    /// Set when the optimal constant could not be pinned at the precision cap
    /// (the reported `a0` is then the midpoint rounding).
    pub a0_ambiguous: bool,
}

/// How exact arithmetic can reach the point.
pub(crate) enum PointKind<'a> {
    AllRational,
    SingleAlgebraic {
        alg_idx: usize,
        alg: &'a AlgebraicReal,
    },
    General,
}

pub(crate) struct ScanContext<'a> {
    pub basis: &'a MonomialBasis,
    pub kind: PointKind<'a>,
    /// exact monomial values when the point is rational
    pub y_rat: Option<Vec<Rational>>,
    /// rational coordinate values (algebraic slot = None)
    pub coord_rat: Vec<Option<Rational>>,
    pub input: KernelInput,
    pub p_max: u32,
}

impl<'a> ScanContext<'a> {
    pub fn new(
        basis: &'a MonomialBasis,
        x: &'a [RealOracle],
        caps: &SearchCaps,
    ) -> Result<Self, SearchError> {
        let coord_rat: Vec<Option<Rational>> =
            x.iter().map(|o| o.as_rational().cloned()).collect();
        let algebraics: Vec<usize> = (0..x.len())
            .filter(|&i| x[i].as_algebraic().is_some())
            .collect();
        let kind = if algebraics.is_empty() {
            PointKind::AllRational
        } else if algebraics.len() == 1 {
            PointKind::SingleAlgebraic {
                alg_idx: algebraics[0],
                alg: x[algebraics[0]].as_algebraic().unwrap(),
            }
        } else {
            PointKind::General
        };
        let y_rat = match kind {
            PointKind::AllRational => {
                let coords: Vec<Rational> =
                    coord_rat.iter().map(|c| c.clone().unwrap()).collect();
                Some(basis.eval_rational(&coords)?)
            }
            _ => None,
        };
        // fixed-point kernel input at scale 2^-96
        let encs = basis.eval_enclosures(x, SCALE + 8)?;
        let mut y_lo = Vec::with_capacity(encs.len());
        let mut y_hi = Vec::with_capacity(encs.len());
        let mut exact = true;
        for e in &encs {
            let r = e.round_out(SCALE);
            let lo = dyadic_to_fixed(r.lo())?;
            let hi = dyadic_to_fixed(r.hi())?;
            if lo != hi {
                exact = false;
            }
            y_lo.push(lo);
            y_hi.push(hi);
        }
        Ok(ScanContext {
            basis,
            kind,
            y_rat,
            coord_rat,
            input: KernelInput { y_lo, y_hi, exact },
            p_max: caps.p_max,
        })
    }

    /// Certified `(a0, |P(x)|)` for a coefficient vector, with the constant
    /// term chosen optimally (nearest integer, half rounded up).
    pub fn certify(&self, x: &[RealOracle], q: &[BigInt]) -> Result<CertifiedEval, SearchError> {
        match &self.kind {
            PointKind::AllRational => {
                let y = self.y_rat.as_ref().unwrap();
                let mut v = Rational::zero();
                for (qi, yi) in q.iter().zip(y) {
                    if !qi.is_zero() {
                        v += Rational::from_integer(qi.clone()) * yi.clone();
                    }
                }
                let a0 = -round_half_up(&v);
                let dist = (v + Rational::from_integer(a0.clone())).abs();
                Ok(CertifiedEval { a0, dist: CertValue::Exact(dist), a0_ambiguous: false })
            }
            PointKind::SingleAlgebraic { alg_idx, alg } => {
                self.certify_single_algebraic(q, *alg_idx, alg)
            }
            PointKind::General => self.certify_general(x, q),
        }
    }

    fn certify_single_algebraic(
        &self,
        q: &[BigInt],
        alg_idx: usize,
        alg: &AlgebraicReal,
    ) -> Result<CertifiedEval, SearchError> {
        // collapse the rational coordinates: P(x) - a0 = R(alpha)
        let mut r_coeffs: Vec<Rational> = Vec::new();
        for (qi, e) in q.iter().zip(self.basis.order()) {
            if qi.is_zero() {
                continue;
            }
            let mut coef = Rational::from_integer(qi.clone());
            let mut pow = 0u32;
            for (j, &ej) in e.0.iter().enumerate() {
                if j == alg_idx {
                    pow = ej;
                } else {
                    for _ in 0..ej {
                        coef *= self.coord_rat[j].clone().unwrap();
                    }
                }
            }
            if r_coeffs.len() <= pow as usize {
                r_coeffs.resize(pow as usize + 1, Rational::zero());
            }
            r_coeffs[pow as usize] += coef;
        }
        // find the nearest integer to R(alpha)
        let (a0, ambiguous) = self.nearest_int_algebraic(&r_coeffs, alg)?;
        let mut s = r_coeffs.clone();
        if s.is_empty() {
            s.push(Rational::zero());
        }
        s[0] += Rational::from_integer(a0.clone());
        let sign = alg.eval_sign(&s)?;
        if sign == 0 {
            return Ok(CertifiedEval { a0, dist: CertValue::Zero, a0_ambiguous: ambiguous });
        }
        // tighten an enclosure until it excludes zero
        let mut p = SCALE;
        loop {
            let enc = eval_univariate_enclosure(&s, alg, p)?.abs();
            if !enc.contains_zero() {
                return Ok(CertifiedEval {
                    a0,
                    dist: CertValue::Enclosure { dist: enc, nonzero: true },
                    a0_ambiguous: ambiguous,
                });
            }
            p *= 2;
            if p > self.p_max.max(1 << 14) {
                return Err(SearchError::Undecided);
            }
        }
    }

    fn nearest_int_algebraic(
        &self,
        r_coeffs: &[Rational],
        alg: &AlgebraicReal,
    ) -> Result<(BigInt, bool), SearchError> {
        let mut p = 32u32;
        loop {
            let enc = eval_univariate_enclosure(r_coeffs, alg, p)?;
            let mid = enc.lo().to_rational();
            let j = round_half_up(&mid);
            let jr = Rational::from_integer(j.clone());
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            let lo = enc.lo().to_rational();
            let hi = enc.hi().to_rational();
            if lo > jr.clone() - half.clone() && hi < jr.clone() + half.clone() {
                return Ok((-j, false));
            }
            // the value may be exactly half-integer: test 2R - (2j +/- 1) = 0
            if p >= 512 {
                for cand in [jr.clone() - half.clone(), jr.clone() + half.clone()] {
                    let mut s: Vec<Rational> = r_coeffs.to_vec();
                    if s.is_empty() {
                        s.push(Rational::zero());
                    }
                    s[0] -= cand.clone();
                    if alg.eval_sign(&s)? == 0 {
                        // exactly half-integer: round half up
                        let a0 = -round_half_up(&cand);
                        return Ok((a0, false));
                    }
                }
            }
            if p > self.p_max.max(1 << 14) {
                return Ok((-j, true));
            }
            p *= 2;
        }
    }

    fn certify_general(
        &self,
        x: &[RealOracle],
        q: &[BigInt],
    ) -> Result<CertifiedEval, SearchError> {
        let mut p = SCALE;
        loop {
            let encs = self.basis.eval_enclosures(x, p)?;
            let mut acc = DyadicInterval::zero();
            for (qi, e) in q.iter().zip(&encs) {
                if !qi.is_zero() {
                    acc = acc.add(&e.mul_bigint(qi));
                }
            }
            let mid = acc.lo().to_rational();
            let j = round_half_up(&mid);
            let jr = Rational::from_integer(j.clone());
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            if acc.lo().to_rational() > jr.clone() - half.clone()
                && acc.hi().to_rational() < jr.clone() + half.clone()
            {
                let shifted = acc
                    .add(&DyadicInterval::point(Dyadic::from_bigint(-j.clone())))
                    .abs();
                let nonzero = !shifted.contains_zero();
                return Ok(CertifiedEval {
                    a0: -j,
                    dist: CertValue::Enclosure { dist: shifted, nonzero },
                    a0_ambiguous: false,
                });
            }
            if p >= self.p_max {
                let shifted = acc
                    .add(&DyadicInterval::point(Dyadic::from_bigint(-j.clone())))
                    .abs();
                return Ok(CertifiedEval {
                    a0: -j,
                    dist: CertValue::Enclosure { dist: shifted, nonzero: false },
                    a0_ambiguous: true,
                });
            }
            p = (p * 2).min(self.p_max);
        }
    }
}

fn dyadic_to_fixed(d: &Dyadic) -> Result<i128, SearchError> {
    let e = d.exp() + SCALE as i64;
    if e < 0 {
        return Err(SearchError::KernelOverflow);
    }
    let m = d.mantissa() << e as u64;
    m.try_into().map_err(|_| SearchError::KernelOverflow)
}

/// `round(v)` with half rounded up (toward +inf).
pub(crate) fn round_half_up(v: &Rational) -> BigInt {
    use num_integer::Integer;
    let two = BigInt::from(2);
    let num = v.numer() * &two + v.denom();
    num.div_floor(&(v.denom() * &two))
}

fn eval_univariate_enclosure(
    coeffs: &[Rational],
    alg: &AlgebraicReal,
    p: u32,
) -> Result<DyadicInterval, SearchError> {
    let x = alg.refine(p)?;
    let mut acc = DyadicInterval::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(&x).add(&DyadicInterval::from_rational(c, p));
    }
    Ok(acc)
}

/// One shell of the scan: the certified minimum of `||q . f(x)||` over
/// `|q|_inf = m`, its witness, and zero bookkeeping.
#[derive(Clone, Debug)]
pub struct Shell {
    pub m: u64,
    pub dist: DyadicInterval,
    pub witness_q: Option<Vec<BigInt>>,
    pub zero_q: Option<Vec<BigInt>>,
    pub certified_zero: bool,
}

/// Result of a shell-by-shell brute scan up to `m_scanned` (the requested
/// radius truncated at the evaluation cap).
#[derive(Clone, Debug)]
pub struct ShellScan {
    pub m_requested: u64,
    pub m_scanned: u64,
    pub exact_mode: bool,
    pub shells: Vec<Shell>,
    /// zero-in-enclosure outcomes that no exact route could settle
    pub undecided_zero: u32,
}

impl ShellScan {
    /// Prefix minimum of the distance upper bounds through shell `m`.
    pub fn psi_upper(&self, m: u64) -> Option<Dyadic> {
        self.shells
            .iter()
            .take_while(|s| s.m <= m)
            .map(|s| s.dist.hi().clone())
            .min()
    }
}

fn i64_vec_to_big(q: &[i64]) -> Vec<BigInt> {
    q.iter().map(|&v| BigInt::from(v)).collect()
}

/// Run the brute kernel and certify zero candidates where exact arithmetic
/// reaches the point.
pub fn shell_scan(
    x: &[RealOracle],
    basis: &MonomialBasis,
    m_max: u64,
    caps: &SearchCaps,
) -> Result<ShellScan, SearchError> {
    let ctx = ScanContext::new(basis, x, caps)?;
    shell_scan_ctx(&ctx, x, m_max, caps, 0)
}

pub(crate) fn shell_scan_ctx(
    ctx: &ScanContext,
    x: &[RealOracle],
    m_max: u64,
    caps: &SearchCaps,
    force_shards: usize,
) -> Result<ShellScan, SearchError> {
    let n = ctx.basis.len();
    let m_scanned = m_max.min(caps.radius_for(n)).max(1);
    let shards = if force_shards > 0 {
        force_shards
    } else {
        (crate::parallel::current_workers() * 16).clamp(1, 512)
    };
    let raw = kernel::scan(&ctx.input, m_scanned, shards, false)?;
    let mut shells = Vec::with_capacity(m_scanned as usize);
    let mut undecided_zero = 0u32;
    for m in 1..=m_scanned {
        let acc = &raw[m as usize];
        let mut dist = DyadicInterval::new(
            Dyadic::new(BigInt::from(acc.dist_lo), -(SCALE as i64)),
            Dyadic::new(BigInt::from(acc.dist_hi), -(SCALE as i64)),
        );
        let mut witness_q = acc.wit.as_ref().map(|w| i64_vec_to_big(w));
        let mut zero_q = acc.zero.as_ref().map(|w| i64_vec_to_big(w));
        let mut certified_zero = false;
        if ctx.input.exact {
            // zero-width kernel values: distances are exact
            certified_zero = acc.dist_hi == 0;
        } else if let Some(zq) = &zero_q {
            match &ctx.kind {
                PointKind::General => undecided_zero += 1,
                _ => match ctx.certify(x, zq) {
                    Ok(ev) if ev.dist.is_zero() => {
                        certified_zero = true;
                        dist = DyadicInterval::zero();
                        witness_q = Some(zq.clone());
                    }
                    Ok(_) => {
                        zero_q = None;
                    }
                    Err(SearchError::Undecided) => undecided_zero += 1,
                    Err(e) => return Err(e),
                },
            }
        }
        shells.push(Shell { m, dist, witness_q, zero_q, certified_zero });
    }
    Ok(ShellScan {
        m_requested: m_max,
        m_scanned,
        exact_mode: ctx.input.exact,
        shells,
        undecided_zero,
    })
}

/// The exact minimizer of `||q . f(x)||` over `0 < |q|_inf <= q_bound`, ties
/// broken by the lexicographically smallest canonical vector.
#[derive(Clone, Debug)]
pub struct BestApprox {
    pub q: Vec<BigInt>,
    pub a0: BigInt,
    pub value: CertValue,
    /// sup-norm of the winning vector
    pub m: u64,
}

pub fn brute_force_best(
    x: &[RealOracle],
    basis: &MonomialBasis,
    q_bound: u64,
    caps: &SearchCaps,
) -> Result<BestApprox, SearchError> {
    let n = basis.len();
    let size = box_size(q_bound, n);
    if size > caps.max_evaluations as f64 {
        return Err(SearchError::CapExceeded(size, caps.max_evaluations));
    }
    let ctx = ScanContext::new(basis, x, caps)?;
    let scan = shell_scan_ctx(&ctx, x, q_bound, caps, 0)?;
    // global argmin by certified upper bound; ties by lex-smallest canonical q
    let mut best: Option<(&Shell, &Vec<BigInt>)> = None;
    for s in &scan.shells {
        let w = match &s.witness_q {
            Some(w) => w,
            None => continue,
        };
        best = match best {
            None => Some((s, w)),
            Some((bs, bw)) => {
                let a = s.dist.hi();
                let b = bs.dist.hi();
                if a < b || (a == b && w < bw) {
                    Some((s, w))
                } else {
                    Some((bs, bw))
                }
            }
        };
    }
    let (shell, q) = best.expect("nonempty scan");
    let ev = ctx.certify(x, q)?;
    Ok(BestApprox { q: q.clone(), a0: ev.a0, value: ev.dist, m: shell.m })
}
