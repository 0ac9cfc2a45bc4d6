//! Record tables: the successive best approximations at a point.
//!
//! A record is a shell whose certified value beats every lower shell. Each
//! entry carries both heights, the certified value, and a certified rational
//! lower bound on `log(1/|P(x)|)/log H(P)`. The badness statistic `c_min`
//! tracks the best certified upper bound on `|P(x)| * Htilde(P)^n` seen, the
//! desk-scale stand-in for the badly-approximable constant.

use super::engine::{shell_scan_ctx, CertValue, ScanContext};
use super::{Method, SearchCaps, SearchError};
use crate::lattice::{small_form_candidates, FormSearch};
use crate::monomial::MonomialBasis;
use crate::numerics::{Dyadic, Rational, RealOracle};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct ApproximationRecord {
    pub q: Vec<BigInt>,
    pub a0: BigInt,
    /// sup norm of `q` (= Htilde, the constant term is optimal)
    pub m: u64,
    pub h: BigInt,
    pub htilde: BigInt,
    pub value: CertValue,
    pub exact_zero: bool,
    /// certified lower bound on log(1/|P(x)|)/log H(P); present when H >= 2
    /// and the value is certified nonzero
    pub ratio: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct RecordTable {
    pub d: usize,
    pub k: u32,
    pub method: Method,
    pub entries: Vec<ApproximationRecord>,
    /// best certified upper bound on |P(x)| * Htilde^n; zero iff an exact
    /// zero was recorded
    pub c_min: Dyadic,
    /// matching certified lower bound
    pub c_min_lo: Dyadic,
    pub m_scanned: u64,
    /// the requested radius was clamped to a series truncation ceiling
    pub truncated_at_ceiling: bool,
    pub undecided: u32,
}

/// Largest exponent ratio certified in 1/RATIO_DEN steps.
const RATIO_DEN: u64 = 128;

/// Certified largest `a/RATIO_DEN` with `value_hi^RATIO_DEN * h^a <= 1`; a
/// lower bound on `log(1/value)/log h`. Exact integer verification, floating
/// point is used only to seed the search.
pub(crate) fn certified_ratio_floor(value_hi: &Dyadic, h: &BigInt) -> Option<Rational> {
    if value_hi.is_zero() || h < &BigInt::from(2) {
        return None;
    }
    let one = Dyadic::one();
    if *value_hi >= one {
        return Some(Rational::zero());
    }
    // seed from coarse logs
    let log2_v = value_hi.mantissa().bits() as f64 + value_hi.exp() as f64; // ~ log2 + O(1)
    let log2_h = (h.bits() as f64).max(1.0);
    let guess = (-log2_v / log2_h * RATIO_DEN as f64) as i64;
    let mut a = (guess - 4).max(0);
    let vpow = dyadic_pow(value_hi, RATIO_DEN);
    let verify = move |a: i64| -> bool {
        if a < 0 {
            return true;
        }
        let hpow = num_traits::Pow::pow(h, a as u32);
        // vpow * hpow <= 1  <=>  mantissa * hpow <= 2^-exp
        let m = vpow.mantissa() * hpow;
        let e = vpow.exp();
        if e >= 0 {
            e == 0 && m <= BigInt::one()
        } else {
            m <= (BigInt::one() << (-e) as u64)
        }
    };
    while a > 0 && !verify(a) {
        a -= 1;
    }
    let mut steps = 0;
    while steps < 64 && verify(a + 1) {
        a += 1;
        steps += 1;
    }
    if !verify(a) {
        return Some(Rational::zero());
    }
    Some(Rational::new(BigInt::from(a), BigInt::from(RATIO_DEN)))
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

/// Scan up to height `q_max` and extract the successive minima.
pub fn record_scan(
    x: &[RealOracle],
    basis: &MonomialBasis,
    q_max: u64,
    method: Method,
    caps: &SearchCaps,
) -> Result<RecordTable, SearchError> {
    let ctx = ScanContext::new(basis, x, caps)?;
    // truncated series carry a height ceiling past which the finite object
    // says nothing about the infinite one
    let ceiling = x
        .iter()
        .filter_map(|o| o.truncation_ceiling())
        .min()
        .and_then(|c| u64::try_from(&c).ok());
    let (q_eff, truncated) = match ceiling {
        Some(c) if q_max > c => (c, true),
        _ => (q_max, false),
    };
    match method {
        Method::Brute => brute_records(&ctx, x, basis, q_eff, truncated, caps),
        Method::Lattice => lattice_records(&ctx, x, basis, q_eff, truncated, caps),
    }
}

fn brute_records(
    ctx: &ScanContext,
    x: &[RealOracle],
    basis: &MonomialBasis,
    q_max: u64,
    truncated: bool,
    caps: &SearchCaps,
) -> Result<RecordTable, SearchError> {
    let scan = shell_scan_ctx(ctx, x, q_max, caps, 0)?;
    let mut entries: Vec<ApproximationRecord> = Vec::new();
    let mut best_hi: Option<Dyadic> = None;
    let mut undecided = scan.undecided_zero;
    for shell in &scan.shells {
        let improves = match &best_hi {
            None => true,
            Some(b) => shell.dist.hi() < b,
        };
        if !improves {
            continue;
        }
        let q = match (&shell.witness_q, &shell.zero_q, shell.certified_zero) {
            (_, Some(z), true) => z.clone(),
            (Some(w), _, _) => w.clone(),
            _ => continue,
        };
        let ev = ctx.certify(x, &q)?;
        undecided += u32::from(ev.a0_ambiguous);
        let rec = build_record(basis, &q, ev.a0, ev.dist, shell.m)?;
        best_hi = Some(shell.dist.hi().clone());
        let zero = rec.exact_zero;
        entries.push(rec);
        if zero {
            // an exact zero closes the table: nothing can beat it
            break;
        }
    }
    Ok(finish_table(basis, Method::Brute, entries, scan.m_scanned, truncated, undecided))
}

fn lattice_records(
    ctx: &ScanContext,
    x: &[RealOracle],
    basis: &MonomialBasis,
    q_max: u64,
    truncated: bool,
    _caps: &SearchCaps,
) -> Result<RecordTable, SearchError> {
    let y = super::profile::veronese_oracles(x, basis)?;
    // geometric schedule of enumeration heights up to q_max
    let mut schedule = Vec::new();
    let mut q = 2u64;
    while q < q_max {
        schedule.push(q);
        q = q.saturating_mul(2);
    }
    schedule.push(q_max);
    let mut candidates: Vec<(u64, Vec<BigInt>)> = Vec::new();
    for &qs in &schedule {
        let cands = small_form_candidates(&y, &FormSearch::new(BigInt::from(qs)))?;
        for c in cands {
            let m = c
                .q
                .iter()
                .map(|v| v.abs())
                .max()
                .and_then(|v| u64::try_from(&v).ok())
                .unwrap_or(u64::MAX);
            if m >= 1 && m <= q_max {
                candidates.push((m, c.q));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    candidates.dedup();
    let mut entries: Vec<ApproximationRecord> = Vec::new();
    let mut best_hi: Option<Dyadic> = None;
    let mut undecided = 0u32;
    for (m, q) in candidates {
        let ev = ctx.certify(x, &q)?;
        undecided += u32::from(ev.a0_ambiguous);
        let hi = ev.dist.upper();
        let improves = match &best_hi {
            None => true,
            Some(b) => &hi < b,
        };
        if !improves {
            continue;
        }
        // keep the table's height monotone: drop candidates whose Htilde
        // does not exceed the previous record's
        if let Some(last) = entries.last() {
            if m <= last.m {
                continue;
            }
        }
        let rec = build_record(basis, &q, ev.a0, ev.dist, m)?;
        best_hi = Some(hi);
        let zero = rec.exact_zero;
        entries.push(rec);
        if zero {
            break;
        }
    }
    Ok(finish_table(basis, Method::Lattice, entries, q_max, truncated, undecided))
}

fn build_record(
    _basis: &MonomialBasis,
    q: &[BigInt],
    a0: BigInt,
    value: CertValue,
    m: u64,
) -> Result<ApproximationRecord, SearchError> {
    let htilde = BigInt::from(m);
    let h = htilde.clone().max(a0.abs());
    let exact_zero = value.is_zero();
    let ratio = if !exact_zero && value.certified_nonzero() && h >= BigInt::from(2) {
        certified_ratio_floor(&value.upper(), &h)
    } else {
        None
    };
    Ok(ApproximationRecord {
        q: q.to_vec(),
        a0,
        m,
        h,
        htilde,
        value,
        exact_zero,
        ratio,
    })
}

fn finish_table(
    basis: &MonomialBasis,
    method: Method,
    entries: Vec<ApproximationRecord>,
    m_scanned: u64,
    truncated: bool,
    undecided: u32,
) -> RecordTable {
    let n = basis.len() as u32;
    let mut c_min: Option<Dyadic> = None;
    let mut c_min_lo: Option<Dyadic> = None;
    for rec in &entries {
        if rec.exact_zero {
            c_min = Some(Dyadic::zero());
            c_min_lo = Some(Dyadic::zero());
            break;
        }
        let mut htn = BigInt::one();
        for _ in 0..n {
            htn *= &rec.htilde;
        }
        let scale = Dyadic::from_bigint(htn);
        let hi = rec.value.upper().mul(&scale);
        let lo = rec.value.lower().mul(&scale);
        if c_min.as_ref().map(|c| hi < *c).unwrap_or(true) {
            c_min = Some(hi);
            c_min_lo = Some(lo);
        }
    }
    RecordTable {
        d: basis.dimension(),
        k: basis.max_degree(),
        method,
        entries,
        c_min: c_min.unwrap_or_else(|| Dyadic::one_half()),
        c_min_lo: c_min_lo.unwrap_or_else(Dyadic::zero),
        m_scanned,
        truncated_at_ceiling: truncated,
        undecided,
    }
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

    fn alg(coeffs: &[i64], lo: (i64, i64), hi: (i64, i64)) -> RealOracle {
        let c: Vec<BigInt> = coeffs.iter().map(|&v| bi(v)).collect();
        RealOracle::from_algebraic(
            AlgebraicReal::new(&c, rat(lo.0, lo.1), rat(hi.0, hi.1)).unwrap(),
        )
    }

    #[test]
    fn half_terminates_with_zero_record() {
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [RealOracle::from_rational(rat(1, 2))];
        let t = record_scan(&x, &basis, 100, Method::Brute, &SearchCaps::default()).unwrap();
        let last = t.entries.last().unwrap();
        assert!(last.exact_zero);
        assert_eq!(last.m, 2);
        assert!(t.c_min.is_zero());
        // heights strictly increase, values strictly decrease
        for w in t.entries.windows(2) {
            assert!(w[0].m < w[1].m);
            assert!(w[1].value.upper() < w[0].value.upper());
        }
    }

    #[test]
    fn phi_c_min_small_scale() {
        // at q_max = 100 the minimum of q * ||q phi|| is already 0.381966 (q=1)
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [alg(&[-1, -1, 1], (1, 1), (2, 1))];
        let t = record_scan(&x, &basis, 100, Method::Brute, &SearchCaps::default()).unwrap();
        let c = t.c_min.to_rational();
        assert!(c > rat(381_960, 1_000_000) && c < rat(381_970, 1_000_000), "c_min = {c}");
        // first record is q = 1 with |phi - 2| = 0.382; ratio over H = 2
        let first = &t.entries[0];
        assert_eq!(first.q, vec![bi(1)]);
        assert_eq!(first.a0, bi(-2));
        assert_eq!(first.h, bi(2));
        assert_eq!(first.htilde, bi(1));
    }

    #[test]
    fn ratio_floor_sane() {
        // value 2^-10, h = 2: true ratio 10; certified floor close below
        let v = Dyadic::new(BigInt::one(), -10);
        let r = certified_ratio_floor(&v, &bi(2)).unwrap();
        assert!(r <= rat(10, 1));
        assert!(r >= rat(9, 1), "ratio floor {r}");
        // value 10^-18, h = 10^6: ratio 3
        let v = Dyadic::from_rational_ceil(&rat(1, 1_000_000_000_000_000_000), 96);
        let r = certified_ratio_floor(&v, &BigInt::from(1_000_000u64)).unwrap();
        assert!(r <= rat(3, 1) && r > rat(29, 10), "ratio floor {r}");
    }

    #[test]
    fn monotone_in_qmax() {
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [alg(&[-2, 0, 1], (1, 1), (2, 1))];
        let t1 = record_scan(&x, &basis, 30, Method::Brute, &SearchCaps::default()).unwrap();
        let t2 = record_scan(&x, &basis, 300, Method::Brute, &SearchCaps::default()).unwrap();
        assert!(t2.c_min <= t1.c_min);
        // the smaller table is a prefix of the larger
        assert!(t1.entries.len() <= t2.entries.len());
        for (a, b) in t1.entries.iter().zip(&t2.entries) {
            assert_eq!(a.q, b.q);
        }
    }

    #[test]
    fn lattice_records_phi() {
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [alg(&[-1, -1, 1], (1, 1), (2, 1))];
        let t = record_scan(&x, &basis, 1000, Method::Lattice, &SearchCaps::default()).unwrap();
        assert!(!t.entries.is_empty());
        for w in t.entries.windows(2) {
            assert!(w[0].m < w[1].m);
            assert!(w[1].value.upper() < w[0].value.upper());
        }
        // Fibonacci denominators dominate the records
        let ms: Vec<u64> = t.entries.iter().map(|r| r.m).collect();
        assert!(ms.contains(&13) || ms.contains(&21) || ms.contains(&34), "records at {ms:?}");
    }
}
