//! The Dirichlet-improvement statistic `eps*(Q)` and profiles over schedules.
//!
//! Unweighted: `eps*(Q) = min over 0 < |q|_inf <= Q of
//! max(|q|_inf / Q, ||q . f(x)|| * Q^n)`. The uniform bound `eps*(Q) <= 1`
//! for every `Q >= 2` is the computable form of the Dirichlet theorem and is
//! asserted wholesale by the acceptance suite.

use super::engine::{shell_scan_ctx, CertValue, ScanContext, ShellScan};
use super::weighted::{eps_star_weighted_brute, rational_pow_enclosure};
use super::{Method, SearchCaps, SearchError, WeightVector};
use crate::lattice::{small_form_candidates, FormSearch};
use crate::monomial::MonomialBasis;
use crate::numerics::{Dyadic, DyadicInterval, Rational, RealOracle};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// One evaluated `eps*(Q)`: certified enclosure, exact value when the whole
/// computation stayed rational, and the witnessing polynomial data.
#[derive(Clone, Debug)]
pub struct EpsStar {
    pub enclosure: DyadicInterval,
    pub exact: Option<Rational>,
    pub witness_q: Vec<BigInt>,
    pub witness_a0: BigInt,
    pub witness_value: CertValue,
    pub undecided: u32,
}

#[derive(Clone, Debug)]
pub struct ProfileSample {
    pub q: u64,
    pub eps: EpsStar,
}

/// Finite-scale singularity verdicts; explicitly trend heuristics, the true
/// definitions quantify over all Q.
#[derive(Clone, Debug)]
pub struct Verdicts {
    /// max over the last third of the schedule dropped below half the max
    /// over the first third
    pub singular_trend: bool,
    /// sup of eps*(Q) upper bounds over the last third
    pub tail_sup: Dyadic,
    /// min of eps*(Q) upper bounds over the last third
    pub tail_min: Dyadic,
    /// the scale is finite; these are heuristics, not proofs
    pub note: &'static str,
}

#[derive(Clone, Debug)]
pub struct DirichletProfile {
    pub d: usize,
    pub k: u32,
    pub method: Method,
    pub samples: Vec<ProfileSample>,
    pub verdicts: Verdicts,
    /// brute scans truncate at the evaluation cap; this is the radius the
    /// scan actually covered
    pub m_scanned: u64,
    pub exact_mode: bool,
    pub undecided: u32,
}

pub(crate) const EPS_GRID: u32 = 192;

/// `eps*(Q)` with optional weights.
pub fn epsilon_star(
    x: &[RealOracle],
    basis: &MonomialBasis,
    q: u64,
    weights: Option<&WeightVector>,
    method: Method,
    caps: &SearchCaps,
) -> Result<EpsStar, SearchError> {
    if q < 2 {
        return Err(SearchError::BadSchedule);
    }
    let ctx = ScanContext::new(basis, x, caps)?;
    match method {
        Method::Brute => match weights {
            None => {
                let scan = shell_scan_ctx(&ctx, x, q, caps, 0)?;
                eps_from_shells(&ctx, x, &scan, q, basis.len() as u32)
            }
            Some(w) => eps_star_weighted_brute(&ctx, x, basis, q, w, caps),
        },
        Method::Lattice => eps_star_lattice(&ctx, x, basis, q, weights, caps),
    }
}

/// Aggregate shell minima into `eps*(Q)`; endpoints are handled separately so
/// the result is a certified enclosure, exact in exact mode.
pub(crate) fn eps_from_shells(
    ctx: &ScanContext,
    x: &[RealOracle],
    scan: &ShellScan,
    q: u64,
    n: u32,
) -> Result<EpsStar, SearchError> {
    let mut qn = BigInt::from(1u32);
    for _ in 0..n {
        qn *= BigInt::from(q);
    }
    let qn_d = Dyadic::from_bigint(qn);
    let mut best_lo: Option<Rational> = None;
    let mut best_hi: Option<(Rational, u64)> = None;
    for shell in scan.shells.iter().take_while(|s| s.m <= q) {
        let m_term = Rational::new(BigInt::from(shell.m), BigInt::from(q));
        let lo = m_term
            .clone()
            .max(shell.dist.lo().mul(&qn_d).to_rational());
        let hi = m_term.max(shell.dist.hi().mul(&qn_d).to_rational());
        if best_lo.as_ref().map(|b| lo < *b).unwrap_or(true) {
            best_lo = Some(lo);
        }
        if best_hi.as_ref().map(|(b, _)| hi < *b).unwrap_or(true) {
            best_hi = Some((hi, shell.m));
        }
    }
    let best_lo = best_lo.expect("nonempty scan");
    let (best_hi, m_star) = best_hi.expect("nonempty scan");
    let shell = &scan.shells[(m_star - 1) as usize];
    let wq = shell
        .witness_q
        .clone()
        .expect("witness present for nonempty shell");
    let ev = ctx.certify(x, &wq)?;
    let enclosure = DyadicInterval::new(
        Dyadic::from_rational_floor(&best_lo, EPS_GRID),
        Dyadic::from_rational_ceil(&best_hi, EPS_GRID),
    );
    let exact = if scan.exact_mode { Some(best_hi) } else { None };
    Ok(EpsStar {
        enclosure,
        exact,
        witness_q: wq,
        witness_a0: ev.a0,
        witness_value: ev.dist,
        undecided: scan.undecided_zero + u32::from(ev.a0_ambiguous),
    })
}

fn eps_star_lattice(
    ctx: &ScanContext,
    x: &[RealOracle],
    basis: &MonomialBasis,
    q: u64,
    weights: Option<&WeightVector>,
    _caps: &SearchCaps,
) -> Result<EpsStar, SearchError> {
    let n = basis.len() as u32;
    let y = veronese_oracles(x, basis)?;
    let mut search = FormSearch::new(BigInt::from(q));
    if let Some(w) = weights {
        if w.len() != basis.len() {
            return Err(SearchError::BadWeights);
        }
        // per-coordinate bounds floor(Q^(n r_i)); zero weight drops the
        // coordinate entirely
        let mut bounds = Vec::with_capacity(w.len());
        for r in w.weights() {
            if r.is_zero() {
                bounds.push(BigInt::zero());
            } else {
                let e = r.clone() * Rational::from_integer(BigInt::from(n));
                bounds.push(pow_floor(q, &e));
            }
        }
        search.weights = Some(bounds);
    }
    let cands = small_form_candidates(&y, &search)?;
    let mut qn = BigInt::from(1u32);
    for _ in 0..n {
        qn *= BigInt::from(q);
    }
    let qn_d = Dyadic::from_bigint(qn);
    let mut best: Option<(Rational, Rational, EpsStar)> = None;
    let mut undecided = 0u32;
    for cand in cands {
        let ev = ctx.certify(x, &cand.q)?;
        undecided += u32::from(ev.a0_ambiguous);
        let m = cand.q.iter().map(|v| v.abs()).max().unwrap();
        let m_term = match weights {
            None => Rational::new(m.clone(), BigInt::from(q)),
            Some(w) => weighted_box_term(&cand.q, q, n, w)?,
        };
        let iv = ev.dist.interval();
        let lo = m_term.clone().max(iv.lo().mul(&qn_d).to_rational());
        let hi = m_term.max(iv.hi().mul(&qn_d).to_rational());
        let better = match &best {
            None => true,
            Some((_, bh, _)) => hi < *bh,
        };
        if better {
            let eps = EpsStar {
                enclosure: DyadicInterval::new(
                    Dyadic::from_rational_floor(&lo, EPS_GRID),
                    Dyadic::from_rational_ceil(&hi, EPS_GRID),
                ),
                exact: None,
                witness_q: cand.q.clone(),
                witness_a0: ev.a0.clone(),
                witness_value: ev.dist.clone(),
                undecided: 0,
            };
            best = Some((lo, hi, eps));
        }
    }
    let (_, _, mut eps) = best.ok_or(SearchError::Lattice(
        crate::lattice::LatticeError::NoCandidate,
    ))?;
    eps.undecided = undecided;
    Ok(eps)
}

/// max over support of `|q_i| / Q^(n r_i)` as an upper-bound rational (the
/// power is enclosed dyadically and the division rounds outward).
fn weighted_box_term(
    q_vec: &[BigInt],
    q: u64,
    n: u32,
    w: &WeightVector,
) -> Result<Rational, SearchError> {
    let mut best: Option<Rational> = None;
    for (qi, r) in q_vec.iter().zip(w.weights()) {
        if qi.is_zero() {
            continue;
        }
        if r.is_zero() {
            // zero-weight coordinates must be zero in candidates
            return Err(SearchError::BadWeights);
        }
        let e = r.clone() * Rational::from_integer(BigInt::from(n));
        let denom = rational_pow_enclosure(
            &Rational::from_integer(BigInt::from(q)),
            &e,
            EPS_GRID,
        )?;
        // upper bound of |q_i| / Q^(n r_i)
        let term = Rational::from_integer(qi.abs()) / denom.lo().to_rational();
        if best.as_ref().map(|b| term > *b).unwrap_or(true) {
            best = Some(term);
        }
    }
    best.ok_or(SearchError::BadWeights)
}

fn pow_floor(q: u64, e: &Rational) -> BigInt {
    // floor(q^e) for rational e = a/b via integer root
    let a: u64 = e.numer().try_into().unwrap_or(u64::MAX);
    let b: u64 = e.denom().try_into().unwrap_or(1);
    let mut qa = BigInt::from(1u32);
    for _ in 0..a {
        qa *= BigInt::from(q);
    }
    qa.nth_root(b.min(u32::MAX as u64) as u32)
}

pub(crate) fn veronese_oracles(
    x: &[RealOracle],
    basis: &MonomialBasis,
) -> Result<Vec<RealOracle>, SearchError> {
    // rational coordinates produce exact rational monomials; otherwise the
    // monomial oracle wrapper refines on demand. For the lattice layer a
    // plain high-precision rational snapshot is enough when the point is
    // rational; algebraic coordinates keep their oracle form via enclosures.
    let mut out = Vec::with_capacity(basis.len());
    let all_rat: Option<Vec<Rational>> = x.iter().map(|o| o.as_rational().cloned()).collect();
    if let Some(coords) = all_rat {
        for v in basis.eval_rational(&coords)? {
            out.push(RealOracle::from_rational(v));
        }
        return Ok(out);
    }
    // single algebraic coordinate: monomials are alpha-power multiples of
    // rationals; represent each as an algebraic oracle via its own minimal
    // data is overkill, so wrap a refinement adapter through enclosures
    for e in basis.order() {
        let exps = e.0.clone();
        let coords: Vec<RealOracle> = x.to_vec();
        out.push(RealOracle::from_monomial(coords, exps)?);
    }
    Ok(out)
}

/// Profile of `eps*(Q)` over a schedule, plus trend verdicts.
pub fn dirichlet_profile(
    x: &[RealOracle],
    basis: &MonomialBasis,
    schedule: &[u64],
    weights: Option<&WeightVector>,
    method: Method,
    caps: &SearchCaps,
) -> Result<DirichletProfile, SearchError> {
    if schedule.is_empty()
        || schedule[0] < 2
        || schedule.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(SearchError::BadSchedule);
    }
    let ctx = ScanContext::new(basis, x, caps)?;
    let n = basis.len() as u32;
    let mut samples = Vec::with_capacity(schedule.len());
    let mut undecided = 0u32;
    let mut m_scanned = 0u64;
    let mut exact_mode = false;
    match method {
        Method::Brute => {
            if weights.is_none() {
                // one scan covers the whole schedule
                let q_top = *schedule.last().unwrap();
                let scan = shell_scan_ctx(&ctx, x, q_top, caps, 0)?;
                m_scanned = scan.m_scanned;
                exact_mode = scan.exact_mode;
                for &q in schedule {
                    let eps = eps_from_shells(&ctx, x, &scan, q, n)?;
                    undecided += eps.undecided;
                    samples.push(ProfileSample { q, eps });
                }
            } else {
                for &q in schedule {
                    let eps =
                        eps_star_weighted_brute(&ctx, x, basis, q, weights.unwrap(), caps)?;
                    undecided += eps.undecided;
                    samples.push(ProfileSample { q, eps });
                }
            }
        }
        Method::Lattice => {
            for &q in schedule {
                let eps = eps_star_lattice(&ctx, x, basis, q, weights, caps)?;
                undecided += eps.undecided;
                m_scanned = m_scanned.max(q);
                samples.push(ProfileSample { q, eps });
            }
        }
    }
    let verdicts = compute_verdicts(&samples);
    Ok(DirichletProfile {
        d: basis.dimension(),
        k: basis.max_degree(),
        method,
        samples,
        verdicts,
        m_scanned,
        exact_mode,
        undecided,
    })
}

fn compute_verdicts(samples: &[ProfileSample]) -> Verdicts {
    let len = samples.len();
    let third = len.div_ceil(3).max(1);
    let first = &samples[..third.min(len)];
    let last = &samples[len - third.min(len)..];
    let first_max_lo = first
        .iter()
        .map(|s| s.eps.enclosure.lo().clone())
        .max()
        .unwrap_or_else(Dyadic::zero);
    let tail_sup = last
        .iter()
        .map(|s| s.eps.enclosure.hi().clone())
        .max()
        .unwrap_or_else(Dyadic::zero);
    let tail_min = last
        .iter()
        .map(|s| s.eps.enclosure.hi().clone())
        .min()
        .unwrap_or_else(Dyadic::zero);
    // certified decay: the tail upper bounds must fall below half of a first
    // third lower bound
    let singular_trend = len >= 3 && tail_sup < first_max_lo.shift(-1);
    Verdicts {
        singular_trend,
        tail_sup,
        tail_min,
        note: "finite-scale trend heuristic, not a proof of singularity",
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

    #[test]
    fn eps_star_half_exact() {
        // x = 1/2, k = 1, Q = 4: witness 2x - 1 gives max(2/4, 0) = 1/2
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [RealOracle::from_rational(rat(1, 2))];
        let eps = epsilon_star(&x, &basis, 4, None, Method::Brute, &SearchCaps::default()).unwrap();
        assert_eq!(eps.exact, Some(rat(1, 2)));
        assert_eq!(eps.witness_q, vec![bi(2)]);
    }

    #[test]
    fn eps_star_phi_at_3() {
        // eps*(3) at phi is max(2/3, ||2 phi|| * 3) = 3(3 - 2 phi + ...) ~ 0.70820
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [RealOracle::from_algebraic(
            AlgebraicReal::new(&[bi(-1), bi(-1), bi(1)], rat(1, 1), rat(2, 1)).unwrap(),
        )];
        let eps = epsilon_star(&x, &basis, 3, None, Method::Brute, &SearchCaps::default()).unwrap();
        let lo = eps.enclosure.lo().to_rational();
        let hi = eps.enclosure.hi().to_rational();
        assert!(lo > rat(70_819, 100_000) && hi < rat(70_821, 100_000), "[{lo}, {hi}]");
        assert_eq!(eps.witness_q, vec![bi(2)]);
    }

    #[test]
    fn profile_half_is_two_over_q() {
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [RealOracle::from_rational(rat(1, 2))];
        let schedule = [2u64, 4, 8, 16, 32];
        let prof = dirichlet_profile(
            &x,
            &basis,
            &schedule,
            None,
            Method::Brute,
            &SearchCaps::default(),
        )
        .unwrap();
        for s in &prof.samples {
            assert_eq!(s.eps.exact, Some(rat(2, s.q as i64)));
        }
        assert!(prof.verdicts.singular_trend);
    }

    #[test]
    fn lattice_eps_phi_below_one() {
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [RealOracle::from_algebraic(
            AlgebraicReal::new(&[bi(-1), bi(-1), bi(1)], rat(1, 1), rat(2, 1)).unwrap(),
        )];
        let eps =
            epsilon_star(&x, &basis, 13, None, Method::Lattice, &SearchCaps::default()).unwrap();
        assert!(eps.enclosure.hi().to_rational() <= rat(1, 1));
    }

    #[test]
    fn rejects_bad_schedule() {
        let basis = MonomialBasis::new(1, 1).unwrap();
        let x = [RealOracle::from_rational(rat(1, 3))];
        assert!(dirichlet_profile(
            &x,
            &basis,
            &[4, 4],
            None,
            Method::Brute,
            &SearchCaps::default()
        )
        .is_err());
        assert!(epsilon_star(&x, &basis, 1, None, Method::Brute, &SearchCaps::default()).is_err());
    }
}
