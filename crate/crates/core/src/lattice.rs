//! Exact-arithmetic lattice reduction and bounded enumeration.
//!
//! Reduction is the classical integral LLL working on Gram determinants and
//! scaled Gram-Schmidt coefficients, so no floating point enters any decision.
//! On top of it, a bounded Fincke-Pohst enumeration recovers every lattice
//! vector inside a ball, which is how small linear-form candidates
//! `|q . y + p|` are produced at heights where brute force is out of reach.

use crate::numerics::{Rational, RealOracle};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("basis rows are linearly dependent")]
    DependentRows,
    #[error("delta must satisfy 1/4 < delta < 1")]
    BadDelta,
    #[error("basis must be a nonempty square matrix")]
    BadShape,
    #[error("rounding of the scaled form coordinates did not stabilize")]
    PrecisionExhausted,
    #[error("all coordinate weights are zero")]
    EmptyWeights,
    #[error("enumeration produced no admissible candidate")]
    NoCandidate,
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}

/// Row-major integer lattice basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(LatticeError::BadShape);
        }
        Ok(LatticeBasis { rows })
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Squared determinant (the Gram determinant); preserved exactly by
    /// reduction.
    pub fn gram_det(&self) -> Result<BigInt, LatticeError> {
        let state = GsoState::compute(&self.rows)?;
        Ok(state.d.last().unwrap().clone())
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integral Gram-Schmidt bookkeeping: `d[i]` is the Gram determinant of the
/// first `i` rows (`d[0] = 1`), `lambda[i][j] = d[j+1] * mu_{i,j}`.
struct GsoState {
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
}

impl GsoState {
    fn compute(rows: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let m = rows.len();
        let mut d = vec![BigInt::one(); m + 1];
        let mut lambda = vec![vec![BigInt::zero(); m]; m];
        for i in 0..m {
            for j in 0..=i {
                let mut u = dot(&rows[i], &rows[j]);
                for l in 0..j {
                    u = (&d[l + 1] * u - &lambda[i][l] * &lambda[j][l]) / &d[l];
                }
                if j < i {
                    lambda[i][j] = u;
                } else {
                    if u.is_zero() || u.is_negative() {
                        return Err(LatticeError::DependentRows);
                    }
                    d[i + 1] = u;
                }
            }
        }
        Ok(GsoState { d, lambda })
    }
}

/// `round(num / den)` for `den > 0`, half rounded up.
fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (num * &two + den).div_floor(&(den * &two))
}

/// Exact integral LLL reduction with parameter `delta` (callers default to
/// 99/100). Output spans the same lattice, is size-reduced and satisfies the
/// Lovasz condition.
pub fn lll_reduce(basis: &LatticeBasis, delta: &Rational) -> Result<LatticeBasis, LatticeError> {
    let quarter = Rational::new(BigInt::one(), BigInt::from(4));
    if *delta <= quarter || *delta >= Rational::one() {
        return Err(LatticeError::BadDelta);
    }
    let mut b = basis.rows.to_vec();
    let m = b.len();
    let GsoState { mut d, mut lambda } = GsoState::compute(&b)?;
    let (dnum, dden) = (delta.numer().clone(), delta.denom().clone());

    fn red(
        b: &mut [Vec<BigInt>],
        lambda: &mut [Vec<BigInt>],
        d: &[BigInt],
        k: usize,
        l: usize,
    ) {
        if (&lambda[k][l] * 2u8).abs() > d[l + 1] {
            let q = round_div(&lambda[k][l], &d[l + 1]);
            if !q.is_zero() {
                for t in 0..b[k].len() {
                    let delta_t = &q * &b[l][t];
                    b[k][t] -= delta_t;
                }
                for i in 0..l {
                    let delta_i = &q * &lambda[l][i];
                    lambda[k][i] -= delta_i;
                }
                lambda[k][l] -= q * &d[l + 1];
            }
        }
    }

    let mut k = 1usize;
    let mut guard = 0usize;
    let guard_max = 10_000 + 1000 * m * m * (d[m].bits() as usize + 2);
    while k < m {
        guard += 1;
        if guard > guard_max {
            return Err(LatticeError::PrecisionExhausted);
        }
        red(&mut b, &mut lambda, &d, k, k - 1);
        // Lovasz: swap when den*(d[k+1]*d[k-1] + lambda^2) < num*d[k]^2
        let lhs = &dden * (&d[k + 1] * &d[k - 1] + &lambda[k][k - 1] * &lambda[k][k - 1]);
        let rhs = &dnum * (&d[k] * &d[k]);
        if lhs < rhs {
            b.swap(k, k - 1);
            for j in 0..k.saturating_sub(1) {
                let tmp = lambda[k][j].clone();
                lambda[k][j] = lambda[k - 1][j].clone();
                lambda[k - 1][j] = tmp;
            }
            let lam = lambda[k][k - 1].clone();
            let bnew = (&d[k - 1] * &d[k + 1] + &lam * &lam) / &d[k];
            for i in k + 1..m {
                let t = lambda[i][k].clone();
                lambda[i][k] = (&d[k + 1] * &lambda[i][k - 1] - &lam * &t) / &d[k];
                lambda[i][k - 1] = (&bnew * t + &lam * &lambda[i][k]) / &d[k + 1];
            }
            d[k] = bnew;
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                red(&mut b, &mut lambda, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(LatticeBasis { rows: b })
}

/// Rational Gram-Schmidt data of a basis, used by the enumerator.
struct RationalGso {
    mu: Vec<Vec<Rational>>,
    bstar_norm2: Vec<Rational>,
}

fn rational_gso(rows: &[Vec<BigInt>]) -> Result<RationalGso, LatticeError> {
    let m = rows.len();
    let mut bstar: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut mu = vec![vec![Rational::zero(); m]; m];
    let mut norms: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let mut v: Vec<Rational> = rows[i]
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        for j in 0..i {
            let num: Rational = rows[i]
                .iter()
                .zip(&bstar[j])
                .map(|(a, s)| Rational::from_integer(a.clone()) * s.clone())
                .sum();
            let mu_ij = num / norms[j].clone();
            for (vt, st) in v.iter_mut().zip(&bstar[j]) {
                *vt -= mu_ij.clone() * st.clone();
            }
            mu[i][j] = mu_ij;
        }
        let n2: Rational = v.iter().map(|x| x.clone() * x.clone()).sum();
        if n2.is_zero() {
            return Err(LatticeError::DependentRows);
        }
        norms.push(n2);
        bstar.push(v);
    }
    Ok(RationalGso { mu, bstar_norm2: norms })
}

/// Enumerate every nonzero lattice vector of squared norm `<= r2`, returned as
/// combination coefficients over the basis rows. The highest-index coefficient
/// is kept nonnegative, so vectors come up to global sign.
pub fn enumerate_in_ball(
    basis: &LatticeBasis,
    r2: &Rational,
    max_vectors: usize,
) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    let m = basis.size();
    let gso = rational_gso(&basis.rows)?;
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); m];
    descend(m - 1, r2.clone(), &gso, &mut x, m, &mut out, max_vectors, true);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    level: usize,
    t: Rational,
    gso: &RationalGso,
    x: &mut Vec<BigInt>,
    m: usize,
    out: &mut Vec<Vec<BigInt>>,
    max_vectors: usize,
    all_higher_zero: bool,
) {
    if out.len() >= max_vectors {
        return;
    }
    // u = sum_{j > level} mu[j][level] * x_j
    let mut u = Rational::zero();
    for j in level + 1..m {
        if !x[j].is_zero() {
            u += gso.mu[j][level].clone() * Rational::from_integer(x[j].clone());
        }
    }
    let b = &gso.bstar_norm2[level];
    let admissible = |v: &BigInt| -> Option<Rational> {
        let s = Rational::from_integer(v.clone()) + u.clone();
        let used = s.clone() * s * b.clone();
        if used <= t {
            Some(used)
        } else {
            None
        }
    };
    // vectors are produced up to sign: the highest nonzero coefficient is
    // kept positive, so when everything above this level is zero the
    // downward sweep stops before negative values
    let handle = |v: &BigInt, used: Rational, x: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>| {
        x[level] = v.clone();
        if level == 0 {
            if x.iter().any(|c| !c.is_zero()) {
                out.push(x.clone());
            }
        } else {
            descend(
                level - 1,
                t.clone() - used,
                gso,
                x,
                m,
                out,
                max_vectors,
                all_higher_zero && v.is_zero(),
            );
        }
    };
    let center = -round_rational(&u);
    // upward sweep from the center, then downward; each stops at the first
    // inadmissible integer since the constraint is an interval in v
    let mut v = if all_higher_zero && center.is_negative() {
        BigInt::zero()
    } else {
        center.clone()
    };
    loop {
        match admissible(&v) {
            Some(used) => handle(&v, used, x, out),
            None => break,
        }
        if out.len() >= max_vectors {
            return;
        }
        v += BigInt::one();
    }
    let mut v = center - BigInt::one();
    loop {
        if all_higher_zero && v.is_negative() {
            break;
        }
        match admissible(&v) {
            Some(used) => handle(&v, used, x, out),
            None => break,
        }
        if out.len() >= max_vectors {
            return;
        }
        v -= BigInt::one();
    }
    x[level] = BigInt::zero();
}

fn round_rational(r: &Rational) -> BigInt {
    round_div(r.numer(), r.denom())
}

/// One small-linear-form proposal: `|q . y + p|` is expected to be small; the
/// caller certifies it by interval evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormCandidate {
    pub q: Vec<BigInt>,
    pub p: BigInt,
}

/// Search parameters for [`small_form_candidates`].
#[derive(Clone, Debug)]
pub struct FormSearch {
    /// Box bound for `|q|_inf`, used for every coordinate without an explicit
    /// weight.
    pub q_bound: BigInt,
    /// Optional per-coordinate bounds; a zero bound forces that coordinate to
    /// zero (the coordinate is removed from the lattice altogether).
    pub weights: Option<Vec<BigInt>>,
    /// Cap on enumerated vectors, a resource guard only.
    pub max_vectors: usize,
}

impl FormSearch {
    pub fn new(q_bound: BigInt) -> Self {
        FormSearch { q_bound, weights: None, max_vectors: 1 << 14 }
    }
}

/// Find integer pairs `(q, p)` with every `|q_i|` inside the weight profile
/// and `|q . y + p|` at the Dirichlet scale `~ Q^-n`. Deterministic given
/// `(y, search, precision policy)`: LLL plus a bounded enumeration of the
/// scaled form lattice, with rounding retried at doubled precision when the
/// scaled coordinates do not round stably.
pub fn small_form_candidates(
    y: &[RealOracle],
    search: &FormSearch,
) -> Result<Vec<FormCandidate>, LatticeError> {
    let n_all = y.len();
    let bounds: Vec<BigInt> = match &search.weights {
        Some(w) => w.clone(),
        None => vec![search.q_bound.clone(); n_all],
    };
    let support: Vec<usize> = (0..n_all).filter(|&i| bounds[i] > BigInt::zero()).collect();
    if support.is_empty() {
        return Err(LatticeError::EmptyWeights);
    }
    let n = support.len();
    let q_max = support.iter().map(|&i| bounds[i].clone()).max().unwrap();
    let p_work: u32 = 64 + (n as u32) * (q_max.bits() as u32 + 1);

    // C = Q^(n+1) * 2^p makes the form term dominate rounding error at the
    // target approximation quality Q^-n
    let mut c = BigInt::one() << p_work;
    for _ in 0..=n {
        c *= &q_max;
    }
    let scale = BigInt::one() << p_work;
    let mut p_oracle: u32 = (c.bits() as u32) + 8;
    for _attempt in 0..5 {
        match build_rounded_forms(y, &support, &c, p_oracle)? {
            Some(yhat) => {
                return enumerate_candidates(
                    &yhat,
                    &support,
                    &bounds,
                    &q_max,
                    &c,
                    &scale,
                    n_all,
                    search.max_vectors,
                );
            }
            None => p_oracle *= 2,
        }
    }
    Err(LatticeError::PrecisionExhausted)
}

/// Round `C * y_i` to the nearest integers; `None` when an enclosure straddles
/// a rounding boundary, in which case the caller retries at higher precision.
fn build_rounded_forms(
    y: &[RealOracle],
    support: &[usize],
    c: &BigInt,
    p_oracle: u32,
) -> Result<Option<Vec<BigInt>>, LatticeError> {
    let mut out = Vec::with_capacity(support.len());
    for &i in support {
        if let Some(r) = y[i].as_rational() {
            let num = c * r.numer();
            out.push(round_div(&num, r.denom()));
            continue;
        }
        let enc = y[i].refine(p_oracle)?;
        let lo = enc.lo().to_rational() * Rational::from_integer(c.clone());
        let hi = enc.hi().to_rational() * Rational::from_integer(c.clone());
        let rl = round_div(lo.numer(), lo.denom());
        let rh = round_div(hi.numer(), hi.denom());
        if rl != rh {
            return Ok(None);
        }
        out.push(rl);
    }
    Ok(Some(out))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_candidates(
    yhat: &[BigInt],
    support: &[usize],
    bounds: &[BigInt],
    q_max: &BigInt,
    c: &BigInt,
    scale: &BigInt,
    n_all: usize,
    max_vectors: usize,
) -> Result<Vec<FormCandidate>, LatticeError> {
    let n = support.len();
    // per-coordinate row scales V_i = ceil(scale * q_max / W_i)
    let v_scales: Vec<BigInt> = support
        .iter()
        .map(|&i| (scale * q_max).div_ceil(&bounds[i]))
        .collect();
    let mut rows = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for j in 0..n {
        rows[j][j] = v_scales[j].clone();
        rows[j][n] = yhat[j].clone();
    }
    rows[n][n] = c.clone();
    let basis = LatticeBasis::new(rows)?;
    let reduced = lll_reduce(&basis, &Rational::new(BigInt::from(99), BigInt::from(100)))?;

    // ball radius^2 = 2(n+1)(scale * q_max)^2 covers the Dirichlet witness,
    // rounding slack included
    let r = scale * q_max;
    let r2 = Rational::from_integer(BigInt::from(2) * BigInt::from(n as u64 + 1) * &r * &r);
    let combos = enumerate_in_ball(&reduced, &r2, max_vectors)?;

    let mut cands: Vec<FormCandidate> = Vec::new();
    for x in combos {
        let mut vec_t = vec![BigInt::zero(); n + 1];
        for (xi, row) in x.iter().zip(reduced.rows()) {
            if !xi.is_zero() {
                for (vt, rt) in vec_t.iter_mut().zip(row) {
                    *vt += xi * rt;
                }
            }
        }
        let mut q_sup = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let (qj, rem) = vec_t[j].div_rem(&v_scales[j]);
            if !rem.is_zero() {
                ok = false;
                break;
            }
            q_sup.push(qj);
        }
        if !ok || q_sup.iter().all(|v| v.is_zero()) {
            continue;
        }
        if q_sup
            .iter()
            .enumerate()
            .any(|(j, qj)| qj.abs() > bounds[support[j]])
        {
            continue;
        }
        let qdoty: BigInt = q_sup.iter().zip(yhat).map(|(a, b)| a * b).sum();
        let (p, rem) = (&vec_t[n] - &qdoty).div_rem(c);
        if !rem.is_zero() {
            continue;
        }
        let mut q_full = vec![BigInt::zero(); n_all];
        for (j, &i) in support.iter().enumerate() {
            q_full[i] = q_sup[j].clone();
        }
        let flip = q_full
            .iter()
            .find(|v| !v.is_zero())
            .map(|v| v.is_negative())
            .unwrap_or(false);
        let (q_full, p) = if flip {
            (q_full.iter().map(|v| -v).collect(), -p)
        } else {
            (q_full, p)
        };
        let cand = FormCandidate { q: q_full, p };
        if !cands.contains(&cand) {
            cands.push(cand);
        }
    }
    if cands.is_empty() {
        return Err(LatticeError::NoCandidate);
    }
    cands.sort_by(|a, b| {
        let na = a.q.iter().map(|v| v.abs()).max().unwrap();
        let nb = b.q.iter().map(|v| v.abs()).max().unwrap();
        na.cmp(&nb).then_with(|| a.q.cmp(&b.q)).then_with(|| a.p.cmp(&b.p))
    });
    Ok(cands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::AlgebraicReal;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(bi(n), bi(d))
    }

    fn basis_of(rows: Vec<Vec<i64>>) -> LatticeBasis {
        LatticeBasis::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
        .unwrap()
    }

    fn delta_default() -> Rational {
        rat(99, 100)
    }

    /// Independent 2D oracle: Gauss-Lagrange reduction returns the true
    /// shortest vector length of a rank-2 lattice.
    fn gauss_shortest_norm2(mut u: Vec<BigInt>, mut v: Vec<BigInt>) -> BigInt {
        loop {
            if dot(&u, &u) > dot(&v, &v) {
                std::mem::swap(&mut u, &mut v);
                continue;
            }
            let q = round_div(&dot(&u, &v), &dot(&u, &u));
            if q.is_zero() {
                return dot(&u, &u);
            }
            for t in 0..v.len() {
                let d = &q * &u[t];
                v[t] -= d;
            }
        }
    }

    #[test]
    fn identity_already_reduced() {
        let b = basis_of(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let r = lll_reduce(&b, &rat(3, 4)).unwrap();
        assert_eq!(r, b);
    }

    #[test]
    fn rejects_bad_delta() {
        let b = basis_of(vec![vec![1, 0], vec![0, 1]]);
        assert!(matches!(lll_reduce(&b, &rat(1, 4)), Err(LatticeError::BadDelta)));
        assert!(matches!(lll_reduce(&b, &rat(1, 1)), Err(LatticeError::BadDelta)));
    }

    #[test]
    fn rejects_dependent_rows() {
        let b = basis_of(vec![vec![1, 2], vec![2, 4]]);
        assert!(matches!(
            lll_reduce(&b, &delta_default()),
            Err(LatticeError::DependentRows)
        ));
    }

    #[test]
    fn two_dim_example_matches_gauss_oracle() {
        let b = basis_of(vec![vec![4, 1], vec![7, 2]]);
        let r = lll_reduce(&b, &delta_default()).unwrap();
        let n2 = dot(&r.rows()[0], &r.rows()[0]);
        // det = 1, so the reduced first vector has squared norm <= 2
        assert!(n2 <= bi(2));
        let oracle = gauss_shortest_norm2(b.rows()[0].clone(), b.rows()[1].clone());
        assert_eq!(n2, oracle);
    }

    #[test]
    fn det_preserved_on_random_bases() {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 19) as i64 - 9
        };
        let mut tested = 0;
        while tested < 20 {
            let rows: Vec<Vec<BigInt>> =
                (0..4).map(|_| (0..4).map(|_| bi(next())).collect()).collect();
            let b = LatticeBasis::new(rows).unwrap();
            let det_before = match b.gram_det() {
                Ok(d) => d,
                Err(_) => continue,
            };
            let r = lll_reduce(&b, &delta_default()).unwrap();
            assert_eq!(r.gram_det().unwrap(), det_before);
            tested += 1;
        }
    }

    #[test]
    fn first_vector_bound() {
        // (|b1|^2)^m <= 2^(m(m-1)) * gram_det is the integer form of the
        // classical |b1| <= 2^((m-1)/2) |det|^(1/m)
        let mut seed = 0xdeadbeefcafef00du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 41) as i64 - 20
        };
        for m in 2..=6usize {
            let mut tested = 0;
            while tested < 6 {
                let rows: Vec<Vec<BigInt>> = (0..m)
                    .map(|_| (0..m).map(|_| bi(next())).collect())
                    .collect();
                let b = LatticeBasis::new(rows).unwrap();
                if b.gram_det().is_err() {
                    continue;
                }
                let r = lll_reduce(&b, &delta_default()).unwrap();
                let n2 = dot(&r.rows()[0], &r.rows()[0]);
                let mut lhs = BigInt::one();
                for _ in 0..m {
                    lhs *= &n2;
                }
                let rhs = (BigInt::one() << (m * (m - 1))) * r.gram_det().unwrap();
                assert!(lhs <= rhs, "bound failed for m={m}");
                tested += 1;
            }
        }
    }

    #[test]
    fn reduced_basis_is_size_reduced() {
        let b = basis_of(vec![vec![12, 7, 1], vec![8, 29, 3], vec![4, 4, 31]]);
        let r = lll_reduce(&b, &delta_default()).unwrap();
        // recompute rational GSO from scratch and check |mu_ij| <= 1/2
        let gso = rational_gso(r.rows()).unwrap();
        for i in 0..3 {
            for j in 0..i {
                assert!(gso.mu[i][j].clone().abs() <= rat(1, 2));
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let b = basis_of(vec![vec![3, 1, 0], vec![1, 4, 1], vec![0, 1, 5]]);
        let r2 = rat(40, 1);
        let found = enumerate_in_ball(&b, &r2, 10_000).unwrap();
        let mut expect = 0usize;
        let rows = [[3i64, 1, 0], [1, 4, 1], [0, 1, 5]];
        for a in -7i64..=7 {
            for c in -7i64..=7 {
                for e in -7i64..=7 {
                    if a == 0 && c == 0 && e == 0 {
                        continue;
                    }
                    let mut n2 = 0i64;
                    for t in 0..3 {
                        let v = a * rows[0][t] + c * rows[1][t] + e * rows[2][t];
                        n2 += v * v;
                    }
                    if n2 <= 40 {
                        expect += 1;
                    }
                }
            }
        }
        // enumerator returns each +/- pair once
        assert_eq!(found.len() * 2, expect);
    }

    #[test]
    fn form_candidates_sqrt2() {
        let y = [RealOracle::from_algebraic(
            AlgebraicReal::new(&[bi(-2), bi(0), bi(1)], rat(1, 1), rat(2, 1)).unwrap(),
        )];
        let cands = small_form_candidates(&y, &FormSearch::new(bi(12))).unwrap();
        // must include the continued-fraction convergent 17/12
        assert!(
            cands.iter().any(|c| c.q == vec![bi(12)] && c.p == bi(-17)),
            "missing (12, -17) in {cands:?}"
        );
    }

    #[test]
    fn form_candidates_phi() {
        let y = [RealOracle::from_algebraic(
            AlgebraicReal::new(&[bi(-1), bi(-1), bi(1)], rat(1, 1), rat(2, 1)).unwrap(),
        )];
        let cands = small_form_candidates(&y, &FormSearch::new(bi(13))).unwrap();
        assert!(
            cands.iter().any(|c| c.q == vec![bi(13)] && c.p == bi(-21)),
            "missing (13, -21) in {cands:?}"
        );
    }

    #[test]
    fn form_candidates_exact_rational_hit() {
        let y = [RealOracle::from_rational(rat(1, 2))];
        let cands = small_form_candidates(&y, &FormSearch::new(bi(2))).unwrap();
        assert!(
            cands.iter().any(|c| c.q == vec![bi(2)] && c.p == bi(-1)),
            "missing (2, -1) in {cands:?}"
        );
    }

    #[test]
    fn zero_weight_forces_zero_coordinate() {
        let y = [
            RealOracle::from_rational(rat(2, 7)),
            RealOracle::from_rational(rat(3, 5)),
        ];
        let mut s = FormSearch::new(bi(10));
        s.weights = Some(vec![bi(10), bi(0)]);
        let cands = small_form_candidates(&y, &s).unwrap();
        assert!(!cands.is_empty());
        assert!(cands.iter().all(|c| c.q[1].is_zero()));
    }
}
