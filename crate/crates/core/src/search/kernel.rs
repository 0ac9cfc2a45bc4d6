//! Fixed-point coefficient-box scanner.
//!
//! Values live on the grid `2^-96`. The exact path (all monomial values
//! exactly representable on that grid) tracks `q . f(x) mod 1` in a single
//! masked `u128` accumulator per sweep; the interval path tracks signed
//! `(lo, hi)` pairs in `i128`. Both are exact integer arithmetic, so every
//! per-shell minimum comes with certified bounds.
//!
//! Enumeration covers the half-box in which the highest-index nonzero
//! coordinate is positive (`q` and `-q` carry identical statistics); stored
//! witnesses are canonicalized to the spec convention (first nonzero
//! coordinate positive) and ties on equal certified values keep the
//! lexicographically smallest canonical vector, which makes shard merging
//! associative and results independent of shard count.

use super::SearchError;

pub(crate) const SCALE: u32 = 96;
const TWO96: u128 = 1u128 << 96;
const MASK96: u128 = TWO96 - 1;
const HALF96: u128 = 1u128 << 95;
const THREE_HALVES96: u128 = TWO96 + HALF96;

pub(crate) const MAX_VARS: usize = 16;

/// Per-shell accumulator: minima of per-candidate distance bounds plus the
/// witnessing coefficient vectors (canonical form).
#[derive(Clone, Debug)]
pub(crate) struct ShellAcc {
    pub dist_lo: u128,
    pub dist_hi: u128,
    pub wit: Option<Vec<i64>>,
    pub zero: Option<Vec<i64>>,
}

impl ShellAcc {
    fn new() -> Self {
        ShellAcc { dist_lo: u128::MAX, dist_hi: u128::MAX, wit: None, zero: None }
    }

    fn merge_from(&mut self, other: ShellAcc) {
        if other.dist_lo < self.dist_lo {
            self.dist_lo = other.dist_lo;
        }
        match other.dist_hi.cmp(&self.dist_hi) {
            std::cmp::Ordering::Less => {
                self.dist_hi = other.dist_hi;
                self.wit = other.wit;
            }
            std::cmp::Ordering::Equal => {
                if let (Some(a), Some(b)) = (&self.wit, &other.wit) {
                    if b < a {
                        self.wit = other.wit;
                    }
                }
            }
            std::cmp::Ordering::Greater => {}
        }
        match (&mut self.zero, other.zero) {
            (Some(a), Some(b)) => {
                if b < *a {
                    *a = b;
                }
            }
            (z @ None, Some(b)) => *z = Some(b),
            _ => {}
        }
    }
}


struct ExactCtx<'a> {
    y: &'a [u128], // fractional parts, scale 2^-96
    m: i64,
    shells: Vec<ShellAcc>,
}

impl ExactCtx<'_> {
    #[inline(always)]
    fn candidate(&mut self, frac: u128, shell: usize, qbuf: &[i64], q0: i64) {
        let d = frac.min(TWO96 - frac);
        let s = &mut self.shells[shell];
        if d <= s.dist_hi {
            let mut q = canonical_with_q0(qbuf, q0);
            if d < s.dist_hi {
                s.dist_hi = d;
                s.dist_lo = d;
                if d == 0 {
                    update_zero(&mut s.zero, &q);
                }
                s.wit = Some(q);
            } else {
                if d == 0 {
                    update_zero(&mut s.zero, &q);
                }
                if let Some(w) = &mut s.wit {
                    if q < *w {
                        std::mem::swap(w, &mut q);
                    }
                }
            }
        }
    }

    fn sweep_level0(&mut self, frac: u128, prefmax: i64, allzero: bool, qbuf: &[i64]) {
        let y0 = self.y[0];
        if !allzero {
            self.candidate(frac, prefmax as usize, qbuf, 0);
        }
        let mut f = frac;
        for v in 1..=self.m {
            f = (f + y0) & MASK96;
            let sh = if v > prefmax { v } else { prefmax } as usize;
            self.candidate(f, sh, qbuf, v);
        }
        if !allzero {
            let neg = TWO96 - y0;
            let mut f = frac;
            for v in 1..=self.m {
                f = (f + neg) & MASK96;
                let sh = if v > prefmax { v } else { prefmax } as usize;
                self.candidate(f, sh, qbuf, -v);
            }
        }
    }

    fn rec(&mut self, level: usize, frac: u128, prefmax: i64, allzero: bool, qbuf: &mut [i64]) {
        if level == 0 {
            self.sweep_level0(frac, prefmax, allzero, qbuf);
            return;
        }
        let yl = self.y[level] & MASK96;
        qbuf[level] = 0;
        self.rec(level - 1, frac, prefmax, allzero, qbuf);
        let mut f = frac;
        for v in 1..=self.m {
            f = (f + yl) & MASK96;
            qbuf[level] = v;
            self.rec(level - 1, f, prefmax.max(v), false, qbuf);
        }
        if !allzero {
            let neg = TWO96 - yl;
            let mut f = frac;
            for v in 1..=self.m {
                f = (f + neg) & MASK96;
                qbuf[level] = -v;
                self.rec(level - 1, f, prefmax.max(v), false, qbuf);
            }
        }
        qbuf[level] = 0;
    }
}

#[inline(always)]
fn canonical_with_q0(qbuf: &[i64], q0: i64) -> Vec<i64> {
    let n = qbuf.len();
    let mut q = Vec::with_capacity(n);
    q.push(q0);
    q.extend_from_slice(&qbuf[1..]);
    let _ = n;
    match q.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => {
            for x in q.iter_mut() {
                *x = -*x;
            }
            q
        }
        _ => q,
    }
}

fn update_zero(slot: &mut Option<Vec<i64>>, q: &[i64]) {
    match slot {
        Some(z) => {
            if q < z.as_slice() {
                *z = q.to_vec();
            }
        }
        None => *slot = Some(q.to_vec()),
    }
}

struct IntervalCtx<'a> {
    y_lo: &'a [i128],
    y_hi: &'a [i128],
    m: i64,
    shells: Vec<ShellAcc>,
}

#[inline(always)]
fn tent(x: u128) -> u128 {
    if x <= TWO96 {
        x.min(TWO96 - x)
    } else {
        x - TWO96
    }
}

impl IntervalCtx<'_> {
    #[inline(always)]
    fn candidate(&mut self, lo: i128, hi: i128, shell: usize, qbuf: &[i64], q0: i64) {
        debug_assert!(lo <= hi);
        let width = (hi - lo) as u128;
        let (dmin, dmax) = if width >= TWO96 {
            (0u128, HALF96)
        } else {
            let f_lo = (lo as u128) & MASK96;
            let top = f_lo + width; // < 2^97
            let contains_int = top >= TWO96 || f_lo == 0;
            let t_lo = tent(f_lo);
            let t_top = tent(top);
            let dmin = if contains_int { 0 } else { t_lo.min(t_top) };
            let half_inside = (f_lo <= HALF96 && top >= HALF96) || top >= THREE_HALVES96;
            let dmax = if half_inside { HALF96 } else { t_lo.max(t_top) };
            (dmin, dmax)
        };
        let s = &mut self.shells[shell];
        if dmin < s.dist_lo {
            s.dist_lo = dmin;
        }
        if dmin == 0 {
            let q = canonical_with_q0(qbuf, q0);
            update_zero(&mut s.zero, &q);
        }
        if dmax <= s.dist_hi {
            let mut q = canonical_with_q0(qbuf, q0);
            if dmax < s.dist_hi {
                s.dist_hi = dmax;
                s.wit = Some(q);
            } else if let Some(w) = &mut s.wit {
                if q < *w {
                    std::mem::swap(w, &mut q);
                }
            }
        }
    }

    fn sweep_level0(&mut self, lo: i128, hi: i128, prefmax: i64, allzero: bool, qbuf: &[i64]) {
        let (ylo, yhi) = (self.y_lo[0], self.y_hi[0]);
        if !allzero {
            self.candidate(lo, hi, prefmax as usize, qbuf, 0);
        }
        let (mut l, mut h) = (lo, hi);
        for v in 1..=self.m {
            l += ylo;
            h += yhi;
            let sh = if v > prefmax { v } else { prefmax } as usize;
            self.candidate(l, h, sh, qbuf, v);
        }
        if !allzero {
            let (mut l, mut h) = (lo, hi);
            for v in 1..=self.m {
                l -= yhi;
                h -= ylo;
                let sh = if v > prefmax { v } else { prefmax } as usize;
                self.candidate(l, h, sh, qbuf, -v);
            }
        }
    }

    fn rec(
        &mut self,
        level: usize,
        lo: i128,
        hi: i128,
        prefmax: i64,
        allzero: bool,
        qbuf: &mut [i64],
    ) {
        if level == 0 {
            self.sweep_level0(lo, hi, prefmax, allzero, qbuf);
            return;
        }
        let (ylo, yhi) = (self.y_lo[level], self.y_hi[level]);
        qbuf[level] = 0;
        self.rec(level - 1, lo, hi, prefmax, allzero, qbuf);
        let (mut l, mut h) = (lo, hi);
        for v in 1..=self.m {
            l += ylo;
            h += yhi;
            qbuf[level] = v;
            self.rec(level - 1, l, h, prefmax.max(v), false, qbuf);
        }
        if !allzero {
            let (mut l, mut h) = (lo, hi);
            for v in 1..=self.m {
                l -= yhi;
                h -= ylo;
                qbuf[level] = -v;
                self.rec(level - 1, l, h, prefmax.max(v), false, qbuf);
            }
        }
        qbuf[level] = 0;
    }
}

/// Kernel input: per-monomial fixed-point enclosures at scale `2^-96`.
#[derive(Clone, Debug)]
pub(crate) struct KernelInput {
    pub y_lo: Vec<i128>,
    pub y_hi: Vec<i128>,
    /// true when every enclosure has zero width (dyadic point on the grid)
    pub exact: bool,
}

impl KernelInput {
    /// Guard against accumulator overflow: `n * m * max|y| * 2` must stay
    /// well inside `i128`.
    pub fn check_bounds(&self, m: u64) -> Result<(), SearchError> {
        let n = self.y_lo.len();
        if n == 0 || n > MAX_VARS || m == 0 || m > i32::MAX as u64 {
            return Err(SearchError::KernelOverflow);
        }
        let max_abs = self
            .y_lo
            .iter()
            .chain(self.y_hi.iter())
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0);
        let budget = u128::MAX >> 2;
        let need = max_abs
            .checked_mul(m as u128)
            .and_then(|x| x.checked_mul(n as u128));
        match need {
            Some(v) if v < budget => Ok(()),
            _ => Err(SearchError::KernelOverflow),
        }
    }
}

/// Scan the half-box `0 < |q|_inf <= m`, returning per-shell minima.
/// `shards` controls work splitting only; results are independent of it.
pub(crate) fn scan(
    input: &KernelInput,
    m: u64,
    shards: usize,
    force_sequential: bool,
) -> Result<Vec<ShellAcc>, SearchError> {
    input.check_bounds(m)?;
    let n = input.y_lo.len();
    let m_i = m as i64;

    // split the outermost coordinate range [0, m] into contiguous chunks
    let shards = shards.clamp(1, (m as usize) + 1);
    let mut ranges = Vec::with_capacity(shards);
    let total = m_i + 1;
    let step = total / shards as i64;
    let rem = total % shards as i64;
    let mut start = 0i64;
    for i in 0..shards as i64 {
        let len = step + if i < rem { 1 } else { 0 };
        if len > 0 {
            ranges.push((start, start + len - 1));
            start += len;
        }
    }

    let empty = vec![ShellAcc::new(); m as usize + 1];
    let run_range = |(a, b): (i64, i64)| -> Vec<ShellAcc> {
        if input.exact {
            let y: Vec<u128> = input.y_lo.iter().map(|&v| (v as u128) & MASK96).collect();
            let mut ctx = ExactCtx { y: &y, m: m_i, shells: vec![ShellAcc::new(); m as usize + 1] };
            let mut qbuf = [0i64; MAX_VARS];
            for v in a..=b {
                let frac = mul_frac(y[n - 1], v);
                if n == 1 {
                    if v > 0 {
                        ctx.candidate(frac, v as usize, &qbuf[..1], v);
                    }
                } else {
                    qbuf[n - 1] = v;
                    ctx.rec(n - 2, frac, v, v == 0, &mut qbuf[..n]);
                }
            }
            ctx.shells
        } else {
            let mut ctx = IntervalCtx {
                y_lo: &input.y_lo,
                y_hi: &input.y_hi,
                m: m_i,
                shells: vec![ShellAcc::new(); m as usize + 1],
            };
            let mut qbuf = [0i64; MAX_VARS];
            for v in a..=b {
                let (lo, hi) = (input.y_lo[n - 1] * v as i128, input.y_hi[n - 1] * v as i128);
                if n == 1 {
                    if v > 0 {
                        ctx.candidate(lo, hi, v as usize, &qbuf[..1], v);
                    }
                } else {
                    qbuf[n - 1] = v;
                    ctx.rec(n - 2, lo, hi, v, v == 0, &mut qbuf[..n]);
                }
            }
            ctx.shells
        }
    };

    let merge = |mut a: Vec<ShellAcc>, b: Vec<ShellAcc>| -> Vec<ShellAcc> {
        for (sa, sb) in a.iter_mut().zip(b) {
            sa.merge_from(sb);
        }
        a
    };

    let shells = if force_sequential {
        crate::parallel::map_reduce_sequential(ranges, run_range, merge, empty)
    } else {
        crate::parallel::map_reduce(ranges, run_range, merge, empty)
    };
    Ok(shells)
}

/// `(v * y) mod 2^96` for `v in [0, 2^31]`, `y < 2^96`.
#[inline]
fn mul_frac(y: u128, v: i64) -> u128 {
    debug_assert!(v >= 0);
    // split y into high/low halves to multiply mod 2^96 without overflow
    let lo = y & 0xFFFF_FFFF_FFFF_FFFF;
    let hi = y >> 64;
    let v = v as u128;
    let part_lo = lo.wrapping_mul(v);
    let part_hi = (hi * v) << 64; // mod 2^128
    part_lo.wrapping_add(part_hi) & MASK96
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference scan: direct evaluation with i128 rational-free arithmetic.
    fn reference(y_lo: &[i128], y_hi: &[i128], m: i64) -> Vec<(u128, u128)> {
        let n = y_lo.len();
        let mut shells = vec![(u128::MAX, u128::MAX); m as usize + 1];
        let mut q = vec![-m; n];
        loop {
            if q.iter().any(|&v| v != 0) {
                // canonical half: highest-index nonzero positive
                let take = q.iter().rev().find(|&&v| v != 0).map(|&v| v > 0).unwrap_or(false);
                if take {
                    let mut lo = 0i128;
                    let mut hi = 0i128;
                    for i in 0..n {
                        if q[i] >= 0 {
                            lo += y_lo[i] * q[i] as i128;
                            hi += y_hi[i] * q[i] as i128;
                        } else {
                            lo += y_hi[i] * q[i] as i128;
                            hi += y_lo[i] * q[i] as i128;
                        }
                    }
                    let sh = q.iter().map(|v| v.abs()).max().unwrap() as usize;
                    let width = (hi - lo) as u128;
                    let (dmin, dmax) = if width >= TWO96 {
                        (0, HALF96)
                    } else {
                        let f_lo = (lo as u128) & MASK96;
                        let top = f_lo + width;
                        let ci = top >= TWO96 || f_lo == 0;
                        let dmin = if ci { 0 } else { tent(f_lo).min(tent(top)) };
                        let hi_in = (f_lo <= HALF96 && top >= HALF96) || top >= THREE_HALVES96;
                        let dmax = if hi_in { HALF96 } else { tent(f_lo).max(tent(top)) };
                        (dmin, dmax)
                    };
                    if dmin < shells[sh].0 {
                        shells[sh].0 = dmin;
                    }
                    if dmax < shells[sh].1 {
                        shells[sh].1 = dmax;
                    }
                }
            }
            // odometer
            let mut i = 0;
            loop {
                if i == n {
                    return shells;
                }
                q[i] += 1;
                if q[i] <= m {
                    break;
                }
                q[i] = -m;
                i += 1;
            }
        }
    }

    fn run_case(y_lo: Vec<i128>, y_hi: Vec<i128>, m: u64, exact: bool) {
        let input = KernelInput { y_lo: y_lo.clone(), y_hi: y_hi.clone(), exact };
        let got = scan(&input, m, 3, true).unwrap();
        let want = reference(&y_lo, &y_hi, m as i64);
        for s in 1..=m as usize {
            assert_eq!(got[s].dist_lo, want[s].0, "shell {s} lo");
            assert_eq!(got[s].dist_hi, want[s].1, "shell {s} hi");
        }
    }

    fn fp(num: u128, den: u128) -> i128 {
        ((num << SCALE) / den) as i128
    }

    #[test]
    fn kernel_matches_reference_exact() {
        // y = (1/2, 3/8): exact on the grid
        run_case(vec![fp(1, 2), fp(3, 8)], vec![fp(1, 2), fp(3, 8)], 9, true);
        run_case(vec![fp(1, 2)], vec![fp(1, 2)], 12, true);
        run_case(
            vec![fp(5, 8), fp(7, 16), fp(3, 4)],
            vec![fp(5, 8), fp(7, 16), fp(3, 4)],
            4,
            true,
        );
    }

    #[test]
    fn kernel_matches_reference_interval() {
        // widths of one ulp, like a rounded irrational
        let lo = vec![fp(41421, 100000), fp(2, 3)];
        let hi: Vec<i128> = lo.iter().map(|v| v + 1).collect();
        run_case(lo, hi, 8, false);
    }

    #[test]
    fn shard_count_does_not_change_results() {
        let y = vec![fp(377, 610), fp(144, 233)];
        let input = KernelInput { y_lo: y.clone(), y_hi: y.clone(), exact: true };
        let base = scan(&input, 20, 1, true).unwrap();
        for shards in [2usize, 3, 7, 21, 50] {
            let other = scan(&input, 20, shards, true).unwrap();
            for (a, b) in base.iter().zip(&other) {
                assert_eq!(a.dist_lo, b.dist_lo);
                assert_eq!(a.dist_hi, b.dist_hi);
                assert_eq!(a.wit, b.wit);
                assert_eq!(a.zero, b.zero);
            }
        }
        // and the parallel runtime agrees with the sequential one
        let par = scan(&input, 20, 8, false).unwrap();
        for (a, b) in base.iter().zip(&par) {
            assert_eq!(a.dist_hi, b.dist_hi);
            assert_eq!(a.wit, b.wit);
        }
    }

    #[test]
    fn exact_zero_detection() {
        // y = 1/2: q=2 hits an integer exactly
        let input = KernelInput { y_lo: vec![fp(1, 2)], y_hi: vec![fp(1, 2)], exact: true };
        let shells = scan(&input, 4, 1, true).unwrap();
        assert_eq!(shells[2].dist_hi, 0);
        assert_eq!(shells[2].zero, Some(vec![2]));
        assert_eq!(shells[1].dist_hi, HALF96);
    }

    #[test]
    fn witness_tie_break_is_lex_smallest() {
        // y = (1/2, 1/2): shell 1 holds exact zeros at (1,-1) and (1,1);
        // the lex-smallest canonical witness is (1,-1)
        let input = KernelInput {
            y_lo: vec![fp(1, 2), fp(1, 2)],
            y_hi: vec![fp(1, 2), fp(1, 2)],
            exact: true,
        };
        let shells = scan(&input, 3, 1, true).unwrap();
        assert_eq!(shells[1].dist_hi, 0);
        assert_eq!(shells[1].wit, Some(vec![1, -1]));
        assert_eq!(shells[1].zero, Some(vec![1, -1]));
    }

    #[test]
    fn merge_tie_keeps_lex_smallest_witness() {
        let mut a = ShellAcc { dist_lo: 5, dist_hi: 7, wit: Some(vec![2, 1]), zero: None };
        let b = ShellAcc { dist_lo: 6, dist_hi: 7, wit: Some(vec![1, 9]), zero: Some(vec![3, 0]) };
        a.merge_from(b);
        assert_eq!(a.dist_lo, 5);
        assert_eq!(a.dist_hi, 7);
        assert_eq!(a.wit, Some(vec![1, 9]));
        assert_eq!(a.zero, Some(vec![3, 0]));
    }
}
