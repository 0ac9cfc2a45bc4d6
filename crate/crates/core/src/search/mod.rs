//! The measurement engine: coefficient-space scans for small `|P(x)|`,
//! Dirichlet profiles, record tables, badly-approximable constants and
//! weighted badness statistics.
//!
//! Brute-force scans enumerate the coefficient box `0 < |q|_inf <= m` shell by
//! shell, with the optimal constant term chosen implicitly (the statistic per
//! candidate is the distance of `q . f(x)` to the nearest integer). The
//! lattice method produces candidates for heights beyond the enumeration cap;
//! every reported value is certified by exact rational arithmetic or interval
//! enclosures, never by floating point.

mod engine;
mod kernel;
mod profile;
mod records;
mod weighted;

pub use engine::{brute_force_best, shell_scan, BestApprox, CertValue, Shell, ShellScan};
pub use profile::{
    dirichlet_profile, epsilon_star, DirichletProfile, EpsStar, ProfileSample, Verdicts,
};
pub use records::{record_scan, ApproximationRecord, RecordTable};
pub use weighted::weighted_bad_statistic;

use crate::numerics::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("brute-force enumeration of {0} candidates exceeds the cap {1}; use the lattice method")]
    CapExceeded(f64, u64),
    #[error("coefficient-space values do not fit the fixed-point kernel")]
    KernelOverflow,
    #[error("weight vector must have one nonnegative entry per basis monomial")]
    BadWeights,
    #[error("weights must sum to 1 for the badness statistic")]
    WeightsNotNormalized,
    #[error("comparison undecided at the precision cap")]
    Undecided,
    #[error("schedule must be strictly increasing with Q >= 2")]
    BadSchedule,
    #[error(transparent)]
    Monomial(#[from] crate::monomial::MonomialError),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Which engine produces candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Lattice,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" => Ok(Method::Brute),
            "lattice" => Ok(Method::Lattice),
            other => Err(format!("unknown method '{other}', expected brute|lattice")),
        }
    }
}

/// Resource limits for a search run.
#[derive(Clone, Debug)]
pub struct SearchCaps {
    /// Maximum number of brute-force candidate evaluations.
    pub max_evaluations: u64,
    /// Refinement cap for undecidable comparisons.
    pub p_max: u32,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { max_evaluations: 1_000_000_000, p_max: 4096 }
    }
}

impl SearchCaps {
    /// Largest shell radius whose full box `(2m+1)^n` fits the evaluation cap.
    pub fn radius_for(&self, n: usize) -> u64 {
        if n == 0 {
            return 0;
        }
        let cap = self.max_evaluations as f64;
        let side = cap.powf(1.0 / n as f64);
        let mut m = (((side - 1.0) / 2.0).floor() as i64).max(0) as u64;
        // float guard: nudge down until the exact product fits
        while m > 0 && box_size(m, n) > self.max_evaluations as f64 {
            m -= 1;
        }
        m
    }
}

pub(crate) fn box_size(m: u64, n: usize) -> f64 {
    ((2 * m + 1) as f64).powi(n as i32)
}

/// Nonnegative per-monomial weights. In badness mode they form a probability
/// vector; prefix form (all zeros trailing) reproduces a lower-degree
/// subproblem through the graded ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    r: Vec<Rational>,
}

impl WeightVector {
    pub fn new(r: Vec<Rational>) -> Result<Self, SearchError> {
        if r.iter().any(|w| w.is_negative()) {
            return Err(SearchError::BadWeights);
        }
        Ok(WeightVector { r })
    }

    /// Equal weights `1/n` on every coordinate: the central-ray profile.
    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(BigInt::from(1), BigInt::from(n as u64));
        WeightVector { r: vec![w; n] }
    }

    /// Prefix weights: `1/n_k` on the first `n_k` coordinates, zero beyond.
    pub fn prefix(n_total: usize, n_prefix: usize) -> Self {
        let w = Rational::new(BigInt::from(1), BigInt::from(n_prefix as u64));
        let mut r = vec![w; n_prefix];
        r.resize(n_total, Rational::zero());
        WeightVector { r }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.r.len()).filter(|&i| !self.r[i].is_zero()).collect()
    }

    pub fn is_probability_vector(&self) -> bool {
        let s: Rational = self.r.iter().cloned().sum();
        s == Rational::from_integer(BigInt::from(1))
    }
}

