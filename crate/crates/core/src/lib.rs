//! Exact-arithmetic experiments in polynomial Diophantine approximation.
//!
//! The crate measures, at desk scale, how well integer polynomials of bounded
//! total degree approximate zero at a given point of `R^d`: best-approximation
//! record tables, Dirichlet profiles `eps*(Q)`, badly-approximable constants,
//! exponent estimates and class heuristics, together with the lattice and
//! interval machinery needed to certify every reported enclosure.
//!
//! Layout:
//! * [`numerics`] — big rationals, outward-rounded dyadic intervals, real
//!   oracles (rational / algebraic / Liouville / sampled) with certified
//!   refinement.
//! * [`monomial`] — the graded basis of nonconstant monomials and the
//!   embedding of a point into monomial space.
//! * [`poly`] — integer polynomials over a monomial basis, heights, exact and
//!   enclosure evaluation.
//! * [`lattice`] — exact integral LLL, bounded enumeration, and small linear
//!   form candidates for heights beyond brute-force reach.
//! * [`search`] — the measurement engine: coefficient-space scans, Dirichlet
//!   profiles, record tables, weighted badness statistics.
//! * [`classify`] — exponent estimates, very-well-approximable witnesses,
//!   class labels, simultaneous approximation and transference checks.
//! * [`gallery`] — constructors and samplers for test points.
//! * [`config`] — run configuration, hashing and report emission for the CLI.
//! * [`acceptance`] — the end-to-end verification suite driven by `selftest`
//!   and the integration tests.

pub mod acceptance;
pub mod classify;
pub mod config;
pub mod gallery;
pub mod lattice;
pub mod monomial;
pub mod parallel;
pub mod poly;
pub mod search;

pub mod numerics;

pub use numerics::{BigInt, DyadicInterval, Rational, RealOracle};
