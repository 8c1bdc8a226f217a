//! Polynomial rootfinding by a structured shifted QR iteration on a permuted
//! companion matrix.
//!
//! The companion matrix of a degree-`n` polynomial is conjugated by a fixed
//! permutation into a unitary matrix with a five-diagonal staircase shape minus
//! a rank-one correction. Every QR iterate keeps that shape: a narrow band plus
//! an upper region described by four generator vectors, so one sweep costs
//! O(n) instead of O(n²).
//!
//! ```
//! use cmvroots::{poly::Polynomial, structqr::{solve, SolveOptions}};
//!
//! let p = Polynomial::from_real(&[2.0, -3.0, 0.0, 0.0, 4.0, 1.0]).unwrap();
//! let sol = solve(&p, &SolveOptions::default()).unwrap();
//! assert_eq!(sol.roots.len(), 5);
//! for z in &sol.roots {
//!     assert!(p.scaled_residual(*z) < 1e3 * 5.0 * f64::EPSILON);
//! }
//! ```
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod companion;
pub mod dense_oracle;
mod error;
pub mod metrics;
pub mod poly;
mod shift;
pub mod structqr;

pub use error::Error;
pub use num_complex::Complex64;

/// Machine epsilon of `f64`; every tolerance in the crate is a multiple of it.
pub const EPS: f64 = f64::EPSILON;

/// Diagnostics attached to solver results and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    /// `max_sweeps` was reached; unconverged diagonal entries were reported.
    NonConvergence,
    /// Part or all of the spectrum came from the dense oracle after a breakdown.
    DenseFallback,
    /// Degree too small for the structured path; solved densely.
    SmallDegree,
    /// This many zero roots were split off before iterating.
    ZeroRoots(usize),
    /// This many random-angle shifts were used.
    ExceptionalShifts(usize),
    /// The eigenvector matrix is numerically singular, so nne is infinite.
    InfiniteNne,
    /// Reference roots closer than ten times the largest matched error.
    AmbiguousMatching,
    /// No reference roots; only residuals are meaningful.
    NoReference,
}

impl core::fmt::Display for Flag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Flag::NonConvergence => f.write_str("non-convergence"),
            Flag::DenseFallback => f.write_str("dense-fallback"),
            Flag::SmallDegree => f.write_str("small-degree-dense"),
            Flag::ZeroRoots(m) => write!(f, "zero-roots={m}"),
            Flag::ExceptionalShifts(m) => write!(f, "exceptional-shifts={m}"),
            Flag::InfiniteNne => f.write_str("infinite-nne"),
            Flag::AmbiguousMatching => f.write_str("ambiguous-matching"),
            Flag::NoReference => f.write_str("no-reference"),
        }
    }
}
