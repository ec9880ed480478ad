//! Kernels for the exponential sum over squarefree integers
//!
//! S(α) = Σ_{n ≤ N} μ²(n) e(αn)
//!
//! together with the objects used to bound it: the Möbius sieve, rational
//! approximation and the major/minor arc dissection, the dyadic quantity
//! Υ(α, D), the counting function W(D, z) with its proof diagnostics, and
//! exact representation counts of integers as sums of squarefree numbers
//! compared against the singular-series main term.
//!
//! The crate is `no_std` and only needs `alloc`. IO, CLI parsing, file formats
//! and parallel drivers live in the `sqfree` crate.

#![no_std]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

pub mod convolution;
pub mod counting;
pub mod diophantine;
mod error;
pub mod expsum;
pub mod num;
pub mod representations;
pub mod sieve;

pub use error::{Error, Result};

pub use counting::{difference_multiplicity, lemma_diagnostics, w_bound_ratio, w_count, LemmaDiagnostics};
pub use diophantine::{classify_arc, continued_fraction, convergents, dirichlet_approx, ArcKind, ArcLabel, RationalApprox};
pub use expsum::{
    geometric_sum, s_decomposed, s_direct, scan_minor_arcs, trace_pipeline, upsilon, DyadicBlock, DyadicTraceReport,
    ExpSumValue, Method, Regime, ScanReport, ScanSample,
};
pub use representations::{
    error_exponent_fit, main_term_compare, rep_counts_all, singular_series, PowerLawFit, RepCounts, RepResult,
    SingularSeries,
};
pub use sieve::{build_mobius, MobiusTable};
