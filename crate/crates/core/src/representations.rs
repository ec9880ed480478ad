//! r_ν(N), the number of ordered ν-tuples of positive squarefree integers
//! summing to N, and its singular-series main term
//!
//! 𝔖_ν(N) N^{ν−1},  𝔖_ν(N) = (6/π²)^ν / (ν−1)! · Π_{p² ∤ N} (1 − (1−p²)^{−ν}) · Π_{p² | N} (1 − (1−p²)^{−(ν−1)}).

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::convolution::{convolve_naive, convolve_ntt, Engine, NTT_EXACT_BOUND};
use crate::num::{binomial_saturating, Neumaier};
use crate::sieve::MobiusTable;
use crate::{Error, Result};

/// Below this length the schoolbook product is faster than the transform.
const AUTO_TRANSFORM_MIN_LEN: usize = 512;

/// Exact counts r_ν(n) for n = 0..=N (r_ν(0) = 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepCounts {
    nu: u32,
    counts: Vec<u64>,
}

impl RepCounts {
    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn n(&self) -> u64 {
        self.counts.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        self.counts.get(n as usize).copied()
    }

    /// (n, r_ν(n)) for n = 1..=N.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().enumerate().skip(1).map(|(n, &r)| (n as u64, r))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }
}

/// r_ν(n) for all n ≤ N via ν − 1 self-convolutions of μ².
pub fn rep_counts_all(table: &MobiusTable, n: u64, nu: u32) -> Result<RepCounts> {
    rep_counts_with(table, n, nu, Engine::Auto)
}

pub fn rep_counts_with(table: &MobiusTable, n: u64, nu: u32, engine: Engine) -> Result<RepCounts> {
    if nu == 0 {
        return Err(Error::domain("nu must be at least 1"));
    }
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    if n > table.limit() as u64 {
        return Err(Error::Capacity { what: "N versus table limit", requested: n as u128, cap: table.limit() as u128 });
    }
    // r_ν(n) ≤ C(n−1, ν−1), the number of compositions, and that bound is
    // monotone in n and ν
    let bound = binomial_saturating(n - 1, nu as u64 - 1);
    if bound > u64::MAX as u128 {
        return Err(Error::Capacity { what: "r_nu(N) upper bound C(N-1, nu-1)", requested: bound, cap: u64::MAX as u128 });
    }
    let len = n as usize + 1;
    let indicator = table.squarefree_indicator(n as usize)?;
    let use_transform = match engine {
        Engine::Naive => false,
        Engine::Transform => true,
        Engine::Auto => len >= AUTO_TRANSFORM_MIN_LEN && bound < NTT_EXACT_BOUND,
    };
    if use_transform && bound >= NTT_EXACT_BOUND {
        return Err(Error::Capacity { what: "transform reconstruction bound", requested: bound, cap: NTT_EXACT_BOUND });
    }
    let mut counts = indicator.clone();
    for _ in 1..nu {
        counts = if use_transform {
            convolve_ntt(&counts, &indicator, len)?
        } else {
            convolve_naive(&counts, &indicator, len)?
        };
    }
    Ok(RepCounts { nu, counts })
}

/// Truncated Euler product with its multiplicative uncertainty: the true
/// value lies in `value · [e^{−tail_bound}, e^{tail_bound}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SingularSeries {
    pub value: f64,
    pub tail_bound: f64,
    pub prime_limit: u64,
}

/// The local factor at p: 1 − (1 − p²)^{−k}, k = ν when p² ∤ N and ν − 1 when
/// p² | N.
pub fn euler_factor(p: u64, n: u64, nu: u32) -> f64 {
    let divides = (p as u128) * (p as u128) <= n as u128 && n.is_multiple_of(p * p);
    let k = if divides { nu - 1 } else { nu };
    let base = 1.0 - (p as f64) * (p as f64);
    1.0 - 1.0 / libm::pow(base, k as f64)
}

pub fn singular_series(n: u64, nu: u32, prime_limit: u64) -> Result<SingularSeries> {
    if nu < 2 {
        return Err(Error::domain("nu must be at least 2 for the singular series"));
    }
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    if prime_limit < 2 {
        return Err(Error::domain("prime_limit must be at least 2"));
    }
    let primes = MobiusTable::new(prime_limit as usize)?;
    let mut log_sum = Neumaier::default();
    for &p in primes.primes() {
        let f = euler_factor(p as u64, n, nu);
        log_sum.add(libm::log(f));
    }
    let density = 6.0 / (PI * PI);
    let factorial: f64 = (1..nu).map(|k| k as f64).product();
    let value = libm::pow(density, nu as f64) / factorial * libm::exp(log_sum.value());
    Ok(SingularSeries { value, tail_bound: 2.0 * nu as f64 / prime_limit as f64, prime_limit })
}

/// Exact count against the main term 𝔖_ν(N)·N^{ν−1}.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RepResult {
    pub n: u64,
    pub nu: u32,
    pub count: u64,
    pub singular: f64,
    pub tail_bound: f64,
    pub main_term: f64,
    /// count / main_term − 1.
    pub rel_error: f64,
    /// rel_error with the main term at the top of its uncertainty band.
    pub rel_error_low: f64,
    /// rel_error with the main term at the bottom of its uncertainty band.
    pub rel_error_high: f64,
}

impl RepResult {
    pub fn from_count(n: u64, nu: u32, count: u64, series: &SingularSeries) -> RepResult {
        let main_term = series.value * libm::pow(n as f64, (nu - 1) as f64);
        let c = count as f64;
        RepResult {
            n,
            nu,
            count,
            singular: series.value,
            tail_bound: series.tail_bound,
            main_term,
            rel_error: c / main_term - 1.0,
            rel_error_low: c / (main_term * libm::exp(series.tail_bound)) - 1.0,
            rel_error_high: c / (main_term * libm::exp(-series.tail_bound)) - 1.0,
        }
    }

    /// |count − main_term|.
    pub fn abs_error(&self) -> f64 {
        libm::fabs(self.count as f64 - self.main_term)
    }
}

pub fn main_term_compare(table: &MobiusTable, n: u64, nu: u32, prime_limit: u64) -> Result<RepResult> {
    let series = singular_series(n, nu, prime_limit)?;
    let counts = rep_counts_all(table, n, nu)?;
    let count = counts.get(n).expect("counts cover n");
    Ok(RepResult::from_count(n, nu, count, &series))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through (log N, log error).
pub fn error_exponent_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::domain("fit needs at least 3 points"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && x.is_finite() && y > 0.0 && y.is_finite())) {
        return Err(Error::domain("fit needs positive finite N and abs_error"));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("fit needs distinct N"));
    }
    let m = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| libm::log(p.0)).collect();
    let ly: Vec<f64> = points.iter().map(|p| libm::log(p.1)).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(PowerLawFit { slope, intercept: my - slope * mx })
}
