//! S(α) = Σ_{n ≤ N} μ²(n) e(αn) by two independent routes, the dyadic block
//! quantity Υ(α, D), the proof trace, and minor-arc scans.
//!
//! The direct route sums e(αn) over squarefree n. The decomposed route uses
//! μ²(n) = Σ_{d² | n} μ(d), which rearranges S(α) into
//! Σ_{d ≤ √N} μ(d) Σ_{m ≤ N/d²} e(αd²m) with the inner sum in closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::diophantine::{classify_arc, dirichlet_approx, ArcKind, ArcLabel, RationalApprox};
use crate::num::{centered_frac, dist_mul, e, frac_mul, isqrt, ComplexSum};
use crate::sieve::MobiusTable;
use crate::{Error, Result};

/// Below this ‖β‖ the geometric sum is accumulated term by term.
pub const GEOMETRIC_DIRECT_THRESHOLD: f64 = 1e-9;

/// Name of the generator used by [`scan_minor_arcs`], recorded in reports.
pub const SCAN_GENERATOR: &str = "chacha20 (rand_chacha 0.9, seed_from_u64), u64 >> 11 scaled by 2^-53";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Direct,
    Decomposed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    pub n: u64,
    pub alpha: f64,
    pub method: Method,
}

impl ExpSumValue {
    pub fn abs(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    /// |self − other| in the complex plane.
    pub fn distance(&self, other: &ExpSumValue) -> f64 {
        libm::hypot(self.re - other.re, self.im - other.im)
    }
}

/// Fractional part of x·k in [−1/2, 1/2] and the parity of the rounded part.
fn split_mul(x: f64, k: u64) -> (f64, bool) {
    let kf = k as f64;
    let mut r = libm::round(x * kf);
    let mut t = libm::fma(x, kf, -r);
    if t > 0.5 {
        t -= 1.0;
        r += 1.0;
    } else if t < -0.5 {
        t += 1.0;
        r -= 1.0;
    }
    (t, libm::fmod(r, 2.0) != 0.0)
}

/// Σ_{m=1}^{M} e(βm).
pub fn geometric_sum(beta: f64, m: u64) -> (f64, f64) {
    if m == 0 {
        return (0.0, 0.0);
    }
    let t = centered_frac(beta);
    if t == 0.0 {
        return (m as f64, 0.0);
    }
    if libm::fabs(t) < GEOMETRIC_DIRECT_THRESHOLD {
        let mut acc = ComplexSum::default();
        for k in 1..=m {
            acc.add(e(frac_mul(t, k)));
        }
        return acc.value();
    }
    // e(β(M+1)/2) · sin(πβM) / sin(πβ)
    let (f, odd) = split_mul(t, m);
    let mut num = libm::sin(PI * f);
    if odd {
        num = -num;
    }
    let ratio = num / libm::sin(PI * t);
    let (g, odd2) = split_mul(t, m + 1);
    let phase = 0.5 * g + if odd2 { 0.5 } else { 0.0 };
    let (c, s) = e(phase);
    (c * ratio, s * ratio)
}

fn check_eval(table: &MobiusTable, n: u64, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    if n > table.limit() as u64 {
        return Err(Error::Capacity { what: "N versus table limit", requested: n as u128, cap: table.limit() as u128 });
    }
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    Ok(())
}

/// S(α) summed over squarefree n ≤ N with compensated accumulation.
pub fn s_direct(table: &MobiusTable, n: u64, alpha: f64) -> Result<ExpSumValue> {
    check_eval(table, n, alpha)?;
    let mut acc = ComplexSum::default();
    for (i, &m) in table.values()[..n as usize].iter().enumerate() {
        if m != 0 {
            acc.add(e(frac_mul(alpha, i as u64 + 1)));
        }
    }
    let (re, im) = acc.value();
    Ok(ExpSumValue { re, im, n, alpha, method: Method::Direct })
}

/// Contribution of `d` to the decomposed sum: μ(d) Σ_{m ≤ N/d²} e(αd²m).
#[inline]
fn d_term(table: &MobiusTable, n: u64, alpha: f64, d: u64) -> (f64, f64) {
    let mu = table.mu_unchecked(d as usize);
    if mu == 0 {
        return (0.0, 0.0);
    }
    let d2 = d * d;
    let (re, im) = geometric_sum(frac_mul(alpha, d2), n / d2);
    let s = mu as f64;
    (s * re, s * im)
}

/// S(α) via Σ_{d ≤ √N} μ(d) · geometric_sum(αd², ⌊N/d²⌋).
pub fn s_decomposed(table: &MobiusTable, n: u64, alpha: f64) -> Result<ExpSumValue> {
    check_eval(table, n, alpha)?;
    let mut acc = ComplexSum::default();
    for d in 1..=isqrt(n) {
        acc.add(d_term(table, n, alpha, d));
    }
    let (re, im) = acc.value();
    Ok(ExpSumValue { re, im, n, alpha, method: Method::Decomposed })
}

/// The part of the decomposed sum coming from `lo ≤ d < hi`.
pub fn decomposed_range(table: &MobiusTable, n: u64, alpha: f64, lo: u64, hi: u64) -> Result<(f64, f64)> {
    check_eval(table, n, alpha)?;
    let hi = hi.min(isqrt(n) + 1);
    let mut acc = ComplexSum::default();
    for d in lo.max(1)..hi {
        acc.add(d_term(table, n, alpha, d));
    }
    Ok(acc.value())
}

/// Υ(α, D) = Σ_{D ≤ d < 2D} min(N/D², ‖αd²‖⁻¹), for 1 ≤ D ≤ √N/2.
pub fn upsilon(n: u64, alpha: f64, d: u64) -> Result<f64> {
    if d == 0 || (d as u128) * (d as u128) * 4 > n as u128 {
        return Err(Error::domain("D must satisfy 1 <= D <= sqrt(N)/2"));
    }
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    let cap = n as f64 / (d * d) as f64;
    let mut total = 0.0;
    for k in d..2 * d {
        let dist = dist_mul(alpha, k * k);
        total += if dist == 0.0 { cap } else { cap.min(1.0 / dist) };
    }
    Ok(total)
}

/// Which branch of the proof handles a dyadic block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Regime {
    /// D > √q / 4: the counting lemma bounds Υ.
    LargeD,
    /// D ≤ √q / 4: αd² stays within 1/(4q) of ad²/q.
    SmallD,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DyadicBlock {
    pub d: u64,
    pub upsilon: f64,
    pub regime: Regime,
    /// D² > q/4, the counting lemma's own hypothesis.
    pub lemma_applies: bool,
    /// |Σ_{D ≤ d < 2D} μ(d) Σ_m e(αd²m)|.
    pub block_abs: f64,
    /// SmallD only: 2 Σ ‖ad²/q‖ as displayed.
    pub small_d_literal: Option<f64>,
    /// SmallD only: 2 Σ ‖ad²/q‖⁻¹ over the non-vanishing terms.
    pub small_d_reciprocal: Option<f64>,
    /// SmallD only: number of d in the block with q | ad².
    pub small_d_vanishing: Option<u64>,
}

/// Numeric trace of the bound |S(α)| ≪ N/q + q through its dyadic blocks.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DyadicTraceReport {
    pub alpha: f64,
    pub n: u64,
    pub q_dissect: u64,
    pub arc: ArcLabel,
    /// Dirichlet approximation with bound ⌊N/Q⌋.
    pub approx: RationalApprox,
    pub blocks: Vec<DyadicBlock>,
    /// |contribution| of √N/2 < ... d ≤ √N not covered by any block.
    pub tail_abs: f64,
    pub s_value: ExpSumValue,
    pub s_decomposed: ExpSumValue,
    pub log_n_max_upsilon: f64,
    /// N/q + q.
    pub bound_rhs: f64,
    /// |S(α)| / bound_rhs.
    pub bound_ratio: f64,
    /// True when some SmallD block has its literal reading below Υ, i.e. the
    /// displayed sum cannot be the upper bound it is used as.
    pub small_d_literal_below_upsilon: bool,
}

pub fn trace_pipeline(table: &MobiusTable, n: u64, alpha: f64, q_dissect: u64) -> Result<DyadicTraceReport> {
    check_eval(table, n, alpha)?;
    let arc = classify_arc(alpha, n, q_dissect)?;
    let approx = dirichlet_approx(alpha, n / q_dissect)?;
    let q = approx.q;
    let a = approx.a.unsigned_abs() as u128;

    let mut blocks = Vec::new();
    let mut d = 1u64;
    while 4 * (d as u128) * (d as u128) <= n as u128 {
        let ups = upsilon(n, alpha, d)?;
        let d2 = (d as u128) * (d as u128);
        let regime = if 16 * d2 > q as u128 { Regime::LargeD } else { Regime::SmallD };
        let (re, im) = decomposed_range(table, n, alpha, d, 2 * d)?;
        let (mut lit, mut rec, mut vanish) = (None, None, None);
        if regime == Regime::SmallD {
            let (mut l, mut r, mut v) = (0.0, 0.0, 0u64);
            for k in d..2 * d {
                let res = (a * (k as u128) * (k as u128)) % q as u128;
                let dist = res.min(q as u128 - res) as f64 / q as f64;
                l += dist;
                if res == 0 {
                    v += 1;
                } else {
                    r += 1.0 / dist;
                }
            }
            (lit, rec, vanish) = (Some(2.0 * l), Some(2.0 * r), Some(v));
        }
        blocks.push(DyadicBlock {
            d,
            upsilon: ups,
            regime,
            lemma_applies: 4 * d2 > q as u128,
            block_abs: libm::hypot(re, im),
            small_d_literal: lit,
            small_d_reciprocal: rec,
            small_d_vanishing: vanish,
        });
        d *= 2;
    }
    let (tre, tim) = decomposed_range(table, n, alpha, d, u64::MAX)?;

    let s_value = s_direct(table, n, alpha)?;
    let s_dec = s_decomposed(table, n, alpha)?;
    let max_ups = blocks.iter().map(|b| b.upsilon).fold(0.0, f64::max);
    let bound_rhs = n as f64 / q as f64 + q as f64;
    let small_d_literal_below_upsilon =
        blocks.iter().any(|b| b.small_d_literal.is_some_and(|l| l < b.upsilon));

    Ok(DyadicTraceReport {
        alpha,
        n,
        q_dissect,
        arc,
        approx,
        blocks,
        tail_abs: libm::hypot(tre, tim),
        s_value,
        s_decomposed: s_dec,
        log_n_max_upsilon: libm::log(n as f64) * max_ups,
        bound_rhs,
        bound_ratio: s_value.abs() / bound_rhs,
        small_d_literal_below_upsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScanSample {
    pub alpha: f64,
    pub abs_s: f64,
    /// |S(α)| · Q / N.
    pub ratio: f64,
    pub kind: ArcKind,
}

impl ScanSample {
    /// Classifies α and evaluates |S(α)| by the decomposed route.
    pub fn evaluate(table: &MobiusTable, n: u64, q: u64, alpha: f64) -> Result<ScanSample> {
        let kind = classify_arc(alpha, n, q)?.kind;
        let abs_s = s_decomposed(table, n, alpha)?.abs();
        Ok(ScanSample { alpha, abs_s, ratio: abs_s * q as f64 / n as f64, kind })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScanReport {
    pub n: u64,
    pub q: u64,
    pub seed: u64,
    pub generator: &'static str,
    /// Every drawn sample in draw order, major points included.
    pub rows: Vec<ScanSample>,
    pub minor_count: usize,
    pub max_ratio: f64,
    pub argmax_alpha: f64,
    /// Nearest-rank quantiles of the minor-arc ratios at 0.5, 0.9, 0.99.
    pub quantiles: [(f64, f64); 3],
}

/// Checks the scan preconditions (2Q < N, Q ≤ √N, samples ≥ 1).
pub fn check_scan(n: u64, q: u64, samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    if q == 0 || (q as u128) * (q as u128) > n as u128 {
        return Err(Error::domain("Q must satisfy 1 <= Q <= sqrt(N)"));
    }
    if 2 * q >= n {
        return Err(Error::domain("Q must satisfy Q < N/2"));
    }
    Ok(())
}

/// The `samples` points drawn uniformly from [Q/N, 1 − Q/N] for `seed`.
pub fn scan_alphas(n: u64, q: u64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_scan(n, q, samples)?;
    let lo = q as f64 / n as f64;
    let hi = 1.0 - lo;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((0..samples)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            lo + u * (hi - lo)
        })
        .collect())
}

impl ScanReport {
    /// Summarizes evaluated samples; `rows` must be in draw order.
    pub fn assemble(n: u64, q: u64, seed: u64, rows: Vec<ScanSample>) -> Result<ScanReport> {
        let mut minor: Vec<&ScanSample> = rows.iter().filter(|r| r.kind == ArcKind::Minor).collect();
        if minor.is_empty() {
            return Err(Error::EmptyScan { n, q, samples: rows.len() });
        }
        // first maximum in draw order
        let arg = minor.iter().fold(minor[0], |best, r| if r.ratio > best.ratio { r } else { best });
        let (max_ratio, argmax_alpha) = (arg.ratio, arg.alpha);
        minor.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
        let rank = |p: f64| {
            let idx = libm::ceil(p * minor.len() as f64) as usize;
            minor[idx.clamp(1, minor.len()) - 1].ratio
        };
        let quantiles = [(0.5, rank(0.5)), (0.9, rank(0.9)), (0.99, rank(0.99))];
        let minor_count = minor.len();
        Ok(ScanReport { n, q, seed, generator: SCAN_GENERATOR, rows, minor_count, max_ratio, argmax_alpha, quantiles })
    }
}

/// Samples the minor arcs 𝔪(Q) and reports |S(α)|·Q/N. Sequential; the `sqfree`
/// crate has a parallel driver producing the identical report.
pub fn scan_minor_arcs(table: &MobiusTable, n: u64, q: u64, samples: usize, seed: u64) -> Result<ScanReport> {
    check_eval(table, n, 0.0)?;
    let rows = scan_alphas(n, q, samples, seed)?
        .into_iter()
        .map(|alpha| ScanSample::evaluate(table, n, q, alpha))
        .collect::<Result<Vec<_>>>()?;
    ScanReport::assemble(n, q, seed, rows)
}
