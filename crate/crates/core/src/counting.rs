//! W(D, z) = #{d ≤ D : ‖d²α‖ ≤ z} and the objects of its counting argument.

use alloc::vec;
use alloc::vec::Vec;

use crate::num::{dist_mul, divisor_count, isqrt};
use crate::{Error, Result};

/// Largest number of length-q intervals [`lemma_diagnostics`] will histogram.
pub const MAX_INTERVALS: u64 = 10_000_000;
/// Largest pair set [`lemma_diagnostics`] will materialize.
pub const MAX_PAIRS: u64 = 50_000_000;

/// Guard for comparisons of the form ‖nα‖ ≤ 2z.
const TRIANGLE_GUARD: f64 = 1e-12;

fn check_z(z: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&z) {
        return Err(Error::domain("z must lie in [0, 1/2]"));
    }
    Ok(())
}

fn qualifying(alpha: f64, d_max: u64, z: f64) -> impl Iterator<Item = u64> {
    (1..=d_max).filter(move |&d| dist_mul(alpha, d * d) <= z)
}

/// W(D, z) by direct enumeration of d = 1..D.
pub fn w_count(alpha: f64, d: u64, z: f64) -> Result<u64> {
    check_z(z)?;
    if d == 0 {
        return Err(Error::domain("D must be at least 1"));
    }
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    Ok(qualifying(alpha, d, z).count() as u64)
}

/// Full state of the counting argument for one (α, D, z, q).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LemmaDiagnostics {
    pub alpha: f64,
    pub d: u64,
    pub z: f64,
    pub q: u64,
    /// K = ⌊D²/q⌋ + 1.
    pub k: u64,
    /// a_k = #{d : ‖d²α‖ ≤ z, kq ≤ d² < (k+1)q} for k = 0..K−1.
    pub histogram: Vec<u64>,
    pub w: u64,
    /// |𝒟|: unordered pairs with both ‖d_i²α‖ ≤ z and 1 ≤ |d₁² − d₂²| ≤ q.
    pub pairs: u64,
    /// Σ_k C(a_k, 2): pairs drawn from a single interval.
    pub pairs_within_intervals: u64,
    /// |𝒩|.
    pub diffs: u64,
    /// 𝒩 itself, ascending.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub differences: Vec<u64>,
    /// max over 𝒩 of ‖nα‖ (0 when 𝒩 is empty).
    pub max_diff_norm: f64,
    /// Every n ∈ 𝒩 has ‖nα‖ ≤ 2z.
    pub triangle_holds: bool,
    /// max over 𝒩 of the number of pairs d₁ > d₂, d₁ ≤ D, with d₁² − d₂² = n.
    pub max_multiplicity: u64,
    /// Every n ∈ 𝒩 has multiplicity at most d(n).
    pub multiplicity_within_divisor_bound: bool,
    /// W² ≤ 2K(|𝒟| + W).
    pub chain_holds: bool,
}

/// Builds the histogram, the pair set 𝒟, the difference set 𝒩 and the
/// derived checks.
pub fn lemma_diagnostics(alpha: f64, d: u64, z: f64, q: u64) -> Result<LemmaDiagnostics> {
    check_z(z)?;
    if d == 0 || q == 0 {
        return Err(Error::domain("D and q must be at least 1"));
    }
    if d > 3_000_000_000 {
        return Err(Error::Capacity { what: "D (d^2 must fit 63 bits)", requested: d as u128, cap: 3_000_000_000 });
    }
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    let k = d * d / q + 1;
    if k > MAX_INTERVALS {
        return Err(Error::Capacity { what: "interval count K", requested: k as u128, cap: MAX_INTERVALS as u128 });
    }

    let good: Vec<u64> = qualifying(alpha, d, z).collect();
    let w = good.len() as u64;

    let mut histogram = vec![0u64; k as usize];
    for &g in &good {
        histogram[(g * g / q) as usize] += 1;
    }
    let pairs_within_intervals = histogram.iter().map(|&a| a * a.saturating_sub(1) / 2).sum();

    // d² ascends along `good`, so the partners of good[i] with
    // d_j² − d_i² ≤ q form a window starting at i + 1
    let mut pairs = 0u64;
    let mut hi = 0usize;
    for i in 0..good.len() {
        let base = good[i] * good[i];
        hi = hi.max(i + 1);
        while hi < good.len() && good[hi] * good[hi] - base <= q {
            hi += 1;
        }
        pairs += (hi - i - 1) as u64;
    }
    if pairs > MAX_PAIRS {
        return Err(Error::Capacity { what: "pair set size", requested: pairs as u128, cap: MAX_PAIRS as u128 });
    }
    let mut differences = Vec::with_capacity(pairs as usize);
    for i in 0..good.len() {
        let base = good[i] * good[i];
        for &g in &good[i + 1..] {
            let diff = g * g - base;
            if diff > q {
                break;
            }
            differences.push(diff);
        }
    }
    differences.sort_unstable();
    differences.dedup();

    let mut max_diff_norm: f64 = 0.0;
    let mut max_multiplicity = 0;
    let mut multiplicity_within_divisor_bound = true;
    for &n in &differences {
        max_diff_norm = max_diff_norm.max(dist_mul(alpha, n));
        let m = difference_multiplicity(n, d)?;
        max_multiplicity = max_multiplicity.max(m);
        if m > divisor_count(n) {
            multiplicity_within_divisor_bound = false;
        }
    }
    let triangle_holds = max_diff_norm <= 2.0 * z + TRIANGLE_GUARD;
    let chain_holds = (w as u128) * (w as u128) <= 2 * (k as u128) * (pairs as u128 + w as u128);

    Ok(LemmaDiagnostics {
        alpha,
        d,
        z,
        q,
        k,
        histogram,
        w,
        pairs,
        pairs_within_intervals,
        diffs: differences.len() as u64,
        differences,
        max_diff_norm,
        triangle_holds,
        max_multiplicity,
        multiplicity_within_divisor_bound,
        chain_holds,
    })
}

/// Number of pairs d₁ > d₂ ≥ 1 with d₁ ≤ D and d₁² − d₂² = n.
///
/// Each pair comes from a factorization n = u·v with u < v of equal parity,
/// via d₁ = (u + v)/2 and d₂ = (v − u)/2.
pub fn difference_multiplicity(n: u64, d: u64) -> Result<u64> {
    if n == 0 || d == 0 {
        return Err(Error::domain("n and D must be at least 1"));
    }
    let mut count = 0;
    for u in 1..=isqrt(n) {
        if !n.is_multiple_of(u) {
            continue;
        }
        let v = n / u;
        if u == v || (u ^ v) & 1 == 1 {
            continue;
        }
        if (u + v) / 2 <= d {
            count += 1;
        }
    }
    Ok(count)
}

/// W(D, z) / (D²/q + D·√z), the lemma's bound with ε dropped. Requires
/// D² > q/4.
pub fn w_bound_ratio(alpha: f64, d: u64, z: f64, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("q must be at least 1"));
    }
    if 4 * (d as u128) * (d as u128) <= q as u128 {
        return Err(Error::domain("lemma hypothesis violated: D^2 > q/4 required"));
    }
    let w = w_count(alpha, d, z)?;
    Ok(w as f64 / w_bound_rhs(d, z, q))
}

/// D²/q + D·√z.
pub fn w_bound_rhs(d: u64, z: f64, q: u64) -> f64 {
    let df = d as f64;
    df * df / q as f64 + df * libm::sqrt(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_count_examples() {
        assert_eq!(w_count(0.0, 37, 0.0).unwrap(), 37);
        assert_eq!(w_count(0.5, 10, 0.1).unwrap(), 5);
        assert_eq!(w_count(0.1234, 50, 0.5).unwrap(), 50);
        assert!(matches!(w_count(0.1, 10, 0.6), Err(Error::Domain(m)) if m == "z must lie in [0, 1/2]"));
        assert!(w_count(0.1, 10, -0.1).is_err());
    }

    #[test]
    fn diagnostics_at_zero() {
        let g = lemma_diagnostics(0.0, 4, 0.0, 4).unwrap();
        assert_eq!(g.w, 4);
        assert_eq!(g.k, 5);
        assert_eq!(g.histogram, [1, 1, 1, 0, 1]);
        assert_eq!(g.pairs, 1);
        assert_eq!(g.differences, [3]);
        assert_eq!(g.pairs_within_intervals, 0);
        assert!(g.triangle_holds && g.chain_holds && g.multiplicity_within_divisor_bound);
    }

    #[test]
    fn diagnostics_capacity() {
        assert!(matches!(lemma_diagnostics(0.3, 100_000, 0.1, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(difference_multiplicity(3, 10).unwrap(), 1);
        assert_eq!(difference_multiplicity(15, 10).unwrap(), 2);
        assert_eq!(difference_multiplicity(15, 5).unwrap(), 1);
        assert_eq!(difference_multiplicity(4, 10).unwrap(), 0);
        assert_eq!(difference_multiplicity(2, 10).unwrap(), 0);
    }

    #[test]
    fn ratio_hypothesis() {
        let golden = (libm::sqrt(5.0) - 1.0) / 2.0;
        let r = w_bound_ratio(golden, 100, 0.01, 89).unwrap();
        assert!(r.is_finite() && r >= 0.0);
        assert!(matches!(w_bound_ratio(golden, 4, 0.01, 64), Err(Error::Domain(m)) if m.contains("D^2 > q/4")));
        assert!(w_bound_ratio(golden, 5, 0.01, 64).is_ok());
    }
}
