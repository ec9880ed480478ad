//! Continued fractions, Dirichlet approximation and the arc dissection
//! 𝔐(Q) / 𝔪(Q).
//!
//! α is a double; every numerator and denominator is an exact integer. The
//! expansion is the exact Euclidean algorithm on the dyadic rational that the
//! double represents, stopped once the convergent agrees with α to working
//! precision.

use alloc::vec::Vec;

use crate::num::gcd;
use crate::{Error, Result};

/// Relative agreement |α − p/q| ≤ TOL·α at which an expansion is considered
/// exhausted.
const TOL: f64 = 4.0 * f64::EPSILON;

/// Upper bound on the number of partial quotients kept internally. Doubles
/// never need more than ~80 before the tolerance stop.
const MAX_INTERNAL_TERMS: usize = 256;

/// a/q with gcd(a, q) = 1 and the error |qα − a|.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RationalApprox {
    pub a: i64,
    pub q: u64,
    pub err: f64,
}

impl RationalApprox {
    pub fn new(alpha: f64, a: i64, q: u64) -> Self {
        RationalApprox { a, q, err: approx_error(alpha, a, q) }
    }

    pub fn is_reduced(&self) -> bool {
        gcd(self.a.unsigned_abs(), self.q) == 1
    }

    pub fn value(&self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

/// |qα − a| with a single rounding.
#[inline]
pub fn approx_error(alpha: f64, a: i64, q: u64) -> f64 {
    libm::fabs(libm::fma(q as f64, alpha, -(a as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ArcKind {
    Major,
    Minor,
    #[cfg_attr(feature = "serde", serde(rename = "outside"))]
    OutsideRange,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::Major => "major",
            ArcKind::Minor => "minor",
            ArcKind::OutsideRange => "outside",
        }
    }
}

/// Classification of α relative to 𝔐(Q) and 𝔪(Q). `witness` is present iff
/// `kind` is [`ArcKind::Major`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ArcLabel {
    pub kind: ArcKind,
    pub witness: Option<RationalApprox>,
}

fn check_unit_interval(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    Ok(())
}

/// The f64 as an exact fraction m / 2^shift, reduced.
fn dyadic(alpha: f64) -> Result<(u128, u32)> {
    // 1/α must fit a u64 partial quotient
    if alpha < libm::ldexp(1.0, -63) {
        return Err(Error::domain("alpha below 2^-63: first partial quotient overflows"));
    }
    let bits = alpha.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let tz = mant.trailing_zeros();
    let shift = (-e) as u32 - tz;
    Ok(((mant >> tz) as u128, shift))
}

/// Partial quotients plus their convergents (p_k, q_k), k ≥ 1.
struct Expansion {
    terms: Vec<u64>,
    convergents: Vec<(u64, u64)>,
}

fn expand(alpha: f64, max_terms: usize) -> Result<Expansion> {
    check_unit_interval(alpha)?;
    let (m, shift) = dyadic(alpha)?;
    let mf = m as f64;
    let mut num = m;
    let mut den: u128 = 1u128 << shift;

    let mut terms: Vec<u64> = Vec::new();
    let mut convs: Vec<(u64, u64)> = Vec::new();
    // (p_{k-2}, q_{k-2}), (p_{k-1}, q_{k-1}) starting from 1/0 and 0/1
    let (mut p2, mut q2, mut p1, mut q1): (u128, u128, u128, u128) = (1, 0, 0, 1);
    let mut stopped_by_tolerance = false;

    while terms.len() < max_terms && num != 0 {
        let a = den / num;
        let r = den % num;
        let p = a * p1 + p2;
        let q = a * q1 + q2;
        if a > u64::MAX as u128 || q > u64::MAX as u128 || p > i64::MAX as u128 {
            break;
        }
        terms.push(a as u64);
        convs.push((p as u64, q as u64));
        (p2, q2, p1, q1) = (p1, q1, p, q);
        den = num;
        num = r;
        // |q_k α − p_k| = r_k / 2^shift, so the relative error is r_k / (m q_k)
        if r != 0 && (r as f64) <= TOL * mf * (q as f64) {
            stopped_by_tolerance = true;
            break;
        }
    }

    if stopped_by_tolerance && terms.len() >= 2 && terms[terms.len() - 1] == 1 {
        // [.., a, 1] = [.., a + 1]; same final convergent
        let last = convs.pop().unwrap();
        terms.pop();
        *terms.last_mut().unwrap() += 1;
        *convs.last_mut().unwrap() = last;
    }

    Ok(Expansion { terms, convergents: convs })
}

/// Partial quotients [a₁, a₂, ...] of α = [0; a₁, a₂, ...], truncated at
/// `max_terms` or once the remainder vanishes to working precision.
pub fn continued_fraction(alpha: f64, max_terms: usize) -> Result<Vec<u64>> {
    if max_terms == 0 {
        return Err(Error::domain("max_terms must be at least 1"));
    }
    Ok(expand(alpha, max_terms)?.terms)
}

/// The full convergent sequence including p₀/q₀ = 0/1, with the 0/1 dropped
/// when a₁ = 1 (it then shares q = 1 with 1/1 and is the worse of the two).
fn convergent_sequence(alpha: f64) -> Result<Vec<RationalApprox>> {
    let exp = expand(alpha, MAX_INTERNAL_TERMS)?;
    let mut out = Vec::with_capacity(exp.convergents.len() + 1);
    if exp.terms.first() != Some(&1) {
        out.push(RationalApprox::new(alpha, 0, 1));
    }
    out.extend(exp.convergents.iter().map(|&(p, q)| RationalApprox::new(alpha, p as i64, q)));
    Ok(out)
}

/// Convergents a_k/q_k of α with q_k ≤ `q_max`, in increasing q_k.
///
/// Every returned fraction is a strict best approximation: 0/1 appears only
/// for α < 1/2, where it beats 1/1.
pub fn convergents(alpha: f64, q_max: u64) -> Result<Vec<RationalApprox>> {
    if q_max == 0 {
        return Err(Error::domain("q_max must be at least 1"));
    }
    let mut seq = convergent_sequence(alpha)?;
    if alpha >= 0.5 && seq.first().is_some_and(|c| c.a == 0) {
        seq.remove(0);
    }
    seq.retain(|c| c.q <= q_max);
    Ok(seq)
}

/// a/q with q ≤ `bound` and |qα − a| < 1/bound: the last convergent whose
/// denominator does not exceed `bound`.
pub fn dirichlet_approx(alpha: f64, bound: u64) -> Result<RationalApprox> {
    if bound == 0 {
        return Err(Error::domain("bound must be at least 1"));
    }
    let seq = convergent_sequence(alpha)?;
    let best = seq.iter().take_while(|c| c.q <= bound).last().copied();
    best.ok_or_else(|| Error::Numeric("no convergent with q <= bound".into()))
}

/// Classifies α against the dissection with parameters N and Q.
///
/// Requires 1 ≤ Q and 2Q < N. Endpoints are inclusive on both sides: α = Q/N
/// is in range and |αq − a| = Q/N is major.
pub fn classify_arc(alpha: f64, n: u64, q: u64) -> Result<ArcLabel> {
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    if q == 0 {
        return Err(Error::domain("Q must be at least 1"));
    }
    if q.saturating_mul(2) >= n {
        return Err(Error::domain("Q must satisfy Q < N/2"));
    }
    let width = q as f64 / n as f64;
    if alpha < width || alpha > 1.0 - width {
        return Ok(ArcLabel { kind: ArcKind::OutsideRange, witness: None });
    }

    // min_{q' ≤ Q} ‖q'α‖ is attained at the last convergent with q_k ≤ Q; the
    // largest semiconvergent below Q is checked as well so a floating point
    // near-tie cannot hide a qualifying fraction.
    let seq = convergent_sequence(alpha)?;
    let k = seq.iter().rposition(|c| c.q <= q).expect("q = 1 convergent always present");
    let mut best = seq[k];
    if k >= 1 {
        let (prev, cur) = (seq[k - 1], seq[k]);
        let j = (q - prev.q) / cur.q;
        if j >= 1 {
            let semi = RationalApprox::new(alpha, prev.a + j as i64 * cur.a, prev.q + j * cur.q);
            if semi.err < best.err {
                best = semi;
            }
        }
    }

    if best.err <= width {
        Ok(ArcLabel { kind: ArcKind::Major, witness: Some(best) })
    } else {
        Ok(ArcLabel { kind: ArcKind::Minor, witness: None })
    }
}
