//! Numeric helpers shared by the evaluation modules.

use core::f64::consts::PI;

/// Signed fractional part of `alpha * k`, in `[-1/2, 1/2]`.
///
/// The product is reduced with a fused multiply-add, so the result carries a
/// single rounding regardless of the size of `k` (exact for `k < 2^53`).
#[inline]
pub fn frac_mul(alpha: f64, k: u64) -> f64 {
    let kf = k as f64;
    let nearest = libm::round(alpha * kf);
    let mut t = libm::fma(alpha, kf, -nearest);
    if t > 0.5 {
        t -= 1.0;
    } else if t < -0.5 {
        t += 1.0;
    }
    t
}

/// Signed distance from `x` to the nearest integer.
#[inline]
pub fn centered_frac(x: f64) -> f64 {
    let t = x - libm::round(x);
    if t > 0.5 {
        t - 1.0
    } else if t < -0.5 {
        t + 1.0
    } else {
        t
    }
}

/// ‖x‖, the distance from `x` to the nearest integer.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    libm::fabs(centered_frac(x))
}

/// ‖αk‖ with the product reduced as in [`frac_mul`].
#[inline]
pub fn dist_mul(alpha: f64, k: u64) -> f64 {
    libm::fabs(frac_mul(alpha, k))
}

/// e(t) = exp(2πit) as `(re, im)`.
#[inline]
pub fn e(t: f64) -> (f64, f64) {
    let (s, c) = libm::sincos(2.0 * PI * centered_frac(t));
    (c, s)
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if libm::fabs(self.sum) >= libm::fabs(v) {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, (re, im): (f64, f64)) {
        self.re.add(re);
        self.im.add(im);
    }

    #[inline]
    pub fn value(&self) -> (f64, f64) {
        (self.re.value(), self.im.value())
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// ⌊√n⌋, exact for all `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = libm::sqrt(n as f64) as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Number of positive divisors of `n` by trial division.
pub fn divisor_count(n: u64) -> u64 {
    assert!(n >= 1);
    let mut count = 0;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// C(n, k) saturating at `u128::MAX`.
pub fn binomial_saturating(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        match acc.checked_mul(num) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}
