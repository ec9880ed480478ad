//! Exact integer convolution: a schoolbook path and a number-theoretic
//! transform over two word-sized primes with CRT reconstruction.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// (modulus, primitive root); both moduli are c·2^k + 1 with k ≥ 26.
pub const NTT_PRIMES: [(u64, u64); 2] = [(2_013_265_921, 31), (1_811_939_329, 13)];

/// Results below this bound are reconstructed exactly by the transform path.
pub const NTT_EXACT_BOUND: u128 = NTT_PRIMES[0].0 as u128 * NTT_PRIMES[1].0 as u128;

/// Largest transform length (2^26, the 2-adic limit of the second modulus).
pub const NTT_MAX_LEN: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Naive,
    Transform,
    /// Transform for long inputs whose results fit [`NTT_EXACT_BOUND`].
    Auto,
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn ntt(a: &mut [u64], invert: bool, p: u64, g: u64) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(g, (p - 1) / len as u64, p);
        if invert {
            w = pow_mod(w, p - 2, p);
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            let mut wk = 1u64;
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = *y * wk % p;
                *x = if u + v >= p { u + v - p } else { u + v };
                *y = if u >= v { u - v } else { u + p - v };
                wk = wk * w % p;
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv_n % p;
        }
    }
}

fn convolve_mod(a: &[u64], b: &[u64], size: usize, p: u64, g: u64) -> Vec<u64> {
    let mut fa: Vec<u64> = a.iter().map(|&x| x % p).collect();
    let mut fb: Vec<u64> = b.iter().map(|&x| x % p).collect();
    fa.resize(size, 0);
    fb.resize(size, 0);
    ntt(&mut fa, false, p, g);
    ntt(&mut fb, false, p, g);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % p;
    }
    ntt(&mut fa, true, p, g);
    fa
}

/// First `len` coefficients of a * b by the transform path. Every true
/// coefficient must be below [`NTT_EXACT_BOUND`]; larger ones come back
/// reduced modulo it.
pub fn convolve_ntt(a: &[u64], b: &[u64], len: usize) -> Result<Vec<u64>> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if a.is_empty() || b.is_empty() {
        return Ok(vec![0; len]);
    }
    let size = (a.len() + b.len() - 1).next_power_of_two();
    if size > NTT_MAX_LEN {
        return Err(Error::Capacity { what: "transform length", requested: size as u128, cap: NTT_MAX_LEN as u128 });
    }
    let [(p1, g1), (p2, g2)] = NTT_PRIMES;
    let r1 = convolve_mod(a, b, size, p1, g1);
    let r2 = convolve_mod(a, b, size, p2, g2);
    let inv_p1 = pow_mod(p1 % p2, p2 - 2, p2);
    let mut out = vec![0u64; len];
    for (i, slot) in out.iter_mut().enumerate().take(size) {
        let (x1, x2) = (r1[i], r2[i]);
        let t = ((x2 + p2 - x1 % p2) % p2) * inv_p1 % p2;
        *slot = x1 + p1 * t;
    }
    Ok(out)
}

/// First `len` coefficients of a * b by the schoolbook product, with
/// overflow reported rather than wrapped.
pub fn convolve_naive(a: &[u64], b: &[u64], len: usize) -> Result<Vec<u64>> {
    let overflow = || Error::Capacity { what: "convolution coefficient", requested: u64::MAX as u128 + 1, cap: u64::MAX as u128 };
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            if y != 0 {
                let t = x.checked_mul(y).ok_or_else(overflow)?;
                out[i + j] = out[i + j].checked_add(t).ok_or_else(overflow)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_are_primitive() {
        // p − 1 = 2^27·3·5 and 2^26·3^3
        for (&(p, g), factors) in NTT_PRIMES.iter().zip([[2u64, 3, 5].as_slice(), [2u64, 3].as_slice()]) {
            assert_eq!(pow_mod(g, p - 1, p), 1);
            for &f in factors {
                assert_ne!(pow_mod(g, (p - 1) / f, p), 1, "p={p} f={f}");
            }
        }
    }

    #[test]
    fn small_products_agree() {
        let a = [1u64, 2, 3];
        let b = [4u64, 5];
        assert_eq!(convolve_naive(&a, &b, 4).unwrap(), [4, 13, 22, 15]);
        assert_eq!(convolve_ntt(&a, &b, 4).unwrap(), [4, 13, 22, 15]);
        assert_eq!(convolve_ntt(&a, &b, 2).unwrap(), [4, 13]);
        assert_eq!(convolve_ntt(&a, &b, 6).unwrap(), [4, 13, 22, 15, 0, 0]);
    }

    #[test]
    fn reconstruction_beyond_one_modulus() {
        let big = 1_000_000_000u64;
        let a = [big, big];
        let b = [big, 1];
        let want = convolve_naive(&a, &b, 3).unwrap();
        assert!(want[0] > NTT_PRIMES[0].0);
        assert_eq!(convolve_ntt(&a, &b, 3).unwrap(), want);
    }

    #[test]
    fn naive_reports_overflow() {
        assert!(matches!(convolve_naive(&[u64::MAX], &[2], 1), Err(Error::Capacity { .. })));
    }
}
