//! Möbius function and squarefree indicator by a linear sieve.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest `limit` accepted by [`build_mobius`]: one byte per entry plus the
/// prime list keeps this around 240 MB.
pub const DEFAULT_MAX_LIMIT: usize = 200_000_000;

// marks an index the sieve has not reached through a smaller prime
const UNSET: i8 = 2;

/// Sieved values μ(1), ..., μ(limit). Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTable {
    // slot 0 is unused so mu[n] is μ(n)
    mu: Vec<i8>,
    primes: Vec<u32>,
}

/// Builds the table with the default capacity cap.
pub fn build_mobius(limit: usize) -> Result<MobiusTable> {
    MobiusTable::with_cap(limit, DEFAULT_MAX_LIMIT)
}

impl MobiusTable {
    pub fn new(limit: usize) -> Result<Self> {
        build_mobius(limit)
    }

    /// Linear sieve: every composite is struck exactly once, by its smallest
    /// prime factor, so construction is O(limit).
    pub fn with_cap(limit: usize, cap: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Capacity { what: "mobius limit", requested: 0, cap: cap as u128 });
        }
        if limit > cap || limit > u32::MAX as usize {
            return Err(Error::Capacity {
                what: "mobius limit",
                requested: limit as u128,
                cap: cap.min(u32::MAX as usize) as u128,
            });
        }
        let mut mu = vec![UNSET; limit + 1];
        mu[0] = 0;
        mu[1] = 1;
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=limit {
            if mu[i] == UNSET {
                mu[i] = -1;
                primes.push(i as u32);
            }
            let mi = mu[i];
            for &p in &primes {
                let p = p as usize;
                let Some(ip) = i.checked_mul(p).filter(|&ip| ip <= limit) else {
                    break;
                };
                if i % p == 0 {
                    mu[ip] = 0;
                    break;
                }
                mu[ip] = -mi;
            }
        }
        Ok(MobiusTable { mu, primes })
    }

    pub fn limit(&self) -> usize {
        self.mu.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.limit() {
            return Err(Error::Index { index: n as u64, limit: self.limit() as u64 });
        }
        Ok(())
    }

    pub fn mu(&self, n: usize) -> Result<i8> {
        self.check(n)?;
        Ok(self.mu[n])
    }

    /// μ(n) without the range check; `n` must lie in `1..=limit`.
    #[inline]
    pub fn mu_unchecked(&self, n: usize) -> i8 {
        self.mu[n]
    }

    pub fn is_squarefree(&self, n: usize) -> Result<bool> {
        Ok(self.mu(n)? != 0)
    }

    /// Q(N) = #{n ≤ N : n squarefree}.
    pub fn squarefree_count(&self, n: usize) -> Result<u64> {
        self.check(n)?;
        Ok(self.mu[1..=n].iter().filter(|&&m| m != 0).count() as u64)
    }

    /// M(N) = Σ_{n ≤ N} μ(n).
    pub fn mertens(&self, n: usize) -> Result<i64> {
        self.check(n)?;
        Ok(self.mu[1..=n].iter().map(|&m| m as i64).sum())
    }

    /// μ² as a 0/1 vector indexed from 0 (entry 0 is 0), truncated to `n`.
    pub fn squarefree_indicator(&self, n: usize) -> Result<Vec<u64>> {
        self.check(n)?;
        Ok(self.mu[..=n].iter().map(|&m| (m != 0) as u64).collect())
    }

    /// All primes up to `limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// μ(1), ..., μ(limit).
    pub fn values(&self) -> &[i8] {
        &self.mu[1..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_table() {
        let t = build_mobius(1).unwrap();
        assert_eq!(t.values(), &[1]);
        assert!(t.primes().is_empty());
    }

    #[test]
    fn known_values() {
        let t = build_mobius(100).unwrap();
        assert_eq!(t.mu(4).unwrap(), 0);
        assert_eq!(t.mu(6).unwrap(), 1);
        assert_eq!(t.mu(30).unwrap(), -1);
        for &p in t.primes() {
            assert_eq!(t.mu(p as usize).unwrap(), -1);
        }
        assert_eq!(t.primes().len(), 25);
    }

    #[test]
    fn squarefree_queries() {
        let t = build_mobius(20).unwrap();
        assert!(t.is_squarefree(1).unwrap());
        for n in [4, 9, 12] {
            assert!(!t.is_squarefree(n).unwrap());
        }
        assert!(t.is_squarefree(10).unwrap());
        assert_eq!(t.squarefree_count(1).unwrap(), 1);
        assert_eq!(t.squarefree_count(10).unwrap(), 7);
    }

    #[test]
    fn rejects_bad_limits_and_indices() {
        assert!(matches!(build_mobius(0), Err(Error::Capacity { .. })));
        assert!(matches!(MobiusTable::with_cap(1000, 999), Err(Error::Capacity { .. })));
        let t = build_mobius(10).unwrap();
        assert_eq!(t.mu(0), Err(Error::Index { index: 0, limit: 10 }));
        assert_eq!(t.squarefree_count(11), Err(Error::Index { index: 11, limit: 10 }));
    }

    #[test]
    fn divisor_sum_vanishes() {
        let t = build_mobius(10_000).unwrap();
        let mut acc = vec![0i64; 10_001];
        for d in 1..=10_000 {
            let m = t.mu(d).unwrap() as i64;
            for k in (d..=10_000).step_by(d) {
                acc[k] += m;
            }
        }
        assert_eq!(acc[1], 1);
        assert!(acc[2..].iter().all(|&s| s == 0));
    }
}
