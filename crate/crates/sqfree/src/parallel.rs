//! Rayon drivers. Each collects in input order, so results do not depend on
//! scheduling and match the sequential versions in `sqfree-core` exactly.

use rayon::prelude::*;
use sqfree_core::counting::w_bound_rhs;
use sqfree_core::expsum::{scan_alphas, ScanReport, ScanSample};
use sqfree_core::{convergents, w_count, MobiusTable, Result};

pub fn scan_minor_arcs_par(table: &MobiusTable, n: u64, q: u64, samples: usize, seed: u64) -> Result<ScanReport> {
    if n > table.limit() as u64 {
        return Err(sqfree_core::Error::Capacity {
            what: "N versus table limit",
            requested: n as u128,
            cap: table.limit() as u128,
        });
    }
    let rows = scan_alphas(n, q, samples, seed)?
        .into_par_iter()
        .map(|alpha| ScanSample::evaluate(table, n, q, alpha))
        .collect::<Result<Vec<_>>>()?;
    ScanReport::assemble(n, q, seed, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WScanRow {
    pub d: u64,
    pub z: f64,
    pub q: u64,
    pub w: u64,
    pub bound_rhs: f64,
    pub ratio: f64,
}

/// Largest convergent denominator q of α with D² > q/4.
pub fn matched_convergent(alpha: f64, d: u64) -> Result<u64> {
    let cap = (4 * d * d).saturating_sub(1).max(1);
    Ok(convergents(alpha, cap)?.last().map_or(1, |c| c.q))
}

/// W and its bound ratio over the grid `ds × zs`, rows in (D, z) order.
pub fn wscan(alpha: f64, ds: &[u64], zs: &[f64], q_override: Option<u64>) -> Result<Vec<WScanRow>> {
    let grid: Vec<(u64, f64)> = ds.iter().flat_map(|&d| zs.iter().map(move |&z| (d, z))).collect();
    grid.into_par_iter()
        .map(|(d, z)| {
            let q = match q_override {
                Some(q) => q,
                None => matched_convergent(alpha, d)?,
            };
            let ratio = sqfree_core::w_bound_ratio(alpha, d, z, q)?;
            Ok(WScanRow { d, z, q, w: w_count(alpha, d, z)?, bound_rhs: w_bound_rhs(d, z, q), ratio })
        })
        .collect()
}
