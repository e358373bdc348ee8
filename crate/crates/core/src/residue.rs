//! Residue vectors `a = (a_1, …, a_m) ∈ ⊕_{i∈I} Z/p^{e_i}` and the
//! comparison functions on residues.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::ipow;
use crate::error::{Error, Result};
use crate::field::NormalizedConfig;
use crate::group::PGroup;

/// Entry `k` holds `a_{k+1}`; field indices `1..=m` map to positions `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueVector(pub Vec<i64>);

impl ResidueVector {
    /// `a_i` for a field index `i ≥ 1`.
    pub fn at(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

/// Greatest `d ≤ min(s, t)` with `x ≡ y mod p^d`, for `x mod p^s`, `y mod p^t`.
pub fn delta(p: i64, x: i64, s: u32, y: i64, t: u32) -> u32 {
    let top = s.min(t);
    let diff = (x - y).rem_euclid(ipow(p, top));
    if diff == 0 {
        return top;
    }
    let mut d = 0;
    let mut q = diff;
    while q % p == 0 {
        q /= p;
        d += 1;
    }
    d
}

/// `x ⪰ y`: `s ≥ t` and `x ≡ y mod p^t`.
pub fn dominates(p: i64, x: i64, s: u32, y: i64, t: u32) -> bool {
    s >= t && (x - y).rem_euclid(ipow(p, t)) == 0
}

/// The ambient group `⊕_{i∈I} Z/p^{e_i}` (not capped at the field-group bound).
pub fn residue_group(cfg: &NormalizedConfig) -> Result<Arc<PGroup>> {
    PGroup::with_cap(cfg.p() as u64, cfg.e[1..].to_vec(), u64::MAX)
}

/// The diagonal generator `(1, …, 1)`.
pub fn diagonal(cfg: &NormalizedConfig) -> ResidueVector {
    ResidueVector(vec![1; cfg.m()])
}

/// Checked constructor for a residue vector of `cfg`.
pub fn residue_vector(cfg: &NormalizedConfig, entries: &[i64]) -> Result<ResidueVector> {
    residue_group(cfg)?.check(entries)?;
    Ok(ResidueVector(entries.to_vec()))
}

/// `I_n(a) = {i ∈ I : n ⪰ a_i}` for `n mod p^{e_1}`.
pub fn i_n(cfg: &NormalizedConfig, a: &ResidueVector, n: i64) -> Vec<usize> {
    let p = cfg.p();
    (1..=cfg.m())
        .filter(|&i| dominates(p, n, cfg.e[1], a.at(i), cfg.e[i]))
        .collect()
}

/// Restriction `ϖ_r(a) = (a_i)_{i∈U_r}`.
pub fn varpi_r(cfg: &NormalizedConfig, a: &ResidueVector, r: u32) -> Result<Vec<i64>> {
    if a.0.len() != cfg.m() {
        return Err(Error::DimensionMismatch {
            expected: cfg.m(),
            got: a.0.len(),
        });
    }
    Ok(cfg.u_r(r)?.iter().map(|&i| a.at(i)).collect())
}
