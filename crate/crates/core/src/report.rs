//! Result types shared by both computation routes.

use serde::{Deserialize, Serialize};

use crate::residue::ResidueVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Formula,
    Both,
}

/// Generator pair attached to a node of the structure computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub node: String,
    pub omega: ResidueVector,
    pub ordinary: ResidueVector,
}

/// Invariant factors are p-exponents, non-increasing, zeros dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShaReport {
    pub sha_invariants: Vec<u32>,
    pub sha_omega_invariants: Vec<u32>,
    /// `Ш_ω/Ш`, only ever filled from the explicit subgroups.
    pub quotient_invariants: Option<Vec<u32>>,
    /// Termwise difference of the two formulas; informational only.
    pub quotient_annotation: Option<Vec<u32>>,
    pub generators: Option<Vec<Certificate>>,
    pub method: Method,
    pub agreement: Option<bool>,
}

impl ShaReport {
    /// Cross-check two reports; quotient comes from the oracle side.
    pub fn merge(oracle: &ShaReport, formula: &ShaReport) -> ShaReport {
        let agree = oracle.sha_invariants == formula.sha_invariants
            && oracle.sha_omega_invariants == formula.sha_omega_invariants;
        ShaReport {
            sha_invariants: formula.sha_invariants.clone(),
            sha_omega_invariants: formula.sha_omega_invariants.clone(),
            quotient_invariants: oracle.quotient_invariants.clone(),
            quotient_annotation: formula.quotient_annotation.clone(),
            generators: formula.generators.clone(),
            method: Method::Both,
            agreement: Some(agree),
        }
    }
}

/// Sort descending and drop trivial factors.
pub fn normalize_invariants(mut v: Vec<u32>) -> Vec<u32> {
    v.retain(|&x| x > 0);
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}
