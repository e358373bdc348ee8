//! Brute-force route: sweep the residue vectors, classify each one, and
//! read `Ш`, `Ш_ω` off the resulting subgroups.
//!
//! Classification is invariant under adding the diagonal, so only the slice
//! `a_1 = 0` is swept; it meets every coset of `D` exactly once.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::NormalizedConfig;
use crate::group::{PGroup, Subgroup, ENUMERATION_CAP};
use crate::local::{classify_literal, Candidates, Classification, LocalData};
use crate::report::{Method, ShaReport};
use crate::residue::{delta, diagonal, residue_group, ResidueVector};

pub const DEFAULT_BUDGET: u128 = 1 << 24;

pub struct OracleOutcome {
    pub ambient: Arc<PGroup>,
    pub d: Subgroup,
    pub g: Subgroup,
    pub g_omega: Subgroup,
    pub candidates: Candidates,
    /// Number of vectors classified.
    pub swept: u128,
}

/// `∏_{i≥2} p^{e_i}`, the number of vectors the sweep visits.
pub fn slice_size(cfg: &NormalizedConfig) -> u128 {
    cfg.e[2..].iter().map(|&e| (cfg.p() as u128).pow(e)).product()
}

fn decode(moduli: &[i64], mut idx: u64, out: &mut [i64]) {
    out[0] = 0;
    for (k, &m) in moduli.iter().enumerate().skip(1) {
        out[k] = (idx % m as u64) as i64;
        idx /= m as u64;
    }
}

struct Acc {
    g: Subgroup,
    g_omega: Subgroup,
    n_g: u64,
    n_omega: u64,
}

impl Acc {
    fn absorb(&mut self, a: &[i64], class: Classification) {
        if class == Classification::Outside {
            return;
        }
        self.n_omega += 1;
        if !self.g_omega.contains(a) {
            self.g_omega = self
                .g_omega
                .join(&Subgroup::span(self.g_omega.ambient(), &[a]))
                .expect("same ambient");
        }
        if class == Classification::InG {
            self.n_g += 1;
            if !self.g.contains(a) {
                self.g = self
                    .g
                    .join(&Subgroup::span(self.g.ambient(), &[a]))
                    .expect("same ambient");
            }
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.g = self.g.join(&other.g).expect("same ambient");
        self.g_omega = self.g_omega.join(&other.g_omega).expect("same ambient");
        self.n_g += other.n_g;
        self.n_omega += other.n_omega;
        self
    }
}

fn check_closed(name: &str, h: &Subgroup, members: u64, e1: u32, p: i64) -> Result<()> {
    let expected = members as u128 * (p as u128).pow(e1);
    if h.order() != expected {
        return Err(Error::Internal(format!(
            "{name} is not closed: span has order {} but {} vectors classify inside",
            h.order(),
            expected
        )));
    }
    Ok(())
}

/// Explicit `G` and `G_ω` as subgroups of `⊕_{i∈I} Z/p^{e_i}`.
pub fn compute_g_and_gomega(cfg: &NormalizedConfig, local: &LocalData, budget: u128) -> Result<OracleOutcome> {
    let needed = slice_size(cfg);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let ambient = residue_group(cfg)?;
    let candidates = Candidates::build(cfg, local, ENUMERATION_CAP)?;
    let d = Subgroup::span(&ambient, &[diagonal(cfg).0]);
    let moduli = ambient.moduli().to_vec();
    let m = cfg.m();
    let acc = (0..needed as u64)
        .into_par_iter()
        .fold(
            || {
                (
                    Acc {
                        g: d.clone(),
                        g_omega: d.clone(),
                        n_g: 0,
                        n_omega: 0,
                    },
                    vec![0i64; m],
                )
            },
            |(mut acc, mut buf), idx| {
                decode(&moduli, idx, &mut buf);
                acc.absorb(&buf, candidates.classify(&buf));
                (acc, buf)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || Acc {
                g: d.clone(),
                g_omega: d.clone(),
                n_g: 0,
                n_omega: 0,
            },
            Acc::merge,
        );
    let p = cfg.p();
    check_closed("G_ω", &acc.g_omega, acc.n_omega, cfg.e[1], p)?;
    check_closed("G", &acc.g, acc.n_g, cfg.e[1], p)?;
    if !acc.g.is_subgroup_of(&acc.g_omega)? {
        return Err(Error::Internal("G ⊄ G_ω".into()));
    }
    Ok(OracleOutcome {
        ambient,
        d,
        g: acc.g,
        g_omega: acc.g_omega,
        candidates,
        swept: needed,
    })
}

/// Same subgroups from the literal definitions over the whole ambient
/// group. Slow; for cross-checking on small instances.
pub fn compute_literal(cfg: &NormalizedConfig, local: &LocalData, budget: u128) -> Result<(Subgroup, Subgroup)> {
    let ambient = residue_group(cfg)?;
    if ambient.order() > budget {
        return Err(Error::BudgetExceeded {
            needed: ambient.order(),
            budget,
        });
    }
    let mut g = Vec::new();
    let mut go = Vec::new();
    for x in ambient.elements() {
        let a = ResidueVector(x.0);
        match classify_literal(cfg, local, &a, ENUMERATION_CAP)? {
            Classification::InG => {
                g.push(a.0.clone());
                go.push(a.0);
            }
            Classification::InGOmegaOnly => go.push(a.0),
            Classification::Outside => {}
        }
    }
    let sg = Subgroup::span(&ambient, &g);
    let sgo = Subgroup::span(&ambient, &go);
    if sg.order() != g.len() as u128 || sgo.order() != go.len() as u128 {
        return Err(Error::Internal("literal classification is not closed".into()));
    }
    Ok((sg, sgo))
}

/// Invariant factors of `group / D`.
pub fn quotient_by_d(group: &Subgroup, d: &Subgroup) -> Result<Vec<u32>> {
    group.relative_invariants(d).map_err(|e| match e {
        Error::NotASubgroup => Error::Internal("D is not contained in the swept group".into()),
        other => other,
    })
}

impl OracleOutcome {
    pub fn report(&self) -> Result<ShaReport> {
        Ok(ShaReport {
            sha_invariants: quotient_by_d(&self.g, &self.d)?,
            sha_omega_invariants: quotient_by_d(&self.g_omega, &self.d)?,
            quotient_invariants: Some(self.g_omega.relative_invariants(&self.g)?),
            quotient_annotation: None,
            generators: None,
            method: Method::Oracle,
            agreement: None,
        })
    }

    pub fn classify(&self, a: &ResidueVector) -> Classification {
        self.candidates.classify(&a.0)
    }

    pub fn in_d(&self, a: &ResidueVector) -> bool {
        self.d.contains(&a.0)
    }

    /// The subgroup of `G_ω` (or `G`) supported on `U_r` whose entries are
    /// divisible by `p^{ε_0 − bound}`; for `r = 0` also `x_1 = 0`.
    pub fn patchable_part(&self, cfg: &NormalizedConfig, r: u32, bound: u32, ordinary: bool) -> Result<Subgroup> {
        let m = cfg.m();
        let p = cfg.p();
        let shift = cfg.eps0().checked_sub(bound).ok_or(Error::DegreeOutOfRange {
            degree: bound,
            max: cfg.eps0(),
        })?;
        let gens: Vec<Vec<i64>> = cfg
            .u_r(r)?
            .iter()
            .filter(|&&i| !(r == 0 && i == 1))
            .map(|&i| {
                let mut v = vec![0; m];
                v[i - 1] = p.pow(shift.min(cfg.e[i]));
                v
            })
            .collect();
        let box_ = Subgroup::span(&self.ambient, &gens);
        let host = if ordinary { &self.g } else { &self.g_omega };
        host.intersect(&box_)
    }
}

/// The vector `a′` of the two-stratum construction, with its
/// postconditions checked: `a′ ∉ D` and `fail(a′) ⊆ fail(a)`.
pub fn aprime(cfg: &NormalizedConfig, outcome: &OracleOutcome, a: &ResidueVector) -> Result<ResidueVector> {
    if outcome.classify(a) == Classification::Outside {
        return Err(Error::NotInGOmega);
    }
    if outcome.in_d(a) {
        return Err(Error::InDiagonal);
    }
    let p = cfg.p();
    let e = &cfg.e;
    let a1 = a.at(1);
    let off: Vec<usize> = (1..=cfg.m())
        .filter(|&i| (a.at(i) - a1).rem_euclid(p.pow(e[i])) != 0)
        .collect();
    let dl = |i: usize| delta(p, a1, e[1], a.at(i), e[i]);
    let low = off.iter().map(|&i| dl(i)).min().ok_or(Error::InDiagonal)?;
    let j = *off.iter().find(|&&i| dl(i) == low).expect("nonempty");
    let out = ResidueVector(
        (1..=cfg.m())
            .map(|i| {
                let src = if off.contains(&i) && dl(i) == low { a.at(j) } else { a1 };
                src.rem_euclid(p.pow(e[i]))
            })
            .collect(),
    );
    if outcome.in_d(&out) {
        return Err(Error::HypothesisViolated(format!("a′ = {:?} lies in D", out.0)));
    }
    let (fa, fo) = (outcome.candidates.fail_set(&a.0), outcome.candidates.fail_set(&out.0));
    if !fo.is_subset(&fa) {
        return Err(Error::HypothesisViolated(format!(
            "fail set of a′ = {:?} is not inside that of a",
            out.0
        )));
    }
    Ok(out)
}
