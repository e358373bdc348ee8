//! Places and local conditions.
//!
//! All but finitely many places are represented by the cyclic subgroups of
//! `A` (every element is a Frobenius infinitely often). Ramified places are
//! listed explicitly with their decomposition subgroups.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::field::NormalizedConfig;
use crate::group::{cyclic_subgroups_with_generators, Subgroup};
use crate::residue::{delta, i_n, ResidueVector};

#[derive(Clone, Debug)]
pub struct Place {
    pub label: String,
    pub d: Subgroup,
    pub exceptional: bool,
}

#[derive(Clone, Debug, Default)]
pub struct LocalData {
    pub exceptional: Vec<Place>,
}

impl LocalData {
    pub fn new(places: Vec<(String, Subgroup)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (label, _) in &places {
            if !seen.insert(label.clone()) {
                return Err(Error::Internal(format!("duplicate place label {label}")));
            }
        }
        Ok(LocalData {
            exceptional: places
                .into_iter()
                .map(|(label, d)| Place {
                    label,
                    d,
                    exceptional: true,
                })
                .collect(),
        })
    }

    pub fn none() -> Self {
        LocalData::default()
    }
}

/// `s_i(D) = log_p |χ_0(D ∩ H_i)|`; `D` lies in `Σ_i^d` iff `d ≥ s_i(D)`.
pub fn sigma_level(cfg: &NormalizedConfig, d: &Subgroup, i: usize) -> Result<u32> {
    let di = d.intersect(cfg.kernel(i))?;
    Ok(cfg.chars()[0].image_log_order(&di))
}

/// Whether places with decomposition group `D` lie in `Σ_i^deg`:
/// `K_0(ε_0 − deg) ⊗ K_i^w` splits completely, i.e. `D ∩ H_i` fixes
/// `K_0(ε_0 − deg)`.
pub fn sigma_contains(cfg: &NormalizedConfig, d: &Subgroup, i: usize, deg: u32) -> Result<bool> {
    let eps0 = cfg.eps0();
    if deg > eps0 {
        return Err(Error::DegreeOutOfRange { degree: deg, max: eps0 });
    }
    let di = d.intersect(cfg.kernel(i))?;
    di.is_subgroup_of(cfg.subfield(0, eps0 - deg)?)
}

/// Whether `D` lies in `Ω(I_n(a))`.
pub fn omega_contains(cfg: &NormalizedConfig, d: &Subgroup, a: &ResidueVector, n: i64) -> Result<bool> {
    let inside = i_n(cfg, a, n);
    if inside.len() == cfg.m() {
        return Ok(true);
    }
    let p = cfg.p();
    for i in (1..=cfg.m()).filter(|i| !inside.contains(i)) {
        let deg = delta(p, n, cfg.e[1], a.at(i), cfg.e[i]);
        if !sigma_contains(cfg, d, i, deg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Classification {
    InG,
    InGOmegaOnly,
    Outside,
}

/// The levels `(s_1, …, s_m)` of one decomposition group. A vector `a`
/// passes iff some `n` has `δ(n, a_i) ≥ s_i` for all `i`, which holds iff
/// `a_i ≡ a_{i*} mod p^{s_i}` for an index `i*` of maximal level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    pub levels: Vec<u32>,
    pivot: usize,
    moduli: Vec<i64>,
}

impl Profile {
    pub fn new(p: i64, levels: Vec<u32>) -> Self {
        let pivot = (0..levels.len())
            .max_by_key(|&k| (levels[k], std::cmp::Reverse(k)))
            .unwrap_or(0);
        let moduli = levels.iter().map(|&s| p.pow(s)).collect();
        Profile { levels, pivot, moduli }
    }

    pub fn passes(&self, a: &[i64]) -> bool {
        let base = a[self.pivot];
        self.moduli.iter().zip(a).all(|(&m, &x)| (x - base) % m == 0)
    }

    fn dominated_by(&self, other: &Profile) -> bool {
        self.levels.iter().zip(&other.levels).all(|(a, b)| a <= b)
    }
}

/// `(s_1, …, s_m)` for a cyclic group `⟨g⟩`, without lattice operations:
/// `⟨g⟩ ∩ H_i = ⟨p^t g⟩` where `p^t` is the order of `χ_i(g)`.
fn cyclic_profile(cfg: &NormalizedConfig, g: &[i64]) -> Vec<u32> {
    let chars = cfg.chars();
    let o0 = chars[0].value_log_order(g);
    (1..=cfg.m())
        .map(|i| o0.saturating_sub(chars[i].value_log_order(g)))
        .collect()
}

pub fn profile(cfg: &NormalizedConfig, d: &Subgroup) -> Result<Vec<u32>> {
    (1..=cfg.m()).map(|i| sigma_level(cfg, d, i)).collect()
}

/// Set of failing candidates: indices into the cyclic-subgroup list and
/// labels of exceptional places.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FailSet {
    pub generic: BTreeSet<usize>,
    pub exceptional: BTreeSet<String>,
}

impl FailSet {
    pub fn is_subset(&self, other: &FailSet) -> bool {
        self.generic.is_subset(&other.generic) && self.exceptional.is_subset(&other.exceptional)
    }

    pub fn is_empty(&self) -> bool {
        self.generic.is_empty() && self.exceptional.is_empty()
    }
}

/// Precomputed candidate decomposition groups for fast classification.
#[derive(Clone, Debug)]
pub struct Candidates {
    /// Distinct profiles of cyclic subgroups.
    pub generic: Vec<Profile>,
    /// `cyclic_profile_index[k]` is the profile of the k-th cyclic subgroup.
    pub cyclic_profile_index: Vec<usize>,
    pub cyclic: Vec<Subgroup>,
    /// Profiles not dominated by another one; passing these implies passing all.
    maximal: Vec<usize>,
    pub exceptional: Vec<(String, Profile)>,
}

impl Candidates {
    pub fn build(cfg: &NormalizedConfig, local: &LocalData, cap: u64) -> Result<Self> {
        let p = cfg.p();
        let cyc = cyclic_subgroups_with_generators(cfg.group(), cap)?;
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut generic = Vec::new();
        let mut cyclic_profile_index = Vec::with_capacity(cyc.len());
        for (_, g) in &cyc {
            let levels = cyclic_profile(cfg, &g.0);
            let k = *index.entry(levels.clone()).or_insert_with(|| {
                generic.push(Profile::new(p, levels));
                generic.len() - 1
            });
            cyclic_profile_index.push(k);
        }
        let maximal = (0..generic.len())
            .filter(|&k| {
                !(0..generic.len())
                    .any(|j| j != k && generic[k].dominated_by(&generic[j]) && (generic[j] != generic[k]))
            })
            .collect();
        let exceptional = local
            .exceptional
            .iter()
            .map(|pl| Ok((pl.label.clone(), Profile::new(p, profile(cfg, &pl.d)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Candidates {
            generic,
            cyclic_profile_index,
            cyclic: cyc.into_iter().map(|(h, _)| h).collect(),
            maximal,
            exceptional,
        })
    }

    pub fn classify(&self, a: &[i64]) -> Classification {
        if !self.maximal.iter().all(|&k| self.generic[k].passes(a)) {
            return Classification::Outside;
        }
        if self.exceptional.iter().all(|(_, pr)| pr.passes(a)) {
            Classification::InG
        } else {
            Classification::InGOmegaOnly
        }
    }

    pub fn fail_set(&self, a: &[i64]) -> FailSet {
        let failing: Vec<bool> = self.generic.iter().map(|pr| !pr.passes(a)).collect();
        FailSet {
            generic: (0..self.cyclic.len())
                .filter(|&k| failing[self.cyclic_profile_index[k]])
                .collect(),
            exceptional: self
                .exceptional
                .iter()
                .filter(|(_, pr)| !pr.passes(a))
                .map(|(l, _)| l.clone())
                .collect(),
        }
    }
}

/// Classification straight from the definitions: every cyclic subgroup and
/// every exceptional group is tested against `Ω(I_n(a))` for every `n`.
pub fn classify_literal(
    cfg: &NormalizedConfig,
    local: &LocalData,
    a: &ResidueVector,
    cap: u64,
) -> Result<Classification> {
    let top = cfg.p().pow(cfg.e[1]);
    let passes = |d: &Subgroup| -> Result<bool> {
        for n in 0..top {
            if omega_contains(cfg, d, a, n)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    for (d, _) in cyclic_subgroups_with_generators(cfg.group(), cap)? {
        if !passes(&d)? {
            return Ok(Classification::Outside);
        }
    }
    for pl in &local.exceptional {
        if !passes(&pl.d)? {
            return Ok(Classification::InGOmegaOnly);
        }
    }
    Ok(Classification::InG)
}

/// Whether the field fixed by `h` is locally cyclic at every listed place.
pub fn locally_cyclic(local: &LocalData, h: &Subgroup) -> Result<bool> {
    Ok(noncyclic_places(local, h)?.is_empty())
}

/// Listed places where the image of `D_v` in `A/h` is not cyclic.
pub fn noncyclic_places<'a>(local: &'a LocalData, h: &Subgroup) -> Result<Vec<&'a Place>> {
    let mut out = Vec::new();
    for pl in &local.exceptional {
        if !pl.d.image_is_cyclic(h)? {
            out.push(pl);
        }
    }
    Ok(out)
}
