//! Field configurations `k ⊂ K_0, …, K_m` inside the compositum with group `A`.
//!
//! Galois correspondence: a field `F` is stored as the subgroup `Gal(M/F)`.
//! Composites become intersections, intersections of fields become joins,
//! and `F_1 ⊆ F_2` becomes `H(F_2) ⊆ H(F_1)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Character, PGroup, Subgroup};

/// Raw input: a group and one surjective character per field.
#[derive(Clone, Debug)]
pub struct FieldConfig {
    pub group: Arc<PGroup>,
    pub chars: Vec<Character>,
    pub labels: Vec<String>,
}

impl FieldConfig {
    pub fn new(group: Arc<PGroup>, chars: Vec<Character>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != chars.len() {
            return Err(Error::DimensionMismatch {
                expected: chars.len(),
                got: labels.len(),
            });
        }
        for c in &chars {
            if c.ambient() != &group {
                return Err(Error::AmbientMismatch);
            }
        }
        Ok(FieldConfig { group, chars, labels })
    }

    /// Labels `K0, K1, …`.
    pub fn with_default_labels(group: Arc<PGroup>, chars: Vec<Character>) -> Result<Self> {
        let labels = (0..chars.len()).map(|i| format!("K{i}")).collect();
        Self::new(group, chars, labels)
    }

    /// Builds characters from `(target exponent, coefficients)` pairs.
    pub fn from_coeffs(group: Arc<PGroup>, chars: &[(u32, Vec<i64>)]) -> Result<Self> {
        let chars = chars
            .iter()
            .enumerate()
            .map(|(index, (t, c))| {
                Character::new(&group, *t, c).map_err(|e| match e {
                    Error::IllDefinedCharacter { target, .. } => Error::IllDefinedCharacter { index, target },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_default_labels(group, chars)
    }
}

/// A validated configuration in the standard ordering: index 0 is a field of
/// minimal degree and `e_{0,1} ≤ e_{0,2} ≤ …`.
#[derive(Clone, Debug)]
pub struct NormalizedConfig {
    pub base: FieldConfig,
    /// `permutation[i]` is the input index of normalized field `i`.
    pub permutation: Vec<usize>,
    /// Input indices removed because they contain another field.
    pub pruned: Vec<usize>,
    /// `ε_i = log_p [K_i : k]`.
    pub eps: Vec<u32>,
    /// `e_{0,i}`, with `e0[0] = ε_0`.
    pub e0: Vec<u32>,
    /// `e_i = ε_0 − e_{0,i}` for `i ≥ 1`; `e[0] = ε_0`.
    pub e: Vec<u32>,
    /// `p^{e_{i,j}} = [K_i ∩ K_j : k]`, with `eij[i][i] = ε_i`.
    pub eij: Vec<Vec<u32>>,
    /// `U_r = {i ≥ 1 : e_{0,i} = r}` for the occurring `r`.
    pub u: BTreeMap<u32, Vec<usize>>,
    /// `subfields[i][f]` is `Gal(M/K_i(f))`.
    subfields: Vec<Vec<Subgroup>>,
}

/// Normalizes a configuration: prunes superfields, reindexes, and computes
/// the derived constants.
pub fn validate_and_normalize(cfg: &FieldConfig) -> Result<NormalizedConfig> {
    let a = &cfg.group;
    for (index, c) in cfg.chars.iter().enumerate() {
        if !c.is_surjective() {
            return Err(Error::NonSurjectiveCharacter { index });
        }
    }
    let kernels: Vec<Subgroup> = cfg.chars.iter().map(|c| c.kernel()).collect();
    let n = kernels.len();

    // Drop i when H_i ⊊ H_j (K_j ⊊ K_i), or when H_i = H_j for an earlier j.
    let mut keep = Vec::new();
    let mut pruned = Vec::new();
    for i in 0..n {
        let mut drop = false;
        for j in 0..n {
            if i != j && kernels[i].is_subgroup_of(&kernels[j])? && (kernels[i] != kernels[j] || j < i) {
                drop = true;
                break;
            }
        }
        if drop {
            pruned.push(i);
        } else {
            keep.push(i);
        }
    }

    let joined = Subgroup::join_all(a, kernels.iter())?;
    if !joined.is_full() {
        return Err(Error::IntersectionNotBase {
            invariants: joined.quotient_invariants(),
        });
    }
    if keep.len() < 3 {
        return Err(Error::TooFewFields { remaining: keep.len() });
    }

    let first = *keep
        .iter()
        .min_by_key(|&&i| (cfg.chars[i].target(), i))
        .expect("nonempty");
    let e0_of = |i: usize| -> u32 {
        let j = kernels[first].join(&kernels[i]).expect("same ambient");
        j.quotient_invariants().iter().sum()
    };
    let mut rest: Vec<(u32, usize)> = keep.iter().filter(|&&i| i != first).map(|&i| (e0_of(i), i)).collect();
    rest.sort();
    let mut permutation = vec![first];
    permutation.extend(rest.iter().map(|&(_, i)| i));

    let chars: Vec<Character> = permutation.iter().map(|&i| cfg.chars[i].clone()).collect();
    let labels: Vec<String> = permutation.iter().map(|&i| cfg.labels[i].clone()).collect();
    let base = FieldConfig {
        group: a.clone(),
        chars,
        labels,
    };
    build_normalized(base, permutation, pruned)
}

fn build_normalized(base: FieldConfig, permutation: Vec<usize>, pruned: Vec<usize>) -> Result<NormalizedConfig> {
    let eps: Vec<u32> = base.chars.iter().map(|c| c.target()).collect();
    let subfields: Vec<Vec<Subgroup>> = base
        .chars
        .iter()
        .map(|c| {
            (0..=c.target())
                .map(|f| c.reduce(f).map(|r| r.kernel()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = eps.len();
    let mut eij = vec![vec![0u32; n]; n];
    for i in 0..n {
        eij[i][i] = eps[i];
        for j in i + 1..n {
            let hi = &subfields[i][eps[i] as usize];
            let hj = &subfields[j][eps[j] as usize];
            let v: u32 = hi.join(hj)?.quotient_invariants().iter().sum();
            eij[i][j] = v;
            eij[j][i] = v;
        }
    }
    let eps0 = eps[0];
    let e0: Vec<u32> = (0..n).map(|i| eij[0][i]).collect();
    let e: Vec<u32> = (0..n).map(|i| if i == 0 { eps0 } else { eps0 - e0[i] }).collect();
    let mut u: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 1..n {
        u.entry(e0[i]).or_default().push(i);
    }
    let cfg = NormalizedConfig {
        base,
        permutation,
        pruned,
        eps,
        e0,
        e,
        eij,
        u,
        subfields,
    };
    cfg.check_invariants()?;
    Ok(cfg)
}

impl NormalizedConfig {
    fn check_invariants(&self) -> Result<()> {
        let m = self.m();
        let bad = |s: &str| Err(Error::Internal(format!("normalization invariant violated: {s}")));
        if self.eps.iter().any(|&x| x < self.eps[0]) {
            return bad("ε_0 is not minimal");
        }
        if (1..m).any(|i| self.e0[i] > self.e0[i + 1]) {
            return bad("e_{0,i} not sorted");
        }
        if self.e0[1] != 0 || self.e[1] != self.eps[0] {
            return bad("e_{0,1} ≠ 0");
        }
        for i in 0..=m {
            for j in 0..=m {
                if i != j && self.eij[i][j] >= self.eps[i].min(self.eps[j]) {
                    return bad("e_{i,j} ≥ min(ε_i, ε_j)");
                }
                if 1 <= i && i < j && self.eij[i][j] < self.e0[i] {
                    return bad("e_{i,j} < e_{0,i}");
                }
            }
        }
        if !self.u.contains_key(&0) {
            return bad("U_0 is empty");
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<PGroup> {
        &self.base.group
    }

    pub fn p(&self) -> i64 {
        self.base.group.p()
    }

    /// Number of fields besides `K_0`.
    pub fn m(&self) -> usize {
        self.eps.len() - 1
    }

    pub fn eps0(&self) -> u32 {
        self.eps[0]
    }

    pub fn labels(&self) -> &[String] {
        &self.base.labels
    }

    pub fn chars(&self) -> &[Character] {
        &self.base.chars
    }

    /// `H_i = Gal(M/K_i)`.
    pub fn kernel(&self, i: usize) -> &Subgroup {
        &self.subfields[i][self.eps[i] as usize]
    }

    /// Occurring values of `r`, increasing.
    pub fn r_values(&self) -> Vec<u32> {
        self.u.keys().copied().collect()
    }

    pub fn u_r(&self, r: u32) -> Result<&[usize]> {
        self.u.get(&r).map(|v| v.as_slice()).ok_or(Error::UnknownLevel(r))
    }

    pub fn u_greater(&self, r: u32) -> Vec<usize> {
        self.u.range(r + 1..).flat_map(|(_, v)| v.iter().copied()).collect()
    }

    pub fn u_less(&self, r: u32) -> Vec<usize> {
        self.u.range(..r).flat_map(|(_, v)| v.iter().copied()).collect()
    }

    /// `Gal(M/K_i(f))`, the kernel of `χ_i mod p^f`.
    pub fn subfield(&self, i: usize, f: u32) -> Result<&Subgroup> {
        let row = self.subfields.get(i).ok_or(Error::IndexOutOfRange(i))?;
        row.get(f as usize).ok_or(Error::DegreeOutOfRange {
            degree: f,
            max: self.eps[i],
        })
    }

    /// `Gal(M/M_C(d))` for the composite `M_C(d) = ∏_{i∈C} K_i(d)`.
    pub fn composite(&self, c: &[usize], d: u32) -> Result<Subgroup> {
        if c.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let parts = c
            .iter()
            .map(|&i| self.subfield(i, d).cloned())
            .collect::<Result<Vec<_>>>()?;
        Subgroup::intersect_all(self.group(), parts.iter())
    }

    /// `e_{i,j}`, computed from the kernels.
    pub fn intersection_exponent(&self, i: usize, j: usize) -> Result<u32> {
        let hi = self.subfield(i, *self.eps.get(i).ok_or(Error::IndexOutOfRange(i))?)?;
        let hj = self.subfield(j, *self.eps.get(j).ok_or(Error::IndexOutOfRange(j))?)?;
        Ok(hi.join(hj)?.quotient_invariants().iter().sum())
    }

    /// Whether the field fixed by `h` embeds in a bicyclic extension,
    /// decided as `rank(A/h) ≤ 2`.
    pub fn is_sub_bicyclic(&self, h: &Subgroup) -> bool {
        h.quotient_invariants().len() <= 2
    }

    /// `Gal(M/F)` for `F = K_s(g) K_t(g)`, `g = d + e_{s,t} − β`,
    /// `β = min(e_{0,s}, e_{0,t})`.
    pub fn pair_composite(&self, d: u32, s: usize, t: usize) -> Result<Subgroup> {
        let beta = self
            .e0
            .get(s)
            .ok_or(Error::IndexOutOfRange(s))?
            .min(self.e0.get(t).ok_or(Error::IndexOutOfRange(t))?);
        let g = (d + self.eij[s][t])
            .checked_sub(*beta)
            .ok_or(Error::DegreeOutOfRange { degree: d, max: 0 })?;
        let max = self.eps[s].min(self.eps[t]);
        if g > max {
            return Err(Error::DegreeOutOfRange { degree: g, max });
        }
        self.subfield(s, g)?.intersect(self.subfield(t, g)?)
    }

    /// `Gal(M/K_0(d)K_i(d))`.
    pub fn k0_composite(&self, i: usize, d: u32) -> Result<Subgroup> {
        self.subfield(0, d)?.intersect(self.subfield(i, d)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64, exps: Vec<u32>, chars: &[(u32, Vec<i64>)]) -> Result<NormalizedConfig> {
        let a = PGroup::new(p, exps).unwrap();
        validate_and_normalize(&FieldConfig::from_coeffs(a, chars)?)
    }

    #[test]
    fn bicyclic_example_normalizes() {
        let n = cfg(2, vec![2, 2], &[(2, vec![1, 0]), (2, vec![0, 1]), (2, vec![1, 2])]).unwrap();
        assert_eq!(n.eps, vec![2, 2, 2]);
        assert_eq!(n.e0, vec![2, 0, 1]);
        assert_eq!(n.u_r(0).unwrap(), &[1]);
        assert_eq!(n.u_r(1).unwrap(), &[2]);
        assert_eq!(n.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn disjoint_example() {
        let n = cfg(2, vec![2, 2], &[(2, vec![1, 0]), (2, vec![0, 1]), (2, vec![1, 1])]).unwrap();
        assert_eq!(n.eij[1][2], 0);
        assert_eq!(n.eij[0][1], 0);
        assert_eq!(n.eij[0][2], 0);
        assert_eq!(n.u_r(0).unwrap(), &[1, 2]);
    }

    #[test]
    fn superfield_is_pruned() {
        // Index 3 has kernel contained in that of index 1: K_1 ⊂ K_3.
        let n = cfg(
            2,
            vec![2, 2],
            &[(2, vec![1, 0]), (1, vec![0, 1]), (1, vec![1, 1]), (2, vec![0, 1])],
        )
        .unwrap();
        assert_eq!(n.pruned, vec![3]);
        assert_eq!(n.m(), 2);
        // K_0 is a degree-2 field; ties go to the lower input index.
        assert_eq!(n.permutation[0], 1);
    }

    #[test]
    fn duplicate_keeps_first() {
        let n = cfg(
            2,
            vec![1, 1],
            &[(1, vec![1, 0]), (1, vec![0, 1]), (1, vec![1, 1]), (1, vec![1, 1])],
        )
        .unwrap();
        assert_eq!(n.pruned, vec![3]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            cfg(2, vec![2, 2], &[(2, vec![2, 0]), (2, vec![0, 1]), (2, vec![1, 1])]),
            Err(Error::NonSurjectiveCharacter { index: 0 })
        ));
        assert!(matches!(
            cfg(2, vec![2, 2], &[(2, vec![1, 0]), (2, vec![0, 1])]),
            Err(Error::TooFewFields { remaining: 2 })
        ));
        // All three fields contain the quadratic field cut out by x mod 2.
        assert!(matches!(
            cfg(2, vec![2, 2], &[(2, vec![1, 0]), (2, vec![1, 2]), (2, vec![3, 2])]),
            Err(Error::IntersectionNotBase { .. })
        ));
        assert!(matches!(
            cfg(2, vec![2, 1], &[(2, vec![1, 2]), (2, vec![0, 1]), (1, vec![1, 0])]),
            Err(Error::IllDefinedCharacter { index: 1, .. })
        ));
    }

    #[test]
    fn subfields_and_composites() {
        let n = cfg(2, vec![2, 2], &[(2, vec![1, 0]), (2, vec![0, 1]), (2, vec![1, 2])]).unwrap();
        assert!(n.subfield(2, 0).unwrap().is_full());
        assert_eq!(n.subfield(2, 2).unwrap(), n.kernel(2));
        let s = n.subfield(2, 1).unwrap();
        assert_eq!(s.order(), 8);
        assert!(s.contains(&[2, 1]) && !s.contains(&[1, 0]));
        assert!(n.subfield(2, 3).is_err());
        assert_eq!(n.composite(&[1], 1).unwrap(), *n.subfield(1, 1).unwrap());
        assert!(n.composite(&[0, 1], 0).unwrap().is_full());
        assert!(n.composite(&[0, 1], 2).unwrap().is_trivial());
        assert!(n.composite(&[], 1).is_err());
        assert_eq!(n.intersection_exponent(0, 2).unwrap(), 1);
        assert_eq!(n.intersection_exponent(0, 1).unwrap(), 0);
        assert_eq!(n.intersection_exponent(1, 1).unwrap(), 2);
        assert!(n.pair_composite(2, 1, 2).unwrap().is_trivial());
        assert_eq!(n.pair_composite(0, 1, 2).unwrap(), *n.subfield(1, 0).unwrap());
    }

    #[test]
    fn sub_bicyclic() {
        let n = cfg(2, vec![2, 2], &[(2, vec![1, 0]), (2, vec![0, 1]), (2, vec![1, 2])]).unwrap();
        let a = n.group().clone();
        assert!(n.is_sub_bicyclic(&Subgroup::full(&a)));
        let h = Subgroup::span(&a, &[[2, 2]]);
        assert!(n.is_sub_bicyclic(&h));
        assert_eq!(h.quotient_invariants(), vec![2, 1]);
        let m = cfg(
            2,
            vec![1, 1, 1],
            &[(1, vec![1, 0, 0]), (1, vec![0, 1, 0]), (1, vec![0, 0, 1])],
        )
        .unwrap();
        assert!(!m.is_sub_bicyclic(&Subgroup::trivial(m.group())));
    }

    #[test]
    fn normalize_is_idempotent() {
        let n = cfg(
            3,
            vec![2, 1],
            &[(1, vec![0, 1]), (2, vec![1, 0]), (2, vec![1, 3]), (2, vec![1, 6])],
        )
        .unwrap();
        let again = validate_and_normalize(&n.base).unwrap();
        assert_eq!(again.permutation, (0..=n.m()).collect::<Vec<_>>());
        assert_eq!(again.eij, n.eij);
        assert_eq!(again.u, n.u);
    }
}
