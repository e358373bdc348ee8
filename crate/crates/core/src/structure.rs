//! Closed-form route: patching degrees, the tree of l-equivalence classes,
//! degrees of freedom and the resulting invariant factors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::NormalizedConfig;
use crate::group::Subgroup;
use crate::local::{locally_cyclic, LocalData};
use crate::report::{normalize_invariants, Certificate, Method, ShaReport};
use crate::residue::ResidueVector;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Re-check every downward scan for monotonicity of its predicate.
    pub debug_monotonicity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchingRow {
    pub r: u32,
    pub members: Vec<usize>,
    pub delta_omega: u32,
    pub delta: u32,
}

/// A class with at least two members; singletons never contribute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    pub r: u32,
    pub members: Vec<usize>,
    pub level: u32,
    /// Classes at `level + 1`, ordered by smallest member.
    pub children: Vec<Vec<usize>>,
    pub parent: Option<usize>,
    pub f_omega: u32,
    pub f: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub patching: Vec<PatchingRow>,
    pub nodes: Vec<ClassNode>,
    pub generators: Vec<Certificate>,
    pub sha_omega: Vec<u32>,
    pub sha: Vec<u32>,
    /// Termwise `Δ^ω − Δ` and `f^ω − f`; not proven to equal `Ш_ω/Ш`.
    pub quotient_annotation: Vec<u32>,
}

/// Classes of `c` under `i ~_l j ⟺ e_{i,j} ≥ l`, each sorted, ordered by
/// smallest member.
pub fn classes_at(cfg: &NormalizedConfig, c: &[usize], l: u32) -> Vec<Vec<usize>> {
    let mut root: Vec<usize> = (0..c.len()).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            if cfg.eij[c[a]][c[b]] >= l {
                let (ra, rb) = (find(&mut root, a), find(&mut root, b));
                root[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in 0..c.len() {
        let r = find(&mut root, k);
        groups.entry(r).or_default().push(c[k]);
    }
    let mut out: Vec<Vec<usize>> = groups
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
    out.sort();
    out
}

/// `L(C)`: `ε_i` for a singleton, else the least `l` with `n_{l+1}(C) > 1`.
pub fn level(cfg: &NormalizedConfig, c: &[usize]) -> Result<u32> {
    match c {
        [] => Err(Error::EmptyIndexSet),
        [i] => Ok(cfg.eps[*i]),
        _ => {
            let mut l = 0;
            while classes_at(cfg, c, l + 1).len() == 1 {
                l += 1;
            }
            Ok(l)
        }
    }
}

/// `L(C)` and the classes of `C` at `L(C) + 1`.
pub fn level_and_classes(cfg: &NormalizedConfig, c: &[usize]) -> Result<(u32, Vec<Vec<usize>>)> {
    let l = level(cfg, c)?;
    Ok((l, classes_at(cfg, c, l + 1)))
}

/// Largest `x` in `lo..=hi` satisfying `pred`, scanning downward.
fn scan_down<F>(name: &str, hi: u32, lo: u32, debug: bool, mut pred: F) -> Result<u32>
where
    F: FnMut(u32) -> Result<bool>,
{
    let mut x = hi;
    loop {
        if pred(x)? {
            break;
        }
        if x == lo {
            return Err(Error::Internal(format!("{name}: no admissible value in [{lo}, {hi}]")));
        }
        x -= 1;
    }
    if debug {
        for y in lo..x {
            if !pred(y)? {
                return Err(Error::NonMonotone(format!("{name}: {x} admissible but {y} is not")));
            }
        }
    }
    Ok(x)
}

/// `Gal(M/F)` for `F = ∩_{i∈C} K_0(d)K_i(d)`.
fn meet_of_k0_composites(cfg: &NormalizedConfig, c: &[usize], d: u32) -> Result<Subgroup> {
    let parts = c.iter().map(|&i| cfg.k0_composite(i, d)).collect::<Result<Vec<_>>>()?;
    Subgroup::join_all(cfg.group(), parts.iter())
}

pub fn delta_omega(cfg: &NormalizedConfig, r: u32, opts: Options) -> Result<u32> {
    let ur = cfg.u_r(r)?.to_vec();
    let eps0 = cfg.eps0();
    if ur.len() == cfg.m() {
        return Ok(eps0);
    }
    let (gt, lt) = (cfg.u_greater(r), cfg.u_less(r));
    scan_down("Δ^ω", eps0, 0, opts.debug_monotonicity, |d| {
        if !gt.is_empty() && !meet_of_k0_composites(cfg, &ur, d)?.is_subgroup_of(&cfg.composite(&gt, d)?)? {
            return Ok(false);
        }
        if !lt.is_empty() && !meet_of_k0_composites(cfg, &lt, d)?.is_subgroup_of(&cfg.composite(&ur, d)?)? {
            return Ok(false);
        }
        Ok(true)
    })
}

pub fn delta(cfg: &NormalizedConfig, local: &LocalData, r: u32, delta_omega: u32, opts: Options) -> Result<u32> {
    let ur = cfg.u_r(r)?.to_vec();
    if ur.len() == cfg.m() {
        return Ok(cfg.eps0());
    }
    let (gt, lt) = (cfg.u_greater(r), cfg.u_less(r));
    scan_down("Δ", delta_omega, 0, opts.debug_monotonicity, |d| {
        let s0 = cfg.subfield(0, d)?;
        if !gt.is_empty() && !locally_cyclic(local, &s0.intersect(&cfg.composite(&gt, d)?)?)? {
            return Ok(false);
        }
        if !lt.is_empty() && !locally_cyclic(local, &s0.intersect(&cfg.composite(&ur, d)?)?)? {
            return Ok(false);
        }
        Ok(true)
    })
}

/// `M_c(g)` if `g ≤ ε_i` for every `i ∈ c`.
fn class_composite(cfg: &NormalizedConfig, c: &[usize], g: u32) -> Result<Option<Subgroup>> {
    if c.iter().any(|&i| g > cfg.eps[i]) {
        return Ok(None);
    }
    cfg.composite(c, g).map(Some)
}

/// `f^ω_c`: largest `f ≤ bound` with `M_c(f + L(c) − r)` sub-bicyclic and
/// containing `K_0(f)`.
pub fn f_omega(cfg: &NormalizedConfig, r: u32, c: &[usize], lvl: u32, bound: u32, opts: Options) -> Result<u32> {
    scan_down("f^ω", bound, r, opts.debug_monotonicity, |f| {
        let Some(h) = class_composite(cfg, c, f + lvl - r)? else {
            return Ok(false);
        };
        Ok(cfg.is_sub_bicyclic(&h) && h.is_subgroup_of(cfg.subfield(0, f)?)?)
    })
}

/// `f_c`: largest `f ≤ f^ω_c` with `M_c(f + L(c) − r)` locally cyclic.
pub fn f_ordinary(
    cfg: &NormalizedConfig,
    local: &LocalData,
    r: u32,
    c: &[usize],
    lvl: u32,
    f_omega: u32,
    opts: Options,
) -> Result<u32> {
    scan_down("f", f_omega, r, opts.debug_monotonicity, |f| {
        match class_composite(cfg, c, f + lvl - r)? {
            Some(h) => locally_cyclic(local, &h),
            None => Ok(false),
        }
    })
}

fn build_nodes(
    cfg: &NormalizedConfig,
    local: &LocalData,
    r: u32,
    c: Vec<usize>,
    parent: Option<usize>,
    bound: u32,
    opts: Options,
    out: &mut Vec<ClassNode>,
) -> Result<()> {
    if c.len() < 2 {
        return Ok(());
    }
    let (lvl, children) = level_and_classes(cfg, &c)?;
    let fw = f_omega(cfg, r, &c, lvl, bound, opts)?;
    let f = f_ordinary(cfg, local, r, &c, lvl, fw, opts)?;
    let idx = out.len();
    out.push(ClassNode {
        r,
        members: c,
        level: lvl,
        children: children.clone(),
        parent,
        f_omega: fw,
        f,
    });
    for child in children {
        build_nodes(cfg, local, r, child, Some(idx), fw, opts, out)?;
    }
    Ok(())
}

fn indicator(cfg: &NormalizedConfig, support: &[usize], exp: u32) -> ResidueVector {
    let p = cfg.p();
    ResidueVector(
        (1..=cfg.m())
            .map(|i| {
                if support.contains(&i) {
                    p.pow(exp.min(cfg.e[i])) % p.pow(cfg.e[i])
                } else {
                    0
                }
            })
            .collect(),
    )
}

fn fmt_set(c: &[usize]) -> String {
    let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

impl Structure {
    pub fn compute(cfg: &NormalizedConfig, local: &LocalData, opts: Options) -> Result<Structure> {
        let eps0 = cfg.eps0();
        let mut patching = Vec::new();
        let mut nodes = Vec::new();
        let mut generators = Vec::new();
        let (mut sha_omega, mut sha, mut annot) = (Vec::new(), Vec::new(), Vec::new());
        for r in cfg.r_values() {
            let ur = cfg.u_r(r)?.to_vec();
            let dw = delta_omega(cfg, r, opts)?;
            let d = delta(cfg, local, r, dw, opts)?;
            if r > 0 {
                sha_omega.push(dw - r);
                sha.push(d - r);
                annot.push(dw - d);
            }
            generators.push(Certificate {
                node: format!("U_{r}"),
                omega: indicator(cfg, &ur, eps0 - dw),
                ordinary: indicator(cfg, &ur, eps0 - d),
            });
            patching.push(PatchingRow {
                r,
                members: ur.clone(),
                delta_omega: dw,
                delta: d,
            });
            let start = nodes.len();
            build_nodes(cfg, local, r, ur, None, dw, opts, &mut nodes)?;
            for node in &nodes[start..] {
                let k = node.children.len() as u32 - 1;
                for _ in 0..k {
                    sha_omega.push(node.f_omega - r);
                    sha.push(node.f - r);
                    annot.push(node.f_omega - node.f);
                }
                for child in &node.children[..node.children.len() - 1] {
                    generators.push(Certificate {
                        node: format!("r={r} c={} child={}", fmt_set(&node.members), fmt_set(child)),
                        omega: indicator(cfg, child, eps0 - node.f_omega),
                        ordinary: indicator(cfg, child, eps0 - node.f),
                    });
                }
            }
        }
        Ok(Structure {
            patching,
            nodes,
            generators,
            sha_omega: normalize_invariants(sha_omega),
            sha: normalize_invariants(sha),
            quotient_annotation: normalize_invariants(annot),
        })
    }

    pub fn report(&self) -> ShaReport {
        ShaReport {
            sha_invariants: self.sha.clone(),
            sha_omega_invariants: self.sha_omega.clone(),
            quotient_invariants: None,
            quotient_annotation: Some(self.quotient_annotation.clone()),
            generators: Some(self.generators.clone()),
            method: Method::Formula,
            agreement: None,
        }
    }

    pub fn row(&self, r: u32) -> Option<&PatchingRow> {
        self.patching.iter().find(|row| row.r == r)
    }

    /// Violations of the inequalities between consecutive patching degrees
    /// and of the chain `r ≤ f ≤ f^ω ≤ f^ω(parent) ≤ Δ^ω_r`.
    pub fn bound_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.patching.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            for (name, x, y) in [("Δ^ω", a.delta_omega, b.delta_omega), ("Δ", a.delta, b.delta)] {
                if a.r == 0 && x != y {
                    out.push(format!("{name}_0 = {x} ≠ {name}_{} = {y}", b.r));
                }
                if x > y {
                    out.push(format!("{name}_{} = {x} > {name}_{} = {y}", a.r, b.r));
                }
                if x + b.r < y + a.r {
                    out.push(format!("{name}_{} − {} < {name}_{} − {}", a.r, a.r, b.r, b.r));
                }
            }
        }
        for row in &self.patching {
            if !(row.r <= row.delta && row.delta <= row.delta_omega) {
                out.push(format!("r ≤ Δ ≤ Δ^ω fails at r = {}", row.r));
            }
        }
        for n in &self.nodes {
            let top = match n.parent {
                Some(p) => self.nodes[p].f_omega,
                None => self.row(n.r).map_or(0, |row| row.delta_omega),
            };
            if !(n.r <= n.f && n.f <= n.f_omega && n.f_omega <= top) {
                out.push(format!("chain fails at class {}", fmt_set(&n.members)));
            }
        }
        out
    }

    /// `M_c(f + L(c) − r) = K_0(f) K_i(f + L(c) − r)` for `r ≤ f ≤ f^ω_c`, `i ∈ c`.
    pub fn expression_violations(&self, cfg: &NormalizedConfig) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for n in &self.nodes {
            for f in n.r..=n.f_omega {
                let g = f + n.level - n.r;
                let h = cfg.composite(&n.members, g)?;
                for &i in &n.members {
                    if cfg.subfield(0, f)?.intersect(cfg.subfield(i, g)?)? != h {
                        out.push(format!("M_c ≠ K_0 K_{i} for c = {}, f = {f}", fmt_set(&n.members)));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Whether `∩_{i∈U_0} K_0K_i = K_0`, in which case both groups vanish.
pub fn sha_trivial_criterion(cfg: &NormalizedConfig) -> Result<bool> {
    let u0 = cfg.u_r(0)?;
    let eps0 = cfg.eps0();
    Ok(&meet_of_k0_composites(cfg, u0, eps0)? == cfg.kernel(0))
}

/// `(Ш_ω, Ш)` when `K_0, …, K_m` are pairwise disjoint:
/// `(Z/p^f)^{m−1}` and `(Z/p^{f'})^{m−1}`.
pub fn shortcut_linearly_disjoint(cfg: &NormalizedConfig, local: &LocalData) -> Result<(Vec<u32>, Vec<u32>)> {
    let m = cfg.m();
    for i in 0..=m {
        for j in i + 1..=m {
            if cfg.eij[i][j] != 0 {
                return Err(Error::HypothesisViolated(format!(
                    "e_{{{i},{j}}} = {} ≠ 0",
                    cfg.eij[i][j]
                )));
            }
        }
    }
    let all: Vec<usize> = (0..=m).collect();
    let mut f = 0;
    while f < cfg.eps0() && cfg.is_sub_bicyclic(&cfg.composite(&all, f + 1)?) {
        f += 1;
    }
    let mut f2 = f;
    while f2 > 0 && !locally_cyclic(local, &cfg.composite(&all, f2)?)? {
        f2 -= 1;
    }
    let rep = |x: u32| normalize_invariants(vec![x; m - 1]);
    Ok((rep(f), rep(f2)))
}

/// `Ш_ω` when all `K_i` are degree-`p^n` subfields of one `(Z/p^n)^2`
/// extension.
pub fn shortcut_bicyclic_subfields(cfg: &NormalizedConfig) -> Result<Vec<u32>> {
    let n = cfg.eps0();
    if cfg.eps.iter().any(|&x| x != n) {
        return Err(Error::HypothesisViolated("fields of different degrees".into()));
    }
    let all: Vec<usize> = (0..=cfg.m()).collect();
    let inv = cfg.composite(&all, n)?.quotient_invariants();
    if inv.len() > 2 || inv.iter().any(|&x| x != n) {
        return Err(Error::HypothesisViolated(format!(
            "compositum has type {inv:?}, not ({n}, {n})"
        )));
    }
    let mut out = Vec::new();
    for r in cfg.r_values() {
        if r > 0 {
            out.push(n - r);
        }
        let mut stack = vec![cfg.u_r(r)?.to_vec()];
        while let Some(c) = stack.pop() {
            if c.len() < 2 {
                continue;
            }
            let (l, children) = level_and_classes(cfg, &c)?;
            out.extend(std::iter::repeat_n(n - l, children.len() - 1));
            stack.extend(children);
        }
    }
    Ok(normalize_invariants(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{validate_and_normalize, FieldConfig};
    use crate::group::PGroup;

    fn cfg(p: u64, exps: Vec<u32>, chars: &[(u32, Vec<i64>)]) -> NormalizedConfig {
        let a = PGroup::new(p, exps).unwrap();
        validate_and_normalize(&FieldConfig::from_coeffs(a, chars).unwrap()).unwrap()
    }

    const DEBUG: Options = Options {
        debug_monotonicity: true,
    };

    #[test]
    fn levels_and_classes() {
        let c = cfg(
            2,
            vec![1, 1, 1],
            &[
                (1, vec![1, 0, 0]),
                (1, vec![0, 1, 0]),
                (1, vec![0, 0, 1]),
                (1, vec![1, 1, 1]),
            ],
        );
        assert_eq!(level(&c, &[2]).unwrap(), c.eps[2]);
        assert_eq!(
            level_and_classes(&c, &[1, 2, 3]).unwrap(),
            (0, vec![vec![1], vec![2], vec![3]])
        );
        assert!(level(&c, &[]).is_err());
    }

    #[test]
    fn classes_split_on_threshold() {
        // e_{1,2} = 1, e_{1,3} = e_{2,3} = 0.
        let c = cfg(
            2,
            vec![2, 2],
            &[(2, vec![1, 0]), (2, vec![0, 1]), (2, vec![2, 1]), (2, vec![1, 1])],
        );
        let (i, j, k) = (1usize, 2usize, 3usize);
        let mut pairs = [(c.eij[i][j], (i, j)), (c.eij[i][k], (i, k)), (c.eij[j][k], (j, k))];
        pairs.sort();
        assert_eq!(pairs.iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 0, 1]);
        let (a, b) = pairs[2].1;
        let (lvl, cls) = level_and_classes(&c, &[1, 2, 3]).unwrap();
        assert_eq!(lvl, 0);
        assert_eq!(cls.len(), 2);
        assert!(cls.contains(&vec![a, b]));
    }

    #[test]
    fn three_quadratic_subfields() {
        let c = cfg(2, vec![1, 1], &[(1, vec![1, 0]), (1, vec![0, 1]), (1, vec![1, 1])]);
        let s = Structure::compute(&c, &LocalData::none(), DEBUG).unwrap();
        assert_eq!(s.patching[0].delta_omega, 1);
        assert_eq!(s.sha_omega, vec![1]);
        assert_eq!(s.sha, vec![1]);
        assert_eq!(shortcut_bicyclic_subfields(&c).unwrap(), vec![1]);
        assert_eq!(
            shortcut_linearly_disjoint(&c, &LocalData::none()).unwrap(),
            (vec![1], vec![1])
        );
        assert!(s.bound_violations().is_empty());
        assert!(s.expression_violations(&c).unwrap().is_empty());
    }

    #[test]
    fn rank_three_is_trivial() {
        let c = cfg(
            2,
            vec![1, 1, 1],
            &[
                (1, vec![1, 0, 0]),
                (1, vec![0, 1, 0]),
                (1, vec![0, 0, 1]),
                (1, vec![1, 1, 1]),
            ],
        );
        assert!(sha_trivial_criterion(&c).unwrap());
        let s = Structure::compute(&c, &LocalData::none(), DEBUG).unwrap();
        assert!(s.sha_omega.is_empty() && s.sha.is_empty());
    }

    #[test]
    fn exceptional_place_lowers_f() {
        let c = cfg(2, vec![1, 1], &[(1, vec![1, 0]), (1, vec![0, 1]), (1, vec![1, 1])]);
        let a = c.group().clone();
        let local = LocalData::new(vec![("v".into(), Subgroup::full(&a))]).unwrap();
        let s = Structure::compute(&c, &local, DEBUG).unwrap();
        assert_eq!(s.sha_omega, vec![1]);
        assert!(s.sha.is_empty());
        assert_eq!(s.quotient_annotation, vec![1]);
    }

    #[test]
    fn scan_detects_non_monotone_predicates() {
        let r = scan_down("t", 3, 0, true, |x| Ok(x != 1));
        assert!(matches!(r, Err(Error::NonMonotone(_))));
        assert_eq!(scan_down("t", 3, 0, false, |x| Ok(x != 1)).unwrap(), 3);
        assert!(scan_down("t", 3, 1, false, |_| Ok(false)).is_err());
    }
}
