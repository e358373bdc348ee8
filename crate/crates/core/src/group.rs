//! Finite abelian p-groups, their subgroups and characters.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{ipow, is_prime, val_capped};
use crate::error::{Error, Result};
use crate::lattice::{coordinates, hnf_mod, kernel_mod, lattice_contains, local_snf};

/// Cap on the order of groups built with [`PGroup::new`].
pub const MAX_GROUP_ORDER: u64 = 1 << 20;

/// Cap on exhaustive enumeration of elements or subgroups.
pub const ENUMERATION_CAP: u64 = 1 << 20;

/// `⊕_j Z/p^{n_j}` with `n_1 ≥ n_2 ≥ … ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PGroup {
    p: i64,
    exponents: Vec<u32>,
    moduli: Vec<i64>,
}

impl PGroup {
    pub fn new(p: u64, exponents: Vec<u32>) -> Result<Arc<Self>> {
        Self::with_cap(p, exponents, MAX_GROUP_ORDER)
    }

    /// Same as [`PGroup::new`] with a custom bound on the group order.
    /// Individual coordinate moduli must still fit comfortably in `i64`.
    pub fn with_cap(p: u64, exponents: Vec<u32>, cap: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if exponents.contains(&0) || exponents.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidExponents(exponents));
        }
        let log: u32 = exponents.iter().sum();
        let order = (p as u128).checked_pow(log);
        if order.is_none_or(|o| o > cap as u128) {
            return Err(Error::GroupTooLarge { p, log_order: log, cap });
        }
        if exponents.first().is_some_and(|&n| (p as u128).pow(n) > (1u128 << 24)) {
            return Err(Error::GroupTooLarge {
                p,
                log_order: log,
                cap: 1 << 24,
            });
        }
        let moduli = exponents.iter().map(|&n| ipow(p as i64, n)).collect();
        Ok(Arc::new(PGroup {
            p: p as i64,
            exponents,
            moduli,
        }))
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn log_order(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.log_order())
    }

    /// Largest exponent `n_1` (0 for the trivial group).
    pub fn exponent(&self) -> u32 {
        self.exponents.first().copied().unwrap_or(0)
    }

    pub fn is_homocyclic(&self) -> bool {
        self.exponents.windows(2).all(|w| w[0] == w[1])
    }

    /// Checked element constructor.
    pub fn element(&self, coords: &[i64]) -> Result<Element> {
        self.check(coords)?;
        Ok(Element(coords.to_vec()))
    }

    pub fn check(&self, coords: &[i64]) -> Result<()> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: coords.len(),
            });
        }
        for (index, (&value, &modulus)) in coords.iter().zip(&self.moduli).enumerate() {
            if !(0..modulus).contains(&value) {
                return Err(Error::CoordinateOutOfRange { index, value, modulus });
            }
        }
        Ok(())
    }

    pub fn reduce(&self, coords: &[i64]) -> Element {
        Element(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| x.rem_euclid(m))
                .collect(),
        )
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect(),
        )
    }

    pub fn scale(&self, x: &Element, n: i64) -> Element {
        Element(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| ((a as i128 * n as i128).rem_euclid(m as i128)) as i64)
                .collect(),
        )
    }

    /// `log_p` of the order of `x`.
    pub fn element_log_order(&self, x: &Element) -> u32 {
        x.0.iter()
            .zip(&self.exponents)
            .map(|(&a, &n)| n - val_capped(a, self.p, n))
            .max()
            .unwrap_or(0)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let total = self.order();
        let mut cur = vec![0i64; self.rank()];
        let mut emitted: u128 = 0;
        std::iter::from_fn(move || {
            if emitted == total {
                return None;
            }
            let out = Element(cur.clone());
            emitted += 1;
            for j in (0..cur.len()).rev() {
                cur[j] += 1;
                if cur[j] < self.moduli[j] {
                    break;
                }
                cur[j] = 0;
            }
            Some(out)
        })
    }
}

impl fmt::Display for PGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A group element, coordinates reduced into `[0, p^{n_j})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub Vec<i64>);

impl Element {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// Subgroup stored as the Hermite normal form of its preimage lattice in `Z^k`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: Arc<PGroup>,
    basis: Vec<Vec<i64>>,
    log_order: u32,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.ambient == other.ambient
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.hash(state);
    }
}

impl Subgroup {
    fn from_hnf(ambient: Arc<PGroup>, basis: Vec<Vec<i64>>) -> Self {
        let p = ambient.p;
        let lost: u32 = basis
            .iter()
            .enumerate()
            .map(|(c, row)| val_capped(row[c], p, u32::MAX))
            .sum();
        let log_order = ambient.log_order() - lost;
        Subgroup {
            ambient,
            basis,
            log_order,
        }
    }

    /// Span of arbitrary integer vectors (reduced into the group first).
    pub fn span<V: AsRef<[i64]>>(ambient: &Arc<PGroup>, gens: &[V]) -> Self {
        let rows: Vec<Vec<i64>> = gens.iter().map(|g| g.as_ref().to_vec()).collect();
        let basis = hnf_mod(&rows, ambient.moduli());
        Self::from_hnf(ambient.clone(), basis)
    }

    pub fn from_generators(ambient: &Arc<PGroup>, gens: &[Element]) -> Result<Self> {
        for g in gens {
            ambient.check(&g.0)?;
        }
        Ok(Self::span(
            ambient,
            gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>().as_slice(),
        ))
    }

    pub fn trivial(ambient: &Arc<PGroup>) -> Self {
        Self::span::<Vec<i64>>(ambient, &[])
    }

    pub fn full(ambient: &Arc<PGroup>) -> Self {
        let k = ambient.rank();
        let gens: Vec<Vec<i64>> = (0..k)
            .map(|j| {
                let mut e = vec![0; k];
                e[j] = 1;
                e
            })
            .collect();
        Self::span(ambient, &gens)
    }

    pub fn ambient(&self) -> &Arc<PGroup> {
        &self.ambient
    }

    /// Canonical upper triangular basis of the preimage lattice.
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn log_order(&self) -> u32 {
        self.log_order
    }

    pub fn order(&self) -> u128 {
        (self.ambient.p as u128).pow(self.log_order)
    }

    pub fn is_trivial(&self) -> bool {
        self.log_order == 0
    }

    pub fn is_full(&self) -> bool {
        self.log_order == self.ambient.log_order()
    }

    /// Nonzero generators (basis rows reduced into the group).
    pub fn generators(&self) -> Vec<Element> {
        self.basis
            .iter()
            .map(|r| self.ambient.reduce(r))
            .filter(|e| !e.is_zero())
            .collect()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        lattice_contains(&self.basis, self.ambient.moduli(), x)
    }

    fn same_ambient(&self, other: &Subgroup) -> Result<()> {
        if Arc::ptr_eq(&self.ambient, &other.ambient) || self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.log_order <= other.log_order && self.basis.iter().all(|r| other.contains(r)))
    }

    pub fn join(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        let rows: Vec<Vec<i64>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Self::span(&self.ambient, &rows))
    }

    /// Joins an arbitrary family (the trivial subgroup for an empty family).
    pub fn join_all<'a, I: IntoIterator<Item = &'a Subgroup>>(ambient: &Arc<PGroup>, it: I) -> Result<Subgroup> {
        let mut rows = Vec::new();
        for h in it {
            if h.ambient != *ambient {
                return Err(Error::AmbientMismatch);
            }
            rows.extend(h.basis.iter().cloned());
        }
        Ok(Self::span(ambient, &rows))
    }

    /// Annihilator under the perfect pairing
    /// `⟨a, b⟩ = Σ_j a_j b_j p^{N − n_j} mod p^N`, `N = n_1`.
    fn dual(&self) -> Subgroup {
        let a = &self.ambient;
        let big_n = a.exponent();
        let p = a.p;
        let modulus = ipow(p, big_n);
        let eqs: Vec<Vec<i64>> = self
            .basis
            .iter()
            .map(|row| {
                row.iter()
                    .zip(a.exponents())
                    .zip(a.moduli())
                    .map(|((&x, &n), &m)| (x.rem_euclid(m)) * ipow(p, big_n - n) % modulus)
                    .collect()
            })
            .filter(|r: &Vec<i64>| r.iter().any(|&x| x != 0))
            .collect();
        let eq_moduli = vec![modulus; eqs.len()];
        Self::from_hnf(a.clone(), kernel_mod(&eqs, &eq_moduli, a.moduli()))
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        if self.is_subgroup_of(other)? {
            return Ok(self.clone());
        }
        if other.is_subgroup_of(self)? {
            return Ok(other.clone());
        }
        Ok(self.dual().join(&other.dual())?.dual())
    }

    pub fn intersect_all<'a, I: IntoIterator<Item = &'a Subgroup>>(ambient: &Arc<PGroup>, it: I) -> Result<Subgroup> {
        let mut acc = Subgroup::full(ambient);
        for h in it {
            acc = acc.intersect(h)?;
        }
        Ok(acc)
    }

    /// Invariant factors of `A/H` as p-exponents, non-increasing.
    pub fn quotient_invariants(&self) -> Vec<u32> {
        let a = &self.ambient;
        local_snf(&self.basis, a.rank(), a.p, a.exponent())
    }

    /// Invariant factors of `self / sub`.
    pub fn relative_invariants(&self, sub: &Subgroup) -> Result<Vec<u32>> {
        if !sub.is_subgroup_of(self)? {
            return Err(Error::NotASubgroup);
        }
        let e = self.log_order - sub.log_order;
        if e == 0 {
            return Ok(Vec::new());
        }
        let p = self.ambient.p;
        let exp_mod = (p as i128).pow(e);
        let rows: Vec<Vec<i64>> = sub
            .basis
            .iter()
            .map(|r| coordinates(&self.basis, r, exp_mod).ok_or(Error::NotASubgroup))
            .collect::<Result<_>>()?;
        Ok(local_snf(&rows, self.ambient.rank(), p, e))
    }

    /// Invariant factors of the subgroup itself.
    pub fn invariants(&self) -> Vec<u32> {
        self.relative_invariants(&Subgroup::trivial(&self.ambient))
            .expect("trivial subgroup")
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariants().len() <= 1
    }

    /// Whether the image of `self` in `A/h` is cyclic.
    pub fn image_is_cyclic(&self, h: &Subgroup) -> Result<bool> {
        let j = self.join(h)?;
        Ok(j.relative_invariants(h)?.len() <= 1)
    }

    /// Canonical representatives of `A/H`: vectors with `0 ≤ x_c < d_c`
    /// where `d_c` are the diagonal entries of the basis.
    pub fn coset_representatives(&self) -> Vec<Vec<i64>> {
        let diag: Vec<i64> = (0..self.ambient.rank()).map(|c| self.basis[c][c]).collect();
        let mut out = vec![vec![]];
        for &d in &diag {
            let mut grown = Vec::with_capacity(out.len() * d as usize);
            for v in &out {
                for x in 0..d {
                    let mut w: Vec<i64> = v.clone();
                    w.push(x);
                    grown.push(w);
                }
            }
            out = grown;
        }
        out
    }

    /// All elements, by closure from the generators. Test helper; capped.
    pub fn elements(&self) -> Result<Vec<Element>> {
        if self.order() > ENUMERATION_CAP as u128 {
            return Err(Error::BudgetExceeded {
                needed: self.order(),
                budget: ENUMERATION_CAP as u128,
            });
        }
        let a = &self.ambient;
        let mut seen: HashSet<Element> = HashSet::new();
        let mut stack = vec![a.zero()];
        seen.insert(a.zero());
        let gens = self.generators();
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = a.add(&x, g);
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        let mut out: Vec<Element> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|g| format!("{:?}", g.0)).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

/// All cyclic subgroups, each once, largest first.
pub fn cyclic_subgroups(a: &Arc<PGroup>, cap: u64) -> Result<Vec<Subgroup>> {
    Ok(cyclic_subgroups_with_generators(a, cap)?
        .into_iter()
        .map(|(h, _)| h)
        .collect())
}

/// Cyclic subgroups together with one generator each, largest first.
pub fn cyclic_subgroups_with_generators(a: &Arc<PGroup>, cap: u64) -> Result<Vec<(Subgroup, Element)>> {
    if a.order() > cap as u128 {
        return Err(Error::BudgetExceeded {
            needed: a.order(),
            budget: cap as u128,
        });
    }
    let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::new();
    let mut out = Vec::new();
    for g in a.elements() {
        let h = Subgroup::span(a, std::slice::from_ref(&g.0));
        if seen.insert(h.basis.clone()) {
            out.push((h, g));
        }
    }
    out.sort_by(|x, y| {
        y.0.log_order
            .cmp(&x.0.log_order)
            .then_with(|| x.0.basis.cmp(&y.0.basis))
    });
    Ok(out)
}

/// Every subgroup of `A`, enumerated directly as Hermite normal forms.
/// Intended for exhaustive tests on small groups.
///
/// Rows are chosen from the last column upward. Row `c` is
/// `(0,…,0, d_c, b_{c+1},…)` with `d_c | p^{n_c}` and `0 ≤ b_j < d_j`; it is
/// admissible iff `(p^{n_c}/d_c)·b` lies in the lattice of the rows below.
pub fn all_subgroups(a: &Arc<PGroup>, cap: u64) -> Result<Vec<Subgroup>> {
    if a.order() > cap as u128 {
        return Err(Error::BudgetExceeded {
            needed: a.order(),
            budget: cap as u128,
        });
    }
    let k = a.rank();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<i64>> = vec![vec![0; k]; k];
    fill_rows(a, k, &mut rows, &mut out);
    Ok(out)
}

fn fill_rows(a: &Arc<PGroup>, c: usize, rows: &mut Vec<Vec<i64>>, out: &mut Vec<Subgroup>) {
    if c == 0 {
        out.push(Subgroup::from_hnf(a.clone(), rows.clone()));
        return;
    }
    let c = c - 1;
    let k = a.rank();
    let m = a.moduli();
    let lower: Vec<Vec<i64>> = rows[c + 1..].iter().map(|r| r[c + 1..].to_vec()).collect();
    let diag: Vec<i64> = (c + 1..k).map(|j| rows[j][j]).collect();
    let mut d = 1i64;
    while d <= m[c] {
        let mult = m[c] / d;
        let mut b = vec![0i64; k - c - 1];
        loop {
            let scaled: Vec<i64> = b.iter().map(|&x| x * mult).collect();
            if lattice_contains(&lower, &m[c + 1..], &scaled) {
                rows[c][c] = d;
                rows[c][c + 1..].copy_from_slice(&b);
                fill_rows(a, c, rows, out);
            }
            if !advance(&mut b, &diag) {
                break;
            }
        }
        d *= a.p;
    }
    rows[c] = vec![0; k];
}

/// Odometer step over `0 ≤ b_j < bounds_j`; false once it wraps around.
fn advance(b: &mut [i64], bounds: &[i64]) -> bool {
    for j in (0..b.len()).rev() {
        b[j] += 1;
        if b[j] < bounds[j] {
            return true;
        }
        b[j] = 0;
    }
    false
}

/// `{a : Σ_j a_j s_j ≡ 0 mod p^n for all s ∈ S}` for homocyclic `A = (Z/p^n)^k`.
pub fn annihilator(a: &Arc<PGroup>, s: &Subgroup) -> Result<Subgroup> {
    if !a.is_homocyclic() {
        return Err(Error::NotHomocyclic);
    }
    if s.ambient != *a {
        return Err(Error::AmbientMismatch);
    }
    let modulus = ipow(a.p, a.exponent());
    let eqs: Vec<Vec<i64>> = s.generators().into_iter().map(|g| g.0).collect();
    let eq_moduli = vec![modulus; eqs.len()];
    Ok(Subgroup::from_hnf(a.clone(), kernel_mod(&eqs, &eq_moduli, a.moduli())))
}

/// Homomorphism `χ(a) = Σ_j c_j a_j mod p^ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    ambient: Arc<PGroup>,
    target: u32,
    coeffs: Vec<i64>,
}

impl Character {
    pub fn new(ambient: &Arc<PGroup>, target: u32, coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() != ambient.rank() {
            return Err(Error::DimensionMismatch {
                expected: ambient.rank(),
                got: coeffs.len(),
            });
        }
        let p = ambient.p;
        if (p as u128).pow(target) > (1u128 << 24) {
            return Err(Error::DegreeOutOfRange {
                degree: target,
                max: 24,
            });
        }
        let m = ipow(p, target);
        let coeffs: Vec<i64> = coeffs.iter().map(|&c| c.rem_euclid(m)).collect();
        for (c, &n) in coeffs.iter().zip(ambient.exponents()) {
            if (*c as i128 * ipow(p, n.min(target)) as i128) % m as i128 != 0 {
                return Err(Error::IllDefinedCharacter { index: 0, target });
            }
        }
        Ok(Character {
            ambient: ambient.clone(),
            target,
            coeffs,
        })
    }

    pub fn ambient(&self) -> &Arc<PGroup> {
        &self.ambient
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn modulus(&self) -> i64 {
        ipow(self.ambient.p, self.target)
    }

    pub fn eval(&self, x: &[i64]) -> i64 {
        let m = self.modulus() as i128;
        let s: i128 = self.coeffs.iter().zip(x).map(|(&c, &a)| c as i128 * a as i128).sum();
        s.rem_euclid(m) as i64
    }

    pub fn is_surjective(&self) -> bool {
        self.target == 0 || self.coeffs.iter().any(|&c| c % self.ambient.p != 0)
    }

    /// Composition with `Z/p^ε → Z/p^f`.
    pub fn reduce(&self, f: u32) -> Result<Character> {
        if f > self.target {
            return Err(Error::DegreeOutOfRange {
                degree: f,
                max: self.target,
            });
        }
        Character::new(&self.ambient, f, &self.coeffs)
    }

    pub fn kernel(&self) -> Subgroup {
        if self.target == 0 {
            return Subgroup::full(&self.ambient);
        }
        Subgroup::from_hnf(
            self.ambient.clone(),
            kernel_mod(
                std::slice::from_ref(&self.coeffs),
                &[self.modulus()],
                self.ambient.moduli(),
            ),
        )
    }

    /// `log_p |χ(H)|`.
    pub fn image_log_order(&self, h: &Subgroup) -> u32 {
        let p = self.ambient.p;
        let v = h
            .basis
            .iter()
            .map(|r| val_capped(self.eval(r), p, self.target))
            .min()
            .unwrap_or(self.target);
        self.target - v
    }

    /// `log_p` of the order of `χ(x)`.
    pub fn value_log_order(&self, x: &[i64]) -> u32 {
        self.target - val_capped(self.eval(x), self.ambient.p, self.target)
    }
}
