//! Quartic Kummer configurations over `k = Q(i)`: `K_i = k(⁴√b_i)` for odd
//! positive integers `b_i`.
//!
//! With generators `q_1, …, q_g` (the odd primes dividing some `b_i`),
//! `A = Gal(k(⁴√q_1, …, ⁴√q_g)/k) ≅ (Z/4)^g` is dual to the radicand group.
//! `χ_i` is the exponent vector of `b_i`, and the decomposition group at `v`
//! is the annihilator of the radicands that are fourth powers in `k_v`.

use std::fmt;

use crate::arith::{inv_mod, is_prime, pow_mod, prime_factors};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::group::{annihilator, Character, PGroup, Subgroup};
use crate::local::LocalData;

pub const MAX_GENERATORS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: i64,
    pub im: i64,
}

impl Gaussian {
    pub const fn new(re: i64, im: i64) -> Self {
        Gaussian { re, im }
    }

    pub fn norm(self) -> i128 {
        self.re as i128 * self.re as i128 + self.im as i128 * self.im as i128
    }

    pub fn conj(self) -> Self {
        Gaussian::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn mul_mod(self, o: Self, m: i64) -> Self {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let m = m as i128;
        Gaussian::new(
            (a * c - b * d).rem_euclid(m) as i64,
            (a * d + b * c).rem_euclid(m) as i64,
        )
    }

    fn pow_mod(self, mut e: u64, m: i64) -> Self {
        let mut acc = Gaussian::new(1 % m, 0);
        let mut b = Gaussian::new(self.re.rem_euclid(m), self.im.rem_euclid(m));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(b, m);
            }
            b = b.mul_mod(b, m);
            e >>= 1;
        }
        acc
    }

    /// `self / d` when the quotient lies in `Z[i]`.
    fn div_exact(self, d: Gaussian) -> Option<Gaussian> {
        let n = d.norm();
        let (a, b, c, e) = (self.re as i128, self.im as i128, d.re as i128, -(d.im as i128));
        let (x, y) = (a * c - b * e, a * e + b * c);
        (x % n == 0 && y % n == 0).then(|| Gaussian::new((x / n) as i64, (y / n) as i64))
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}i"),
            (a, 1) => write!(f, "{a}+i"),
            (a, -1) => write!(f, "{a}-i"),
            (a, b) if b > 0 => write!(f, "{a}+{b}i"),
            (a, b) => write!(f, "{a}{b}i"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Ramified,
    /// Residue field `F_p`, with `i ↦ i0`.
    Split {
        p: i64,
        i0: i64,
    },
    Inert {
        q: i64,
    },
}

/// A prime of `Z[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussianPrime {
    pub pi: Gaussian,
    kind: Kind,
}

/// Residues for the unit test at 1+i are taken mod 32, finer than `(1+i)^9`.
const RAMIFIED_MODULUS: i64 = 32;

impl GaussianPrime {
    pub fn new(pi: Gaussian) -> Result<Self> {
        let bad = || Error::NotGaussianPrime(pi.to_string());
        let n = pi.norm();
        if n == 2 {
            return Ok(GaussianPrime {
                pi,
                kind: Kind::Ramified,
            });
        }
        if n <= i64::MAX as i128 && is_prime(n as u64) && n % 4 == 1 {
            let p = n as i64;
            let binv = inv_mod(pi.im.rem_euclid(p), p).ok_or_else(bad)?;
            let i0 = (-(pi.re as i128) * binv as i128).rem_euclid(p as i128) as i64;
            return Ok(GaussianPrime {
                pi,
                kind: Kind::Split { p, i0 },
            });
        }
        let q = (pi.re.abs()).max(pi.im.abs());
        if (pi.re == 0 || pi.im == 0) && is_prime(q as u64) && q % 4 == 3 {
            return Ok(GaussianPrime {
                pi,
                kind: Kind::Inert { q },
            });
        }
        Err(bad())
    }

    pub fn one_plus_i() -> Self {
        GaussianPrime {
            pi: Gaussian::new(1, 1),
            kind: Kind::Ramified,
        }
    }

    /// The primes above an odd rational prime `p`.
    pub fn above(p: u64) -> Result<Vec<GaussianPrime>> {
        if p == 2 {
            return Ok(vec![Self::one_plus_i()]);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = p as i64;
        if p % 4 == 3 {
            return Ok(vec![Self::new(Gaussian::new(p, 0))?]);
        }
        let (a, b) = (1..)
            .map(|b: i64| (((p - b * b) as f64).sqrt().round() as i64, b))
            .find(|&(a, b)| a * a + b * b == p && a > b)
            .expect("p ≡ 1 mod 4 is a sum of two squares");
        Ok(vec![Self::new(Gaussian::new(a, b))?, Self::new(Gaussian::new(a, -b))?])
    }

    pub fn label(&self) -> String {
        self.pi.to_string()
    }

    /// `v_π(α)`, for `α ≠ 0`.
    pub fn valuation(&self, alpha: Gaussian) -> (u32, Gaussian) {
        let mut v = 0;
        let mut a = alpha;
        while let Some(q) = a.div_exact(self.pi) {
            a = q;
            v += 1;
        }
        (v, a)
    }

    fn modulus(&self) -> i64 {
        match self.kind {
            Kind::Ramified => RAMIFIED_MODULUS,
            Kind::Split { p, .. } => p,
            Kind::Inert { q } => q,
        }
    }

    /// Residue of a unit `u` in the ring used by the unit test.
    fn residue(&self, u: Gaussian) -> Gaussian {
        match self.kind {
            Kind::Split { p, i0 } => Gaussian::new(
                (u.re as i128 + u.im as i128 * i0 as i128).rem_euclid(p as i128) as i64,
                0,
            ),
            _ => {
                let m = self.modulus();
                Gaussian::new(u.re.rem_euclid(m), u.im.rem_euclid(m))
            }
        }
    }

    fn unit_residue_is_fourth_power(&self, r: Gaussian) -> bool {
        match self.kind {
            Kind::Split { p, .. } => pow_mod(r.re as u64, (p as u64 - 1) / 4, p as u64) == 1,
            Kind::Inert { q } => r.pow_mod(((q * q - 1) / 4) as u64, q) == Gaussian::new(1, 0),
            Kind::Ramified => ramified_unit_is_fourth_power(r),
        }
    }
}

/// `v_{1+i}(z) ≥ 9`, with `z` known mod 32: `z ∈ 16(1+i)Z[i]`.
fn divisible_by_1pi_9(z: Gaussian) -> bool {
    let (a, b) = (z.re.rem_euclid(32), z.im.rem_euclid(32));
    a % 16 == 0 && b % 16 == 0 && (a / 16 + b / 16) % 2 == 0
}

/// Hensel at `1+i`: a unit `u` is a fourth power iff `v(x^4 − u) ≥ 9` for
/// some unit `x` (since `v(4x^3) = 4`).
pub fn ramified_unit_is_fourth_power(u: Gaussian) -> bool {
    (0..32).any(|a| {
        (0..32).filter(|b| (a + b) % 2 == 1).any(|b| {
            let x4 = Gaussian::new(a, b).pow_mod(4, 32);
            divisible_by_1pi_9(Gaussian::new(x4.re - u.re, x4.im - u.im))
        })
    })
}

/// Whether `α ∈ (k_v^×)^4` for `v = (π)`.
pub fn is_fourth_power_local(alpha: Gaussian, pi: &GaussianPrime) -> Result<bool> {
    if alpha.is_zero() {
        return Err(Error::InvalidRadicand(0, "zero".into()));
    }
    let (v, u) = pi.valuation(alpha);
    Ok(v % 4 == 0 && pi.unit_residue_is_fourth_power(pi.residue(u)))
}

/// The data of a quartic Kummer configuration after the build.
#[derive(Clone, Debug)]
pub struct KummerBuild {
    pub radicands: Vec<i64>,
    /// Odd primes generating the radicand group, in order of appearance.
    pub generators: Vec<u64>,
    /// Exponent vectors of the radicands over `generators`, mod 4.
    pub exponents: Vec<Vec<i64>>,
    pub config: FieldConfig,
    pub local: LocalData,
}

fn place_subgroup(a: &std::sync::Arc<PGroup>, gens: &[u64], place: &GaussianPrime) -> Result<Subgroup> {
    let g = gens.len();
    let m = place.modulus();
    let local: Vec<(u32, Gaussian)> = gens
        .iter()
        .map(|&q| {
            let (v, u) = place.valuation(Gaussian::new(q as i64, 0));
            (v, place.residue(u))
        })
        .collect();
    let mut fourth_powers = Vec::new();
    for x in a.elements() {
        let mut val = 0u32;
        let mut unit = Gaussian::new(1, 0);
        for j in 0..g {
            let e = x.0[j] as u32;
            val += e * local[j].0;
            unit = unit.mul_mod(local[j].1.pow_mod(e as u64, m), m);
        }
        if val.is_multiple_of(4) && place.unit_residue_is_fourth_power(unit) {
            fourth_powers.push(x.0);
        }
    }
    let kv = Subgroup::span(a, &fourth_powers);
    if kv.order() != fourth_powers.len() as u128 {
        return Err(Error::Internal(format!(
            "fourth powers at {} are not a subgroup",
            place.label()
        )));
    }
    annihilator(a, &kv)
}

/// Builds the configuration for radicands `b_0, …, b_m`.
pub fn build(radicands: &[i64]) -> Result<KummerBuild> {
    if radicands.len() < 3 {
        return Err(Error::TooFewFields {
            remaining: radicands.len(),
        });
    }
    let mut generators: Vec<u64> = Vec::new();
    let mut factored = Vec::new();
    for &b in radicands {
        if b <= 1 {
            return Err(Error::InvalidRadicand(
                b,
                "radicands must be integers greater than 1".into(),
            ));
        }
        if b % 2 == 0 {
            return Err(Error::InvalidRadicand(b, "even radicands are not supported".into()));
        }
        let f = prime_factors(b as u64);
        for &(q, _) in &f {
            if !generators.contains(&q) {
                generators.push(q);
            }
        }
        factored.push(f);
    }
    if generators.len() > MAX_GENERATORS {
        return Err(Error::TooManyGenerators(generators.len()));
    }
    let g = generators.len();
    let a = PGroup::new(2, vec![2; g])?;
    let mut exponents = Vec::new();
    let mut chars = Vec::new();
    for (k, f) in factored.iter().enumerate() {
        let mut e = vec![0i64; g];
        for &(q, n) in f {
            e[generators.iter().position(|&x| x == q).expect("listed")] = (n % 4) as i64;
        }
        let c = if e.iter().all(|&x| x == 0) {
            return Err(Error::InvalidRadicand(radicands[k], "a fourth power, so K = k".into()));
        } else if e.iter().all(|&x| x % 2 == 0) {
            Character::new(&a, 1, &e.iter().map(|&x| x / 2).collect::<Vec<_>>())?
        } else {
            Character::new(&a, 2, &e)?
        };
        exponents.push(e);
        chars.push(c);
    }
    for i in 0..chars.len() {
        for j in i + 1..chars.len() {
            if chars[i].kernel() == chars[j].kernel() {
                return Err(Error::DuplicateField(i, j));
            }
        }
    }
    let mut places = vec![GaussianPrime::one_plus_i()];
    for &q in &generators {
        places.extend(GaussianPrime::above(q)?);
    }
    let local = LocalData::new(
        places
            .iter()
            .map(|pl| Ok((pl.label(), place_subgroup(&a, &generators, pl)?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let labels = radicands.iter().map(|b| format!("k(⁴√{b})")).collect();
    let config = FieldConfig::new(a, chars, labels)?;
    Ok(KummerBuild {
        radicands: radicands.to_vec(),
        generators,
        exponents,
        config,
        local,
    })
}

/// Recomputes a local fact and fails loudly if it does not hold.
pub fn confirm_local_fact(what: &str, alpha: i64, over: u64, expected: bool) -> Result<()> {
    for pl in GaussianPrime::above(over)? {
        if is_fourth_power_local(Gaussian::new(alpha, 0), &pl)? != expected {
            return Err(Error::LocalFactMismatch(format!("{what} (at {})", pl.label())));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(p: u64) -> Vec<GaussianPrime> {
        GaussianPrime::above(p).unwrap()
    }

    #[test]
    fn primes_above() {
        assert_eq!(at(17).iter().map(|x| x.label()).collect::<Vec<_>>(), vec!["4+i", "4-i"]);
        assert_eq!(
            at(13).iter().map(|x| x.label()).collect::<Vec<_>>(),
            vec!["3+2i", "3-2i"]
        );
        assert_eq!(at(7)[0].label(), "7");
        assert_eq!(at(2)[0].label(), "1+i");
        assert!(GaussianPrime::new(Gaussian::new(3, 3)).is_err());
        assert!(GaussianPrime::new(Gaussian::new(5, 0)).is_err());
    }

    #[test]
    fn quoted_local_facts() {
        for pl in at(13) {
            assert!(!is_fourth_power_local(Gaussian::new(17, 0), &pl).unwrap());
        }
        for pl in at(409) {
            assert!(is_fourth_power_local(Gaussian::new(17, 0), &pl).unwrap());
        }
        for pl in at(17) {
            assert!(is_fourth_power_local(Gaussian::new(409, 0), &pl).unwrap());
        }
        assert!(is_fourth_power_local(Gaussian::new(17, 0), &GaussianPrime::one_plus_i()).unwrap());
        assert!(!is_fourth_power_local(Gaussian::new(13, 0), &GaussianPrime::one_plus_i()).unwrap());
        for p in [2, 3, 5, 7, 13, 17] {
            for pl in at(p) {
                assert!(is_fourth_power_local(Gaussian::new(1, 0), &pl).unwrap());
            }
        }
    }

    #[test]
    fn valuations() {
        let pl = at(13)[0];
        assert_eq!(pl.valuation(Gaussian::new(13 * 13 * 5, 0)).0, 2);
        assert_eq!(GaussianPrime::one_plus_i().valuation(Gaussian::new(-4, 0)).0, 4);
        assert!(is_fourth_power_local(Gaussian::new(-4, 0), &GaussianPrime::one_plus_i()).unwrap());
        assert!(is_fourth_power_local(Gaussian::new(0, 0), &pl).is_err());
    }

    #[test]
    fn build_17_13() {
        let b = build(&[17, 17 * 13, 13]).unwrap();
        assert_eq!(b.generators, vec![17, 13]);
        assert_eq!(b.exponents, vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
        let labels: Vec<&str> = b.local.exceptional.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, vec!["1+i", "4+i", "4-i", "3+2i", "3-2i"]);
        // 17 is a fourth power at 1+i, so D pairs trivially with (1, 0).
        let d2 = &b.local.exceptional[0].d;
        assert!(d2.generators().iter().all(|g| g.0[0] == 0));
        // Over 13: 17 ≡ 4 is a square but not a fourth power, 13 is a uniformizer.
        let d13 = &b.local.exceptional[3].d;
        assert_eq!(d13.order(), 8);
        assert!(!d13.is_cyclic());
    }

    #[test]
    fn build_13_17_bicyclic() {
        let b = build(&[13, 17, 13 * 17 * 17]).unwrap();
        assert_eq!(b.exponents[2], vec![1, 2]);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(build(&[17, 13]), Err(Error::TooFewFields { .. })));
        assert!(matches!(
            build(&[17, 13, 17 * 17 * 17 * 17 * 13]),
            Err(Error::DuplicateField(1, 2))
        ));
        assert!(matches!(build(&[17, 13, 81]), Err(Error::InvalidRadicand(81, _))));
        assert!(matches!(build(&[17, 13, 6]), Err(Error::InvalidRadicand(6, _))));
        assert!(matches!(build(&[3, 5, 7, 11 * 13]), Err(Error::TooManyGenerators(5))));
        // 17^3 generates the same subgroup as 17.
        assert!(matches!(
            build(&[17, 13, 17 * 17 * 17]),
            Err(Error::DuplicateField(0, 2))
        ));
    }

    #[test]
    fn local_fact_confirmation() {
        assert!(confirm_local_fact("17 is not a fourth power in Q_13", 17, 13, false).is_ok());
        assert!(matches!(
            confirm_local_fact("wrong", 17, 13, true),
            Err(Error::LocalFactMismatch(_))
        ));
    }
}
