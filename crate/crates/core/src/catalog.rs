//! Built-in example configurations.

use crate::arith::{pow_mod, prime_factors};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::group::{Character, PGroup, Subgroup};
use crate::kummer::{self, confirm_local_fact};
use crate::local::LocalData;

pub const NAMES: [&str; 4] = ["17-13", "17-409", "13-17-bicyclic", "cyclotomic"];

/// One prime-power piece of an example.
#[derive(Clone, Debug)]
pub struct ExamplePart {
    pub label: String,
    pub config: FieldConfig,
    pub local: LocalData,
}

#[derive(Clone, Debug)]
pub struct Example {
    pub name: String,
    pub description: String,
    pub parts: Vec<ExamplePart>,
}

fn kummer_example(name: &str, description: &str, radicands: &[i64]) -> Result<Example> {
    let b = kummer::build(radicands)?;
    Ok(Example {
        name: name.into(),
        description: description.into(),
        parts: vec![ExamplePart {
            label: "p=2".into(),
            config: b.config,
            local: b.local,
        }],
    })
}

pub fn example(name: &str) -> Result<Example> {
    match name {
        "17-13" => {
            confirm_local_fact("17 is not a fourth power in Q_13", 17, 13, false)?;
            kummer_example(
                name,
                "k = Q(i); K_0 = k(⁴√17), K_1 = k(⁴√(17·13)), K_2 = k(⁴√13)",
                &[17, 17 * 13, 13],
            )
        }
        "17-409" => {
            confirm_local_fact("17 is a fourth power in Q_409", 17, 409, true)?;
            confirm_local_fact("409 is a fourth power in Q_17", 409, 17, true)?;
            confirm_local_fact("17 is a fourth power in Q_2", 17, 2, true)?;
            kummer_example(
                name,
                "k = Q(i); K_0 = k(⁴√17), K_1 = k(⁴√(17·409)), K_2 = k(⁴√409)",
                &[17, 17 * 409, 409],
            )
        }
        "13-17-bicyclic" => kummer_example(
            name,
            "k = Q(i); K_0 = k(⁴√13), K_1 = k(⁴√17), K_2 = k(⁴√(13·17²))",
            &[13, 17, 13 * 17 * 17],
        ),
        "cyclotomic" => cyclotomic(&[(5, 1), (13, 1), (17, 1), (7, 1), (3, 3)]),
        other => Err(Error::UnknownExample(other.into())),
    }
}

fn euler_phi(q: u64, n: u32) -> u64 {
    q.pow(n - 1) * (q - 1)
}

fn primitive_root(m: u64, phi: u64) -> u64 {
    let factors = prime_factors(phi);
    (2..m)
        .find(|&g| g % m != 0 && factors.iter().all(|&(r, _)| pow_mod(g, phi / r, m) != 1) && pow_mod(g, phi, m) == 1)
        .expect("odd prime powers have primitive roots")
}

fn discrete_log(x: u64, g: u64, m: u64, phi: u64) -> u64 {
    let mut acc = 1 % m;
    for k in 0..phi {
        if acc == x % m {
            return k;
        }
        acc = acc * g % m;
    }
    unreachable!("unit modulo {m}")
}

/// `K_i = Q(ζ_{q_i^{n_i}})` for distinct odd primes `q_i`, split into the
/// ℓ-primary pieces `K_i(ℓ)` (the subfield of degree `ℓ^{v_ℓ(φ(q_i^{n_i}))}`).
/// The pieces are linearly disjoint, so `A` is the product of their groups
/// and each `χ_i` is a coordinate projection. The only ramified places are
/// the `q_i`, with decomposition group generated by the inertia coordinate
/// and the Frobenius of `q_i` in the other fields.
pub fn cyclotomic(fields: &[(u64, u32)]) -> Result<Example> {
    let mut ells: Vec<u64> = fields
        .iter()
        .flat_map(|&(q, n)| prime_factors(euler_phi(q, n)))
        .map(|(l, _)| l)
        .collect();
    ells.sort_unstable();
    ells.dedup();
    let mut parts = Vec::new();
    for ell in ells {
        let mut pieces: Vec<(usize, u32)> = fields
            .iter()
            .enumerate()
            .map(|(k, &(q, n))| {
                (
                    k,
                    prime_factors(euler_phi(q, n))
                        .into_iter()
                        .find(|&(l, _)| l == ell)
                        .map_or(0, |x| x.1),
                )
            })
            .filter(|&(_, e)| e > 0)
            .collect();
        if pieces.len() < 3 {
            return Err(Error::TooFewFields {
                remaining: pieces.len(),
            });
        }
        // Coordinates in non-increasing exponent order; fields keep input order.
        let mut coords = pieces.clone();
        coords.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let a = PGroup::new(ell, coords.iter().map(|c| c.1).collect())?;
        let coord_of = |k: usize| coords.iter().position(|c| c.0 == k).expect("present");
        let rank = coords.len();
        let mut chars = Vec::new();
        let mut labels = Vec::new();
        for &(k, e) in &pieces {
            let mut c = vec![0i64; rank];
            c[coord_of(k)] = 1;
            chars.push(Character::new(&a, e, &c)?);
            let (q, n) = fields[k];
            labels.push(format!("Q(ζ_{})({ell})", q.pow(n)));
        }
        let mut places = Vec::new();
        for &(i, _) in &pieces {
            let qi = fields[i].0;
            let mut inertia = vec![0i64; rank];
            inertia[coord_of(i)] = 1;
            let mut frob = vec![0i64; rank];
            for &(j, ej) in &pieces {
                if j == i {
                    continue;
                }
                let (qj, nj) = fields[j];
                let m = qj.pow(nj);
                let phi = euler_phi(qj, nj);
                let g = primitive_root(m, phi);
                frob[coord_of(j)] = (discrete_log(qi, g, m, phi) % ell.pow(ej)) as i64;
            }
            places.push((format!("{qi}"), Subgroup::span(&a, &[inertia, frob])));
        }
        pieces.sort();
        parts.push(ExamplePart {
            label: format!("p={ell}"),
            config: FieldConfig::new(a, chars, labels)?,
            local: LocalData::new(places)?,
        });
    }
    let names: Vec<String> = fields.iter().map(|&(q, n)| format!("Q(ζ_{})", q.pow(n))).collect();
    Ok(Example {
        name: "cyclotomic".into(),
        description: format!("k = Q; K_i = {}", names.join(", ")),
        parts,
    })
}

pub fn all() -> Result<Vec<Example>> {
    NAMES.iter().map(|n| example(n)).collect()
}
