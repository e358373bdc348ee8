#![allow(dead_code)]

use std::collections::HashSet;
use std::time::{Duration, Instant};

use multinorm_core::catalog::example;
use multinorm_core::kummer::{is_fourth_power_local, Gaussian, GaussianPrime};
use multinorm_core::oracle::{compute_g_and_gomega, DEFAULT_BUDGET};
use multinorm_core::report::ShaReport;
use multinorm_core::structure::{sha_trivial_criterion, Options, Structure};
use multinorm_core::{validate_and_normalize, NormalizedConfig};

pub struct PartRun {
    pub label: String,
    pub cfg: NormalizedConfig,
    pub oracle: ShaReport,
    pub structure: Structure,
    pub criterion: bool,
}

/// Runs every prime piece of a catalog example through both routes.
pub fn run_example(name: &str) -> (Vec<PartRun>, Duration) {
    let t = Instant::now();
    let ex = example(name).expect("catalog example");
    let parts = ex
        .parts
        .iter()
        .map(|part| {
            let cfg = validate_and_normalize(&part.config).expect("valid");
            let oracle = compute_g_and_gomega(&cfg, &part.local, DEFAULT_BUDGET)
                .unwrap()
                .report()
                .unwrap();
            let structure = Structure::compute(
                &cfg,
                &part.local,
                Options {
                    debug_monotonicity: true,
                },
            )
            .unwrap();
            let criterion = sha_trivial_criterion(&cfg).unwrap();
            PartRun {
                label: part.label.clone(),
                cfg,
                oracle,
                structure,
                criterion,
            }
        })
        .collect();
    (parts, t.elapsed())
}

fn odd_primes_below(n: u64) -> impl Iterator<Item = u64> {
    (3..n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
}

/// Split primes: the test at both primes above `p` against `{x^4 mod p}`.
pub fn split_prime_mismatches(bound: u64) -> Vec<String> {
    let mut out = Vec::new();
    for p in odd_primes_below(bound).filter(|p| p % 4 == 1) {
        let fourth: HashSet<u64> = (1..p).map(|x| x * x % p * x % p * x % p).collect();
        for pl in GaussianPrime::above(p).unwrap() {
            for r in 1..p {
                let got = is_fourth_power_local(Gaussian::new(r as i64, 0), &pl).unwrap();
                if got != fourth.contains(&r) {
                    out.push(format!("{r} at {}", pl.label()));
                }
            }
        }
    }
    out
}

/// Inert primes: every unit of `F_q[i]` against the set of fourth powers.
pub fn inert_prime_mismatches(bound: u64) -> Vec<String> {
    let mut out = Vec::new();
    for q in odd_primes_below(bound).filter(|p| p % 4 == 3) {
        let q = q as i64;
        let mul = |a: (i64, i64), b: (i64, i64)| {
            (
                (a.0 * b.0 - a.1 * b.1).rem_euclid(q),
                (a.0 * b.1 + a.1 * b.0).rem_euclid(q),
            )
        };
        let mut fourth = HashSet::new();
        for x in 0..q {
            for y in 0..q {
                if (x, y) != (0, 0) {
                    let s = mul((x, y), (x, y));
                    fourth.insert(mul(s, s));
                }
            }
        }
        let pl = GaussianPrime::new(Gaussian::new(q, 0)).unwrap();
        for x in 0..q {
            for y in 0..q {
                if (x, y) == (0, 0) {
                    continue;
                }
                let got = is_fourth_power_local(Gaussian::new(x, y), &pl).unwrap();
                if got != fourth.contains(&(x, y)) {
                    out.push(format!("{x}+{y}i at {q}"));
                }
            }
        }
    }
    out
}

/// Every unit residue modulo `(1+i)^9` against fourth powers modulo
/// `2^8 = (1+i)^16`, checking each residue through several lifts.
pub fn ramified_mismatches() -> Vec<String> {
    let m = 256i64;
    let mul = |a: (i64, i64), b: (i64, i64)| {
        (
            (a.0 * b.0 - a.1 * b.1).rem_euclid(m),
            (a.0 * b.1 + a.1 * b.0).rem_euclid(m),
        )
    };
    let mut fourth = HashSet::new();
    for x in 0..m {
        for y in 0..m {
            if (x + y) % 2 == 1 {
                let s = mul((x, y), (x, y));
                fourth.insert(mul(s, s));
            }
        }
    }
    let mut out = Vec::new();
    let pl = GaussianPrime::one_plus_i();
    // Residues mod 32 cover residues mod (1+i)^9 = 16(1+i).
    for a in 0..32 {
        for b in 0..32 {
            if (a + b) % 2 == 0 {
                continue;
            }
            let got = is_fourth_power_local(Gaussian::new(a, b), &pl).unwrap();
            // Lifts by multiples of (1+i)^9 = 16 + 16i and of 32.
            for t in 0..4i64 {
                for s in 0..4i64 {
                    let lift = ((a + 16 * t + 32 * s).rem_euclid(m), (b + 16 * t).rem_euclid(m));
                    if fourth.contains(&lift) != got {
                        out.push(format!("{a}+{b}i (lift {lift:?})"));
                    }
                }
            }
        }
    }
    out
}

pub fn quoted_local_facts() -> Vec<String> {
    let mut bad = Vec::new();
    let test = |alpha: i64, p: u64| {
        GaussianPrime::above(p)
            .unwrap()
            .iter()
            .map(|pl| is_fourth_power_local(Gaussian::new(alpha, 0), pl).unwrap())
            .collect::<Vec<_>>()
    };
    if test(17, 13).iter().any(|&x| x) {
        bad.push("17 should not be a fourth power in Q_13".to_string());
    }
    if !test(17, 409).iter().all(|&x| x) || !test(409, 17).iter().all(|&x| x) {
        bad.push("17 and 409 should be quartic residues of each other".to_string());
    }
    if !test(17, 2).iter().all(|&x| x) {
        bad.push("17 should be a fourth power in Q_2".to_string());
    }
    bad
}
