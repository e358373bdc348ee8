//! Random configurations and the oracle/formula cross-check run on them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{validate_and_normalize, FieldConfig, NormalizedConfig};
use crate::group::{Character, PGroup, Subgroup};
use crate::local::{Classification, LocalData};
use crate::oracle::{aprime, compute_g_and_gomega, DEFAULT_BUDGET};
use crate::report::ShaReport;
use crate::residue::ResidueVector;
use crate::structure::{shortcut_bicyclic_subfields, shortcut_linearly_disjoint, Options, Structure};

pub const MAX_ORDER: u64 = 729;

#[derive(Clone, Debug)]
pub struct Instance {
    pub config: FieldConfig,
    pub local: LocalData,
}

impl Instance {
    /// One-line dump sufficient to rebuild the instance.
    pub fn describe(&self) -> String {
        let g = &self.config.group;
        let chars: Vec<String> = self
            .config
            .chars
            .iter()
            .map(|c| format!("{}:{:?}", c.target(), c.coeffs()))
            .collect();
        let places: Vec<String> = self
            .local
            .exceptional
            .iter()
            .map(|pl| {
                format!(
                    "{}:{:?}",
                    pl.label,
                    pl.d.generators().iter().map(|e| e.0.clone()).collect::<Vec<_>>()
                )
            })
            .collect();
        format!(
            "p={} exponents={:?} chars=[{}] places=[{}]",
            g.p(),
            g.exponents(),
            chars.join(" "),
            places.join(" ")
        )
    }
}

fn random_group(rng: &mut ChaCha8Rng, p: u64, min_rank: usize) -> std::sync::Arc<PGroup> {
    loop {
        let rank = rng.gen_range(min_rank..=4);
        let mut exps: Vec<u32> = (0..rank).map(|_| rng.gen_range(1..=3)).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        if let Ok(a) = PGroup::with_cap(p, exps, MAX_ORDER) {
            return a;
        }
    }
}

fn random_character(rng: &mut ChaCha8Rng, a: &std::sync::Arc<PGroup>, target: u32) -> Character {
    let p = a.p();
    let modulus = p.pow(target);
    loop {
        let coeffs: Vec<i64> = a
            .exponents()
            .iter()
            .map(|&n| p.pow(target.saturating_sub(n)) * rng.gen_range(0..modulus) % modulus)
            .collect();
        let c = Character::new(a, target, &coeffs).expect("well defined by construction");
        if c.is_surjective() {
            return c;
        }
    }
}

/// A character agreeing with `base` to high order, so that fields overlap.
fn nearby_character(rng: &mut ChaCha8Rng, a: &std::sync::Arc<PGroup>, base: &Character) -> Character {
    let p = a.p();
    let target = base.target();
    let shift = rng.gen_range(1..=target);
    let noise = random_character(rng, a, target);
    let unit = loop {
        let u = rng.gen_range(1..p.pow(target));
        if u % p != 0 {
            break u;
        }
    };
    let coeffs: Vec<i64> = base
        .coeffs()
        .iter()
        .zip(noise.coeffs())
        .map(|(&x, &y)| (unit * x + p.pow(shift) * y).rem_euclid(p.pow(target)))
        .collect();
    match Character::new(a, target, &coeffs) {
        Ok(c) if c.is_surjective() => c,
        _ => random_character(rng, a, target),
    }
}

fn random_places(rng: &mut ChaCha8Rng, a: &std::sync::Arc<PGroup>, max: usize) -> LocalData {
    let count = rng.gen_range(0..=max);
    let places = (0..count)
        .map(|k| {
            let gens: Vec<Vec<i64>> = (0..rng.gen_range(1..=2))
                .map(|_| a.moduli().iter().map(|&m| rng.gen_range(0..m)).collect())
                .collect();
            (format!("v{k}"), Subgroup::span(a, &gens))
        })
        .collect();
    LocalData::new(places).expect("distinct labels")
}

fn finish(config: FieldConfig, local: LocalData) -> Option<(Instance, NormalizedConfig)> {
    let cfg = validate_and_normalize(&config).ok()?;
    Some((Instance { config, local }, cfg))
}

/// Random instance: `p ∈ {2, 3}`, `|A| ≤ 729`, 3 to 5 fields, up to 3
/// exceptional places.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (Instance, NormalizedConfig) {
    loop {
        let p = *[2u64, 3].choose(rng).unwrap();
        let a = random_group(rng, p, 1);
        let k = rng.gen_range(3..=5);
        let mut chars: Vec<Character> = Vec::with_capacity(k);
        for _ in 0..k {
            let c = if !chars.is_empty() && rng.gen_bool(0.5) {
                let base = chars.choose(rng).unwrap().clone();
                nearby_character(rng, &a, &base)
            } else {
                let target = rng.gen_range(1..=a.exponent());
                random_character(rng, &a, target)
            };
            chars.push(c);
        }
        let local = random_places(rng, &a, 3);
        let config = FieldConfig::with_default_labels(a, chars).expect("same ambient");
        if let Some(out) = finish(config, local) {
            return out;
        }
    }
}

/// Instance where `K_0, …, K_m` are pairwise disjoint.
pub fn random_linearly_disjoint(rng: &mut ChaCha8Rng) -> (Instance, NormalizedConfig) {
    loop {
        let (inst, cfg) = random_instance(rng);
        let m = cfg.m();
        let disjoint = (0..=m).all(|i| (i + 1..=m).all(|j| cfg.eij[i][j] == 0));
        if disjoint && inst.config.chars.len() == cfg.m() + 1 {
            return (inst, cfg);
        }
    }
}

/// Instance whose fields are distinct cyclic degree-`p^n` subfields of a
/// `(Z/p^n)^2` extension.
pub fn random_bicyclic_subfields(rng: &mut ChaCha8Rng) -> (Instance, NormalizedConfig) {
    loop {
        let p = *[2u64, 3].choose(rng).unwrap();
        let n = rng.gen_range(1..=if p == 2 { 3 } else { 2 });
        let a = PGroup::with_cap(p, vec![n, n], MAX_ORDER).expect("small");
        let k = rng.gen_range(3..=5);
        let mut chars: Vec<Character> = Vec::new();
        let mut kernels: Vec<Subgroup> = Vec::new();
        for _ in 0..40 {
            if chars.len() == k {
                break;
            }
            let c = if !chars.is_empty() && rng.gen_bool(0.5) {
                let base = chars.choose(rng).unwrap().clone();
                nearby_character(rng, &a, &base)
            } else {
                random_character(rng, &a, n)
            };
            let h = c.kernel();
            if !kernels.contains(&h) {
                kernels.push(h);
                chars.push(c);
            }
        }
        if chars.len() < 3 {
            continue;
        }
        let local = random_places(rng, &a, 3);
        let config = FieldConfig::with_default_labels(a, chars).expect("same ambient");
        if let Some(out) = finish(config, local) {
            return out;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub description: String,
    pub oracle: ShaReport,
    pub formula: ShaReport,
    pub agree: bool,
    pub violations: Vec<String>,
}

/// Runs both routes and every structural check on one instance.
pub fn check_instance(inst: &Instance, cfg: &NormalizedConfig, rng: &mut ChaCha8Rng) -> Result<CaseReport> {
    let local = &inst.local;
    let o = compute_g_and_gomega(cfg, local, DEFAULT_BUDGET)?;
    let s = Structure::compute(
        cfg,
        local,
        Options {
            debug_monotonicity: true,
        },
    )?;
    let oracle = o.report()?;
    let formula = s.report();
    let agree =
        oracle.sha_invariants == formula.sha_invariants && oracle.sha_omega_invariants == formula.sha_omega_invariants;
    let mut v = Vec::new();

    if !(o.d.is_subgroup_of(&o.g)? && o.g.is_subgroup_of(&o.g_omega)?) {
        v.push("D ⊆ G ⊆ G_ω fails".to_string());
    }
    v.extend(s.bound_violations());
    v.extend(s.expression_violations(cfg)?);

    for (ordinary, host, name) in [(false, &o.g_omega, "G_ω"), (true, &o.g, "G")] {
        let mut log = o.d.log_order();
        for row in &s.patching {
            let bound = if ordinary { row.delta } else { row.delta_omega };
            log += o.patchable_part(cfg, row.r, bound, ordinary)?.log_order();
        }
        if log != host.log_order() {
            v.push(format!("|{name}| = p^{} but |D|·∏|G̃| = p^{log}", host.log_order()));
        }
    }

    let mut span_omega = vec![vec![1i64; cfg.m()]];
    let mut span_g = span_omega.clone();
    for c in &s.generators {
        if o.classify(&c.omega) == Classification::Outside {
            v.push(format!("x^ω for {} is not in G_ω", c.node));
        }
        if o.classify(&c.ordinary) != Classification::InG {
            v.push(format!("x for {} is not in G", c.node));
        }
        span_omega.push(c.omega.0.clone());
        span_g.push(c.ordinary.0.clone());
    }
    if Subgroup::span(&o.ambient, &span_omega) != o.g_omega {
        v.push("D and the x^ω do not span G_ω".into());
    }
    if Subgroup::span(&o.ambient, &span_g) != o.g {
        v.push("D and the x do not span G".into());
    }

    let gens = o.g_omega.generators();
    if o.g_omega != o.d {
        for _ in 0..16 {
            let mut a = o.ambient.zero();
            for g in &gens {
                a = o
                    .ambient
                    .add(&a, &o.ambient.scale(g, rng.gen_range(0..o.ambient.moduli()[0])));
            }
            let a = ResidueVector(a.0);
            if o.in_d(&a) {
                continue;
            }
            let was_g = o.classify(&a) == Classification::InG;
            match aprime(cfg, &o, &a) {
                Ok(b) => {
                    if was_g && o.classify(&b) != Classification::InG {
                        v.push(format!("a′ of {:?} left G", a.0));
                    }
                }
                Err(e) => v.push(format!("a′ of {:?}: {e}", a.0)),
            }
        }
    }

    Ok(CaseReport {
        description: inst.describe(),
        oracle,
        formula,
        agree,
        violations: v,
    })
}

/// Shortcut formulas against both general routes.
pub fn check_shortcut(inst: &Instance, cfg: &NormalizedConfig, linearly_disjoint: bool) -> Result<Vec<String>> {
    let o = compute_g_and_gomega(cfg, &inst.local, DEFAULT_BUDGET)?.report()?;
    let s = Structure::compute(cfg, &inst.local, Options::default())?.report();
    let mut out = Vec::new();
    let mut cmp = |name: &str, got: &[u32], want_o: &[u32], want_s: &[u32]| {
        if got != want_o || got != want_s {
            out.push(format!(
                "{name}: shortcut {got:?}, oracle {want_o:?}, formula {want_s:?}"
            ));
        }
    };
    if linearly_disjoint {
        let (w, g) = shortcut_linearly_disjoint(cfg, &inst.local)?;
        cmp("Ш_ω", &w, &o.sha_omega_invariants, &s.sha_omega_invariants);
        cmp("Ш", &g, &o.sha_invariants, &s.sha_invariants);
    } else {
        let w = shortcut_bicyclic_subfields(cfg)?;
        cmp("Ш_ω", &w, &o.sha_omega_invariants, &s.sha_omega_invariants);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: usize,
    pub description: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub count: usize,
    pub agreements: usize,
    pub disagreements: Vec<Failure>,
    pub violations: Vec<Failure>,
    pub errors: Vec<Failure>,
}

impl Summary {
    pub fn all_good(&self) -> bool {
        self.agreements == self.count && self.violations.is_empty() && self.errors.is_empty()
    }
}

pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

/// `count` random cases, each with its own deterministic stream.
pub fn run(seed: u64, count: usize) -> Summary {
    let results: Vec<(usize, String, Result<CaseReport>)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(seed, k);
            let (inst, cfg) = random_instance(&mut rng);
            let r = check_instance(&inst, &cfg, &mut rng);
            (k, inst.describe(), r)
        })
        .collect();
    let mut s = Summary {
        seed,
        count,
        ..Default::default()
    };
    for (case, description, r) in results {
        match r {
            Ok(rep) => {
                if rep.agree {
                    s.agreements += 1;
                } else {
                    s.disagreements.push(Failure {
                        case,
                        description: description.clone(),
                        reason: format!(
                            "oracle Ш={:?} Ш_ω={:?}, formula Ш={:?} Ш_ω={:?}",
                            rep.oracle.sha_invariants,
                            rep.oracle.sha_omega_invariants,
                            rep.formula.sha_invariants,
                            rep.formula.sha_omega_invariants
                        ),
                    });
                }
                for reason in rep.violations {
                    s.violations.push(Failure {
                        case,
                        description: description.clone(),
                        reason,
                    });
                }
            }
            Err(e) => s.errors.push(Failure {
                case,
                description,
                reason: e.to_string(),
            }),
        }
    }
    s
}

/// Shortcut consistency over `count` instances of one shape.
pub fn run_shortcuts(seed: u64, count: usize, linearly_disjoint: bool) -> Vec<Failure> {
    (0..count)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = case_rng(seed, k);
            let (inst, cfg) = if linearly_disjoint {
                random_linearly_disjoint(&mut rng)
            } else {
                random_bicyclic_subfields(&mut rng)
            };
            let reasons = match check_shortcut(&inst, &cfg, linearly_disjoint) {
                Ok(r) => r,
                Err(e) => vec![e.to_string()],
            };
            let d = inst.describe();
            reasons.into_iter().map(move |reason| Failure {
                case: k,
                description: d.clone(),
                reason,
            })
        })
        .collect()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            case: 0,
            description: String::new(),
            reason: e.to_string(),
        }
    }
}
