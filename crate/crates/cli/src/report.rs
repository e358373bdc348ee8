//! The document written by `compute`, `examples` and `kummer --compute`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use multinorm_core::local::LocalData;
use multinorm_core::oracle::{compute_g_and_gomega, DEFAULT_BUDGET};
use multinorm_core::report::{Method, ShaReport};
use multinorm_core::structure::{sha_trivial_criterion, ClassNode, Options, PatchingRow, Structure};
use multinorm_core::{validate_and_normalize, FieldConfig, NormalizedConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Derived constants of one normalized configuration. Field indices refer
/// to the normalized order; `input_index` maps them back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldTable {
    pub p: i64,
    pub group_exponents: Vec<u32>,
    pub labels: Vec<String>,
    pub input_index: Vec<usize>,
    pub pruned: Vec<String>,
    pub eps: Vec<u32>,
    pub e0: Vec<u32>,
    pub residue_exponents: Vec<u32>,
    pub eij: Vec<Vec<u32>>,
    pub u: BTreeMap<u32, Vec<usize>>,
    pub exceptional_places: Vec<PlaceRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceRow {
    pub label: String,
    pub invariants: Vec<u32>,
    pub cyclic: bool,
    pub generators: Vec<Vec<i64>>,
}

impl FieldTable {
    pub fn new(cfg: &NormalizedConfig, raw: &FieldConfig, local: &LocalData) -> Self {
        FieldTable {
            p: cfg.p(),
            group_exponents: cfg.group().exponents().to_vec(),
            labels: cfg.labels().to_vec(),
            input_index: cfg.permutation.clone(),
            pruned: cfg.pruned.iter().map(|&i| raw.labels[i].clone()).collect(),
            eps: cfg.eps.clone(),
            e0: cfg.e0.clone(),
            residue_exponents: cfg.e.clone(),
            eij: cfg.eij.clone(),
            u: cfg.u.clone(),
            exceptional_places: local
                .exceptional
                .iter()
                .map(|pl| PlaceRow {
                    label: pl.label.clone(),
                    invariants: pl.d.invariants(),
                    cyclic: pl.d.is_cyclic(),
                    generators: pl.d.generators().into_iter().map(|g| g.0).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartReport {
    pub label: String,
    pub fields: FieldTable,
    /// Whether the closed-form triviality criterion for `Ш_ω` holds.
    pub sha_omega_trivial_criterion: bool,
    pub oracle: Option<ShaReport>,
    pub formula: Option<ShaReport>,
    pub result: ShaReport,
    pub patching: Vec<PatchingRow>,
    pub nodes: Vec<ClassNode>,
    pub timing_ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub p: i64,
    pub exponent: u32,
}

/// Direct sum over the parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Total {
    pub sha: Vec<Factor>,
    pub sha_omega: Vec<Factor>,
    pub quotient: Option<Vec<Factor>>,
    pub sha_order: u128,
    pub sha_omega_order: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub method: Method,
    pub parts: Vec<PartReport>,
    pub total: Total,
    pub agreement: Option<bool>,
    pub timing_ms: u64,
}

/// Input to [`run`]: one prime piece.
pub struct Job<'a> {
    pub label: String,
    pub config: &'a FieldConfig,
    pub local: &'a LocalData,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub method: Method,
    pub budget: Option<u128>,
    pub debug_monotonicity: bool,
}

pub fn run_part(job: &Job, opts: RunOptions) -> Result<PartReport, CliError> {
    let t = Instant::now();
    let cfg = validate_and_normalize(job.config)?;
    let structure = Structure::compute(
        &cfg,
        job.local,
        Options {
            debug_monotonicity: opts.debug_monotonicity,
        },
    )?;
    let formula = structure.report();
    let oracle = match opts.method {
        Method::Formula => None,
        Method::Oracle | Method::Both => {
            let budget = opts.budget.unwrap_or(DEFAULT_BUDGET);
            Some(compute_g_and_gomega(&cfg, job.local, budget)?.report()?)
        }
    };
    let result = match (opts.method, &oracle) {
        (Method::Oracle, Some(o)) => o.clone(),
        (Method::Both, Some(o)) => ShaReport::merge(o, &formula),
        _ => formula.clone(),
    };
    Ok(PartReport {
        label: job.label.clone(),
        fields: FieldTable::new(&cfg, job.config, job.local),
        sha_omega_trivial_criterion: sha_trivial_criterion(&cfg)?,
        oracle,
        formula: (opts.method != Method::Oracle).then_some(formula),
        result,
        patching: structure.patching,
        nodes: structure.nodes,
        timing_ms: t.elapsed().as_millis() as u64,
    })
}

fn factors(p: i64, inv: &[u32]) -> Vec<Factor> {
    inv.iter().map(|&exponent| Factor { p, exponent }).collect()
}

fn order(f: &[Factor]) -> u128 {
    f.iter().map(|x| (x.p as u128).pow(x.exponent)).product()
}

pub fn run(jobs: &[Job], opts: RunOptions) -> Result<ReportDocument, CliError> {
    let t = Instant::now();
    let parts = jobs.iter().map(|j| run_part(j, opts)).collect::<Result<Vec<_>, _>>()?;
    let mut sha = Vec::new();
    let mut sha_omega = Vec::new();
    let mut quotient = Some(Vec::new());
    for part in &parts {
        let p = part.fields.p;
        sha.extend(factors(p, &part.result.sha_invariants));
        sha_omega.extend(factors(p, &part.result.sha_omega_invariants));
        quotient = match (quotient, &part.result.quotient_invariants) {
            (Some(mut q), Some(inv)) => {
                q.extend(factors(p, inv));
                Some(q)
            }
            _ => None,
        };
    }
    let agreement = (opts.method == Method::Both).then(|| parts.iter().all(|p| p.result.agreement == Some(true)));
    Ok(ReportDocument {
        method: opts.method,
        total: Total {
            sha_order: order(&sha),
            sha_omega_order: order(&sha_omega),
            sha,
            sha_omega,
            quotient,
        },
        parts,
        agreement,
        timing_ms: t.elapsed().as_millis() as u64,
    })
}

/// `Z/p^a ⊕ Z/p^b ⊕ …`, or `0`.
pub fn group_string(p: i64, inv: &[u32]) -> String {
    if inv.is_empty() {
        return "0".into();
    }
    inv.iter()
        .map(|&e| format!("Z/{}", (p as u128).pow(e)))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn factors_string(f: &[Factor]) -> String {
    if f.is_empty() {
        return "0".into();
    }
    f.iter()
        .map(|x| format!("Z/{}", (x.p as u128).pow(x.exponent)))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn render_fields(out: &mut String, t: &FieldTable) {
    let _ = writeln!(out, "  p = {}, A = {:?}", t.p, t.group_exponents);
    for (i, label) in t.labels.iter().enumerate() {
        let _ = writeln!(
            out,
            "  K{i} = {label:<10} input #{:<3} eps = {}  e0 = {}{}",
            t.input_index[i],
            t.eps[i],
            t.e0[i],
            if i > 0 {
                format!("  e = {}", t.residue_exponents[i])
            } else {
                String::new()
            }
        );
    }
    if !t.pruned.is_empty() {
        let _ = writeln!(out, "  pruned: {}", t.pruned.join(", "));
    }
    for (r, members) in &t.u {
        let _ = writeln!(out, "  U_{r} = {members:?}");
    }
    for pl in &t.exceptional_places {
        let _ = writeln!(
            out,
            "  place {:<8} D = {}{}",
            pl.label,
            group_string(t.p, &pl.invariants),
            if pl.cyclic { "" } else { "  non-cyclic" }
        );
    }
}

pub fn render(doc: &ReportDocument) -> String {
    let mut out = String::new();
    for part in &doc.parts {
        let p = part.fields.p;
        let _ = writeln!(out, "[{}]", part.label);
        render_fields(&mut out, &part.fields);
        for row in &part.patching {
            let _ = writeln!(
                out,
                "  r = {}: members {:?}, delta_omega = {}, delta = {}",
                row.r, row.members, row.delta_omega, row.delta
            );
        }
        for n in &part.nodes {
            let _ = writeln!(
                out,
                "  node r = {} {:?} level {} children {:?}: f_omega = {}, f = {}",
                n.r, n.members, n.level, n.children, n.f_omega, n.f
            );
        }
        let _ = writeln!(
            out,
            "  criterion for trivial Sha_omega: {}",
            part.sha_omega_trivial_criterion
        );
        for (name, rep) in [("oracle", &part.oracle), ("formula", &part.formula)] {
            if let Some(r) = rep {
                let _ = writeln!(
                    out,
                    "  {name:<8} Sha = {}, Sha_omega = {}",
                    group_string(p, &r.sha_invariants),
                    group_string(p, &r.sha_omega_invariants)
                );
            }
        }
        if let Some(q) = &part.result.quotient_invariants {
            let _ = writeln!(out, "  Sha_omega/Sha = {}", group_string(p, q));
        }
        if let Some(gens) = &part.result.generators {
            for c in gens {
                let _ = writeln!(
                    out,
                    "  generator {}: omega {:?}, ordinary {:?}",
                    c.node, c.omega.0, c.ordinary.0
                );
            }
        }
        if let Some(a) = part.result.agreement {
            let _ = writeln!(out, "  agreement: {}", if a { "yes" } else { "NO" });
        }
        let _ = writeln!(out, "  time: {} ms", part.timing_ms);
    }
    let t = &doc.total;
    let _ = writeln!(out, "Sha       = {} (order {})", factors_string(&t.sha), t.sha_order);
    let _ = writeln!(
        out,
        "Sha_omega = {} (order {})",
        factors_string(&t.sha_omega),
        t.sha_omega_order
    );
    if let Some(q) = &t.quotient {
        let _ = writeln!(out, "Sha_omega/Sha = {}", factors_string(q));
    }
    if let Some(a) = doc.agreement {
        let _ = writeln!(out, "agreement: {}", if a { "yes" } else { "NO" });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use multinorm_core::catalog::example;

    fn doc(name: &str, method: Method) -> ReportDocument {
        let ex = example(name).unwrap();
        let jobs: Vec<Job> = ex
            .parts
            .iter()
            .map(|p| Job {
                label: p.label.clone(),
                config: &p.config,
                local: &p.local,
            })
            .collect();
        run(
            &jobs,
            RunOptions {
                method,
                budget: None,
                debug_monotonicity: true,
            },
        )
        .unwrap()
    }

    #[test]
    fn bicyclic_example_document() {
        let d = doc("13-17-bicyclic", Method::Both);
        assert_eq!(d.agreement, Some(true));
        assert_eq!(d.total.sha_order, 2);
        assert_eq!(d.total.sha_omega_order, 2);
        assert!(render(&d).contains("Sha_omega = Z/2"));
    }

    #[test]
    fn method_selection() {
        let o = doc("17-13", Method::Oracle);
        assert!(o.parts[0].formula.is_none() && o.agreement.is_none());
        let f = doc("17-13", Method::Formula);
        assert!(f.parts[0].oracle.is_none() && f.total.quotient.is_none());
        assert_eq!(o.total.sha, f.total.sha);
    }

    #[test]
    fn json_round_trip() {
        let d = doc("cyclotomic", Method::Both);
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<ReportDocument>(&text).unwrap(), d);
    }

    #[test]
    fn group_strings() {
        assert_eq!(group_string(2, &[]), "0");
        assert_eq!(group_string(3, &[2, 1]), "Z/9 + Z/3");
    }
}
