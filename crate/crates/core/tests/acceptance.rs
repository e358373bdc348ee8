//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::run_example;
use multinorm_core::selftest::{run, run_shortcuts};

const SEED: u64 = 20240501;

struct Outcome {
    ok: bool,
    detail: String,
}

fn golden(name: &str, omega: &[u32], sha: &[u32]) -> Outcome {
    let (parts, t) = run_example(name);
    let p = &parts[0];
    let ok = p.oracle.sha_omega_invariants == omega
        && p.oracle.sha_invariants == sha
        && p.structure.sha_omega == omega
        && p.structure.sha == sha
        && t.as_secs_f64() < 1.0;
    Outcome {
        ok,
        detail: format!(
            "oracle Ш_ω={:?} Ш={:?}, formula Ш_ω={:?} Ш={:?}, expected {:?}/{:?}, {:.1} ms",
            p.oracle.sha_omega_invariants,
            p.oracle.sha_invariants,
            p.structure.sha_omega,
            p.structure.sha,
            omega,
            sha,
            t.as_secs_f64() * 1e3
        ),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    results.push((1, "golden 17-13", golden("17-13", &[2], &[1])));
    results.push((2, "golden 17-409", golden("17-409", &[2], &[2])));

    let mut c3 = golden("13-17-bicyclic", &[1], &[1]);
    let (parts, _) = run_example("13-17-bicyclic");
    let delta1 = parts[0].structure.row(1).map(|r| r.delta);
    c3.ok &= delta1 == Some(2);
    c3.detail.push_str(&format!(", Δ_1={delta1:?}"));
    results.push((3, "golden 13-17-bicyclic", c3));

    let (parts, t) = run_example("cyclotomic");
    let ok4 = parts.len() == 2
        && parts.iter().all(|p| {
            p.criterion
                && p.structure.sha_omega.is_empty()
                && p.structure.sha.is_empty()
                && p.oracle.sha_omega_invariants.is_empty()
                && p.oracle.sha_invariants.is_empty()
        });
    let d4: Vec<String> = parts
        .iter()
        .map(|p| {
            format!(
                "{}: criterion={} formula {:?}/{:?} oracle {:?}/{:?}",
                p.label,
                p.criterion,
                p.structure.sha_omega,
                p.structure.sha,
                p.oracle.sha_omega_invariants,
                p.oracle.sha_invariants
            )
        })
        .collect();
    results.push((
        4,
        "golden cyclotomic",
        Outcome {
            ok: ok4,
            detail: format!("{}; {:.1} ms", d4.join("; "), t.as_secs_f64() * 1e3),
        },
    ));

    let t = Instant::now();
    let summary = run(SEED, 500);
    let elapsed = t.elapsed().as_secs_f64();
    let mut d5 = format!(
        "{}/{} agree, {} errors, {:.2} s",
        summary.agreements,
        summary.count,
        summary.errors.len(),
        elapsed
    );
    for f in summary.disagreements.iter().chain(&summary.errors).take(3) {
        d5.push_str(&format!("; case {} [{}] {}", f.case, f.description, f.reason));
    }
    let ok5 = summary.agreements == summary.count && summary.errors.is_empty() && elapsed < 120.0;
    results.push((
        5,
        "oracle-formula equivalence (500 random)",
        Outcome { ok: ok5, detail: d5 },
    ));

    let mut d6 = format!("{} violations over {} cases", summary.violations.len(), summary.count);
    for f in summary.violations.iter().take(3) {
        d6.push_str(&format!("; case {} [{}] {}", f.case, f.description, f.reason));
    }
    let ok6 = summary.violations.is_empty() && summary.errors.is_empty();
    results.push((6, "structural invariants (a)-(e)", Outcome { ok: ok6, detail: d6 }));

    let ld = run_shortcuts(SEED, 100, true);
    let bc = run_shortcuts(SEED + 1, 100, false);
    let mut d7 = format!(
        "linearly disjoint: {} mismatches / 100, bicyclic subfields: {} mismatches / 100",
        ld.len(),
        bc.len()
    );
    for f in ld.iter().chain(&bc).take(3) {
        d7.push_str(&format!("; case {} [{}] {}", f.case, f.description, f.reason));
    }
    results.push((
        7,
        "shortcut consistency",
        Outcome {
            ok: ld.is_empty() && bc.is_empty(),
            detail: d7,
        },
    ));

    let split = common::split_prime_mismatches(200);
    let inert = common::inert_prime_mismatches(200);
    let ram = common::ramified_mismatches();
    let facts = common::quoted_local_facts();
    let ok8 = split.is_empty() && inert.is_empty() && ram.is_empty() && facts.is_empty();
    let d8 = format!(
        "split p<200: {} mismatches, inert p<200: {}, 1+i units mod (1+i)^9: {}, quoted facts failing: {:?}",
        split.len(),
        inert.len(),
        ram.len(),
        facts
    );
    results.push((8, "local arithmetic", Outcome { ok: ok8, detail: d8 }));

    let mut all = true;
    for (n, name, o) in &results {
        all &= o.ok;
        println!(
            "criterion {n} {}: {name} ({})",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
