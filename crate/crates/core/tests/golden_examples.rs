mod common;

use common::run_example;
use multinorm_core::catalog::example;
use multinorm_core::local::noncyclic_places;
use multinorm_core::{validate_and_normalize, Subgroup};

#[test]
fn example_17_13() {
    let (parts, _) = run_example("17-13");
    let p = &parts[0];
    assert_eq!(p.oracle.sha_omega_invariants, vec![2]);
    assert_eq!(p.oracle.sha_invariants, vec![1]);
    assert_eq!(p.oracle.quotient_invariants, Some(vec![1]));
    assert_eq!(p.structure.sha_omega, vec![2]);
    assert_eq!(p.structure.sha, vec![1]);
    let root = &p.structure.nodes[0];
    assert_eq!((root.f_omega, root.f), (2, 1));
}

#[test]
fn example_17_409() {
    let (parts, _) = run_example("17-409");
    let p = &parts[0];
    assert_eq!(p.oracle.sha_omega_invariants, vec![2]);
    assert_eq!(p.oracle.sha_invariants, vec![2]);
    assert_eq!(p.structure.sha_omega, vec![2]);
    assert_eq!(p.structure.sha, vec![2]);
    assert_eq!(p.structure.nodes[0].f, 2);
}

#[test]
fn example_13_17_bicyclic() {
    let (parts, _) = run_example("13-17-bicyclic");
    let p = &parts[0];
    assert_eq!(p.oracle.sha_omega_invariants, vec![1]);
    assert_eq!(p.oracle.sha_invariants, vec![1]);
    assert_eq!(p.structure.sha_omega, vec![1]);
    assert_eq!(p.structure.sha, vec![1]);
    assert_eq!(p.structure.row(1).unwrap().delta, 2);
    // Input field 1 lands in U_0 and input field 2 in U_1.
    let input = |r: u32| {
        p.cfg
            .u_r(r)
            .unwrap()
            .iter()
            .map(|&i| p.cfg.permutation[i])
            .collect::<Vec<_>>()
    };
    assert_eq!(input(0), vec![1]);
    assert_eq!(input(1), vec![2]);
    assert_eq!(
        multinorm_core::structure::shortcut_bicyclic_subfields(&p.cfg).unwrap(),
        vec![1]
    );
}

#[test]
fn example_cyclotomic() {
    let (parts, _) = run_example("cyclotomic");
    assert_eq!(parts.len(), 2);
    for p in &parts {
        assert!(p.criterion, "{}", p.label);
        assert!(p.oracle.sha_omega_invariants.is_empty() && p.oracle.sha_invariants.is_empty());
        assert!(p.structure.sha_omega.is_empty() && p.structure.sha.is_empty());
    }
}

#[test]
fn kummer_characters_follow_exponent_vectors() {
    let ex = example("17-13").unwrap();
    let coeffs: Vec<Vec<i64>> = ex.parts[0].config.chars.iter().map(|c| c.coeffs().to_vec()).collect();
    assert_eq!(coeffs, vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
}

#[test]
fn local_cyclicity_of_composita() {
    let ex = example("17-13").unwrap();
    let part = &ex.parts[0];
    let cfg = validate_and_normalize(&part.config).unwrap();
    let all: Vec<usize> = (0..=cfg.m()).collect();
    let top = cfg.composite(&all, 2).unwrap();
    let mut bad: Vec<String> = noncyclic_places(&part.local, &top)
        .unwrap()
        .iter()
        .map(|p| p.label.clone())
        .collect();
    bad.sort();
    assert_eq!(bad, vec!["3+2i", "3-2i"]);
    assert!(noncyclic_places(&part.local, &cfg.composite(&all, 1).unwrap())
        .unwrap()
        .is_empty());

    let ex = example("17-409").unwrap();
    let part = &ex.parts[0];
    let a = part.config.group.clone();
    assert!(noncyclic_places(&part.local, &Subgroup::trivial(&a))
        .unwrap()
        .is_empty());
}

#[test]
fn examples_are_fast() {
    for name in multinorm_core::catalog::NAMES {
        let (_, t) = run_example(name);
        assert!(t.as_secs_f64() < 1.0, "{name} took {t:?}");
    }
}
