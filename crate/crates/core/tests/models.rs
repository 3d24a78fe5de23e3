use std::time::Instant;

use fockmod::models::locality::{
    check_anticommutator, check_bilinear_locality, check_dilated_freeness, check_relative_locality,
};
use fockmod::models::gauge::{
    check_gauge_invariance, check_gauge_phase, check_intertwining, check_observable_net, check_w0_commutation,
};
use fockmod::models::{Model, ObservableGenerator, SigmaKind};
use fockmod::report::CheckStatus;
use fockmod::{GeneratorSet, GridSpec, GroupElement, ModuleVector, OneParticleVector, Sector, State, TestFunctionPair};

const POINTS: usize = 16;

fn grid() -> GridSpec {
    GridSpec::new(1, POINTS, 1.0, 1).unwrap()
}

fn values(entries: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; POINTS];
    for &(x, a) in entries {
        v[x] += a;
    }
    v
}

fn model(kind: SigmaKind, s0s: &[&[(usize, f64)]], truncation: usize) -> Model {
    let g = grid();
    let gens = s0s
        .iter()
        .map(|s0| TestFunctionPair::new(&g, values(s0), vec![0.0; POINTS]).unwrap())
        .collect();
    Model::new(kind, GeneratorSet::new(g, gens).unwrap(), truncation).unwrap()
}

fn point(m: &Model, x: usize) -> OneParticleVector {
    OneParticleVector::basis(m.dim(), m.basis().index(Sector::Plus, x, 0))
}

fn named(m: &Model, xs: &[usize]) -> Vec<(String, OneParticleVector)> {
    xs.iter().map(|&x| (format!("w{x}"), point(m, x))).collect()
}

#[test]
fn delta_locality_passes_with_overlap_witness() {
    let m = model(SigmaKind::Delta, &[&[(3, 1.5)], &[(11, -1.0)]], 2);
    let state = State::quasifree(m.algebra());
    let probes = m.probes(1);
    let out = check_relative_locality(&m, &state, &named(&m, &[3, 7, 11]), &probes, 1e-12);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
    assert!(out.witness.is_some());
}

#[test]
fn bump_locality_fails_inside_radius_and_freeness_holds_outside() {
    let m = model(SigmaKind::Bump { radius: 2.0 }, &[&[(3, 2.0)]], 2);
    let state = State::tracial(m.algebra());
    let out = check_relative_locality(&m, &state, &named(&m, &[4, 9]), &m.probes(1), 1e-12);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
    let vs: Vec<(String, ModuleVector)> = [(2usize, 0i64), (9, 1), (13, 0)]
        .iter()
        .map(|&(x, k)| {
            let w = fockmod::WeylElement::weyl(GroupElement::new(vec![k]));
            (format!("f{x}"), ModuleVector::from_vector(&point(&m, x), &w))
        })
        .collect();
    let out = check_dilated_freeness(&m, &vs);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
}

#[test]
fn poisson_bilinear_witness() {
    let m = model(SigmaKind::Poisson, &[&[(2, 1.0)], &[(5, 1.0), (6, -2.0), (7, 1.0)]], 2);
    let state = State::quasifree(m.algebra());
    let out = check_bilinear_locality(&m, &state, &named(&m, &[10, 13]), &m.probes(1), 1e-12);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
    assert!(out.witness.is_some());
}

#[test]
fn anticommutator_separates_free_pairs() {
    let m = model(SigmaKind::Poisson, &[&[(5, 1.0), (6, -2.0), (7, 1.0)], &[(1, 1.0)]], 3);
    let state = State::tracial(m.algebra());
    let w = |k: Vec<i64>| fockmod::WeylElement::weyl(GroupElement::new(k));
    let vs = vec![
        ("a".to_string(), ModuleVector::from_vector(&point(&m, 12), &w(vec![1, 0]))),
        ("b".to_string(), ModuleVector::from_vector(&point(&m, 14), &w(vec![0, 0]))),
        ("c".to_string(), ModuleVector::from_vector(&point(&m, 6), &w(vec![0, 1]))),
    ];
    let out = check_anticommutator(&m, &state, &vs, &m.probes(1), 1e-10);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
}

#[test]
fn lebesgue_gauge_checks() {
    let m = model(SigmaKind::Lebesgue, &[&[(3, 0.8)], &[(9, 1.0), (10, -1.0)]], 4);
    let state = State::quasifree(m.algebra());
    let probes = m.probes(1);
    let vs = named(&m, &[2, 12]);
    let t = Instant::now();
    for out in [
        check_gauge_phase(&m, &state, &vs, &probes, 1e-12),
        check_intertwining(&m, &state, &vs, &probes, 1e-12),
        check_w0_commutation(&m, &state, &vs, &probes, 1e-12),
    ] {
        assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
    }
    let obs = |name: &str, k: usize, x1: usize, x2: usize| ObservableGenerator {
        name: name.to_string(),
        generator: GroupElement::unit(2, k),
        w1: m.lift(&point(&m, x1)),
        w2: m.lift(&point(&m, x2)),
    };
    let observables = vec![obs("A", 0, 3, 4), obs("B", 1, 9, 10), obs("C", 1, 12, 13)];
    let level0 = m.probes(0);
    let out = check_observable_net(&m, &state, &observables, &level0, 1e-10);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
    let out = check_gauge_invariance(&m, &state, &observables, &level0, 1e-14);
    assert_eq!(out.status, CheckStatus::Pass, "{out:#?}");
    eprintln!("lebesgue checks: {:?}", t.elapsed());
}
