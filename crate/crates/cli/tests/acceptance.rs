//! Acceptance criteria 1-8, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always print.

use std::process::ExitCode;
use std::thread;

use fockmod::models::{Model, SigmaKind};
use fockmod::report::{CheckOutcome, CheckStatus, Expectation};
use fockmod::sampling::{self, derive_seed, rng};
use fockmod::suite;
use fockmod::{GeneratorSet, GridSpec, GroupElement, ModuleVector, OneParticleVector, Sector, State, TestFunctionPair, WeylElement};
use fockmod_cli::report::{to_json, Report};
use fockmod_cli::run::{run, Overrides, Selection};
use fockmod_cli::scenarios;
use fockmod_oracle::equivalence::{max_deviation, Operation};
use rand::Rng;

const POINTS: usize = 16;
const SEED: u64 = 20_240_601;
const KINDS: [SigmaKind; 4] = [SigmaKind::Delta, SigmaKind::Bump { radius: 2.0 }, SigmaKind::Poisson, SigmaKind::Lebesgue];

/// d=1, 16 points, one spinor component: D = 32.
fn model(kind: SigmaKind, truncation: usize) -> Model {
    let g = GridSpec::new(1, POINTS, 1.0, 1).unwrap();
    let mut a = vec![0.0; POINTS];
    a[3] = 1.0;
    let mut b = vec![0.0; POINTS];
    b[9] = 1.0;
    b[10] = -2.0;
    b[11] = 1.0;
    let mut c = vec![0.0; POINTS];
    c[3] = 0.7;
    let gens = vec![
        TestFunctionPair::new(&g, a, vec![0.0; POINTS]).unwrap(),
        TestFunctionPair::new(&g, b, vec![0.0; POINTS]).unwrap(),
        TestFunctionPair::new(&g, vec![0.0; POINTS], c).unwrap(),
    ];
    Model::new(kind, GeneratorSet::new(g, gens).unwrap(), truncation).unwrap()
}

fn at(m: &Model, x: usize, n: [i64; 3]) -> ModuleVector {
    let w = OneParticleVector::basis(m.dim(), m.basis().index(Sector::Plus, x, 0));
    ModuleVector::from_vector(&w, &WeylElement::weyl(GroupElement::new(n.to_vec())))
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn worst(out: &CheckOutcome) -> f64 {
    out.max_value(Expectation::AtMost).unwrap_or(0.0)
}

fn ok(out: &CheckOutcome) -> bool {
    !out.status.is_failure()
}

fn weyl_exactness() -> Verdict {
    let m = model(SigmaKind::Bump { radius: 2.0 }, 3);
    let out = suite::weyl_relations(&m, &mut rng(derive_seed(SEED, "weyl")), 100, 1e-14);
    verdict(ok(&out), format!("100 triples, max residual {:e}", worst(&out)))
}

/// Rejection-samples a mutually free pair over a shared pool of three basis
/// indices, keeping only pairs with `⟨f, g⟩ ≠ 0`.
fn random_free_pair(m: &Model, r: &mut sampling::SeededRng) -> (ModuleVector, ModuleVector) {
    let pick = |r: &mut sampling::SeededRng, pool: &[usize]| {
        let n: Vec<i64> = (0..m.rank()).map(|_| r.gen_range(-1..=1)).collect();
        let mut f = ModuleVector::zero();
        for _ in 0..r.gen_range(1..=2) {
            let coeff = WeylElement::weyl(GroupElement::new(n.clone())).scale(sampling::complex(r));
            f.add_term(pool[r.gen_range(0..pool.len())], &coeff);
        }
        f
    };
    loop {
        let pool: Vec<usize> = (0..3).map(|_| r.gen_range(0..m.dim())).collect();
        let f = pick(r, &pool);
        let g = pick(r, &pool);
        if m.module().inner(&f, &g).max_abs() > 1e-3 && m.module().mutually_free(&f, &g).free {
            return (f, g);
        }
    }
}

fn car() -> Verdict {
    let mut worst_free: f64 = 0.0;
    let mut missing = 0;
    let mut weakest_deviation = f64::INFINITY;
    for (i, kind) in KINDS.iter().enumerate() {
        let m = model(*kind, 3);
        let state = State::quasifree(m.algebra());
        let probes = m.probes(2);
        let mut r = rng(derive_seed(SEED, kind.name()));
        let count = if i < 2 { 13 } else { 12 };
        for _ in 0..count {
            let (f, g) = random_free_pair(&m, &mut r);
            let res = suite::car_residuals(&m, &state, &f, &g, &probes);
            for v in [res.mixed, res.create] {
                match v {
                    Some(v) => worst_free = worst_free.max(v),
                    None => missing += 1,
                }
            }
        }
        // Designed non-free pairs: the twist of one factor moves the other.
        let designed: &[(usize, [i64; 3], usize, [i64; 3])] = match kind {
            SigmaKind::Delta => &[(3, [0, 0, 0], 8, [1, 0, 0]), (10, [0, 0, 0], 5, [0, 1, 0])],
            SigmaKind::Bump { .. } => &[(4, [0, 0, 0], 8, [1, 0, 0]), (8, [0, 0, 0], 2, [0, 1, 0]), (3, [1, 0, 0], 3, [0, 0, 1])],
            SigmaKind::Poisson => &[(12, [0, 0, 0], 6, [1, 0, 0]), (1, [0, 0, 0], 14, [1, 0, 0]), (7, [1, 0, 0], 9, [0, 0, 1])],
            SigmaKind::Lebesgue => &[(14, [0, 0, 0], 0, [1, 0, 0]), (5, [1, 0, 0], 12, [0, 0, 1])],
        };
        for &(x, n, y, k) in designed {
            let (f, g) = (at(&m, x, n), at(&m, y, k));
            if m.module().mutually_free(&f, &g).free {
                return verdict(false, format!("designed pair ({x},{y}) on {} is free", kind.name()));
            }
            let d = suite::car_residuals(&m, &state, &f, &g, &probes).mixed.unwrap_or(0.0);
            weakest_deviation = weakest_deviation.min(d);
        }
    }
    verdict(
        missing == 0 && worst_free <= 1e-10 && weakest_deviation > 0.1,
        format!("50 free pairs max residual {worst_free:e}; 10 non-free pairs min residual {weakest_deviation:.3}"),
    )
}

fn adjointness_covariance() -> Verdict {
    let mut adj: f64 = 0.0;
    let mut cov: f64 = 0.0;
    let mut pass = true;
    for kind in KINDS {
        let m = model(kind, 3);
        let mut r = rng(derive_seed(SEED, kind.name()));
        let a = suite::adjointness(&m, &mut r, 100, 1e-10);
        let c = suite::covariance(&m, &mut r, 100, 1e-12);
        pass &= ok(&a) && ok(&c);
        adj = adj.max(worst(&a));
        cov = cov.max(worst(&c));
    }
    verdict(pass, format!("100 cases per model, both states: adjointness {adj:e}, covariance {cov:e}"))
}

fn norm_recovery() -> Verdict {
    let m = model(SigmaKind::Bump { radius: 2.0 }, 3);
    let state = State::quasifree(m.algebra());
    let out = suite::norm_recovery(&m, &state, &mut rng(derive_seed(SEED, "norm")), 20, 1e-8);
    verdict(ok(&out), format!("20 unit vectors, max | |a(w)| - 1 | {:e}", worst(&out)))
}

fn oracle() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for op in Operation::ALL {
        match max_deviation(op, SEED, 200) {
            Ok(d) => {
                pass &= d <= 1e-10;
                parts.push(format!("{} {d:e}", op.name()));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", op.name()));
            }
        }
    }
    verdict(pass, format!("200 cases each: {}", parts.join(", ")))
}

fn non_fock() -> Verdict {
    let m = model(SigmaKind::Bump { radius: 2.0 }, 3);
    let out = suite::non_fock_witness(&m, &State::quasifree(m.algebra()));
    let gap = out.max_value(Expectation::Exceeds).unwrap_or(0.0);
    verdict(out.status == CheckStatus::Witness, format!("level-2 pair, |nested - naive| = {gap:.4}"))
}

fn bundled_report(name: &str) -> Result<Report, String> {
    let config = scenarios::bundled(name).map_err(|e| e.to_string())?;
    run(config, Selection::All, &Overrides::default()).map(|(r, _)| r).map_err(|e| e.to_string())
}

fn check<'a>(report: &'a Report, name: &str) -> Option<&'a CheckOutcome> {
    report.checks.iter().find(|c| c.name == name)
}

/// The check ran, passed, and (if `witness`) carries a witness above its bound.
fn holds(report: &Report, name: &str, witness: bool) -> bool {
    check(report, name).is_some_and(|c| {
        ok(c)
            && !c.residuals.is_empty()
            && (!witness || c.residuals.iter().any(|r| r.expect == Expectation::Exceeds && r.holds()))
    })
}

fn model_matrix() -> Verdict {
    let rows: [(&str, &[(&str, bool)]); 4] = [
        ("delta_locality", &[("relative_locality", true)]),
        ("bump_locality", &[("relative_locality", true), ("dilated_freeness", false)]),
        ("poisson_nonlocality", &[("bilinear_locality", true)]),
        (
            "lebesgue_gauge",
            &[("gauge_phase", false), ("intertwining", false), ("observable_net", false), ("gauge_invariance", false)],
        ),
    ];
    let mut failed = Vec::new();
    for (scenario, checks) in rows {
        match bundled_report(scenario) {
            Ok(report) => {
                for &(name, witness) in checks {
                    if !holds(&report, name, witness) {
                        failed.push(format!("{scenario}/{name}"));
                    }
                }
            }
            Err(e) => failed.push(format!("{scenario}: {e}")),
        }
    }
    if failed.is_empty() {
        verdict(true, "delta, bump, poisson and lebesgue rows hold")
    } else {
        verdict(false, format!("failing: {}", failed.join(", ")))
    }
}

fn determinism() -> Verdict {
    let names = scenarios::names();
    let results: Vec<bool> = thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|name| {
                s.spawn(move || {
                    let a = bundled_report(name).map(|r| to_json(&r));
                    let b = bundled_report(name).map(|r| to_json(&r));
                    matches!((a, b), (Ok(a), Ok(b)) if a == b)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or(false)).collect()
    });
    let same = results.iter().filter(|&&b| b).count();
    verdict(same == names.len(), format!("{same}/{} bundled scenarios byte-identical across two runs", names.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("weyl exactness", weyl_exactness),
        ("CAR suite", car),
        ("adjointness and covariance", adjointness_covariance),
        ("norm recovery", norm_recovery),
        ("oracle equivalence", oracle),
        ("non-Fock witness", non_fock),
        ("model matrix", model_matrix),
        ("determinism", determinism),
    ];
    let verdicts: Vec<Verdict> = thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(*f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| verdict(false, "panicked")))
            .collect()
    });
    let mut all = true;
    for (i, ((name, _), v)) in criteria.iter().zip(&verdicts).enumerate() {
        all &= v.pass;
        println!("criterion {} {:<28} {}  {}", i + 1, name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
