//! Check registry and scenario runner.

use std::time::{Duration, Instant};

use fockmod::models::gauge::{
    check_gauge_invariance, check_gauge_phase, check_intertwining, check_observable_net, check_w0_commutation,
};
use fockmod::models::locality::{
    check_anticommutator, check_bilinear_locality, check_dilated_freeness, check_relative_locality,
};
use fockmod::models::SigmaKind;
use fockmod::report::CheckOutcome;
use fockmod::sampling::{derive_seed, rng};
use fockmod::suite;
use fockmod::weyl::State;

use crate::config::{ConfigError, Scenario};
use crate::report::Report;

/// Which subcommand a check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Algebraic and CAR verification.
    Car,
    /// σ-model locality and gauge checks.
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Car,
    Model,
    All,
}

impl Selection {
    fn includes(self, c: Category) -> bool {
        matches!(
            (self, c),
            (Selection::All, _) | (Selection::Car, Category::Car) | (Selection::Model, Category::Model)
        )
    }
}

pub struct CheckSpec {
    pub name: &'static str,
    pub category: Category,
    pub tolerance: f64,
    /// Default number of random cases, where the check samples.
    pub cases: usize,
    /// σ kinds the check applies to; empty means all.
    pub kinds: &'static [&'static str],
}

pub const CHECKS: &[CheckSpec] = &[
    CheckSpec { name: "adjointness", category: Category::Car, tolerance: 1e-10, cases: 100, kinds: &[] },
    CheckSpec { name: "anticommutator", category: Category::Model, tolerance: 1e-10, cases: 0, kinds: &[] },
    CheckSpec { name: "bilinear_locality", category: Category::Model, tolerance: 1e-12, cases: 0, kinds: &[] },
    CheckSpec { name: "car", category: Category::Car, tolerance: 1e-10, cases: 0, kinds: &[] },
    CheckSpec { name: "car_deviation", category: Category::Car, tolerance: 0.1, cases: 0, kinds: &[] },
    CheckSpec { name: "covariance", category: Category::Car, tolerance: 1e-12, cases: 100, kinds: &[] },
    CheckSpec { name: "dilated_freeness", category: Category::Model, tolerance: 0.0, cases: 0, kinds: &["delta", "bump"] },
    CheckSpec { name: "embedding_isometry", category: Category::Car, tolerance: 1e-10, cases: 50, kinds: &[] },
    CheckSpec { name: "gauge_invariance", category: Category::Model, tolerance: 1e-14, cases: 0, kinds: &["lebesgue"] },
    CheckSpec { name: "gauge_phase", category: Category::Model, tolerance: 1e-12, cases: 0, kinds: &["lebesgue"] },
    CheckSpec { name: "gram_psd", category: Category::Car, tolerance: 1e-12, cases: 20, kinds: &[] },
    CheckSpec { name: "intertwining", category: Category::Model, tolerance: 1e-12, cases: 0, kinds: &["lebesgue"] },
    CheckSpec { name: "non_fock_witness", category: Category::Car, tolerance: 0.1, cases: 0, kinds: &[] },
    CheckSpec { name: "norm_recovery", category: Category::Car, tolerance: 1e-8, cases: 20, kinds: &[] },
    CheckSpec { name: "observable_net", category: Category::Model, tolerance: 1e-10, cases: 0, kinds: &["lebesgue"] },
    CheckSpec { name: "pauli", category: Category::Car, tolerance: 1e-12, cases: 0, kinds: &[] },
    CheckSpec { name: "relative_locality", category: Category::Model, tolerance: 1e-12, cases: 0, kinds: &[] },
    CheckSpec { name: "w0_commutation", category: Category::Model, tolerance: 1e-12, cases: 0, kinds: &["lebesgue"] },
    CheckSpec { name: "weyl_relations", category: Category::Car, tolerance: 1e-14, cases: 100, kinds: &[] },
];

pub fn check_spec(name: &str) -> Option<&'static CheckSpec> {
    CHECKS.iter().find(|c| c.name == name)
}

fn applies(spec: &CheckSpec, kind: SigmaKind) -> bool {
    spec.kinds.is_empty() || spec.kinds.contains(&kind.name())
}

/// Command-line overrides applied on top of the config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub truncation: Option<usize>,
    pub tolerance: Option<f64>,
}

/// Check names to run, sorted. Unknown names and checks that do not apply
/// to the σ kind are config errors.
pub fn select_checks(scenario: &Scenario, selection: Selection) -> Result<Vec<&'static CheckSpec>, ConfigError> {
    let kind = scenario.model.kind();
    let mut out: Vec<&'static CheckSpec> = Vec::new();
    if scenario.config.checks.is_empty() {
        out.extend(CHECKS.iter().filter(|c| selection.includes(c.category) && applies(c, kind)));
    } else {
        for name in &scenario.config.checks {
            let spec = check_spec(name).ok_or_else(|| {
                let known: Vec<&str> = CHECKS.iter().map(|c| c.name).collect();
                ConfigError::Invalid(format!("unknown check \"{name}\" (known: {})", known.join(", ")))
            })?;
            if !applies(spec, kind) {
                return Err(ConfigError::Invalid(format!(
                    "check \"{name}\" needs sigma kind {} (scenario uses {})",
                    spec.kinds.join(" or "),
                    kind.name()
                )));
            }
            if selection.includes(spec.category) && !out.iter().any(|c| c.name == spec.name) {
                out.push(spec);
            }
        }
    }
    out.sort_by_key(|c| c.name);
    for name in scenario.config.tolerances.keys().chain(scenario.config.cases.keys()) {
        if check_spec(name).is_none() {
            return Err(ConfigError::Invalid(format!("tolerance or case count for unknown check \"{name}\"")));
        }
    }
    Ok(out)
}

/// Run one check on a built scenario.
pub fn run_check(scenario: &Scenario, spec: &CheckSpec, seed: u64, tol: f64, cases: usize) -> CheckOutcome {
    let m = &scenario.model;
    let state = State::new(scenario.config.state, m.algebra());
    let probe_level = scenario.config.probe_level.min(m.truncation());
    let vs = &scenario.vectors;
    let mvs = &scenario.module_vectors;
    let obs = &scenario.observables;
    let mut r = rng(derive_seed(seed, spec.name));
    match spec.name {
        "adjointness" => suite::adjointness(m, &mut r, cases, tol),
        "anticommutator" => check_anticommutator(m, &state, mvs, &m.probes(probe_level), tol),
        "bilinear_locality" => check_bilinear_locality(m, &state, vs, &m.probes(probe_level), tol),
        "car" => suite::car(m, &state, mvs, &m.probes(probe_level), tol),
        "car_deviation" => suite::car_deviation(m, &state, mvs, &m.probes(probe_level)),
        "covariance" => suite::covariance(m, &mut r, cases, tol),
        "dilated_freeness" => check_dilated_freeness(m, mvs),
        "embedding_isometry" => suite::embedding_isometry(m, &mut r, cases, tol),
        "gauge_invariance" => check_gauge_invariance(m, &state, obs, &m.probes(probe_level), tol),
        "gauge_phase" => check_gauge_phase(m, &state, vs, &m.probes(probe_level), tol),
        "gram_psd" => suite::gram_psd(m, &mut r, cases, tol),
        "intertwining" => check_intertwining(m, &state, vs, &m.probes(probe_level), tol),
        "non_fock_witness" => suite::non_fock_witness(m, &state),
        "norm_recovery" => suite::norm_recovery(m, &state, &mut r, cases, tol),
        "observable_net" => check_observable_net(m, &state, obs, &m.probes(probe_level), tol),
        "pauli" => suite::pauli(m, &state, mvs, tol),
        "relative_locality" => check_relative_locality(m, &state, vs, &m.probes(probe_level), tol),
        "w0_commutation" => check_w0_commutation(m, &state, vs, &m.probes(probe_level), tol),
        "weyl_relations" => suite::weyl_relations(m, &mut r, cases, tol),
        other => unreachable!("check {other} is in the registry but has no runner"),
    }
}

/// Run the selected checks. Timings are returned separately so the report
/// itself stays deterministic.
pub fn run(
    mut scenario_config: crate::config::ScenarioConfig,
    selection: Selection,
    overrides: &Overrides,
) -> Result<(Report, Vec<(String, Duration)>), ConfigError> {
    if let Some(seed) = overrides.seed {
        scenario_config.seed = seed;
    }
    if let Some(n) = overrides.truncation {
        scenario_config.truncation = n;
    }
    let scenario = scenario_config.build()?;
    let specs = select_checks(&scenario, selection)?;
    let seed = scenario.config.seed;
    let mut outcomes = Vec::new();
    let mut timings = Vec::new();
    for spec in specs {
        let tol = overrides
            .tolerance
            .or_else(|| scenario.config.tolerances.get(spec.name).copied())
            .unwrap_or(spec.tolerance);
        let cases = scenario.config.cases.get(spec.name).copied().unwrap_or(spec.cases);
        let start = Instant::now();
        outcomes.push(run_check(&scenario, spec, seed, tol, cases));
        timings.push((spec.name.to_string(), start.elapsed()));
    }
    Ok((Report::new(&scenario, outcomes), timings))
}
