//! Scenario reports and their JSON and text renderings.

use std::fmt::Write as _;

use fockmod::models::sigma::poisson_regularization;
use fockmod::models::SigmaKind;
use fockmod::report::{CheckOutcome, CheckStatus, Expectation};
use fockmod::weyl::StateKind;
use serde::{Deserialize, Serialize};

use crate::config::{Scenario, SCHEMA};

/// Sign and regularization conventions the numbers depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub eta_orientation: String,
    pub lebesgue_sign: String,
    pub poisson_regularization: String,
}

impl Conventions {
    pub fn for_dimension(dimension: usize) -> Self {
        Conventions {
            eta_orientation: "eta(s,s') = sum_x (s1(x) s0'(x) - s0(x) s1'(x)) h^d; W(s)W(s') = exp(i eta/2) W(s+s')"
                .into(),
            lebesgue_sign: "u(s) = exp(-i int s0) on h+ and exp(+i int s0) on h-; W(s) psi(w) W(s)* = exp(-i int s0) psi(w)"
                .into(),
            poisson_regularization: poisson_regularization(dimension).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub witnesses: usize,
    pub failed: usize,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub scenario: String,
    pub sigma: SigmaKind,
    pub seed: u64,
    pub truncation: usize,
    pub state: StateKind,
    pub conventions: Conventions,
    pub checks: Vec<CheckOutcome>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenario: &Scenario, mut checks: Vec<CheckOutcome>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let summary = summarize(&checks);
        Report {
            schema: SCHEMA.into(),
            scenario: scenario.config.name.clone(),
            sigma: scenario.model.kind(),
            seed: scenario.config.seed,
            truncation: scenario.model.truncation(),
            state: scenario.config.state,
            conventions: Conventions::for_dimension(scenario.model.grid().dimension()),
            checks,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.status != CheckStatus::Fail
    }
}

pub fn summarize(checks: &[CheckOutcome]) -> Summary {
    let count = |s: CheckStatus| checks.iter().filter(|c| c.status == s).count();
    let failed = count(CheckStatus::Fail);
    Summary {
        checks: checks.len(),
        passed: count(CheckStatus::Pass),
        witnesses: count(CheckStatus::Witness),
        failed,
        status: if failed > 0 { CheckStatus::Fail } else { CheckStatus::Pass },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn expectation(e: Expectation) -> &'static str {
    match e {
        Expectation::AtMost => "<=",
        Expectation::Exceeds => ">",
        Expectation::Info => "",
    }
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {}  sigma {}  seed {}  N={}  state {}",
        report.scenario,
        report.sigma,
        report.seed,
        report.truncation,
        report.state
    );
    for c in &report.checks {
        let _ = writeln!(out, "\n[{}] {}", c.status, c.name);
        let width = c.residuals.iter().map(|r| r.label.chars().count()).max().unwrap_or(0);
        for r in &c.residuals {
            let pad = width - r.label.chars().count();
            let bound = match r.expect {
                Expectation::Info => String::new(),
                e => format!("{} {:.3e}", expectation(e), r.bound),
            };
            let mark = if r.holds() { " " } else { "!" };
            let _ = writeln!(out, "  {mark} {}{}  {:>11.4e}  {bound}", r.label, " ".repeat(pad), r.value);
        }
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "    witness: {w}");
        }
        for n in &c.notes {
            let _ = writeln!(out, "    note: {n}");
        }
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "\nsummary: {} checks, {} passed, {} witnesses, {} failed -> {}",
        s.checks,
        s.passed,
        s.witnesses,
        s.failed,
        if s.failed > 0 { "FAIL" } else { "PASS" }
    );
    out
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Text => to_text(report),
    }
}
