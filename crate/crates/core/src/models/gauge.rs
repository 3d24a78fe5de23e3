//! Global U(1) gauge action and the Lebesgue-model checks: the Weyl
//! unitaries implementing gauge phases, the intertwining relation and the
//! local gauge-invariant observables `ψ(w₁)W(s)ψ*(w₂)`.

use std::collections::BTreeSet;

use num_complex::Complex64;

use super::locality::NamedVector;
use super::{Model, SigmaKind};
use crate::bimodule::{ModuleVector, Sector, Unitary};
use crate::fock::{commutator, difference, gauge_transform, operator_residual, FieldOperator, FockElement};
use crate::report::{CheckOutcome, Residual};
use crate::weyl::{GroupElement, State, WeylElement};

/// `β_z` with `β_z(ψ(f)) = z̄ψ(f)` and algebra elements fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeAction {
    z: Complex64,
}

impl GaugeAction {
    /// Phase `z`, normalized onto the unit circle.
    pub fn new(z: Complex64) -> Self {
        GaugeAction { z: z / z.norm() }
    }

    pub fn from_angle(theta: f64) -> Self {
        GaugeAction {
            z: Complex64::from_polar(1.0, theta),
        }
    }

    pub fn phase(&self) -> Complex64 {
        self.z
    }

    pub fn apply(&self, model: &Model, op: &FieldOperator) -> FieldOperator {
        gauge_transform(self.z, model.basis(), op)
    }

    pub fn compose(&self, other: &GaugeAction) -> GaugeAction {
        GaugeAction { z: self.z * other.z }
    }
}

/// `A_{s,w₁,w₂} = ψ(w₁) W(s) ψ*(w₂)` with `w₁, w₂ ∈ h₊`.
#[derive(Debug, Clone)]
pub struct ObservableGenerator {
    pub name: String,
    pub generator: GroupElement,
    pub w1: ModuleVector,
    pub w2: ModuleVector,
}

impl ObservableGenerator {
    pub fn operator(&self, model: &Model) -> FieldOperator {
        FieldOperator::Product(vec![
            model.psi(&self.w1),
            model.weyl_op(&self.generator),
            model.psi_adjoint(&self.w2),
        ])
    }

    /// Grid points of `s`, `w₁` and `w₂`.
    pub fn support(&self, model: &Model) -> BTreeSet<usize> {
        let mut out = model.generator_support(&self.generator);
        out.extend(model.spatial_support(&self.w1).union());
        out.extend(model.spatial_support(&self.w2).union());
        out
    }
}

/// `∫s₀⁽ᵏ⁾` read off the constant Lebesgue phase.
fn lebesgue_angle(model: &Model, k: usize) -> f64 {
    model.generator_phase(k)[0]
}

fn require_lebesgue(model: &Model, out: &mut CheckOutcome) -> bool {
    if model.kind() != SigmaKind::Lebesgue {
        out.note(format!("needs the lebesgue model, got {}", model.kind()));
        return false;
    }
    true
}

fn push_residual(out: &mut CheckOutcome, r: Option<f64>, label: String, tol: f64) {
    match r {
        Some(v) => out.push(Residual::at_most(label, v, tol)),
        None => out.note(format!("{label}: no probe vector below the truncation")),
    }
}

/// Conjugation by `W(s)` acts on `ψ(w)` as the global phase `e^{−i∫s₀}`,
/// which is the gauge transformation `β_z` with `z = e^{i∫s₀}`.
pub fn check_gauge_phase(
    model: &Model,
    state: &State,
    vectors: &[NamedVector],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("gauge_phase");
    if !require_lebesgue(model, &mut out) {
        return out.finish(false);
    }
    for k in 0..model.rank() {
        let theta = lebesgue_angle(model, k);
        let spread = model
            .generator_phase(k)
            .iter()
            .map(|p| (p - theta).abs())
            .fold(0.0, f64::max);
        out.push(Residual::at_most(format!("sigma*s0 of s{k} not constant"), spread, tol));
        let n = model.unit(k);
        let expected = Complex64::from_polar(1.0, -theta);
        if let Unitary::Diagonal(d) = model.module().twist().operator(&n) {
            let defect = d
                .iter()
                .enumerate()
                .filter(|(b, _)| model.basis().sector(*b) == Sector::Plus)
                .map(|(_, c)| (c - expected).norm())
                .fold(0.0, f64::max);
            out.push(Residual::at_most(format!("u(s{k}) on h+ vs e^(-i int s0)"), defect, tol));
        }
        for (name, w) in vectors {
            let psi = model.psi(&model.lift(w));
            let conjugated = FieldOperator::Product(vec![model.weyl_op(&n), psi.clone(), model.weyl_op(&-&n)]);
            let scaled = FieldOperator::scaled(expected, psi.clone());
            let r = operator_residual(model.space(), &difference(&conjugated, &scaled), probes, state);
            push_residual(&mut out, r, format!("W(s{k}) psi({name}) W(s{k})* - e^(-i int s0) psi({name})"), tol);
            let beta = GaugeAction::from_angle(theta).apply(model, &psi);
            let r = operator_residual(model.space(), &difference(&conjugated, &beta), probes, state);
            push_residual(&mut out, r, format!("W(s{k}) psi({name}) W(s{k})* - beta_z psi({name})"), tol);
        }
    }
    out.finish(false)
}

/// `α(W(s))∘ψ(w) = ψ(w)∘W(s)` with `α(W(s)) = e^{i∫s₀} W(s)`.
pub fn check_intertwining(
    model: &Model,
    state: &State,
    vectors: &[NamedVector],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("intertwining");
    if !require_lebesgue(model, &mut out) {
        return out.finish(false);
    }
    for k in 0..model.rank() {
        let theta = lebesgue_angle(model, k);
        let n = model.unit(k);
        let alpha = FieldOperator::LeftMult(WeylElement::term(n.clone(), Complex64::from_polar(1.0, theta)));
        for (name, w) in vectors {
            let psi = model.psi(&model.lift(w));
            let op = difference(
                &FieldOperator::Product(vec![alpha.clone(), psi.clone()]),
                &FieldOperator::Product(vec![psi, model.weyl_op(&n)]),
            );
            let r = operator_residual(model.space(), &op, probes, state);
            push_residual(&mut out, r, format!("alpha(W(s{k})) psi({name}) - psi({name}) W(s{k})"), tol);
        }
    }
    out.finish(false)
}

/// Generators with `∫s₀ = 0` commute with every `ψ(w)`.
pub fn check_w0_commutation(
    model: &Model,
    state: &State,
    vectors: &[NamedVector],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("w0_commutation");
    if !require_lebesgue(model, &mut out) {
        return out.finish(false);
    }
    for k in 0..model.rank() {
        if lebesgue_angle(model, k).abs() > 1e-12 {
            continue;
        }
        let n = model.unit(k);
        for (name, w) in vectors {
            let op = commutator(&model.weyl_op(&n), &model.psi(&model.lift(w)));
            let r = operator_residual(model.space(), &op, probes, state);
            push_residual(&mut out, r, format!("[W(s{k}), psi({name})]"), tol);
        }
    }
    out.finish(false)
}

/// Pairwise commutators of observables with disjoint total supports.
pub fn check_observable_net(
    model: &Model,
    state: &State,
    observables: &[ObservableGenerator],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("observable_net");
    if !require_lebesgue(model, &mut out) {
        return out.finish(false);
    }
    for (i, a) in observables.iter().enumerate() {
        for b in observables.iter().skip(i + 1) {
            let op = commutator(&a.operator(model), &b.operator(model));
            let label = format!("[{}, {}]", a.name, b.name);
            let r = operator_residual(model.space(), &op, probes, state);
            if a.support(model).is_disjoint(&b.support(model)) {
                push_residual(&mut out, r, format!("{label} disjoint"), tol);
            } else if let Some(v) = r {
                out.push(Residual::info(format!("{label} overlapping"), v));
            }
        }
    }
    out.finish(false)
}

/// `β_z(A) = A`: structural charge zero and a numerical check at a few `z`.
pub fn check_gauge_invariance(
    model: &Model,
    state: &State,
    observables: &[ObservableGenerator],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("gauge_invariance");
    for obs in observables {
        let op = obs.operator(model);
        let charge = op.gauge_charge(model.basis());
        let defect = match charge {
            Some(q) => q.abs() as f64,
            None => f64::INFINITY,
        };
        out.push(Residual::at_most(format!("charge of {}", obs.name), defect, 0.0));
        for theta in [0.7, 2.0, -1.3] {
            let beta = GaugeAction::from_angle(theta).apply(model, &op);
            let r = operator_residual(model.space(), &difference(&beta, &op), probes, state);
            push_residual(&mut out, r, format!("beta_z({0}) - {0}, z = e^(i{theta})", obs.name), tol);
        }
    }
    out.finish(false)
}
