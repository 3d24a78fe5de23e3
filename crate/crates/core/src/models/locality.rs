//! Relative locality, bilinear locality, field anticommutators and
//! support-based mutual freeness in the σ-models.

use super::{dilate, Model, SigmaKind};
use crate::bimodule::{ModuleVector, OneParticleVector, Sector};
use crate::fock::{anticommutator, commutator, difference, operator_residual, FieldOperator, FockElement};
use crate::report::{CheckOutcome, Residual};
use crate::weyl::{State, WeylElement};

/// Minimum residual accepted as a locality or CAR violation.
pub const WITNESS_THRESHOLD: f64 = 0.1;

/// A named one-particle vector.
pub type NamedVector = (String, OneParticleVector);

/// A named module vector.
pub type NamedModuleVector = (String, ModuleVector);

fn max_abs_on(values: &[f64], points: impl IntoIterator<Item = usize>) -> f64 {
    points.into_iter().map(|x| values[x].abs()).fold(0.0, f64::max)
}

fn spread_on(values: &[f64], points: impl IntoIterator<Item = usize>) -> f64 {
    let v: Vec<f64> = points.into_iter().map(|x| values[x]).collect();
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if v.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

fn residual_or_note(
    out: &mut CheckOutcome,
    model: &Model,
    op: &FieldOperator,
    probes: &[FockElement],
    state: &State,
    label: &str,
) -> Option<f64> {
    let r = operator_residual(model.space(), op, probes, state);
    if r.is_none() {
        out.note(format!("{label}: no probe vector below the truncation"));
    }
    r
}

/// `‖[ψ(w), W(s)] v‖_ω` over vectors × generators.
///
/// Pairs on which the twist is trivial (`σ⋆s₀ = 0` on `supp w`) must
/// commute. δ additionally needs an overlapping pair above the witness
/// threshold; the other kinds need a pair with disjoint supports above it.
pub fn check_relative_locality(
    model: &Model,
    state: &State,
    vectors: &[NamedVector],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("relative_locality");
    let mut witness: Option<(f64, String)> = None;
    for (name, w) in vectors {
        let psi = model.psi(&model.lift(w));
        let points = model.points_of(w);
        for k in 0..model.rank() {
            let n = model.unit(k);
            let label = format!("[psi({name}), W(s{k})]");
            let Some(r) = residual_or_note(&mut out, model, &commutator(&psi, &model.weyl_op(&n)), probes, state, &label)
            else {
                continue;
            };
            let trivial = max_abs_on(model.generator_phase(k), points.iter().copied()) <= 1e-12;
            let disjoint = points.is_disjoint(&model.generator_s0_support(&n));
            if trivial {
                out.push(Residual::at_most(label.clone(), r, tol));
            } else {
                out.push(Residual::info(label.clone(), r));
            }
            let candidate = match model.kind() {
                SigmaKind::Delta => !disjoint,
                _ => disjoint,
            };
            if candidate && witness.as_ref().map_or(true, |(v, _)| r > *v) {
                witness = Some((r, label));
            }
        }
    }
    match witness {
        Some((r, label)) => {
            let what = if model.kind() == SigmaKind::Delta {
                "overlapping supports"
            } else {
                "disjoint supports"
            };
            out.push(Residual::exceeds(format!("witness {label}"), r, WITNESS_THRESHOLD));
            out.witness = Some(format!("{label} with {what}"));
        }
        None => out.note("no candidate pair for a locality witness"),
    }
    out.finish(false)
}

/// `‖[W(s), ψ(w₁)ψ*(w₂)] v‖_ω` over vector pairs × generators.
///
/// Triples on which `σ⋆s₀` is constant across `supp w₁ ∪ supp w₂` must
/// commute; Poisson additionally needs a disjoint-support witness.
pub fn check_bilinear_locality(
    model: &Model,
    state: &State,
    vectors: &[NamedVector],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("bilinear_locality");
    let mut witness: Option<(f64, String)> = None;
    for (n1, w1) in vectors {
        for (n2, w2) in vectors {
            let bilinear = FieldOperator::Product(vec![model.psi(&model.lift(w1)), model.psi_adjoint(&model.lift(w2))]);
            let mut points = model.points_of(w1);
            points.extend(model.points_of(w2));
            for k in 0..model.rank() {
                let n = model.unit(k);
                let label = format!("[W(s{k}), psi({n1}) psi*({n2})]");
                let op = commutator(&model.weyl_op(&n), &bilinear);
                let Some(r) = residual_or_note(&mut out, model, &op, probes, state, &label) else {
                    continue;
                };
                if spread_on(model.generator_phase(k), points.iter().copied()) <= 1e-12 {
                    out.push(Residual::at_most(label.clone(), r, tol));
                } else {
                    out.push(Residual::info(label.clone(), r));
                }
                if points.is_disjoint(&model.generator_support(&n)) && witness.as_ref().map_or(true, |(v, _)| r > *v) {
                    witness = Some((r, label));
                }
            }
        }
    }
    if model.kind() == SigmaKind::Poisson {
        match witness {
            Some((r, label)) => {
                out.push(Residual::exceeds(format!("witness {label}"), r, WITNESS_THRESHOLD));
                out.witness = Some(format!("{label} with supp(s) disjoint from both vectors"));
            }
            None => out.note("no disjoint-support triple for a non-locality witness"),
        }
    }
    out.finish(false)
}

fn in_plus_sector(model: &Model, f: &ModuleVector) -> bool {
    f.indices().all(|b| model.basis().sector(b) == Sector::Plus)
}

/// `Σ_{ij} ⟨fᵢ, gⱼ⟩ W(n'ⱼ − nᵢ)` from the group-element decompositions.
pub fn free_anticommutator_value(model: &Model, f: &ModuleVector, g: &ModuleVector) -> WeylElement {
    let fd = f.decompose(model.dim());
    let gd = g.decompose(model.dim());
    let mut out = WeylElement::zero();
    for (n, fi) in &fd {
        for (m, gj) in &gd {
            out.add_term(m - n, fi.inner(gj));
        }
    }
    out
}

/// `[ψ*(f), ψ(g)]₊` against the free-pair value, for pairs in `h₊·A`.
///
/// Mutually free pairs must stay below `tol`; freeness is only sufficient,
/// so non-free pairs are reported and the largest one must exceed the
/// witness threshold.
pub fn check_anticommutator(
    model: &Model,
    state: &State,
    vectors: &[NamedModuleVector],
    probes: &[FockElement],
    tol: f64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new("anticommutator");
    let mut witness: Option<(f64, String)> = None;
    for (nf, f) in vectors {
        for (ng, g) in vectors {
            if !(in_plus_sector(model, f) && in_plus_sector(model, g)) {
                out.note(format!("skipped ({nf}, {ng}): not in the + sector"));
                continue;
            }
            let label = format!("[psi*({nf}), psi({ng})]+");
            let value = free_anticommutator_value(model, f, g);
            let op = difference(
                &anticommutator(&model.psi_adjoint(f), &model.psi(g)),
                &FieldOperator::LeftMult(value),
            );
            let Some(r) = residual_or_note(&mut out, model, &op, probes, state, &label) else {
                continue;
            };
            let freeness = model.module().mutually_free(f, g);
            if freeness.free {
                out.push(Residual::at_most(label, r, tol));
            } else {
                out.push(Residual::info(label.clone(), r));
                if witness.as_ref().map_or(true, |(v, _)| r > *v) {
                    let why = freeness
                        .witness
                        .map(|w| format!("{:?} at ({}, {})", w.condition, w.first, w.second))
                        .unwrap_or_default();
                    witness = Some((r, format!("{label}: not mutually free, {why}")));
                }
            }
        }
    }
    if let Some((r, label)) = witness {
        out.push(Residual::exceeds("largest non-free residual", r, WITNESS_THRESHOLD));
        out.witness = Some(label);
    }
    out.finish(false)
}

/// Pairs whose supports stay apart after `+ B_r` dilation are mutually free.
pub fn check_dilated_freeness(model: &Model, vectors: &[NamedModuleVector]) -> CheckOutcome {
    let mut out = CheckOutcome::new("dilated_freeness");
    let Some(radius) = model.kind().support_radius() else {
        out.note(format!("{} kernels have unbounded support", model.kind().name()));
        return out.finish(false);
    };
    for (i, (nf, f)) in vectors.iter().enumerate() {
        for (ng, g) in vectors.iter().skip(i + 1) {
            let a = dilate(model.grid(), &model.spatial_support(f).union(), radius);
            let b = dilate(model.grid(), &model.spatial_support(g).union(), radius);
            let freeness = model.module().mutually_free(f, g);
            let defect = freeness.witness.map_or(0.0, |w| w.residual);
            let label = format!("({nf}, {ng})");
            if a.is_disjoint(&b) {
                out.push(Residual::at_most(format!("{label} dilated apart"), defect, 0.0));
            } else {
                out.push(Residual::info(format!("{label} dilated overlap"), defect));
            }
        }
    }
    out.finish(false)
}
