//! Model-independent verification routines: Weyl relations, Gram
//! positivity, the generalized CAR, adjointness, covariance, norms, the
//! nested inner product and the Pauli principle.

use num_complex::Complex64;
use rand::Rng;

use crate::bimodule::ModuleVector;
use crate::fock::tensor::antisymmetrize;
use crate::fock::{anticommutator, difference, operator_residual, GnsFrame, FieldOperator, FockElement, TensorElement};
use crate::models::locality::{NamedModuleVector, WITNESS_THRESHOLD};
use crate::models::Model;
use crate::report::{CheckOutcome, Residual};
use crate::sampling;
use crate::weyl::{self, GroupElement, State, WeylElement};

/// Both state families on the model's algebra.
pub fn both_states(model: &Model) -> [State; 2] {
    [State::tracial(model.algebra()), State::quasifree(model.algebra())]
}

/// Associativity, involution and the single-product Weyl phase on random
/// inputs. The phase is recomputed from the test functions directly.
pub fn weyl_relations(model: &Model, rng: &mut impl Rng, cases: usize, phase_tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("weyl_relations");
    let alg = model.algebra();
    let m = model.rank();
    let mut assoc: f64 = 0.0;
    let mut invol: f64 = 0.0;
    let mut double_adj: f64 = 0.0;
    for _ in 0..cases {
        let a = sampling::weyl_element(rng, m, 3, 3);
        let b = sampling::weyl_element(rng, m, 3, 3);
        let c = sampling::weyl_element(rng, m, 3, 3);
        assoc = assoc.max(alg.mul(&alg.mul(&a, &b), &c).max_abs_diff(&alg.mul(&a, &alg.mul(&b, &c))));
        invol = invol.max(alg.mul(&a, &b).adjoint().max_abs_diff(&alg.mul(&b.adjoint(), &a.adjoint())));
        double_adj = double_adj.max(a.adjoint().adjoint().max_abs_diff(&a));
    }
    let mut phase: f64 = 0.0;
    let mut keys: f64 = 0.0;
    for _ in 0..cases {
        let n = sampling::group_element(rng, m, 3);
        let np = sampling::group_element(rng, m, 3);
        let eta = weyl::symplectic_form(
            model.grid(),
            &model.generators().combination(&n),
            &model.generators().combination(&np),
        )
        .expect("combinations share the grid");
        let prod = alg.mul(&WeylElement::weyl(n.clone()), &WeylElement::weyl(np.clone()));
        let sum = &n + &np;
        if prod.len() != 1 || prod.coeff(&sum) == Complex64::default() {
            keys += 1.0;
        }
        phase = phase.max((prod.coeff(&sum) - Complex64::from_polar(1.0, eta / 2.0)).norm());
    }
    out.push(Residual::at_most("associativity max coefficient deviation", assoc, weyl::COEFF_EQ_TOL));
    out.push(Residual::at_most("(ab)* - b*a* max coefficient deviation", invol, weyl::COEFF_EQ_TOL));
    out.push(Residual::at_most("a** - a", double_adj, 0.0));
    out.push(Residual::at_most("products with a key other than n+n'", keys, 0.0));
    out.push(Residual::at_most("W(n)W(n') phase vs exp(i eta/2)", phase, phase_tol));
    out.finish(false)
}

/// Minimum Gram eigenvalue over random sets of up to 8 distinct group
/// elements, for both states.
pub fn gram_psd(model: &Model, rng: &mut impl Rng, cases: usize, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("gram_psd");
    for state in both_states(model) {
        let mut worst = f64::INFINITY;
        for _ in 0..cases {
            let size = rng.gen_range(1..=8);
            let mut elems: Vec<GroupElement> = Vec::new();
            while elems.len() < size {
                let n = sampling::group_element(rng, model.rank(), 2);
                if !elems.contains(&n) {
                    elems.push(n);
                }
                if model.rank() == 0 {
                    break;
                }
            }
            let ws: Vec<WeylElement> = elems.into_iter().map(WeylElement::weyl).collect();
            let g = weyl::gram_matrix(&state, &ws).expect("nonempty");
            worst = worst.min(weyl::min_eigenvalue(&g));
            let mixed: Vec<WeylElement> = (0..size).map(|_| sampling::weyl_element(rng, model.rank(), 3, 2)).collect();
            let g = weyl::gram_matrix(&state, &mixed).expect("nonempty");
            worst = worst.min(weyl::min_eigenvalue(&g));
        }
        out.push(Residual::at_most(format!("{} min eigenvalue (negated)", state.kind()), -worst, tol));
    }
    out.finish(false)
}

/// Residuals of the generalized CAR for one pair on the probe vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarResiduals {
    /// `[𝐚₋(f), 𝐚₋*(g)]₊ − ⟨f, g⟩`.
    pub mixed: Option<f64>,
    /// `[𝐚₋*(f), 𝐚₋*(g)]₊`.
    pub create: Option<f64>,
    /// `[𝐚₋(f), 𝐚₋(g)]₊`.
    pub annihilate: Option<f64>,
}

pub fn car_residuals(model: &Model, state: &State, f: &ModuleVector, g: &ModuleVector, probes: &[FockElement]) -> CarResiduals {
    let space = model.space();
    let af = FieldOperator::Annihilate(f.clone());
    let ag = FieldOperator::Annihilate(g.clone());
    let cf = FieldOperator::Create(f.clone());
    let cg = FieldOperator::Create(g.clone());
    let inner = FieldOperator::LeftMult(model.module().inner(f, g));
    CarResiduals {
        mixed: operator_residual(space, &difference(&anticommutator(&af, &cg), &inner), probes, state),
        create: operator_residual(space, &anticommutator(&cf, &cg), probes, state),
        annihilate: operator_residual(space, &anticommutator(&af, &ag), probes, state),
    }
}

fn push_opt(out: &mut CheckOutcome, label: String, r: Option<f64>, tol: f64) {
    match r {
        Some(v) => out.push(Residual::at_most(label, v, tol)),
        None => out.note(format!("{label}: no probe vector below the truncation")),
    }
}

/// Generalized CAR for every mutually free ordered pair.
pub fn car(model: &Model, state: &State, vectors: &[NamedModuleVector], probes: &[FockElement], tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("car");
    let mut skipped = 0;
    for (nf, f) in vectors {
        for (ng, g) in vectors {
            if !model.module().mutually_free(f, g).free {
                skipped += 1;
                continue;
            }
            let r = car_residuals(model, state, f, g, probes);
            push_opt(&mut out, format!("[a({nf}), a*({ng})]+ - <{nf},{ng}>"), r.mixed, tol);
            push_opt(&mut out, format!("[a*({nf}), a*({ng})]+"), r.create, tol);
            push_opt(&mut out, format!("[a({nf}), a({ng})]+"), r.annihilate, tol);
        }
    }
    if skipped > 0 {
        out.note(format!("{skipped} ordered pairs are not mutually free (see car_deviation)"));
    }
    out.finish(false)
}

/// Mixed-relation residuals of the non-free ordered pairs; the largest
/// must exceed the witness threshold.
pub fn car_deviation(model: &Model, state: &State, vectors: &[NamedModuleVector], probes: &[FockElement]) -> CheckOutcome {
    let mut out = CheckOutcome::new("car_deviation");
    let mut best: Option<(f64, String)> = None;
    for (nf, f) in vectors {
        for (ng, g) in vectors {
            let freeness = model.module().mutually_free(f, g);
            let Some(w) = freeness.witness else { continue };
            let label = format!("[a({nf}), a*({ng})]+ - <{nf},{ng}>");
            let Some(r) = car_residuals(model, state, f, g, probes).mixed else {
                out.note(format!("{label}: no probe vector below the truncation"));
                continue;
            };
            out.push(Residual::info(label.clone(), r));
            if best.as_ref().map_or(true, |(v, _)| r > *v) {
                best = Some((r, format!("{label}: {:?} at ({}, {})", w.condition, w.first, w.second)));
            }
        }
    }
    match best {
        Some((r, label)) => {
            out.push(Residual::exceeds("largest non-free residual", r, WITNESS_THRESHOLD));
            out.witness = Some(label);
        }
        None => out.note("no pair that fails mutual freeness"),
    }
    out.finish(true)
}

/// `|⟨v, 𝐚₋(f)w⟩_ω − ⟨𝐚₋*(f)v, w⟩_ω|` on random inputs, both states.
pub fn adjointness(model: &Model, rng: &mut impl Rng, cases: usize, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("adjointness");
    let space = model.space();
    let n = model.truncation();
    for state in both_states(model) {
        let mut worst: f64 = 0.0;
        for _ in 0..cases {
            let f = sampling::module_vector(rng, model.dim(), model.rank(), 2, 2, 1);
            let v = sampling::fock_element(rng, space, n - 1, 2, 1);
            let w = sampling::fock_element(rng, space, n, 2, 1);
            let lhs = space.gns_inner(&v, &space.annihilate(&f, &w), &state);
            let rhs = space.gns_inner(&space.create(&f, &v), &w, &state);
            worst = worst.max((lhs - rhs).norm());
        }
        out.push(Residual::at_most(format!("{} max |<v,a(f)w> - <a*(f)v,w>|", state.kind()), worst, tol));
    }
    out.finish(false)
}

/// `‖(W(n)∘𝐚₋*(w) − 𝐚₋*(u(n)w)∘W(n))v‖_ω` for `w ∈ h`, both states.
pub fn covariance(model: &Model, rng: &mut impl Rng, cases: usize, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("covariance");
    let space = model.space();
    let all: Vec<usize> = (0..model.dim()).collect();
    for state in both_states(model) {
        let mut worst: f64 = 0.0;
        for _ in 0..cases {
            let w = sampling::one_particle_vector(rng, model.dim(), &all, 3);
            let n = sampling::group_element(rng, model.rank(), 2);
            let uw = model.module().twist().apply(&n, &w).expect("dimensions match");
            let wn = WeylElement::weyl(n);
            let v = sampling::fock_element(rng, space, model.truncation() - 1, 2, 1);
            let lhs = space.left_action(&wn, &space.create(&model.lift(&w), &v));
            let rhs = space.create(&model.lift(&uw), &space.left_action(&wn, &v));
            worst = worst.max(space.gns_norm(&lhs.minus(&rhs), &state));
        }
        out.push(Residual::at_most(format!("{} max covariance residual", state.kind()), worst, tol));
    }
    out.finish(false)
}

/// Restricted norm of `𝐚₋(w)` for random unit `w ∈ h` on the span of all
/// normal-form vectors up to level 2.
pub fn norm_recovery(model: &Model, state: &State, rng: &mut impl Rng, cases: usize, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("norm_recovery");
    let basis = model.space().normal_form_basis(2.min(model.truncation()), &[model.one()]);
    let frame = GnsFrame::new(model.space(), basis, state);
    let all: Vec<usize> = (0..model.dim()).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let support = rng.gen_range(1..=4);
        let w = sampling::unit_vector(rng, model.dim(), &all, support);
        let om = frame.operator_matrix(model.space(), &FieldOperator::Annihilate(model.lift(&w)), state);
        worst = worst.max((om.norm_estimate - 1.0).abs());
    }
    if frame.degenerate() {
        out.note("Gram matrix was rank deficient; pseudo-inverse used");
    }
    out.push(Residual::at_most("max |norm estimate of a(w) - 1|", worst, tol));
    out.finish(false)
}

/// Level-2 vectors `v = (e_b W(n)) ⊗ e_b`, `w = e_b ⊗ (e_b W(n))` whose
/// nested inner product differs from the naive product of factor inner
/// products. The basis index and generator with the largest twist phase
/// are used.
pub fn non_fock_witness(model: &Model, state: &State) -> CheckOutcome {
    let mut out = CheckOutcome::new("non_fock_witness");
    let module = model.module();
    let mut best: Option<(f64, usize, usize)> = None;
    for k in 0..model.rank() {
        let u = module.twist().operator(&model.unit(k));
        for b in 0..model.dim() {
            let shift = u
                .column(b)
                .iter()
                .find(|(r, _)| *r == b)
                .map_or(1.0, |(_, c)| (Complex64::new(1.0, 0.0) - c).norm());
            if best.map_or(true, |(s, _, _)| shift > s) {
                best = Some((shift, k, b));
            }
        }
    }
    let Some((_, k, b)) = best else {
        out.note("no Weyl generators");
        return out.finish(true);
    };
    let one = model.one();
    let wn = WeylElement::weyl(model.unit(k));
    let eb = ModuleVector::basis(b, one.clone());
    let ebw = ModuleVector::basis(b, wn.clone());
    let v = TensorElement::elementary(module, &[ebw.clone(), eb.clone()]).expect("two factors");
    let w = TensorElement::elementary(module, &[eb.clone(), ebw.clone()]).expect("two factors");
    let nested = state.eval(&v.inner(model.algebra(), &w).expect("same level"));
    let naive = state.eval(&model.algebra().mul(&module.inner(&ebw, &eb), &module.inner(&eb, &ebw)));
    let diff = (nested - naive).norm();
    out.push(Residual::info("nested <v,w>", nested.norm()));
    out.push(Residual::info("naive <v1,w1><v2,w2>", naive.norm()));
    out.push(Residual::exceeds("|nested - naive|", diff, WITNESS_THRESHOLD));
    out.witness = Some(format!("v = (e{b} W(s{k})) x e{b}, w = e{b} x (e{b} W(s{k}))"));
    out.finish(true)
}

fn level2_norm(state: &State, t: &TensorElement) -> f64 {
    let p = antisymmetrize(t);
    p.state_inner(state, &p).re.max(0.0).sqrt()
}

/// `P₋(f⊗g) + P₋(g⊗f) = 0` for free pairs, and a twisted `f` with
/// `P₋(f⊗f) ≠ 0`.
pub fn pauli(model: &Model, state: &State, vectors: &[NamedModuleVector], tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("pauli");
    let module = model.module();
    for (i, (nf, f)) in vectors.iter().enumerate() {
        for (ng, g) in vectors.iter().skip(i) {
            if !module.mutually_free(f, g).free {
                continue;
            }
            let fg = TensorElement::elementary(module, &[f.clone(), g.clone()]).expect("two factors");
            let gf = TensorElement::elementary(module, &[g.clone(), f.clone()]).expect("two factors");
            let mut sum = fg.clone();
            for (t, a) in gf.iter() {
                sum.add_term(t.clone(), a);
            }
            out.push(Residual::at_most(
                format!("P-({nf} x {ng}) + P-({ng} x {nf})"),
                level2_norm(state, &sum),
                tol,
            ));
        }
    }
    // f = e_a W(s_k) + e_b with u(s_k) e_b = μ e_b, μ ≠ 1
    let mut best: Option<(f64, usize, usize)> = None;
    for k in 0..model.rank() {
        let u = module.twist().operator(&model.unit(k));
        for b in 0..model.dim() {
            let col = u.column(b);
            let shift = col
                .iter()
                .find(|(r, _)| *r == b)
                .map_or(1.0, |(_, c)| (Complex64::new(1.0, 0.0) - c).norm());
            if best.map_or(true, |(s, _, _)| shift > s) {
                best = Some((shift, k, b));
            }
        }
    }
    if let Some((_, k, b)) = best {
        let a = (b + 1) % model.dim();
        let f = &ModuleVector::basis(a, WeylElement::weyl(model.unit(k))) + &ModuleVector::basis(b, model.one());
        let ff = TensorElement::elementary(module, &[f.clone(), f]).expect("two factors");
        out.push(Residual::exceeds(
            format!("|P-(f x f)| for f = e{a} W(s{k}) + e{b}"),
            level2_norm(state, &ff),
            WITNESS_THRESHOLD,
        ));
        out.witness = Some(format!("f = e{a} W(s{k}) + e{b}"));
    } else {
        out.note("no Weyl generators: twisted Pauli witness skipped");
    }
    out.finish(false)
}

/// `⟨wA, w'A'⟩_ω = ⟨w, w'⟩·ω(A*A')` for scalar antisymmetric `w, w'`.
pub fn embedding_isometry(model: &Model, rng: &mut impl Rng, cases: usize, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new("embedding_isometry");
    let space = model.space();
    let dim = model.dim();
    for state in both_states(model) {
        let mut worst: f64 = 0.0;
        for _ in 0..cases {
            let level = rng.gen_range(1..=model.truncation().min(3));
            let w = sampling::antisymmetric(rng, dim, 0, level, 3, 0);
            let wp = sampling::antisymmetric(rng, dim, 0, level, 3, 0);
            let scalar = |x: &WeylElement| x.coeff(&GroupElement::zero(0));
            // standard Fock inner product from the full expansion
            let we = w.expand();
            let wpe = wp.expand();
            let fock: Complex64 = we
                .iter()
                .map(|(t, x)| scalar(x).conj() * scalar(&wpe.get(t)))
                .sum();
            let a = sampling::weyl_element(rng, model.rank(), 3, 2);
            let ap = sampling::weyl_element(rng, model.rank(), 3, 2);
            let lift = |x: &crate::fock::AntisymmetricElement, c: &WeylElement| {
                let mut out = crate::fock::AntisymmetricElement::zero(x.level());
                for (t, y) in x.iter() {
                    out.try_add_term(t.clone(), &c.scale(scalar(y))).expect("increasing");
                }
                FockElement::from_level(model.truncation(), out).expect("level within truncation")
            };
            let lhs = space.gns_inner(&lift(&w, &a), &lift(&wp, &ap), &state);
            let rhs = fock * state.inner(&a, &ap);
            worst = worst.max((lhs - rhs).norm());
        }
        out.push(Residual::at_most(format!("{} max |<wA,w'A'> - <w,w'> w(A*A')|", state.kind()), worst, tol));
    }
    out.finish(false)
}
