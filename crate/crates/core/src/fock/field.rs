//! Symbolic field operators built from creation, annihilation and left
//! multiplication, with structural adjoints and the U(1) gauge action.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::space::{FockElement, FockSpace};
use crate::bimodule::{Conjugation, DiracTriple, ModuleVector, OneParticleBasis, Sector};
use crate::weyl::WeylElement;

#[derive(Debug, Clone)]
pub enum FieldOperator {
    /// `c·𝟙`.
    Scalar(Complex64),
    /// Left action of an algebra element.
    LeftMult(WeylElement),
    Create(ModuleVector),
    Annihilate(ModuleVector),
    Sum(Vec<FieldOperator>),
    /// `[A, B, C]` is `A∘B∘C`; the rightmost factor acts first.
    Product(Vec<FieldOperator>),
}

impl FieldOperator {
    pub fn identity() -> Self {
        FieldOperator::Scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scaled(c: Complex64, op: FieldOperator) -> Self {
        FieldOperator::Product(vec![FieldOperator::Scalar(c), op])
    }

    pub fn apply(&self, space: &FockSpace, v: &FockElement) -> FockElement {
        match self {
            FieldOperator::Scalar(c) => v.scale(*c),
            FieldOperator::LeftMult(a) => space.left_action(a, v),
            FieldOperator::Create(f) => space.create(f, v),
            FieldOperator::Annihilate(f) => space.annihilate(f, v),
            FieldOperator::Sum(ops) => ops
                .iter()
                .map(|op| op.apply(space, v))
                .fold(space.zero(), |acc, x| acc.plus(&x)),
            FieldOperator::Product(ops) => ops
                .iter()
                .rev()
                .fold(v.clone(), |acc, op| op.apply(space, &acc)),
        }
    }

    /// Structural adjoint: create ↔ annihilate, `L(a)* = L(a*)`.
    pub fn adjoint(&self) -> FieldOperator {
        match self {
            FieldOperator::Scalar(c) => FieldOperator::Scalar(c.conj()),
            FieldOperator::LeftMult(a) => FieldOperator::LeftMult(a.adjoint()),
            FieldOperator::Create(f) => FieldOperator::Annihilate(f.clone()),
            FieldOperator::Annihilate(f) => FieldOperator::Create(f.clone()),
            FieldOperator::Sum(ops) => FieldOperator::Sum(ops.iter().map(FieldOperator::adjoint).collect()),
            FieldOperator::Product(ops) => {
                FieldOperator::Product(ops.iter().rev().map(FieldOperator::adjoint).collect())
            }
        }
    }

    /// `(net, peak)`: upper bounds on the level change of the output and on
    /// the highest intermediate level, both relative to the input level.
    pub fn level_reach(&self) -> (i64, i64) {
        match self {
            FieldOperator::Scalar(_) | FieldOperator::LeftMult(_) => (0, 0),
            FieldOperator::Create(_) => (1, 1),
            FieldOperator::Annihilate(_) => (-1, 0),
            FieldOperator::Sum(ops) => ops
                .iter()
                .map(FieldOperator::level_reach)
                .fold((i64::MIN, 0), |(n, p), (a, b)| (n.max(a), p.max(b))),
            FieldOperator::Product(ops) => {
                let mut cur = 0i64;
                let mut peak = 0i64;
                for op in ops.iter().rev() {
                    let (n, p) = op.level_reach();
                    peak = peak.max(cur + p);
                    cur += n;
                }
                (cur, peak)
            }
        }
    }

    /// Highest input level at which no intermediate result is truncated.
    pub fn safe_input_level(&self, truncation: usize) -> Option<usize> {
        let (_, peak) = self.level_reach();
        let top = truncation as i64 - peak;
        (top >= 0).then_some(top as usize)
    }

    /// Charge `q` with `β_z(X) = z^q X`, or `None` when the terms disagree.
    pub fn gauge_charge(&self, basis: &OneParticleBasis) -> Option<i32> {
        let sector_of = |f: &ModuleVector| -> Option<Sector> {
            let mut it = f.indices().map(|b| basis.sector(b));
            let first = it.next()?;
            it.all(|s| s == first).then_some(first)
        };
        match self {
            FieldOperator::Scalar(_) | FieldOperator::LeftMult(_) => Some(0),
            FieldOperator::Create(f) => match sector_of(f) {
                Some(Sector::Plus) => Some(-1),
                Some(Sector::Minus) => Some(1),
                None if f.is_zero() => Some(0),
                None => None,
            },
            FieldOperator::Annihilate(f) => match sector_of(f) {
                Some(Sector::Plus) => Some(1),
                Some(Sector::Minus) => Some(-1),
                None if f.is_zero() => Some(0),
                None => None,
            },
            FieldOperator::Sum(ops) => {
                let mut charges = ops.iter().map(|op| op.gauge_charge(basis));
                let first = charges.next().unwrap_or(Some(0))?;
                charges.all(|c| c == Some(first)).then_some(first)
            }
            FieldOperator::Product(ops) => ops.iter().map(|op| op.gauge_charge(basis)).sum(),
        }
    }
}

/// `A∘B − B∘A`.
pub fn commutator(a: &FieldOperator, b: &FieldOperator) -> FieldOperator {
    FieldOperator::Sum(vec![
        FieldOperator::Product(vec![a.clone(), b.clone()]),
        FieldOperator::Product(vec![FieldOperator::Scalar(Complex64::new(-1.0, 0.0)), b.clone(), a.clone()]),
    ])
}

/// `A∘B + B∘A`.
pub fn anticommutator(a: &FieldOperator, b: &FieldOperator) -> FieldOperator {
    FieldOperator::Sum(vec![
        FieldOperator::Product(vec![a.clone(), b.clone()]),
        FieldOperator::Product(vec![b.clone(), a.clone()]),
    ])
}

/// `A − B`.
pub fn difference(a: &FieldOperator, b: &FieldOperator) -> FieldOperator {
    FieldOperator::Sum(vec![
        a.clone(),
        FieldOperator::scaled(Complex64::new(-1.0, 0.0), b.clone()),
    ])
}

/// Self-dual Dirac field `ψ̂(f) = (𝐚₋*(f) + 𝐚₋(κf))/√2`.
pub fn dirac(triple: &DiracTriple, f: &ModuleVector) -> FieldOperator {
    FieldOperator::scaled(
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        FieldOperator::Sum(vec![
            FieldOperator::Create(f.clone()),
            FieldOperator::Annihilate(triple.conjugation().apply(f)),
        ]),
    )
}

/// Electron field `ψ(w) = ψ̂(w ⊕ 0)`; `w` should live in `h₊·A`.
pub fn electron(triple: &DiracTriple, w: &ModuleVector) -> FieldOperator {
    dirac(triple, w)
}

/// `ψ*(w) = ψ̂(κ(w ⊕ 0))`.
pub fn electron_adjoint(triple: &DiracTriple, w: &ModuleVector) -> FieldOperator {
    dirac(triple, &triple.conjugation().apply(w))
}

/// Applies `ψ̂(f)` to a Fock vector.
pub fn dirac_apply(space: &FockSpace, conjugation: &Conjugation, f: &ModuleVector, v: &FockElement) -> FockElement {
    let created = space.create(f, v);
    let annihilated = space.annihilate(&conjugation.apply(f), v);
    created.plus(&annihilated).scale(Complex64::new(FRAC_1_SQRT_2, 0.0))
}

/// `V_z`: `z̄` on `h₊`, `z` on `h₋`.
fn gauge_vector(z: Complex64, basis: &OneParticleBasis, f: &ModuleVector) -> ModuleVector {
    let mut out = ModuleVector::zero();
    for (b, a) in f.iter() {
        let phase = match basis.sector(b) {
            Sector::Plus => z.conj(),
            Sector::Minus => z,
        };
        out.add_term(b, &a.scale(phase));
    }
    out
}

/// `β_z` with `β_z(ψ(f)) = z̄ ψ(f)`; algebra elements are fixed.
pub fn gauge_transform(z: Complex64, basis: &OneParticleBasis, op: &FieldOperator) -> FieldOperator {
    match op {
        FieldOperator::Scalar(_) | FieldOperator::LeftMult(_) => op.clone(),
        FieldOperator::Create(f) => FieldOperator::Create(gauge_vector(z, basis, f)),
        FieldOperator::Annihilate(f) => FieldOperator::Annihilate(gauge_vector(z, basis, f)),
        FieldOperator::Sum(ops) => FieldOperator::Sum(ops.iter().map(|o| gauge_transform(z, basis, o)).collect()),
        FieldOperator::Product(ops) => {
            FieldOperator::Product(ops.iter().map(|o| gauge_transform(z, basis, o)).collect())
        }
    }
}
