//! Fixed-time σ-models: a Weyl algebra over grid test functions, the twist
//! `u_σ` built from `σ⋆s₀`, and the electron field on the resulting Fock
//! bimodule.

pub mod gauge;
pub mod locality;
pub mod sigma;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bimodule::{BimoduleError, DiracTriple, FreeBimodule, ModuleVector, OneParticleBasis, OneParticleVector};
use crate::fock::{electron, electron_adjoint, FieldOperator, FockElement, FockError, FockSpace};
use crate::weyl::{GeneratorSet, GridSpec, GroupElement, WeylAlgebra, WeylElement, WeylError};

pub use gauge::{GaugeAction, ObservableGenerator};
pub use sigma::{dilate, grid_support, make_twist, sigma_convolve, SigmaKind, SpatialSupport};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("{0}")]
    Invalid(String),
}

/// One σ-model instance: generators, twist, Dirac triple and Fock space.
#[derive(Debug, Clone)]
pub struct Model {
    kind: SigmaKind,
    triple: DiracTriple,
    space: FockSpace,
    phases: Vec<Vec<f64>>,
}

impl Model {
    pub fn new(kind: SigmaKind, generators: GeneratorSet, truncation: usize) -> Result<Self, ModelError> {
        if let SigmaKind::Bump { radius } = kind {
            if !(radius.is_finite() && radius > 0.0) {
                return Err(ModelError::Invalid(format!("bump radius must be > 0 (got {radius})")));
            }
        }
        let basis = OneParticleBasis::new(generators.grid());
        let twist = make_twist(kind, &generators, &basis)?;
        let phases = sigma::generator_phases(kind, &generators);
        let algebra = WeylAlgebra::new(generators);
        let module = FreeBimodule::new(algebra, basis, twist)?;
        let triple = DiracTriple::new(module.clone())?;
        let space = FockSpace::new(module, truncation)?;
        Ok(Model {
            kind,
            triple,
            space,
            phases,
        })
    }

    pub fn kind(&self) -> SigmaKind {
        self.kind
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn triple(&self) -> &DiracTriple {
        &self.triple
    }

    pub fn module(&self) -> &FreeBimodule {
        self.space.module()
    }

    pub fn algebra(&self) -> &WeylAlgebra {
        self.space.module().algebra()
    }

    pub fn generators(&self) -> &GeneratorSet {
        self.algebra().generators()
    }

    pub fn grid(&self) -> &GridSpec {
        self.generators().grid()
    }

    pub fn basis(&self) -> &OneParticleBasis {
        self.space.module().basis()
    }

    pub fn rank(&self) -> usize {
        self.algebra().rank()
    }

    pub fn dim(&self) -> usize {
        self.basis().dim()
    }

    pub fn truncation(&self) -> usize {
        self.space.truncation()
    }

    /// `σ⋆s₀⁽ᵏ⁾` on the grid.
    pub fn generator_phase(&self, k: usize) -> &[f64] {
        &self.phases[k]
    }

    /// `σ⋆s₀` for `s = s_n`.
    pub fn phase(&self, n: &GroupElement) -> Vec<f64> {
        let mut out = vec![0.0; self.grid().len()];
        for (k, &nk) in n.exponents().iter().enumerate() {
            for (o, p) in out.iter_mut().zip(&self.phases[k]) {
                *o += nk as f64 * p;
            }
        }
        out
    }

    pub fn unit(&self, k: usize) -> GroupElement {
        GroupElement::unit(self.rank(), k)
    }

    pub fn one(&self) -> WeylElement {
        self.algebra().one()
    }

    /// `w·𝟏`.
    pub fn lift(&self, w: &OneParticleVector) -> ModuleVector {
        ModuleVector::from_vector(w, &self.one())
    }

    pub fn psi(&self, f: &ModuleVector) -> FieldOperator {
        electron(&self.triple, f)
    }

    pub fn psi_adjoint(&self, f: &ModuleVector) -> FieldOperator {
        electron_adjoint(&self.triple, f)
    }

    pub fn weyl_op(&self, n: &GroupElement) -> FieldOperator {
        FieldOperator::LeftMult(WeylElement::weyl(n.clone()))
    }

    /// Grid points carrying a one-particle vector.
    pub fn points_of(&self, w: &OneParticleVector) -> BTreeSet<usize> {
        w.support().map(|b| self.basis().point(b)).collect()
    }

    /// Grid support of `s_n` (both components).
    pub fn generator_support(&self, n: &GroupElement) -> BTreeSet<usize> {
        let s = self.generators().combination(n);
        let mut out = grid_support(&s.s0);
        out.extend(grid_support(&s.s1));
        out
    }

    /// Grid support of `s₀` of `s_n`.
    pub fn generator_s0_support(&self, n: &GroupElement) -> BTreeSet<usize> {
        grid_support(&self.generators().combination(n).s0)
    }

    pub fn spatial_support(&self, f: &ModuleVector) -> SpatialSupport {
        SpatialSupport::of(f, self.basis(), self.generators())
    }

    /// Normal-form probe vectors `e_s·A` with `|s| ≤ max_level` and
    /// `A ∈ {𝟏, W(Σₖ eₖ)}`.
    pub fn probes(&self, max_level: usize) -> Vec<FockElement> {
        let all = GroupElement::new(vec![1; self.rank()]);
        let mut rights = vec![self.one()];
        if self.rank() > 0 {
            rights.push(WeylElement::weyl(all));
        }
        self.space.normal_form_basis(max_level, &rights)
    }
}
