//! Exact Weyl algebra, twisted free bimodules and fermionic Fock bimodules.
//!
//! The crate builds a Weyl C*-algebra over a finitely generated symplectic
//! group, the free Hilbert bimodule `h·A` with a twisted left action, the
//! truncated antisymmetric Fock bimodule over it and the fermionic creation,
//! annihilation and Dirac field operators. The [`models`] module supplies the
//! σ-twisted fixed-time models and their locality checks.

pub mod bimodule;
pub mod fock;
pub mod linalg;
pub mod models;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod weyl;

pub use bimodule::{
    BimoduleError, Conjugation, DiracTriple, FreeBimodule, ModuleVector, OneParticleBasis, OneParticleVector,
    Sector, Twist, Unitary,
};
pub use fock::{AntisymmetricElement, FieldOperator, FockElement, FockSpace, TensorElement};
pub use weyl::{
    GeneratorSet, GridSpec, GroupElement, State, StateKind, TestFunctionPair, WeylAlgebra, WeylElement, WeylError,
};
