//! Fermionic Fock bimodule over a free twisted bimodule.

pub mod field;
pub mod gns;
pub mod space;
pub mod tensor;

pub use field::{
    anticommutator, commutator, difference, dirac, dirac_apply, electron, electron_adjoint, gauge_transform,
    FieldOperator,
};
pub use gns::{gns_gram, operator_matrix, operator_residual, GnsFrame, OperatorMatrix};
pub use space::{FockElement, FockError, FockSpace};
pub use tensor::{antisymmetrize, antisymmetrize_tensor, AntisymmetricElement, TensorElement, TensorError, Tuple};
