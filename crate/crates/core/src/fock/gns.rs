//! Finite compressions of field operators in the GNS scalar product.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::field::FieldOperator;
use super::space::{FockElement, FockSpace};
use crate::linalg;
use crate::weyl::State;

/// Relative cutoff below which Gram eigenvalues count as zero.
pub const GRAM_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    /// `C† M C` in an ω-orthonormal basis of the span.
    pub matrix: DMatrix<Complex64>,
    /// Norm of the operator restricted to the span.
    pub norm_estimate: f64,
    pub rank: usize,
    /// True when the Gram matrix had to be pseudo-inverted.
    pub degenerate: bool,
}

/// Bit `ℓ` set when level `ℓ` of `v` is nonzero.
fn level_mask(v: &FockElement) -> u64 {
    let mut mask = u64::from(!v.vacuum_part().is_zero());
    for l in 1..=v.truncation() {
        if !v.level(l).is_zero() {
            mask |= 1 << l;
        }
    }
    mask
}

fn pairing(space: &FockSpace, left: &[FockElement], right: &[FockElement], state: &State) -> DMatrix<Complex64> {
    let lm: Vec<u64> = left.iter().map(level_mask).collect();
    let rm: Vec<u64> = right.iter().map(level_mask).collect();
    DMatrix::from_fn(left.len(), right.len(), |i, j| {
        if lm[i] & rm[j] == 0 {
            Complex64::default()
        } else {
            space.gns_inner(&left[i], &right[j], state)
        }
    })
}

/// `G_ij = ⟨b_i, b_j⟩_ω`.
pub fn gns_gram(space: &FockSpace, basis: &[FockElement], state: &State) -> DMatrix<Complex64> {
    let g = pairing(space, basis, basis, state);
    linalg::hermitian_part(&g)
}

/// An ω-orthonormal frame `C` for the span of a fixed basis, reusable
/// across operators.
#[derive(Debug, Clone)]
pub struct GnsFrame {
    basis: Vec<FockElement>,
    c: DMatrix<Complex64>,
}

impl GnsFrame {
    pub fn new(space: &FockSpace, basis: Vec<FockElement>, state: &State) -> Self {
        let gram = gns_gram(space, &basis, state);
        let (vals, vecs) = linalg::hermitian_eigen(&gram);
        let top = vals.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > GRAM_RANK_TOL * top.max(1.0)).collect();
        let c = DMatrix::from_fn(basis.len(), keep.len(), |r, k| vecs[(r, keep[k])] / vals[keep[k]].sqrt());
        GnsFrame { basis, c }
    }

    pub fn basis(&self) -> &[FockElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.c.ncols()
    }

    /// True when the Gram matrix had to be pseudo-inverted.
    pub fn degenerate(&self) -> bool {
        self.rank() < self.basis.len()
    }

    /// Matrix and norm estimate of `op` on the span.
    pub fn operator_matrix(&self, space: &FockSpace, op: &FieldOperator, state: &State) -> OperatorMatrix {
        let c = &self.c;
        let images: Vec<FockElement> = self.basis.iter().map(|b| op.apply(space, b)).collect();
        let m = pairing(space, &self.basis, &images, state);
        let k = pairing(space, &images, &images, state);
        let matrix = c.adjoint() * m * c;
        let restricted = linalg::hermitian_part(&(c.adjoint() * k * c));
        let norm_estimate = linalg::hermitian_eigenvalues(&restricted)
            .into_iter()
            .fold(0.0, f64::max)
            .sqrt();
        OperatorMatrix {
            matrix,
            norm_estimate,
            rank: self.rank(),
            degenerate: self.degenerate(),
        }
    }
}

impl OperatorMatrix {
    /// Largest singular value of the compression.
    pub fn compression_norm(&self) -> f64 {
        if self.rank == 0 {
            return 0.0;
        }
        self.matrix.clone().singular_values().iter().cloned().fold(0.0, f64::max)
    }
}

/// Matrix and norm estimate of `op` on the span of `basis`.
pub fn operator_matrix(space: &FockSpace, op: &FieldOperator, basis: &[FockElement], state: &State) -> OperatorMatrix {
    GnsFrame::new(space, basis.to_vec(), state).operator_matrix(space, op, state)
}

/// `max ‖op v‖_ω` over the vectors whose level keeps `op` below the
/// truncation; `None` if no vector qualifies.
pub fn operator_residual(space: &FockSpace, op: &FieldOperator, vectors: &[FockElement], state: &State) -> Option<f64> {
    let safe = op.safe_input_level(space.truncation())?;
    let mut worst: Option<f64> = None;
    for v in vectors {
        if v.top_level().map_or(false, |l| l > safe) {
            continue;
        }
        let r = space.gns_norm(&op.apply(space, v), state);
        worst = Some(worst.map_or(r, |w: f64| w.max(r)));
    }
    worst
}
