//! σ-kernels, discrete convolution and the model twists `u_σ`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bimodule::{BimoduleError, ModuleVector, OneParticleBasis, Sector, Twist, Unitary};
use crate::weyl::{GeneratorSet, GridSpec, WeylError};

/// Values with modulus at or below this are outside the spatial support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SigmaKind {
    Delta,
    Bump { radius: f64 },
    Poisson,
    Lebesgue,
}

impl SigmaKind {
    pub fn name(&self) -> &'static str {
        match self {
            SigmaKind::Delta => "delta",
            SigmaKind::Bump { .. } => "bump",
            SigmaKind::Poisson => "poisson",
            SigmaKind::Lebesgue => "lebesgue",
        }
    }

    /// Radius of the kernel support, `0` for δ and `None` when unbounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            SigmaKind::Delta => Some(0.0),
            SigmaKind::Bump { radius } => Some(*radius),
            SigmaKind::Poisson | SigmaKind::Lebesgue => None,
        }
    }
}

impl std::fmt::Display for SigmaKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SigmaKind::Bump { radius } => write!(f, "bump(r={radius})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Description of the Poisson kernel value used at the origin.
pub fn poisson_regularization(dimension: usize) -> &'static str {
    match dimension {
        1 => "origin value -h/8: mean of -|x|/2 over |x| < h/2",
        2 => "origin value -(ln(h/2) - 1/2)/(2π): mean of -ln|x|/(2π) over the disc of radius h/2",
        _ => "origin value 3/(4πh): mean of 1/(4π|x|) over the ball of radius h/2",
    }
}

fn bump_profile(rho: f64, radius: f64) -> f64 {
    let t = rho / radius;
    if t >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Cell offsets with every coordinate in `-k..=k`.
fn offsets(dimension: usize, k: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dimension {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-k..=k).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// Sampled kernel `σ(x)` at an integer cell displacement.
#[derive(Debug, Clone)]
pub struct Kernel {
    kind: SigmaKind,
    dimension: usize,
    spacing: f64,
    bump_norm: f64,
}

impl Kernel {
    pub fn new(kind: SigmaKind, grid: &GridSpec) -> Self {
        let dimension = grid.dimension();
        let spacing = grid.spacing();
        let bump_norm = match kind {
            SigmaKind::Bump { radius } => {
                let k = (radius / spacing).ceil() as i64;
                let total: f64 = offsets(dimension, k)
                    .iter()
                    .map(|d| bump_profile(norm(d) * spacing, radius))
                    .sum::<f64>()
                    * grid.cell_volume();
                total
            }
            _ => 1.0,
        };
        Kernel {
            kind,
            dimension,
            spacing,
            bump_norm,
        }
    }

    pub fn value(&self, displacement: &[i64]) -> f64 {
        let h = self.spacing;
        let rho = norm(displacement) * h;
        let origin = displacement.iter().all(|&c| c == 0);
        match self.kind {
            SigmaKind::Delta => {
                if origin {
                    h.powi(-(self.dimension as i32))
                } else {
                    0.0
                }
            }
            SigmaKind::Bump { radius } => {
                if self.bump_norm > 0.0 {
                    bump_profile(rho, radius) / self.bump_norm
                } else {
                    // radius below half a cell: the bump collapses to δ
                    if origin {
                        h.powi(-(self.dimension as i32))
                    } else {
                        0.0
                    }
                }
            }
            SigmaKind::Lebesgue => 1.0,
            SigmaKind::Poisson => match (self.dimension, origin) {
                (1, true) => -h / 8.0,
                (1, false) => -rho / 2.0,
                (2, true) => -((h / 2.0).ln() - 0.5) / (2.0 * PI),
                (2, false) => -rho.ln() / (2.0 * PI),
                (_, true) => 3.0 / (4.0 * PI * h),
                (_, false) => 1.0 / (4.0 * PI * rho),
            },
        }
    }
}

fn norm(d: &[i64]) -> f64 {
    (d.iter().map(|c| c * c).sum::<i64>() as f64).sqrt()
}

/// `(σ⋆s₀)(x) = Σ_y σ(x−y) s₀(y)·spacing^d`.
pub fn sigma_convolve(kind: SigmaKind, grid: &GridSpec, s0: &[f64]) -> Result<Vec<f64>, WeylError> {
    if s0.len() != grid.len() {
        return Err(WeylError::GridMismatch {
            expected: grid.len(),
            got: s0.len(),
        });
    }
    let kernel = Kernel::new(kind, grid);
    let vol = grid.cell_volume();
    let sources: Vec<usize> = (0..grid.len()).filter(|&y| s0[y] != 0.0).collect();
    Ok((0..grid.len())
        .map(|x| {
            sources
                .iter()
                .map(|&y| kernel.value(&grid.displacement(x, y)) * s0[y])
                .sum::<f64>()
                * vol
        })
        .collect())
}

/// Per-generator phases `σ⋆s₀⁽ᵏ⁾`.
pub fn generator_phases(kind: SigmaKind, gens: &GeneratorSet) -> Vec<Vec<f64>> {
    gens.generators()
        .iter()
        .map(|g| sigma_convolve(kind, gens.grid(), &g.s0).expect("generators share the grid"))
        .collect()
}

/// Diagonal twist with `e^{−iσ⋆s₀}` on `h₊` and `e^{+iσ⋆s₀}` on `h₋`.
pub fn make_twist(kind: SigmaKind, gens: &GeneratorSet, basis: &OneParticleBasis) -> Result<Twist, BimoduleError> {
    let unitaries = generator_phases(kind, gens)
        .into_iter()
        .map(|phi| {
            Unitary::Diagonal(
                (0..basis.dim())
                    .map(|b| {
                        let idx = basis.decode(b);
                        let sign = match idx.sector {
                            Sector::Plus => -1.0,
                            Sector::Minus => 1.0,
                        };
                        Complex64::from_polar(1.0, sign * phi[idx.point])
                    })
                    .collect(),
            )
        })
        .collect();
    Twist::new(basis.dim(), unitaries)
}

/// Grid sites where `|values| > SUPPORT_TOL`.
pub fn grid_support(values: &[f64]) -> BTreeSet<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > SUPPORT_TOL)
        .map(|(i, _)| i)
        .collect()
}

/// `set + B_r`, using `ceil(r/spacing)` cells in Euclidean cell distance.
pub fn dilate(grid: &GridSpec, set: &BTreeSet<usize>, radius: f64) -> BTreeSet<usize> {
    let cells = (radius / grid.spacing()).ceil().max(0.0);
    (0..grid.len())
        .filter(|&x| set.iter().any(|&y| norm(&grid.displacement(x, y)) <= cells + 1e-9))
        .collect()
}

/// Fermionic and bosonic spatial supports of a module vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpatialSupport {
    pub fermionic: BTreeSet<usize>,
    pub bosonic: BTreeSet<usize>,
}

impl SpatialSupport {
    pub fn of(f: &ModuleVector, basis: &OneParticleBasis, gens: &GeneratorSet) -> Self {
        let fermionic = f.indices().map(|b| basis.point(b)).collect();
        let mut bosonic = BTreeSet::new();
        for n in f.support() {
            let s = gens.combination(&n);
            bosonic.extend(grid_support(&s.s0));
            bosonic.extend(grid_support(&s.s1));
        }
        SpatialSupport { fermionic, bosonic }
    }

    pub fn union(&self) -> BTreeSet<usize> {
        self.fermionic.union(&self.bosonic).copied().collect()
    }
}
