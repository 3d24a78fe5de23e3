//! One-particle space, G-twists, conjugation and the free Hilbert bimodule `h·A`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg;
use crate::weyl::{GridSpec, GroupElement, WeylAlgebra, WeylElement, PRUNE_TOL};

/// Tolerance for unitarity, commutation and κ-compatibility of twists.
pub const TWIST_TOL: f64 = 1e-12;

/// Tolerance of the three mutual-freeness conditions.
pub const FREENESS_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BimoduleError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("twist generator {generator} is not unitary (defect {defect:e})")]
    NotUnitary { generator: usize, defect: f64 },
    #[error("twist generators {k} and {l} do not commute (defect {defect:e})")]
    NotCommuting { k: usize, l: usize, defect: f64 },
    #[error("twist has {twist} generators, Weyl algebra has {algebra}")]
    RankMismatch { twist: usize, algebra: usize },
    #[error("conjugation does not commute with twist generator {generator} (defect {defect:e})")]
    ConjugationIncompatible { generator: usize, defect: f64 },
    #[error("basis index {0} out of range")]
    IndexOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Plus,
    Minus,
}

impl Sector {
    pub fn flip(self) -> Sector {
        match self {
            Sector::Plus => Sector::Minus,
            Sector::Minus => Sector::Plus,
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Plus => write!(f, "+"),
            Sector::Minus => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub sector: Sector,
    pub point: usize,
    pub component: usize,
}

/// Index set `(sector, point, component)` of `h = h₊ ⊕ h₋`.
///
/// Flat index is `sector·points·C + point·C + component` with `h₊` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneParticleBasis {
    points: usize,
    components: usize,
}

impl OneParticleBasis {
    pub fn new(grid: &GridSpec) -> Self {
        OneParticleBasis {
            points: grid.len(),
            components: grid.spinor_components(),
        }
    }

    pub fn with_sizes(points: usize, components: usize) -> Self {
        assert!(points > 0 && components > 0, "empty one-particle basis");
        OneParticleBasis { points, components }
    }

    pub fn dim(&self) -> usize {
        2 * self.sector_dim()
    }

    pub fn sector_dim(&self) -> usize {
        self.points * self.components
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn index(&self, sector: Sector, point: usize, component: usize) -> usize {
        debug_assert!(point < self.points && component < self.components);
        let s = match sector {
            Sector::Plus => 0,
            Sector::Minus => 1,
        };
        s * self.sector_dim() + point * self.components + component
    }

    pub fn decode(&self, idx: usize) -> BasisIndex {
        debug_assert!(idx < self.dim());
        let sector = if idx < self.sector_dim() {
            Sector::Plus
        } else {
            Sector::Minus
        };
        let rest = idx % self.sector_dim();
        BasisIndex {
            sector,
            point: rest / self.components,
            component: rest % self.components,
        }
    }

    pub fn sector(&self, idx: usize) -> Sector {
        self.decode(idx).sector
    }

    pub fn point(&self, idx: usize) -> usize {
        self.decode(idx).point
    }

    /// Index with the charge sector swapped.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        (idx + self.sector_dim()) % self.dim()
    }
}

/// Sparse vector of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleVector {
    dim: usize,
    coeffs: BTreeMap<usize, Complex64>,
}

impl OneParticleVector {
    pub fn zero(dim: usize) -> Self {
        OneParticleVector {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(dim: usize, b: usize) -> Self {
        let mut v = OneParticleVector::zero(dim);
        v.add(b, Complex64::new(1.0, 0.0));
        v
    }

    pub fn from_dense(values: &[Complex64]) -> Self {
        let mut v = OneParticleVector::zero(values.len());
        for (b, c) in values.iter().enumerate() {
            v.add(b, *c);
        }
        v
    }

    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let mut v = OneParticleVector::zero(dim);
        for (b, c) in entries {
            v.add(b, c);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, b: usize) -> Complex64 {
        self.coeffs.get(&b).copied().unwrap_or_default()
    }

    pub fn add(&mut self, b: usize, c: Complex64) {
        assert!(b < self.dim, "basis index {b} out of range {}", self.dim);
        let v = self.get(b) + c;
        if v.norm() > PRUNE_TOL {
            self.coeffs.insert(b, v);
        } else {
            self.coeffs.remove(&b);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coeffs.iter().map(|(b, c)| (*b, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim];
        for (b, c) in self.iter() {
            out[b] = c;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &OneParticleVector) -> Complex64 {
        self.iter().map(|(b, c)| c.conj() * other.get(b)).sum()
    }

    pub fn scale(&self, c: Complex64) -> OneParticleVector {
        OneParticleVector::from_entries(self.dim, self.iter().map(|(b, v)| (b, v * c)))
    }

    pub fn normalized(&self) -> OneParticleVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn plus(&self, other: &OneParticleVector) -> OneParticleVector {
        let mut out = self.clone();
        for (b, c) in other.iter() {
            out.add(b, c);
        }
        out
    }

    pub fn minus(&self, other: &OneParticleVector) -> OneParticleVector {
        self.plus(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }
}

/// A unitary on `h`, kept diagonal when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Unitary {
    Diagonal(Vec<Complex64>),
    Dense(DMatrix<Complex64>),
}

impl Unitary {
    pub fn identity(dim: usize) -> Self {
        Unitary::Diagonal(vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        match self {
            Unitary::Diagonal(d) => d.len(),
            Unitary::Dense(m) => m.nrows(),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        match self {
            Unitary::Diagonal(d) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            Unitary::Dense(m) => m.clone(),
        }
    }

    pub fn adjoint(&self) -> Unitary {
        match self {
            Unitary::Diagonal(d) => Unitary::Diagonal(d.iter().map(|c| c.conj()).collect()),
            Unitary::Dense(m) => Unitary::Dense(m.adjoint()),
        }
    }

    pub fn compose(&self, other: &Unitary) -> Unitary {
        match (self, other) {
            (Unitary::Diagonal(a), Unitary::Diagonal(b)) => {
                Unitary::Diagonal(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            _ => Unitary::Dense(self.to_matrix() * other.to_matrix()),
        }
    }

    /// Integer power; negative powers use the adjoint.
    pub fn pow(&self, k: i64) -> Unitary {
        let base = if k < 0 { self.adjoint() } else { self.clone() };
        let k = k.unsigned_abs();
        match base {
            Unitary::Diagonal(d) => Unitary::Diagonal(d.iter().map(|c| c.powi(k as i32)).collect()),
            Unitary::Dense(m) => {
                let mut acc = DMatrix::identity(m.nrows(), m.ncols());
                for _ in 0..k {
                    acc = &acc * &m;
                }
                Unitary::Dense(acc)
            }
        }
    }

    /// Nonzero entries `(row, value)` of column `b`, i.e. the image of `e_b`.
    pub fn column(&self, b: usize) -> Vec<(usize, Complex64)> {
        match self {
            Unitary::Diagonal(d) => vec![(b, d[b])],
            Unitary::Dense(m) => m
                .column(b)
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > PRUNE_TOL)
                .map(|(r, c)| (r, *c))
                .collect(),
        }
    }

    pub fn apply(&self, w: &OneParticleVector) -> OneParticleVector {
        let mut out = OneParticleVector::zero(w.dim());
        for (b, c) in w.iter() {
            for (r, u) in self.column(b) {
                out.add(r, u * c);
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Unitary::Diagonal(_))
    }
}

/// The G-twist `u: ℤᵐ → U(h)`, `u(n) = Πₖ U_kⁿᵏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Twist {
    dim: usize,
    generators: Vec<Unitary>,
}

impl Twist {
    pub fn new(dim: usize, generators: Vec<Unitary>) -> Result<Self, BimoduleError> {
        let mats: Vec<DMatrix<Complex64>> = generators.iter().map(Unitary::to_matrix).collect();
        for (k, u) in generators.iter().enumerate() {
            if u.dim() != dim {
                return Err(BimoduleError::DimensionMismatch {
                    expected: dim,
                    got: u.dim(),
                });
            }
            let defect = linalg::unitarity_defect(&mats[k]);
            if defect > TWIST_TOL {
                return Err(BimoduleError::NotUnitary { generator: k, defect });
            }
        }
        for k in 0..mats.len() {
            for l in k + 1..mats.len() {
                if generators[k].is_diagonal() && generators[l].is_diagonal() {
                    continue;
                }
                let defect = linalg::max_modulus(&(&mats[k] * &mats[l] - &mats[l] * &mats[k]));
                if defect > TWIST_TOL {
                    return Err(BimoduleError::NotCommuting { k, l, defect });
                }
            }
        }
        Ok(Twist { dim, generators })
    }

    /// All generators act as the identity.
    pub fn trivial(dim: usize, rank: usize) -> Self {
        Twist {
            dim,
            generators: vec![Unitary::identity(dim); rank],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Unitary] {
        &self.generators
    }

    /// Dense generator matrices, row-major nested vectors.
    pub fn generator_matrices(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.generators
            .iter()
            .map(|u| {
                let m = u.to_matrix();
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
                    .collect()
            })
            .collect()
    }

    /// `u(n)`.
    pub fn operator(&self, n: &GroupElement) -> Unitary {
        assert_eq!(n.rank(), self.rank(), "group element rank mismatch");
        let mut acc = Unitary::identity(self.dim);
        for (k, &nk) in n.exponents().iter().enumerate() {
            if nk != 0 {
                acc = acc.compose(&self.generators[k].pow(nk));
            }
        }
        acc
    }

    pub fn apply(&self, n: &GroupElement, w: &OneParticleVector) -> Result<OneParticleVector, BimoduleError> {
        if w.dim() != self.dim {
            return Err(BimoduleError::DimensionMismatch {
                expected: self.dim,
                got: w.dim(),
            });
        }
        if n.rank() != self.rank() {
            return Err(BimoduleError::RankMismatch {
                twist: self.rank(),
                algebra: n.rank(),
            });
        }
        Ok(self.operator(n).apply(w))
    }
}

/// The conjugation κ swapping `h₊` and `h₋` with complex conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjugation {
    basis: OneParticleBasis,
}

impl Conjugation {
    pub fn new(basis: OneParticleBasis) -> Self {
        Conjugation { basis }
    }

    pub fn apply_vector(&self, w: &OneParticleVector) -> OneParticleVector {
        OneParticleVector::from_entries(
            w.dim(),
            w.iter().map(|(b, c)| (self.basis.conjugate_index(b), c.conj())),
        )
    }

    /// `κ(vA) = (κv)A*`.
    pub fn apply(&self, f: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (b, a) in f.iter() {
            out.add_term(self.basis.conjugate_index(b), &a.adjoint());
        }
        out
    }

    /// `max_k ‖κU_kκ − U_k‖`.
    pub fn compatibility_defect(&self, twist: &Twist) -> Vec<f64> {
        let d = self.basis.dim();
        twist
            .generators()
            .iter()
            .map(|u| {
                let m = u.to_matrix();
                let mut worst: f64 = 0.0;
                for r in 0..d {
                    for c in 0..d {
                        let rr = self.basis.conjugate_index(r);
                        let cc = self.basis.conjugate_index(c);
                        worst = worst.max((m[(rr, cc)].conj() - m[(r, c)]).norm());
                    }
                }
                worst
            })
            .collect()
    }
}

/// Element `Σ_b e_b·A_b` of the free bimodule `h·A`.
#[derive(Debug, Clone, Default)]
pub struct ModuleVector {
    terms: BTreeMap<usize, WeylElement>,
}

impl ModuleVector {
    pub fn zero() -> Self {
        ModuleVector::default()
    }

    /// `e_b·A`.
    pub fn basis(b: usize, a: WeylElement) -> Self {
        let mut f = ModuleVector::zero();
        f.add_term(b, &a);
        f
    }

    /// `w·A = Σ_b e_b (w_b A)`.
    pub fn from_vector(w: &OneParticleVector, a: &WeylElement) -> Self {
        let mut f = ModuleVector::zero();
        for (b, c) in w.iter() {
            f.add_term(b, &a.scale(c));
        }
        f
    }

    /// `Σₙ f⁽ⁿ⁾·W(n)`.
    pub fn from_decomposition<'a>(parts: impl IntoIterator<Item = (&'a GroupElement, &'a OneParticleVector)>) -> Self {
        let mut f = ModuleVector::zero();
        for (n, w) in parts {
            f = &f + &ModuleVector::from_vector(w, &WeylElement::weyl(n.clone()));
        }
        f
    }

    pub fn add_term(&mut self, b: usize, a: &WeylElement) {
        let entry = self.terms.entry(b).or_default();
        *entry += a;
        if entry.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn get(&self, b: usize) -> WeylElement {
        self.terms.get(&b).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &WeylElement)> {
        self.terms.iter().map(|(b, a)| (*b, a))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Basis indices with a nonzero coefficient.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub fn scale(&self, c: Complex64) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (b, a) in self.iter() {
            out.add_term(b, &a.scale(c));
        }
        out
    }

    /// Right module action `f·A`.
    pub fn right_mul(&self, algebra: &WeylAlgebra, a: &WeylElement) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (b, x) in self.iter() {
            out.add_term(b, &algebra.mul(x, a));
        }
        out
    }

    /// Regroups `f = Σₙ f⁽ⁿ⁾·W(n)` by group element.
    pub fn decompose(&self, dim: usize) -> BTreeMap<GroupElement, OneParticleVector> {
        let mut out: BTreeMap<GroupElement, OneParticleVector> = BTreeMap::new();
        for (b, a) in self.iter() {
            for (n, c) in a.terms() {
                out.entry(n.clone())
                    .or_insert_with(|| OneParticleVector::zero(dim))
                    .add(b, *c);
            }
        }
        out.retain(|_, w| !w.is_zero());
        out
    }

    /// Group elements generating the coefficient algebra of `f`.
    pub fn support(&self) -> BTreeSet<GroupElement> {
        self.terms
            .values()
            .flat_map(|a| a.support().cloned())
            .collect()
    }

    /// True when every coefficient is a multiple of the unit, i.e. `f ∈ h`.
    pub fn is_one_particle(&self) -> bool {
        self.support().iter().all(GroupElement::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(WeylElement::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ModuleVector) -> f64 {
        (self - other).max_abs()
    }
}

impl PartialEq for ModuleVector {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((b, x), (c, y))| b == c && x == y)
    }
}

impl std::ops::Add for &ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: &ModuleVector) -> ModuleVector {
        let mut out = self.clone();
        for (b, a) in rhs.iter() {
            out.add_term(b, a);
        }
        out
    }
}

impl std::ops::Sub for &ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: &ModuleVector) -> ModuleVector {
        let mut out = self.clone();
        for (b, a) in rhs.iter() {
            out.add_term(b, &-a);
        }
        out
    }
}

/// Which mutual-freeness condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FreenessCondition {
    /// `η(s_n, s_n') ≠ 0` for a pair of support generators.
    GroupCommutator,
    /// `u(n) g⁽ⁿ'⁾ ≠ g⁽ⁿ'⁾`.
    TwistOnSecond,
    /// `u(n') f⁽ⁿ⁾ ≠ f⁽ⁿ⁾`.
    TwistOnFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreenessWitness {
    pub first: GroupElement,
    pub second: GroupElement,
    pub condition: FreenessCondition,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Freeness {
    pub free: bool,
    pub witness: Option<FreenessWitness>,
}

/// The free bimodule `h·A` with twisted left action.
#[derive(Debug, Clone)]
pub struct FreeBimodule {
    algebra: WeylAlgebra,
    basis: OneParticleBasis,
    twist: Arc<Twist>,
}

impl FreeBimodule {
    pub fn new(algebra: WeylAlgebra, basis: OneParticleBasis, twist: Twist) -> Result<Self, BimoduleError> {
        if twist.dim() != basis.dim() {
            return Err(BimoduleError::DimensionMismatch {
                expected: basis.dim(),
                got: twist.dim(),
            });
        }
        if twist.rank() != algebra.rank() {
            return Err(BimoduleError::RankMismatch {
                twist: twist.rank(),
                algebra: algebra.rank(),
            });
        }
        Ok(FreeBimodule {
            algebra,
            basis,
            twist: Arc::new(twist),
        })
    }

    pub fn algebra(&self) -> &WeylAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &OneParticleBasis {
        &self.basis
    }

    pub fn twist(&self) -> &Twist {
        &self.twist
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `a·f` with `W(n)(e_b A) = (u(n)e_b)(W(n)A)`.
    pub fn left_action(&self, a: &WeylElement, f: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (n, c) in a.terms() {
            let u = self.twist.operator(n);
            for (b, x) in f.iter() {
                let moved = self.algebra.mul_weyl_left(n, x).scale(*c);
                for (r, v) in u.column(b) {
                    out.add_term(r, &moved.scale(v));
                }
            }
        }
        out
    }

    /// `⟨f, g⟩ = Σ_b f_b* g_b`.
    pub fn inner(&self, f: &ModuleVector, g: &ModuleVector) -> WeylElement {
        let mut out = WeylElement::zero();
        for (b, x) in f.iter() {
            if let Some(y) = g.terms.get(&b) {
                out += &self.algebra.mul(&x.adjoint(), y);
            }
        }
        out
    }

    /// Checks the mutual-freeness conditions of `f` and `g`, returning the
    /// first violated pair.
    pub fn mutually_free(&self, f: &ModuleVector, g: &ModuleVector) -> Freeness {
        let fd = f.decompose(self.dim());
        let gd = g.decompose(self.dim());
        let mut worst: Option<FreenessWitness> = None;
        let mut record = |first: &GroupElement, second: &GroupElement, condition, residual: f64| {
            if residual > FREENESS_TOL && worst.as_ref().map_or(true, |w| residual > w.residual) {
                worst = Some(FreenessWitness {
                    first: first.clone(),
                    second: second.clone(),
                    condition,
                    residual,
                });
            }
        };
        for (n, fi) in &fd {
            let un = self.twist.operator(n);
            for (m, gh) in &gd {
                let eta = self.algebra.generators().eta(n, m).abs();
                record(n, m, FreenessCondition::GroupCommutator, eta);
                record(n, m, FreenessCondition::TwistOnSecond, un.apply(gh).minus(gh).norm());
                let um = self.twist.operator(m);
                record(n, m, FreenessCondition::TwistOnFirst, um.apply(fi).minus(fi).norm());
            }
        }
        Freeness {
            free: worst.is_none(),
            witness: worst,
        }
    }
}

/// A free twisted bimodule together with a twist-compatible conjugation.
#[derive(Debug, Clone)]
pub struct DiracTriple {
    bimodule: FreeBimodule,
    conjugation: Conjugation,
}

impl DiracTriple {
    pub fn new(bimodule: FreeBimodule) -> Result<Self, BimoduleError> {
        let conjugation = Conjugation::new(*bimodule.basis());
        for (generator, defect) in conjugation
            .compatibility_defect(bimodule.twist())
            .into_iter()
            .enumerate()
        {
            if defect > TWIST_TOL {
                return Err(BimoduleError::ConjugationIncompatible { generator, defect });
            }
        }
        Ok(DiracTriple {
            bimodule,
            conjugation,
        })
    }

    pub fn bimodule(&self) -> &FreeBimodule {
        &self.bimodule
    }

    pub fn conjugation(&self) -> &Conjugation {
        &self.conjugation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{GeneratorSet, TestFunctionPair};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two sites, one generator, twist phase `e^{-i}` on `e_0` and `e^{i}` on its conjugate.
    fn setup() -> FreeBimodule {
        let grid = GridSpec::new(1, 2, 1.0, 1).unwrap();
        let s = TestFunctionPair::new(&grid, vec![1.0, 0.0], vec![0.0, 0.5]).unwrap();
        let alg = WeylAlgebra::new(GeneratorSet::new(grid.clone(), vec![s]).unwrap());
        let basis = OneParticleBasis::new(&grid);
        let phase = Complex64::from_polar(1.0, -1.0);
        let u = Unitary::Diagonal(vec![phase, c(1.0, 0.0), phase.conj(), c(1.0, 0.0)]);
        FreeBimodule::new(alg, basis, Twist::new(4, vec![u]).unwrap()).unwrap()
    }

    fn w(k: i64) -> WeylElement {
        WeylElement::weyl(GroupElement::new(vec![k]))
    }

    #[test]
    fn basis_layout_puts_plus_sector_first() {
        let basis = OneParticleBasis::with_sizes(3, 2);
        assert_eq!(basis.dim(), 12);
        let i = basis.index(Sector::Minus, 2, 1);
        assert_eq!(i, 6 + 5);
        assert_eq!(
            basis.decode(i),
            BasisIndex {
                sector: Sector::Minus,
                point: 2,
                component: 1
            }
        );
        assert_eq!(basis.conjugate_index(basis.conjugate_index(i)), i);
        assert_eq!(basis.sector(basis.conjugate_index(i)), Sector::Plus);
    }

    #[test]
    fn twist_at_identity_and_composition() {
        let m = setup();
        let v = OneParticleVector::from_dense(&[c(1.0, 0.0), c(0.0, 2.0), c(0.5, 0.5), c(0.0, 0.0)]);
        let t = m.twist();
        assert_eq!(t.apply(&GroupElement::zero(1), &v).unwrap(), v);
        let two = t.apply(&GroupElement::new(vec![2]), &v).unwrap();
        let once = t.apply(&GroupElement::new(vec![1]), &v).unwrap();
        let twice = t.apply(&GroupElement::new(vec![1]), &once).unwrap();
        assert!(two.minus(&twice).norm() < 1e-12);
        let back = t.apply(&GroupElement::new(vec![-1]), &once).unwrap();
        assert!(back.minus(&v).norm() < 1e-12);
    }

    #[test]
    fn non_unitary_and_non_commuting_twists_rejected() {
        let bad = Unitary::Diagonal(vec![c(2.0, 0.0)]);
        assert!(matches!(Twist::new(1, vec![bad]), Err(BimoduleError::NotUnitary { .. })));

        let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(
            Twist::new(2, vec![Unitary::Dense(x), Unitary::Dense(z)]),
            Err(BimoduleError::NotCommuting { k: 0, l: 1, .. })
        ));
    }

    #[test]
    fn trivial_twist_left_action_multiplies_coefficient() {
        let m = setup();
        let triv = FreeBimodule::new(m.algebra().clone(), *m.basis(), Twist::trivial(4, 1)).unwrap();
        let f = ModuleVector::basis(1, m.algebra().one());
        assert_eq!(triv.left_action(&w(3), &f), ModuleVector::basis(1, w(3)));
    }

    #[test]
    fn left_action_of_unit_and_of_twisted_basis() {
        let m = setup();
        let f = ModuleVector::basis(0, w(1));
        assert_eq!(m.left_action(&m.algebra().one(), &f), f);
        let expected = ModuleVector::basis(0, w(2).scale(Complex64::from_polar(1.0, -1.0)));
        assert_eq!(m.left_action(&w(1), &f), expected);
    }

    #[test]
    fn basis_inner_products() {
        let m = setup();
        let one = m.algebra().one();
        let e0 = ModuleVector::basis(0, one.clone());
        let e1 = ModuleVector::basis(1, one.clone());
        assert_eq!(m.inner(&e0, &e0), one);
        assert!(m.inner(&e0, &e1).is_zero());
    }

    #[test]
    fn conjugation_swaps_sectors() {
        let m = setup();
        let k = Conjugation::new(*m.basis());
        let f = ModuleVector::basis(0, w(2).scale(c(0.0, 1.0)));
        let kf = k.apply(&f);
        assert_eq!(kf, ModuleVector::basis(2, w(-2).scale(c(0.0, -1.0))));
        assert_eq!(k.apply(&kf), f);
        assert!(k.compatibility_defect(m.twist()).iter().all(|d| *d < 1e-15));
    }

    #[test]
    fn support_and_decomposition() {
        let m = setup();
        let one = m.algebra().one();
        assert_eq!(
            ModuleVector::basis(0, one).support(),
            BTreeSet::from([GroupElement::zero(1)])
        );
        let f = &ModuleVector::basis(0, w(1)) + &ModuleVector::basis(1, w(-2));
        assert_eq!(
            f.support(),
            BTreeSet::from([GroupElement::new(vec![1]), GroupElement::new(vec![-2])])
        );
        let d = f.decompose(4);
        assert_eq!(ModuleVector::from_decomposition(d.iter()), f);
    }

    #[test]
    fn freeness_of_one_particle_vectors() {
        let m = setup();
        let one = m.algebra().one();
        let f = ModuleVector::basis(0, one.clone());
        let g = ModuleVector::basis(1, one.clone());
        assert!(m.mutually_free(&f, &g).free);
    }

    #[test]
    fn freeness_fails_through_twist() {
        let m = setup();
        // u(1) moves e_0, so W(1) on the first vector breaks freeness with e_0
        let f = ModuleVector::basis(1, w(1));
        let g = ModuleVector::basis(0, m.algebra().one());
        let res = m.mutually_free(&f, &g);
        assert!(!res.free);
        let wit = res.witness.unwrap();
        assert_eq!(wit.condition, FreenessCondition::TwistOnSecond);
        assert_eq!(wit.first, GroupElement::new(vec![1]));
        // but e_1 is fixed by the twist
        let g2 = ModuleVector::basis(1, m.algebra().one());
        assert!(m.mutually_free(&f, &g2).free);
    }

    #[test]
    fn dirac_triple_rejects_incompatible_twist() {
        let m = setup();
        let u = Unitary::Diagonal(vec![Complex64::from_polar(1.0, 0.3), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let bad = FreeBimodule::new(m.algebra().clone(), *m.basis(), Twist::new(4, vec![u]).unwrap()).unwrap();
        assert!(matches!(
            DiracTriple::new(bad),
            Err(BimoduleError::ConjugationIncompatible { generator: 0, .. })
        ));
        assert!(DiracTriple::new(m).is_ok());
    }
}
