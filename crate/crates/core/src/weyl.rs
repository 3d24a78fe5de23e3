//! Exact symbolic Weyl algebra over a finitely generated symplectic group.
//!
//! Group elements are exponent vectors `n ∈ ℤᵐ` over a fixed set of
//! generating test-function pairs `s⁽¹⁾..s⁽ᵐ⁾`. The canonical unitary
//! `W(n) ≐ W(Σₖ nₖ s⁽ᵏ⁾)` carries no internal phase, so every phase produced by
//! the Weyl relation
//!
//! ```text
//! W(n) W(n') = exp(i η(s_n, s_n') / 2) W(n + n')
//! ```
//!
//! lives in the complex coefficients of a [`WeylElement`]. The relation is
//! evaluated through the precomputed antisymmetric Gram matrix
//! `E[i][j] = η(s⁽ⁱ⁾, s⁽ʲ⁾)` of the generators.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg;

/// Coefficients with modulus below this are dropped from normal forms.
pub const PRUNE_TOL: f64 = 1e-14;

/// Coefficient tolerance used by [`WeylElement`] equality.
pub const COEFF_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeylError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid function has {got} values, grid has {expected} points")]
    GridMismatch { expected: usize, got: usize },
    #[error("grid function contains a non-finite value")]
    NonFinite,
    #[error("generators are linearly dependent (rank {rank} < {count})")]
    DependentGenerators { rank: usize, count: usize },
    #[error("exponent vector has {got} entries, generator set has {expected}")]
    GeneratorMismatch { expected: usize, got: usize },
    #[error("gram matrix needs at least one element")]
    EmptyGram,
}

/// Regular spatial grid with `points_per_axis^dimension` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dimension: usize,
    points_per_axis: usize,
    spacing: f64,
    spinor_components: usize,
}

impl GridSpec {
    pub fn new(
        dimension: usize,
        points_per_axis: usize,
        spacing: f64,
        spinor_components: usize,
    ) -> Result<Self, WeylError> {
        if !(1..=3).contains(&dimension) {
            return Err(WeylError::InvalidGrid(format!(
                "dimension must be 1, 2 or 3 (got {dimension})"
            )));
        }
        if points_per_axis == 0 {
            return Err(WeylError::InvalidGrid("points per axis must be >= 1".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(WeylError::InvalidGrid(format!("spacing must be > 0 (got {spacing})")));
        }
        if spinor_components == 0 {
            return Err(WeylError::InvalidGrid("spinor components must be >= 1".into()));
        }
        Ok(GridSpec {
            dimension,
            points_per_axis,
            spacing,
            spinor_components,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn spinor_components(&self) -> usize {
        self.spinor_components
    }

    /// Total number of grid sites.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rectangle-rule quadrature weight `spacing^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dimension as i32)
    }

    /// Row-major integer coordinates of a site.
    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut out = vec![0; self.dimension];
        let mut rest = site;
        for axis in (0..self.dimension).rev() {
            out[axis] = rest % self.points_per_axis;
            rest /= self.points_per_axis;
        }
        out
    }

    /// Site index from integer coordinates; `None` when out of range.
    pub fn site(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.dimension || coords.iter().any(|&c| c >= self.points_per_axis) {
            return None;
        }
        Some(coords.iter().fold(0, |acc, &c| acc * self.points_per_axis + c))
    }

    /// Integer displacement `x - y` between two sites, in cells.
    pub fn displacement(&self, x: usize, y: usize) -> Vec<i64> {
        self.coords(x)
            .into_iter()
            .zip(self.coords(y))
            .map(|(a, b)| a as i64 - b as i64)
            .collect()
    }

    /// Euclidean distance between two sites in length units.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        let d2: i64 = self.displacement(x, y).iter().map(|d| d * d).sum();
        (d2 as f64).sqrt() * self.spacing
    }

    fn check_len(&self, values: &[f64]) -> Result<(), WeylError> {
        if values.len() != self.len() {
            return Err(WeylError::GridMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(WeylError::NonFinite);
        }
        Ok(())
    }
}

/// A pair `s = (s0, s1)` of real grid functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionPair {
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
}

impl TestFunctionPair {
    pub fn new(grid: &GridSpec, s0: Vec<f64>, s1: Vec<f64>) -> Result<Self, WeylError> {
        grid.check_len(&s0)?;
        grid.check_len(&s1)?;
        Ok(TestFunctionPair { s0, s1 })
    }

    pub fn zero(grid: &GridSpec) -> Self {
        TestFunctionPair {
            s0: vec![0.0; grid.len()],
            s1: vec![0.0; grid.len()],
        }
    }

    fn check(&self, grid: &GridSpec) -> Result<(), WeylError> {
        grid.check_len(&self.s0)?;
        grid.check_len(&self.s1)
    }

    /// Sites where either component is non-negligible.
    pub fn support(&self) -> Vec<usize> {
        self.s0
            .iter()
            .zip(&self.s1)
            .enumerate()
            .filter(|(_, (a, b))| a.abs() > 1e-12 || b.abs() > 1e-12)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Discrete symplectic form `η(s,s') = Σₓ (s1·s0' − s0·s1')·spacing^d`.
pub fn symplectic_form(
    grid: &GridSpec,
    s: &TestFunctionPair,
    t: &TestFunctionPair,
) -> Result<f64, WeylError> {
    s.check(grid)?;
    t.check(grid)?;
    let sum: f64 = (0..grid.len())
        .map(|x| s.s1[x] * t.s0[x] - s.s0[x] * t.s1[x])
        .sum();
    Ok(sum * grid.cell_volume())
}

/// Diagonal quadratic form of the quasi-free state, `Σₓ (s0·t0 + s1·t1)·spacing^d`.
fn quasifree_form(grid: &GridSpec, s: &TestFunctionPair, t: &TestFunctionPair) -> f64 {
    let sum: f64 = (0..grid.len())
        .map(|x| s.s0[x] * t.s0[x] + s.s1[x] * t.s1[x])
        .sum();
    sum * grid.cell_volume()
}

/// Linearly independent generating test functions with their Gram data.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    grid: GridSpec,
    generators: Vec<TestFunctionPair>,
    eta: Vec<Vec<f64>>,
    quadratic: Vec<Vec<f64>>,
}

impl GeneratorSet {
    pub fn new(grid: GridSpec, generators: Vec<TestFunctionPair>) -> Result<Self, WeylError> {
        for g in &generators {
            g.check(&grid)?;
        }
        let m = generators.len();
        if m > 0 {
            let rows = 2 * grid.len();
            let stacked = DMatrix::from_fn(rows, m, |r, c| {
                let g = &generators[c];
                if r < grid.len() {
                    g.s0[r]
                } else {
                    g.s1[r - grid.len()]
                }
            });
            let rank = stacked.rank(1e-10 * stacked.amax().max(1.0));
            if rank < m {
                return Err(WeylError::DependentGenerators { rank, count: m });
            }
        }
        let mut eta = vec![vec![0.0; m]; m];
        let mut quadratic = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                if i < j {
                    let v = symplectic_form(&grid, &generators[i], &generators[j])?;
                    eta[i][j] = v;
                    eta[j][i] = -v;
                }
                quadratic[i][j] = quasifree_form(&grid, &generators[i], &generators[j]);
            }
        }
        Ok(GeneratorSet {
            grid,
            generators,
            eta,
            quadratic,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn generators(&self) -> &[TestFunctionPair] {
        &self.generators
    }

    /// Number of generators `m`.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Antisymmetric Gram matrix `E[i][j] = η(s⁽ⁱ⁾, s⁽ʲ⁾)`.
    pub fn eta_matrix(&self) -> &[Vec<f64>] {
        &self.eta
    }

    /// `η(s_n, s_n')` through the Gram matrix.
    pub fn eta(&self, n: &GroupElement, np: &GroupElement) -> f64 {
        bilinear(&self.eta, n, np)
    }

    /// `q(s_n)` for the quasi-free state.
    pub fn quadratic(&self, n: &GroupElement) -> f64 {
        bilinear(&self.quadratic, n, n)
    }

    /// The test-function pair `s_n = Σₖ nₖ s⁽ᵏ⁾`.
    pub fn combination(&self, n: &GroupElement) -> TestFunctionPair {
        let len = self.grid.len();
        let mut out = TestFunctionPair::zero(&self.grid);
        for (k, &nk) in n.exponents().iter().enumerate() {
            if nk == 0 {
                continue;
            }
            let g = &self.generators[k];
            for x in 0..len {
                out.s0[x] += nk as f64 * g.s0[x];
                out.s1[x] += nk as f64 * g.s1[x];
            }
        }
        out
    }
}

fn bilinear(matrix: &[Vec<f64>], n: &GroupElement, np: &GroupElement) -> f64 {
    let mut acc = 0.0;
    for (i, &a) in n.exponents().iter().enumerate() {
        if a == 0 {
            continue;
        }
        let row = &matrix[i];
        let mut inner = 0.0;
        for (j, &b) in np.exponents().iter().enumerate() {
            if b != 0 {
                inner += row[j] * b as f64;
            }
        }
        acc += a as f64 * inner;
    }
    acc
}

/// Exponent vector `n ∈ ℤᵐ` labelling the canonical unitary `W(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn new(exponents: Vec<i64>) -> Self {
        GroupElement(exponents)
    }

    pub fn zero(rank: usize) -> Self {
        GroupElement(vec![0; rank])
    }

    /// The `k`-th generator.
    pub fn unit(rank: usize, k: usize) -> Self {
        let mut v = vec![0; rank];
        v[k] = 1;
        GroupElement(v)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        GroupElement(self.0.iter().map(|x| x * k).collect())
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.rank(), rhs.rank());
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.rank(), rhs.rank());
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Finite linear combination `Σ cₙ W(n)` with zero coefficients pruned.
#[derive(Debug, Clone, Default)]
pub struct WeylElement {
    terms: BTreeMap<GroupElement, Complex64>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement::default()
    }

    /// The unit `𝟏 = W(0)`.
    pub fn one(rank: usize) -> Self {
        WeylElement::weyl(GroupElement::zero(rank))
    }

    pub fn weyl(n: GroupElement) -> Self {
        WeylElement::term(n, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(rank: usize, c: Complex64) -> Self {
        WeylElement::term(GroupElement::zero(rank), c)
    }

    pub fn term(n: GroupElement, c: Complex64) -> Self {
        let mut e = WeylElement::zero();
        e.add_term(n, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, Complex64)>) -> Self {
        let mut e = WeylElement::zero();
        for (n, c) in terms {
            e.add_term(n, c);
        }
        e
    }

    /// Adds `c·W(n)` in place, pruning the key if it cancels.
    pub fn add_term(&mut self, n: GroupElement, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(n) {
            Entry::Vacant(slot) => {
                if c.norm() > PRUNE_TOL {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                let v = *slot.get() + c;
                if v.norm() > PRUNE_TOL {
                    *slot.get_mut() = v;
                } else {
                    slot.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, n: &GroupElement) -> Complex64 {
        self.terms.get(n).copied().unwrap_or_default()
    }

    /// Group elements carrying a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    /// Exponent-vector length shared by all keys, if any.
    pub fn rank(&self) -> Option<usize> {
        self.terms.keys().next().map(GroupElement::rank)
    }

    /// `(Σ cₙ W(n))* = Σ c̄ₙ W(−n)`.
    pub fn adjoint(&self) -> WeylElement {
        WeylElement {
            terms: self.terms.iter().map(|(n, c)| (-n, c.conj())).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> WeylElement {
        WeylElement::from_terms(self.terms.iter().map(|(n, v)| (n.clone(), v * c)))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |cₙ|²`; equals `ω(a*a)` for the tracial state.
    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficient deviation over the union of keys.
    pub fn max_abs_diff(&self, other: &WeylElement) -> f64 {
        (self - other).max_abs()
    }

    /// Exact keys, coefficients within `tol`.
    pub fn approx_eq(&self, other: &WeylElement, tol: f64) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((n, a), (m, b))| n == m && (a - b).norm() <= tol)
    }
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, COEFF_EQ_TOL)
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;
    fn add(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for WeylElement {
    type Output = WeylElement;
    fn add(mut self, rhs: WeylElement) -> WeylElement {
        self += &rhs;
        self
    }
}

impl AddAssign<&WeylElement> for WeylElement {
    fn add_assign(&mut self, rhs: &WeylElement) {
        for (n, c) in &rhs.terms {
            self.add_term(n.clone(), *c);
        }
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;
    fn sub(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (n, c) in &rhs.terms {
            out.add_term(n.clone(), -c);
        }
        out
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &WeylElement {
    type Output = WeylElement;
    fn mul(self, rhs: Complex64) -> WeylElement {
        self.scale(rhs)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)W{}", c.re, c.im, n)?;
        }
        Ok(())
    }
}

/// Multiplication context: the generator set fixing the Weyl cocycle.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylAlgebra {
    generators: Arc<GeneratorSet>,
}

impl WeylAlgebra {
    pub fn new(generators: GeneratorSet) -> Self {
        WeylAlgebra {
            generators: Arc::new(generators),
        }
    }

    pub fn from_shared(generators: Arc<GeneratorSet>) -> Self {
        WeylAlgebra { generators }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn shared_generators(&self) -> Arc<GeneratorSet> {
        Arc::clone(&self.generators)
    }

    pub fn rank(&self) -> usize {
        self.generators.rank()
    }

    pub fn one(&self) -> WeylElement {
        WeylElement::one(self.rank())
    }

    pub fn weyl(&self, n: GroupElement) -> WeylElement {
        WeylElement::weyl(n)
    }

    /// Phase `exp(i η(s_n, s_n')/2)` of `W(n)W(n')` relative to `W(n+n')`.
    pub fn phase(&self, n: &GroupElement, np: &GroupElement) -> Complex64 {
        Complex64::from_polar(1.0, 0.5 * self.generators.eta(n, np))
    }

    pub fn check(&self, a: &WeylElement) -> Result<(), WeylError> {
        for n in a.support() {
            if n.rank() != self.rank() {
                return Err(WeylError::GeneratorMismatch {
                    expected: self.rank(),
                    got: n.rank(),
                });
            }
        }
        Ok(())
    }

    pub fn try_mul(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement, WeylError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Bilinear extension of the Weyl relation.
    ///
    /// Both operands must be over this generator set; use [`Self::try_mul`]
    /// for unvalidated input.
    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let mut out = WeylElement::zero();
        for (n, x) in a.terms() {
            for (m, y) in b.terms() {
                debug_assert_eq!(n.rank(), self.rank());
                debug_assert_eq!(m.rank(), self.rank());
                out.add_term(n + m, x * y * self.phase(n, m));
            }
        }
        out
    }

    /// `W(n)·a`, the common case in the module and Fock layers.
    pub fn mul_weyl_left(&self, n: &GroupElement, a: &WeylElement) -> WeylElement {
        let mut out = WeylElement::zero();
        for (m, y) in a.terms() {
            out.add_term(n + m, y * self.phase(n, m));
        }
        out
    }
}

/// The two concrete state families on the Weyl algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// `ω(W(n)) = δ_{n,0}`.
    Tracial,
    /// `ω(W(n)) = exp(−q(s_n)/4)` with the unit diagonal quadratic form.
    Quasifree,
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::Tracial => write!(f, "tracial"),
            StateKind::Quasifree => write!(f, "quasifree"),
        }
    }
}

/// A state `ω` on the Weyl algebra.
#[derive(Debug, Clone)]
pub struct State {
    kind: StateKind,
    algebra: WeylAlgebra,
}

impl State {
    pub fn new(kind: StateKind, algebra: &WeylAlgebra) -> Self {
        State {
            kind,
            algebra: algebra.clone(),
        }
    }

    pub fn tracial(algebra: &WeylAlgebra) -> Self {
        State::new(StateKind::Tracial, algebra)
    }

    pub fn quasifree(algebra: &WeylAlgebra) -> Self {
        State::new(StateKind::Quasifree, algebra)
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn algebra(&self) -> &WeylAlgebra {
        &self.algebra
    }

    /// `ω(W(n))`.
    pub fn on_weyl(&self, n: &GroupElement) -> f64 {
        match self.kind {
            StateKind::Tracial => {
                if n.is_zero() {
                    1.0
                } else {
                    0.0
                }
            }
            StateKind::Quasifree => (-self.algebra.generators().quadratic(n) / 4.0).exp(),
        }
    }

    pub fn eval(&self, a: &WeylElement) -> Complex64 {
        a.terms().map(|(n, c)| c * self.on_weyl(n)).sum()
    }

    /// `ω(a* b)` without materializing the product.
    pub fn inner(&self, a: &WeylElement, b: &WeylElement) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, x) in a.terms() {
            let neg = -n;
            for (m, y) in b.terms() {
                let w = match self.kind {
                    StateKind::Tracial => {
                        if n == m {
                            1.0
                        } else {
                            continue;
                        }
                    }
                    StateKind::Quasifree => self.on_weyl(&(m - n)),
                };
                acc += x.conj() * y * self.algebra.phase(&neg, m) * w;
            }
        }
        acc
    }
}

/// `Gram[i][j] = ω(aᵢ* aⱼ)`.
pub fn gram_matrix(state: &State, elems: &[WeylElement]) -> Result<DMatrix<Complex64>, WeylError> {
    if elems.is_empty() {
        return Err(WeylError::EmptyGram);
    }
    for e in elems {
        state.algebra().check(e)?;
    }
    let k = elems.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = state.inner(&elems[i], &elems[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of a Hermitian Gram matrix.
pub fn min_eigenvalue(gram: &DMatrix<Complex64>) -> f64 {
    linalg::hermitian_eigenvalues(gram)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two generators on a single site with `E = [[0, π], [−π, 0]]`.
    fn pi_algebra() -> WeylAlgebra {
        let grid = GridSpec::new(1, 1, 1.0, 1).unwrap();
        let a = TestFunctionPair::new(&grid, vec![0.0], vec![1.0]).unwrap();
        let b = TestFunctionPair::new(&grid, vec![PI], vec![0.0]).unwrap();
        WeylAlgebra::new(GeneratorSet::new(grid, vec![a, b]).unwrap())
    }

    #[test]
    fn symplectic_form_on_point_masses() {
        let grid = GridSpec::new(1, 1, 1.0, 1).unwrap();
        let s = TestFunctionPair::new(&grid, vec![1.0], vec![0.0]).unwrap();
        let t = TestFunctionPair::new(&grid, vec![0.0], vec![1.0]).unwrap();
        assert_eq!(symplectic_form(&grid, &s, &t).unwrap(), -1.0);
        assert_eq!(symplectic_form(&grid, &t, &s).unwrap(), 1.0);
        assert_eq!(symplectic_form(&grid, &s, &s).unwrap(), 0.0);
    }

    #[test]
    fn symplectic_form_rejects_grid_mismatch() {
        let grid = GridSpec::new(1, 2, 1.0, 1).unwrap();
        let s = TestFunctionPair { s0: vec![1.0], s1: vec![0.0] };
        let t = TestFunctionPair::zero(&grid);
        assert!(matches!(
            symplectic_form(&grid, &s, &t),
            Err(WeylError::GridMismatch { .. })
        ));
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(GridSpec::new(4, 2, 1.0, 1).is_err());
        assert!(GridSpec::new(1, 0, 1.0, 1).is_err());
        assert!(GridSpec::new(1, 2, 0.0, 1).is_err());
        assert!(GridSpec::new(1, 2, 1.0, 0).is_err());
    }

    #[test]
    fn grid_coordinates_round_trip() {
        let grid = GridSpec::new(3, 4, 0.5, 1).unwrap();
        for site in 0..grid.len() {
            assert_eq!(grid.site(&grid.coords(site)), Some(site));
        }
        assert_eq!(grid.cell_volume(), 0.125);
    }

    #[test]
    fn dependent_generators_are_rejected() {
        let grid = GridSpec::new(1, 2, 1.0, 1).unwrap();
        let a = TestFunctionPair::new(&grid, vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let b = TestFunctionPair::new(&grid, vec![2.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            GeneratorSet::new(grid, vec![a, b]),
            Err(WeylError::DependentGenerators { rank: 1, count: 2 })
        ));
    }

    #[test]
    fn unit_is_neutral() {
        let alg = pi_algebra();
        let w = WeylElement::weyl(GroupElement::new(vec![2, -1]));
        assert_eq!(alg.mul(&alg.one(), &w), w);
        assert_eq!(alg.mul(&w, &alg.one()), w);
    }

    #[test]
    fn pi_cocycle_gives_imaginary_unit() {
        let alg = pi_algebra();
        let a = WeylElement::weyl(GroupElement::new(vec![1, 0]));
        let b = WeylElement::weyl(GroupElement::new(vec![0, 1]));
        let expected = WeylElement::term(GroupElement::new(vec![1, 1]), c(0.0, 1.0));
        assert_eq!(alg.mul(&a, &b), expected);
        // and the reverse order picks up −i
        let rev = WeylElement::term(GroupElement::new(vec![1, 1]), c(0.0, -1.0));
        assert_eq!(alg.mul(&b, &a), rev);
    }

    #[test]
    fn mismatched_rank_is_an_error() {
        let alg = pi_algebra();
        let bad = WeylElement::weyl(GroupElement::new(vec![1]));
        assert!(matches!(
            alg.try_mul(&bad, &alg.one()),
            Err(WeylError::GeneratorMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn adjoint_of_scaled_unitary() {
        let n = GroupElement::new(vec![1, -2]);
        let a = WeylElement::term(n.clone(), c(0.3, 0.4));
        let expected = WeylElement::term(-&n, c(0.3, -0.4));
        assert_eq!(a.adjoint(), expected);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn states_are_unital() {
        let alg = pi_algebra();
        for st in [State::tracial(&alg), State::quasifree(&alg)] {
            assert!((st.eval(&alg.one()) - c(1.0, 0.0)).norm() < 1e-15);
        }
        let tr = State::tracial(&alg);
        assert_eq!(tr.eval(&WeylElement::weyl(GroupElement::new(vec![0, 1]))), c(0.0, 0.0));
    }

    #[test]
    fn quasifree_value_for_q_equal_two() {
        // q(s) = 2 for s = (1, 1) on a single unit cell
        let grid = GridSpec::new(1, 1, 1.0, 1).unwrap();
        let s = TestFunctionPair::new(&grid, vec![1.0], vec![1.0]).unwrap();
        let alg = WeylAlgebra::new(GeneratorSet::new(grid, vec![s]).unwrap());
        let st = State::quasifree(&alg);
        let v = st.eval(&WeylElement::weyl(GroupElement::new(vec![1])));
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v.re - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn gram_of_unit_and_orthonormal_pair() {
        let alg = pi_algebra();
        let st = State::tracial(&alg);
        let g = gram_matrix(&st, &[alg.one()]).unwrap();
        assert_eq!(g.nrows(), 1);
        assert!((g[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let a = WeylElement::weyl(GroupElement::new(vec![1, 0]));
        let b = WeylElement::weyl(GroupElement::new(vec![0, 3]));
        let g = gram_matrix(&st, &[a, b]).unwrap();
        assert!(linalg::max_modulus(&(g - DMatrix::identity(2, 2))) < 1e-15);
        assert!(gram_matrix(&st, &[]).is_err());
    }

    #[test]
    fn inner_matches_product_then_eval() {
        let alg = pi_algebra();
        let a = WeylElement::from_terms([
            (GroupElement::new(vec![1, 0]), c(0.5, -1.0)),
            (GroupElement::new(vec![0, 1]), c(2.0, 0.25)),
        ]);
        let b = WeylElement::from_terms([
            (GroupElement::new(vec![1, 1]), c(-0.5, 0.5)),
            (GroupElement::new(vec![0, 0]), c(1.0, 0.0)),
        ]);
        for st in [State::tracial(&alg), State::quasifree(&alg)] {
            let direct = st.eval(&alg.mul(&a.adjoint(), &b));
            assert!((st.inner(&a, &b) - direct).norm() < 1e-13);
        }
    }
}
