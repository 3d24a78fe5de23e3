//! Dense brute-force evaluation of the Fock bimodule definitions.
//!
//! Everything here is written from the defining formulas with dense arrays
//! and literal permutation sums. Only the Weyl algebra is shared with the
//! engine, so agreement between the two is a genuine cross-check.

use fockmod::bimodule::{FreeBimodule, ModuleVector};
use fockmod::fock::{AntisymmetricElement, TensorElement};
use fockmod::weyl::{GroupElement, WeylAlgebra, WeylElement};
use num_complex::Complex64;
use thiserror::Error;

pub mod equivalence;

pub const MAX_DIM: usize = 6;
pub const MAX_LEVEL: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("dense tensors need dim <= {MAX_DIM} and level <= {MAX_LEVEL} (got dim {dim}, level {level})")]
    TooLarge { dim: usize, level: usize },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("expected {expected} one-particle components, got {got}")]
    DimMismatch { expected: usize, got: usize },
}

type Matrix = Vec<Vec<Complex64>>;

fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|r| (0..dim).map(|c| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect())
        .collect()
}

fn dagger(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|c| a[c][r].conj()).collect()).collect()
}

/// Every permutation of `0..n` with its sign from the inversion count.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut all = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut all);
    all.into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// The free bimodule `h·A`: the algebra, `dim h` and dense twist generators.
#[derive(Debug, Clone)]
pub struct OracleModule {
    algebra: WeylAlgebra,
    dim: usize,
    generators: Vec<Matrix>,
}

/// `f = Σ_b e_b F_b` as a dense list of coefficients.
pub type DenseVector = Vec<WeylElement>;

impl OracleModule {
    pub fn new(algebra: WeylAlgebra, dim: usize, generators: Vec<Matrix>) -> Result<Self, OracleError> {
        if dim > MAX_DIM {
            return Err(OracleError::TooLarge { dim, level: 1 });
        }
        if let Some(bad) = generators.iter().find(|g| g.len() != dim) {
            return Err(OracleError::DimMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Ok(OracleModule {
            algebra,
            dim,
            generators,
        })
    }

    /// Copy of the algebra and twist matrices of an engine bimodule.
    pub fn from_engine(module: &FreeBimodule) -> Result<Self, OracleError> {
        OracleModule::new(module.algebra().clone(), module.dim(), module.twist().generator_matrices())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn algebra(&self) -> &WeylAlgebra {
        &self.algebra
    }

    /// `u(n) = Πₖ Uₖ^{nₖ}` by repeated multiplication.
    pub fn twist(&self, n: &GroupElement) -> Matrix {
        let mut acc = identity(self.dim);
        for (k, &e) in n.exponents().iter().enumerate() {
            let g = if e >= 0 { self.generators[k].clone() } else { dagger(&self.generators[k]) };
            for _ in 0..e.unsigned_abs() {
                acc = matmul(&acc, &g);
            }
        }
        acc
    }

    /// `⟨f, g⟩ = Σ_b F_b* G_b`.
    pub fn inner(&self, f: &DenseVector, g: &DenseVector) -> WeylElement {
        let mut out = WeylElement::zero();
        for (a, b) in f.iter().zip(g) {
            out += &self.algebra.mul(&a.adjoint(), b);
        }
        out
    }

    /// `a·f` with `W(n)(e_b C) = Σ_c u(n)_{cb} e_c (W(n)C)`.
    pub fn left_action(&self, a: &WeylElement, f: &DenseVector) -> DenseVector {
        let mut out = vec![WeylElement::zero(); self.dim];
        for (n, c) in a.terms() {
            let u = self.twist(n);
            let w = WeylElement::term(n.clone(), *c);
            for (b, fb) in f.iter().enumerate() {
                let moved = self.algebra.mul(&w, fb);
                for (r, slot) in out.iter_mut().enumerate() {
                    if u[r][b] != Complex64::default() {
                        *slot += &moved.scale(u[r][b]);
                    }
                }
            }
        }
        out
    }

    pub fn from_module_vector(&self, f: &ModuleVector) -> DenseVector {
        (0..self.dim).map(|b| f.get(b)).collect()
    }
}

/// A level-`n` tensor as a dense array over all `dimⁿ` tuples of
/// right coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dim: usize,
    level: usize,
    data: Vec<WeylElement>,
}

impl DenseTensor {
    pub fn zero(dim: usize, level: usize) -> Result<Self, OracleError> {
        if dim > MAX_DIM || level > MAX_LEVEL {
            return Err(OracleError::TooLarge { dim, level });
        }
        Ok(DenseTensor {
            dim,
            level,
            data: vec![WeylElement::zero(); dim.pow(level as u32)],
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &b| acc * self.dim + b)
    }

    fn tuple(&self, mut offset: usize) -> Vec<usize> {
        let mut t = vec![0; self.level];
        for slot in t.iter_mut().rev() {
            *slot = offset % self.dim;
            offset /= self.dim;
        }
        t
    }

    pub fn get(&self, t: &[usize]) -> &WeylElement {
        &self.data[self.offset(t)]
    }

    pub fn add(&mut self, t: &[usize], a: &WeylElement) {
        let i = self.offset(t);
        self.data[i] += a;
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &WeylElement)> {
        self.data.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, a)| (self.tuple(i), a))
    }

    pub fn scale(&self, c: Complex64) -> DenseTensor {
        DenseTensor {
            dim: self.dim,
            level: self.level,
            data: self.data.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn from_tensor(dim: usize, t: &TensorElement) -> Result<Self, OracleError> {
        let mut out = DenseTensor::zero(dim, t.level())?;
        for (k, a) in t.iter() {
            out.add(k, a);
        }
        Ok(out)
    }

    /// Dense form of a stored antisymmetric element: each stored `(s, c)`
    /// stands for `Σ_σ sgn σ e_{σs} c`.
    pub fn from_antisymmetric(dim: usize, t: &AntisymmetricElement) -> Result<Self, OracleError> {
        let mut out = DenseTensor::zero(dim, t.level())?;
        let perms = permutations(t.level());
        for (s, c) in t.iter() {
            for (p, sign) in &perms {
                let key: Vec<usize> = p.iter().map(|&i| s[i]).collect();
                out.add(&key, &c.scale(Complex64::new(*sign, 0.0)));
            }
        }
        Ok(out)
    }

    /// Largest coefficient deviation from an engine tensor.
    pub fn max_abs_diff(&self, t: &TensorElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.data.iter().enumerate() {
            worst = worst.max(a.max_abs_diff(&t.get(&self.tuple(i))));
        }
        for (k, a) in t.iter() {
            if k.iter().any(|&b| b >= self.dim) || k.len() != self.level {
                worst = worst.max(a.max_abs());
            }
        }
        worst
    }

    pub fn max_abs_diff_dense(&self, other: &DenseTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// `a·(e_t C)`: `a` acts on the first factor and its coefficient is passed
/// through the remaining factors one at a time.
pub fn tensor_left_action(m: &OracleModule, a: &WeylElement, v: &DenseTensor) -> Result<DenseTensor, OracleError> {
    let mut out = DenseTensor::zero(v.dim, v.level)?;
    if v.level == 0 {
        for (_, c) in v.entries() {
            out.add(&[], &m.algebra.mul(a, c));
        }
        return Ok(out);
    }
    for (t, c) in v.entries() {
        // (a e_{t₁}) ⊗ e_{t₂…} C: a e_{t₁} = Σ e_r X_r, then X_r acts on the tail.
        let mut first = vec![WeylElement::zero(); m.dim];
        first[t[0]] = m.algebra.one();
        let moved = m.left_action(a, &first);
        let mut tail = DenseTensor::zero(v.dim, v.level - 1)?;
        tail.add(&t[1..], c);
        for (r, x) in moved.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (s, y) in tensor_left_action(m, x, &tail)?.entries() {
                let mut key = vec![r];
                key.extend(s);
                out.add(&key, y);
            }
        }
    }
    Ok(out)
}

/// Normal form of `f₁ ⊗ … ⊗ fₙ`.
pub fn elementary(m: &OracleModule, factors: &[DenseVector]) -> Result<DenseTensor, OracleError> {
    let Some((last, init)) = factors.split_last() else {
        let mut out = DenseTensor::zero(m.dim, 0)?;
        out.add(&[], &m.algebra.one());
        return Ok(out);
    };
    // f₁ ⊗ … ⊗ fₙ = Σ_b (f₁ ⊗ … ⊗ fₙ₋₁ ⊗ e_b) F_b, then normalize the prefix.
    let mut out = DenseTensor::zero(m.dim, factors.len())?;
    let prefix = elementary(m, init)?;
    for (t, c) in prefix.entries() {
        // e_t C ⊗ f = e_t ⊗ (C·f)
        let moved = m.left_action(c, last);
        for (b, x) in moved.iter().enumerate() {
            let mut key = t.clone();
            key.push(b);
            out.add(&key, x);
        }
    }
    Ok(out)
}

/// `⟨v, w⟩ = Σ_t v_t* w_t` on normal forms.
pub fn dense_inner(m: &OracleModule, v: &DenseTensor, w: &DenseTensor) -> Result<WeylElement, OracleError> {
    if v.level != w.level {
        return Err(OracleError::LevelMismatch(v.level, w.level));
    }
    let mut out = WeylElement::zero();
    for (a, b) in v.data.iter().zip(&w.data) {
        if !a.is_zero() && !b.is_zero() {
            out += &m.algebra.mul(&a.adjoint(), b);
        }
    }
    Ok(out)
}

/// `⟨v₁⊗…⊗vₙ, w₁⊗…⊗wₙ⟩ = ⟨vₙ, ⟨vₙ₋₁, … ⟨v₁, w₁⟩w₂ …⟩wₙ⟩`, evaluated
/// literally on elementary tensors with a left action at each step.
pub fn nested_inner(m: &OracleModule, v: &[DenseVector], w: &[DenseVector]) -> Result<WeylElement, OracleError> {
    if v.len() != w.len() {
        return Err(OracleError::LevelMismatch(v.len(), w.len()));
    }
    for f in v.iter().chain(w) {
        if f.len() != m.dim {
            return Err(OracleError::DimMismatch {
                expected: m.dim,
                got: f.len(),
            });
        }
    }
    let mut acc = m.algebra.one();
    for (vi, wi) in v.iter().zip(w) {
        let moved = m.left_action(&acc, wi);
        acc = m.inner(vi, &moved);
    }
    Ok(acc)
}

/// Nested inner product of sums of elementary tensors.
pub fn nested_inner_sum(m: &OracleModule, v: &[Vec<DenseVector>], w: &[Vec<DenseVector>]) -> Result<WeylElement, OracleError> {
    let mut out = WeylElement::zero();
    for a in v {
        for b in w {
            out += &nested_inner(m, a, b)?;
        }
    }
    Ok(out)
}

/// `P₋ t = (n!)⁻¹ Σ_ρ sgn ρ U_ρ t`, `U_ρ` permuting the tensor slots.
pub fn antisymmetrize(t: &DenseTensor) -> Result<DenseTensor, OracleError> {
    let mut out = DenseTensor::zero(t.dim, t.level)?;
    let norm = 1.0 / factorial(t.level);
    for (p, sign) in permutations(t.level) {
        for (k, a) in t.entries() {
            let permuted: Vec<usize> = p.iter().map(|&i| k[i]).collect();
            out.add(&permuted, &a.scale(Complex64::new(sign * norm, 0.0)));
        }
    }
    Ok(out)
}

/// Full-Fock creation `√(n+1) f ⊗ v`.
pub fn create_full(m: &OracleModule, f: &DenseVector, v: &DenseTensor) -> Result<DenseTensor, OracleError> {
    let mut out = DenseTensor::zero(v.dim, v.level + 1)?;
    let root = Complex64::new(((v.level + 1) as f64).sqrt(), 0.0);
    for (b, fb) in f.iter().enumerate() {
        if fb.is_zero() {
            continue;
        }
        // e_b F_b ⊗ v = e_b ⊗ (F_b·v)
        for (t, c) in tensor_left_action(m, fb, v)?.entries() {
            let mut key = vec![b];
            key.extend(t);
            out.add(&key, &c.scale(root));
        }
    }
    Ok(out)
}

/// Full-Fock annihilation `√n ⟨f, v₁⟩ v₂ ⊗ … ⊗ vₙ`.
pub fn annihilate_full(m: &OracleModule, f: &DenseVector, v: &DenseTensor) -> Result<DenseTensor, OracleError> {
    if v.level == 0 {
        return DenseTensor::zero(v.dim, 0);
    }
    let mut out = DenseTensor::zero(v.dim, v.level - 1)?;
    let root = Complex64::new((v.level as f64).sqrt(), 0.0);
    for (t, c) in v.entries() {
        let contraction = f[t[0]].adjoint();
        if contraction.is_zero() {
            continue;
        }
        let mut tail = DenseTensor::zero(v.dim, v.level - 1)?;
        tail.add(&t[1..], c);
        for (s, x) in tensor_left_action(m, &contraction, &tail)?.entries() {
            out.add(&s, &x.scale(root));
        }
    }
    Ok(out)
}

/// Fermionic creation `P₋ a*(f) P₋`.
pub fn create(m: &OracleModule, f: &DenseVector, v: &DenseTensor) -> Result<DenseTensor, OracleError> {
    antisymmetrize(&create_full(m, f, &antisymmetrize(v)?)?)
}

/// Fermionic annihilation `P₋ a(f) P₋`.
pub fn annihilate(m: &OracleModule, f: &DenseVector, v: &DenseTensor) -> Result<DenseTensor, OracleError> {
    antisymmetrize(&annihilate_full(m, f, &antisymmetrize(v)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms.iter().map(|(_, s)| s).sum::<f64>(), 0.0);
        let swap = perms.iter().find(|(p, _)| p == &vec![1, 0, 2]).unwrap();
        assert_eq!(swap.1, -1.0);
        let cycle = perms.iter().find(|(p, _)| p == &vec![1, 2, 0]).unwrap();
        assert_eq!(cycle.1, 1.0);
    }

    #[test]
    fn size_limits() {
        assert!(DenseTensor::zero(7, 1).is_err());
        assert!(DenseTensor::zero(6, 4).is_err());
        assert!(DenseTensor::zero(6, 3).is_ok());
    }
}
