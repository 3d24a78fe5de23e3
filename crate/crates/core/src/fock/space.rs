//! Truncated antisymmetric Fock bimodule and the fermionic creation and
//! annihilation operators.

use num_complex::Complex64;

use super::tensor::{factorial, insert_sorted, twisted_terms, AntisymmetricElement, Tuple};
use crate::bimodule::{FreeBimodule, ModuleVector};
use crate::weyl::{GroupElement, State, WeylElement};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FockError {
    #[error("truncation must be at least 1")]
    ZeroTruncation,
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("level {level} exceeds truncation {truncation}")]
    LevelTooHigh { level: usize, truncation: usize },
}

/// `v = v⁰ ⊕ v¹ ⊕ … ⊕ vᴺ` with `v⁰ ∈ A` and `vˡ` antisymmetric.
#[derive(Debug, Clone)]
pub struct FockElement {
    truncation: usize,
    vacuum: WeylElement,
    levels: Vec<AntisymmetricElement>,
    truncated: bool,
}

impl FockElement {
    pub fn zero(truncation: usize) -> Self {
        FockElement {
            truncation,
            vacuum: WeylElement::zero(),
            levels: (1..=truncation).map(AntisymmetricElement::zero).collect(),
            truncated: false,
        }
    }

    /// Level-0 vector `A`.
    pub fn vacuum(truncation: usize, a: WeylElement) -> Self {
        let mut v = FockElement::zero(truncation);
        v.vacuum = a;
        v
    }

    pub fn from_level(truncation: usize, part: AntisymmetricElement) -> Result<Self, FockError> {
        let mut v = FockElement::zero(truncation);
        v.set_level(part)?;
        Ok(v)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn vacuum_part(&self) -> &WeylElement {
        &self.vacuum
    }

    /// Level `ℓ ≥ 1`.
    pub fn level(&self, l: usize) -> &AntisymmetricElement {
        &self.levels[l - 1]
    }

    pub fn set_vacuum(&mut self, a: WeylElement) {
        self.vacuum = a;
    }

    pub fn set_level(&mut self, part: AntisymmetricElement) -> Result<(), FockError> {
        let l = part.level();
        if l == 0 || l > self.truncation {
            return Err(FockError::LevelTooHigh {
                level: l,
                truncation: self.truncation,
            });
        }
        self.levels[l - 1] = part;
        Ok(())
    }

    /// Set when a creation operator dropped a component above the truncation.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.vacuum.is_zero() && self.levels.iter().all(AntisymmetricElement::is_zero)
    }

    /// Highest level with a nonzero component.
    pub fn top_level(&self) -> Option<usize> {
        (1..=self.truncation)
            .rev()
            .find(|&l| !self.levels[l - 1].is_zero())
            .or(if self.vacuum.is_zero() { None } else { Some(0) })
    }

    pub fn max_abs(&self) -> f64 {
        self.levels
            .iter()
            .map(AntisymmetricElement::max_abs)
            .fold(self.vacuum.max_abs(), f64::max)
    }

    pub fn scale(&self, c: Complex64) -> FockElement {
        FockElement {
            truncation: self.truncation,
            vacuum: self.vacuum.scale(c),
            levels: self.levels.iter().map(|p| p.scale(c)).collect(),
            truncated: self.truncated,
        }
    }

    pub fn plus(&self, other: &FockElement) -> FockElement {
        assert_eq!(self.truncation, other.truncation, "truncation mismatch");
        FockElement {
            truncation: self.truncation,
            vacuum: &self.vacuum + &other.vacuum,
            levels: self.levels.iter().zip(&other.levels).map(|(a, b)| a.plus(b)).collect(),
            truncated: self.truncated || other.truncated,
        }
    }

    pub fn minus(&self, other: &FockElement) -> FockElement {
        self.plus(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &FockElement) -> f64 {
        self.minus(other).max_abs()
    }
}

/// The truncated Fock bimodule over a free twisted bimodule.
#[derive(Debug, Clone)]
pub struct FockSpace {
    module: FreeBimodule,
    truncation: usize,
}

impl FockSpace {
    pub fn new(module: FreeBimodule, truncation: usize) -> Result<Self, FockError> {
        if truncation == 0 {
            return Err(FockError::ZeroTruncation);
        }
        Ok(FockSpace { module, truncation })
    }

    pub fn module(&self) -> &FreeBimodule {
        &self.module
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn zero(&self) -> FockElement {
        FockElement::zero(self.truncation)
    }

    pub fn vacuum(&self, a: WeylElement) -> FockElement {
        FockElement::vacuum(self.truncation, a)
    }

    /// `(e_{s₁}∧…∧e_{sₗ})·A` stored with coefficient `A`.
    pub fn basis_vector(&self, s: Tuple, a: WeylElement) -> FockElement {
        if s.is_empty() {
            return self.vacuum(a);
        }
        let part = AntisymmetricElement::single(s, a).expect("basis tuples are increasing");
        FockElement::from_level(self.truncation, part).expect("basis level within truncation")
    }

    fn check(&self, v: &FockElement) {
        assert_eq!(v.truncation, self.truncation, "Fock element truncation mismatch");
    }

    /// Left action of `A` level by level.
    pub fn left_action(&self, a: &WeylElement, v: &FockElement) -> FockElement {
        self.check(v);
        FockElement {
            truncation: self.truncation,
            vacuum: self.module.algebra().mul(a, &v.vacuum),
            levels: v.levels.iter().map(|p| p.left_action(&self.module, a)).collect(),
            truncated: v.truncated,
        }
    }

    /// Right action of `A` on every coefficient.
    pub fn right_mul(&self, v: &FockElement, a: &WeylElement) -> FockElement {
        self.check(v);
        let alg = self.module.algebra();
        FockElement {
            truncation: self.truncation,
            vacuum: alg.mul(&v.vacuum, a),
            levels: v.levels.iter().map(|p| p.right_mul(alg, a)).collect(),
            truncated: v.truncated,
        }
    }

    /// Fermionic creation `𝐚₋*(f) = √(ℓ+1) P₋(f ⊗ ·)` on each level.
    ///
    /// Components pushed above the truncation are dropped and the result is
    /// flagged.
    pub fn create(&self, f: &ModuleVector, v: &FockElement) -> FockElement {
        self.check(v);
        let alg = self.module.algebra();
        let mut out = FockElement::zero(self.truncation);
        out.truncated = v.truncated;
        if f.is_zero() {
            return out;
        }
        if !v.levels[self.truncation - 1].is_zero() {
            out.truncated = true;
        }
        for (n, fn_) in f.decompose(self.module.dim()) {
            if !v.vacuum.is_zero() {
                let right = alg.mul_weyl_left(&n, &v.vacuum);
                for (b, fb) in fn_.iter() {
                    out.levels[0].add_sorted(vec![b], &right.scale(fb));
                }
            }
            let u = self.module.twist().operator(&n);
            for l in 1..self.truncation {
                let part = &v.levels[l - 1];
                if part.is_zero() {
                    continue;
                }
                let norm = 1.0 / ((l + 1) as f64).sqrt();
                for (s, c) in part.iter() {
                    let right = alg.mul_weyl_left(&n, c);
                    for (t, d) in twisted_terms(&u, s) {
                        for (b, fb) in fn_.iter() {
                            if let Some((key, sign)) = insert_sorted(b, &t) {
                                out.levels[l].add_sorted(key, &right.scale(fb * d * (sign * norm)));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Fermionic annihilation: `√ℓ` times contraction of the first slot with
    /// `f`, the coefficient `W(−n)` acting on the remaining factors.
    pub fn annihilate(&self, f: &ModuleVector, v: &FockElement) -> FockElement {
        self.check(v);
        let alg = self.module.algebra();
        let mut out = FockElement::zero(self.truncation);
        out.truncated = v.truncated;
        for (n, fn_) in f.decompose(self.module.dim()) {
            let neg: GroupElement = -&n;
            let u = self.module.twist().operator(&neg);
            for l in 1..=self.truncation {
                let part = &v.levels[l - 1];
                if part.is_zero() {
                    continue;
                }
                let root = (l as f64).sqrt();
                for (t, c) in part.iter() {
                    let right = alg.mul_weyl_left(&neg, c);
                    for k in 0..l {
                        let fb = fn_.get(t[k]);
                        if fb == Complex64::default() {
                            continue;
                        }
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        let coeff = fb.conj() * (sign * root);
                        let tail: Tuple = t.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &b)| b).collect();
                        if l == 1 {
                            out.vacuum += &right.scale(coeff);
                            continue;
                        }
                        for (key, d) in twisted_terms(&u, &tail) {
                            out.levels[l - 2].add_sorted(key, &right.scale(coeff * d));
                        }
                    }
                }
            }
        }
        out
    }

    /// Algebra-valued inner product `Σ_ℓ ⟨vˡ, wˡ⟩`.
    pub fn inner(&self, v: &FockElement, w: &FockElement) -> WeylElement {
        self.check(v);
        self.check(w);
        let alg = self.module.algebra();
        let mut out = alg.mul(&v.vacuum.adjoint(), &w.vacuum);
        for (a, b) in v.levels.iter().zip(&w.levels) {
            out += &a.inner(alg, b).expect("levels align");
        }
        out
    }

    /// GNS scalar product `ω(⟨v, w⟩)`.
    pub fn gns_inner(&self, v: &FockElement, w: &FockElement, state: &State) -> Complex64 {
        self.check(v);
        self.check(w);
        let mut acc = state.inner(&v.vacuum, &w.vacuum);
        for (a, b) in v.levels.iter().zip(&w.levels) {
            acc += a.state_inner(state, b);
        }
        acc
    }

    pub fn gns_norm(&self, v: &FockElement, state: &State) -> f64 {
        self.gns_inner(v, v, state).re.max(0.0).sqrt()
    }

    /// Every basis vector `e_s·A` with `|s| ≤ max_level` and `A` from `rights`.
    pub fn normal_form_basis(&self, max_level: usize, rights: &[WeylElement]) -> Vec<FockElement> {
        let dim = self.module.dim();
        let mut tuples: Vec<Tuple> = vec![Vec::new()];
        let mut frontier: Vec<Tuple> = vec![Vec::new()];
        for _ in 0..max_level.min(self.truncation) {
            let mut next = Vec::new();
            for s in &frontier {
                let start = s.last().map_or(0, |&x| x + 1);
                for b in start..dim {
                    let mut t = s.clone();
                    t.push(b);
                    next.push(t);
                }
            }
            tuples.extend(next.iter().cloned());
            frontier = next;
        }
        let mut out = Vec::with_capacity(tuples.len() * rights.len());
        for s in &tuples {
            for a in rights {
                out.push(self.basis_vector(s.clone(), a.clone()));
            }
        }
        out
    }
}

/// Norm squared of `e_s` for an increasing tuple, `|s|!`.
pub fn basis_norm_sqr(level: usize) -> f64 {
    factorial(level)
}
