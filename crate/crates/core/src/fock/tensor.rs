//! Level-n tensors in normal form `Σ_t e_{t₁}⊗…⊗e_{tₙ}·A_t`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bimodule::{FreeBimodule, ModuleVector, Unitary};
use crate::weyl::{State, WeylAlgebra, WeylElement, PRUNE_TOL};

pub type Tuple = Vec<usize>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TensorError {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("tuple {tuple:?} does not have length {level}")]
    BadTuple { tuple: Tuple, level: usize },
    #[error("tuple {0:?} is not strictly increasing")]
    NotIncreasing(Tuple),
    #[error("need at least one tensor factor")]
    NoFactors,
}

/// Sorts `t`, returning the sign of the sorting permutation, or `None` if
/// an entry repeats.
pub fn sort_with_sign(t: &[usize]) -> Option<(Tuple, f64)> {
    let mut v = t.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Inserts `b` in front of the increasing tuple `s` and sorts:
/// `e_b ∧ e_s = (−1)^{#{s_i < b}} e_{sorted}`.
pub fn insert_sorted(b: usize, s: &[usize]) -> Option<(Tuple, f64)> {
    let pos = s.partition_point(|&x| x < b);
    if pos < s.len() && s[pos] == b {
        return None;
    }
    let mut out = Vec::with_capacity(s.len() + 1);
    out.extend_from_slice(&s[..pos]);
    out.push(b);
    out.extend_from_slice(&s[pos..]);
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    Some((out, sign))
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let sign = sort_with_sign(&p).map(|(_, s)| s).unwrap_or(1.0);
            (p, sign)
        })
        .collect()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `u^{⊗n} e_t` as a list of `(tuple, coefficient)`.
fn product_columns(u: &Unitary, t: &[usize]) -> Vec<(Tuple, Complex64)> {
    let mut acc: Vec<(Tuple, Complex64)> = vec![(Vec::with_capacity(t.len()), Complex64::new(1.0, 0.0))];
    for &b in t {
        let col = u.column(b);
        let mut next = Vec::with_capacity(acc.len() * col.len());
        for (prefix, c) in &acc {
            for &(r, v) in &col {
                let mut p = prefix.clone();
                p.push(r);
                next.push((p, c * v));
            }
        }
        acc = next;
    }
    acc
}

/// Stored-form image of the alternating element `Σ_σ sgn σ e_{σs}` under
/// `u^{⊗n}`: each coefficient is the minor of `u` on rows `k`, columns `s`.
pub fn twisted_terms(u: &Unitary, s: &[usize]) -> Vec<(Tuple, Complex64)> {
    match u {
        Unitary::Diagonal(d) => {
            let phase: Complex64 = s.iter().map(|&b| d[b]).product();
            vec![(s.to_vec(), phase)]
        }
        Unitary::Dense(_) => {
            let mut acc: BTreeMap<Tuple, Complex64> = BTreeMap::new();
            for (t, c) in product_columns(u, s) {
                if let Some((k, sign)) = sort_with_sign(&t) {
                    *acc.entry(k).or_default() += c * sign;
                }
            }
            acc.into_iter().filter(|(_, c)| c.norm() > PRUNE_TOL).collect()
        }
    }
}

fn add_coeff(terms: &mut BTreeMap<Tuple, WeylElement>, key: Tuple, a: &WeylElement) {
    if a.is_zero() {
        return;
    }
    let slot = terms.entry(key.clone()).or_default();
    *slot += a;
    if slot.is_zero() {
        terms.remove(&key);
    }
}

fn max_abs_of(terms: &BTreeMap<Tuple, WeylElement>) -> f64 {
    terms.values().map(WeylElement::max_abs).fold(0.0, f64::max)
}

/// An element of the n-fold internal tensor power in normal form.
#[derive(Debug, Clone, Default)]
pub struct TensorElement {
    level: usize,
    terms: BTreeMap<Tuple, WeylElement>,
}

impl TensorElement {
    pub fn zero(level: usize) -> Self {
        TensorElement {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn add_term(&mut self, tuple: Tuple, a: &WeylElement) {
        assert_eq!(tuple.len(), self.level, "tuple length must equal the level");
        add_coeff(&mut self.terms, tuple, a);
    }

    pub fn try_add_term(&mut self, tuple: Tuple, a: &WeylElement) -> Result<(), TensorError> {
        if tuple.len() != self.level {
            return Err(TensorError::BadTuple {
                tuple,
                level: self.level,
            });
        }
        add_coeff(&mut self.terms, tuple, a);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tuple, &WeylElement)> {
        self.terms.iter()
    }

    pub fn get(&self, t: &[usize]) -> WeylElement {
        self.terms.get(t).cloned().unwrap_or_default()
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

    pub fn max_abs(&self) -> f64 {
        max_abs_of(&self.terms)
    }

    pub fn max_abs_diff(&self, other: &TensorElement) -> f64 {
        let mut d = self.clone();
        for (t, a) in other.iter() {
            add_coeff(&mut d.terms, t.clone(), &-a);
        }
        d.max_abs()
    }

    pub fn scale(&self, c: Complex64) -> TensorElement {
        let mut out = TensorElement::zero(self.level);
        for (t, a) in self.iter() {
            out.add_term(t.clone(), &a.scale(c));
        }
        out
    }

    /// `a·v` with `W(n)(e_t A) = (u(n)^{⊗n} e_t)(W(n)A)`.
    pub fn left_action(&self, module: &FreeBimodule, a: &WeylElement) -> TensorElement {
        let mut out = TensorElement::zero(self.level);
        for (n, c) in a.terms() {
            let u = module.twist().operator(n);
            for (t, x) in self.iter() {
                let moved = module.algebra().mul_weyl_left(n, x).scale(*c);
                for (k, v) in product_columns(&u, t) {
                    add_coeff(&mut out.terms, k, &moved.scale(v));
                }
            }
        }
        out
    }

    /// Normal form of `f₁ ⊗ … ⊗ fₙ`, moving each coefficient to the right
    /// through the twisted left action.
    pub fn elementary(module: &FreeBimodule, factors: &[ModuleVector]) -> Result<TensorElement, TensorError> {
        let (first, rest) = factors.split_first().ok_or(TensorError::NoFactors)?;
        if rest.is_empty() {
            let mut out = TensorElement::zero(1);
            for (b, a) in first.iter() {
                out.add_term(vec![b], a);
            }
            return Ok(out);
        }
        let tail = TensorElement::elementary(module, rest)?;
        let mut out = TensorElement::zero(factors.len());
        for (b, a) in first.iter() {
            for (t, x) in tail.left_action(module, a).iter() {
                let mut key = Vec::with_capacity(t.len() + 1);
                key.push(b);
                key.extend_from_slice(t);
                add_coeff(&mut out.terms, key, x);
            }
        }
        Ok(out)
    }

    /// `⟨v, w⟩ = Σ_t v_t* w_t` on normal forms.
    pub fn inner(&self, algebra: &WeylAlgebra, other: &TensorElement) -> Result<WeylElement, TensorError> {
        if self.level != other.level {
            return Err(TensorError::LevelMismatch(self.level, other.level));
        }
        let mut out = WeylElement::zero();
        for (t, x) in self.iter() {
            if let Some(y) = other.terms.get(t) {
                out += &algebra.mul(&x.adjoint(), y);
            }
        }
        Ok(out)
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((s, x), (t, y))| s == t && x == y)
    }
}

/// Antisymmetric level-n element stored on strictly increasing tuples.
///
/// A stored pair `(s, c)` stands for `Σ_σ sgn σ e_{σs} · c`, so `c` is the
/// coefficient of the increasing representative in the full expansion.
#[derive(Debug, Clone, Default)]
pub struct AntisymmetricElement {
    level: usize,
    terms: BTreeMap<Tuple, WeylElement>,
}

impl AntisymmetricElement {
    pub fn zero(level: usize) -> Self {
        AntisymmetricElement {
            level,
            terms: BTreeMap::new(),
        }
    }

    /// `c · Σ_σ sgn σ e_{σs}` for a strictly increasing `s`.
    pub fn single(s: Tuple, c: WeylElement) -> Result<Self, TensorError> {
        let mut out = AntisymmetricElement::zero(s.len());
        out.try_add_term(s, &c)?;
        Ok(out)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn try_add_term(&mut self, s: Tuple, a: &WeylElement) -> Result<(), TensorError> {
        if s.len() != self.level {
            return Err(TensorError::BadTuple {
                tuple: s,
                level: self.level,
            });
        }
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TensorError::NotIncreasing(s));
        }
        add_coeff(&mut self.terms, s, a);
        Ok(())
    }

    /// Adds to a key known to be strictly increasing.
    pub(crate) fn add_sorted(&mut self, s: Tuple, a: &WeylElement) {
        debug_assert!(s.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(s.len(), self.level);
        add_coeff(&mut self.terms, s, a);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tuple, &WeylElement)> {
        self.terms.iter()
    }

    pub fn get(&self, s: &[usize]) -> WeylElement {
        self.terms.get(s).cloned().unwrap_or_default()
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

    pub fn max_abs(&self) -> f64 {
        max_abs_of(&self.terms)
    }

    pub fn scale(&self, c: Complex64) -> AntisymmetricElement {
        let mut out = AntisymmetricElement::zero(self.level);
        for (t, a) in self.iter() {
            out.add_sorted(t.clone(), &a.scale(c));
        }
        out
    }

    pub fn plus(&self, other: &AntisymmetricElement) -> AntisymmetricElement {
        assert_eq!(self.level, other.level, "level mismatch");
        let mut out = self.clone();
        for (t, a) in other.iter() {
            out.add_sorted(t.clone(), a);
        }
        out
    }

    /// Right multiplication of every coefficient.
    pub fn right_mul(&self, algebra: &WeylAlgebra, a: &WeylElement) -> AntisymmetricElement {
        let mut out = AntisymmetricElement::zero(self.level);
        for (t, x) in self.iter() {
            out.add_sorted(t.clone(), &algebra.mul(x, a));
        }
        out
    }

    /// Full expansion with `n!` signed terms per stored tuple.
    pub fn expand(&self) -> TensorElement {
        let perms = permutations(self.level);
        let mut out = TensorElement::zero(self.level);
        for (s, c) in self.iter() {
            for (p, sign) in &perms {
                let key: Tuple = p.iter().map(|&i| s[i]).collect();
                out.add_term(key, &c.scale(Complex64::new(*sign, 0.0)));
            }
        }
        out
    }

    /// `a·v`, keeping the antisymmetric form.
    pub fn left_action(&self, module: &FreeBimodule, a: &WeylElement) -> AntisymmetricElement {
        let mut out = AntisymmetricElement::zero(self.level);
        for (n, c) in a.terms() {
            let u = module.twist().operator(n);
            for (s, x) in self.iter() {
                let moved = module.algebra().mul_weyl_left(n, x).scale(*c);
                for (k, v) in twisted_terms(&u, s) {
                    out.add_sorted(k, &moved.scale(v));
                }
            }
        }
        out
    }

    /// `⟨v, w⟩ = n!·Σ_s v_s* w_s`.
    pub fn inner(&self, algebra: &WeylAlgebra, other: &AntisymmetricElement) -> Result<WeylElement, TensorError> {
        if self.level != other.level {
            return Err(TensorError::LevelMismatch(self.level, other.level));
        }
        let mut out = WeylElement::zero();
        for (t, x) in self.iter() {
            if let Some(y) = other.terms.get(t) {
                out += &algebra.mul(&x.adjoint(), y);
            }
        }
        Ok(out.scale(Complex64::new(factorial(self.level), 0.0)))
    }

    /// `ω(⟨v, w⟩)` without forming the algebra-valued product.
    pub fn state_inner(&self, state: &State, other: &AntisymmetricElement) -> Complex64 {
        let mut acc = Complex64::default();
        for (t, x) in self.iter() {
            if let Some(y) = other.terms.get(t) {
                acc += state.inner(x, y);
            }
        }
        acc * factorial(self.level)
    }
}

impl PartialEq for AntisymmetricElement {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((s, x), (t, y))| s == t && x == y)
    }
}

/// `P₋ t = (n!)⁻¹ Σ_σ sgn σ U_σ t` in stored antisymmetric form.
pub fn antisymmetrize(t: &TensorElement) -> AntisymmetricElement {
    let norm = Complex64::new(1.0 / factorial(t.level()), 0.0);
    let mut out = AntisymmetricElement::zero(t.level());
    for (tuple, x) in t.iter() {
        if let Some((k, sign)) = sort_with_sign(tuple) {
            out.add_sorted(k, &x.scale(norm * sign));
        }
    }
    out
}

/// `P₋ t` as a full tensor.
pub fn antisymmetrize_tensor(t: &TensorElement) -> TensorElement {
    antisymmetrize(t).expand()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::{OneParticleBasis, Twist};
    use crate::weyl::{GeneratorSet, GridSpec, GroupElement, TestFunctionPair};
    use nalgebra::DMatrix;

    fn module(dense: bool) -> FreeBimodule {
        let grid = GridSpec::new(1, 2, 1.0, 1).unwrap();
        let s = TestFunctionPair::new(&grid, vec![1.0, 0.0], vec![0.0, 0.7]).unwrap();
        let alg = WeylAlgebra::new(GeneratorSet::new(grid.clone(), vec![s]).unwrap());
        let basis = OneParticleBasis::new(&grid);
        let u = if dense {
            // rotation mixing e_0 and e_1
            let (c, s) = (0.6, 0.8);
            let m = DMatrix::from_fn(4, 4, |r, k| {
                let v = match (r, k) {
                    (0, 0) | (1, 1) => c,
                    (0, 1) => -s,
                    (1, 0) => s,
                    (2, 2) | (3, 3) => 1.0,
                    _ => 0.0,
                };
                Complex64::new(v, 0.0)
            });
            Unitary::Dense(m)
        } else {
            Unitary::Diagonal(vec![
                Complex64::from_polar(1.0, -0.4),
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(1.0, 0.4),
                Complex64::new(1.0, 0.0),
            ])
        };
        FreeBimodule::new(alg, basis, Twist::new(4, vec![u]).unwrap()).unwrap()
    }

    fn one() -> WeylElement {
        WeylElement::one(1)
    }

    #[test]
    fn sorting_signs() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1.0)));
        assert_eq!(sort_with_sign(&[1, 0, 2]), Some((vec![0, 1, 2], -1.0)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
        assert_eq!(insert_sorted(3, &[1, 5]), Some((vec![1, 3, 5], -1.0)));
        assert_eq!(insert_sorted(0, &[1, 5]), Some((vec![0, 1, 5], 1.0)));
        assert_eq!(insert_sorted(5, &[1, 5]), None);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3).iter().map(|(_, s)| s).sum::<f64>(), 0.0);
    }

    #[test]
    fn pauli_for_basis_vectors() {
        let mut t = TensorElement::zero(2);
        t.add_term(vec![1, 1], &one());
        assert!(antisymmetrize(&t).is_zero());
    }

    #[test]
    fn two_element_average() {
        let mut t = TensorElement::zero(2);
        let a = WeylElement::weyl(GroupElement::new(vec![2]));
        t.add_term(vec![0, 1], &a);
        let p = antisymmetrize_tensor(&t);
        let mut expected = TensorElement::zero(2);
        expected.add_term(vec![0, 1], &a.scale(Complex64::new(0.5, 0.0)));
        expected.add_term(vec![1, 0], &a.scale(Complex64::new(-0.5, 0.0)));
        assert_eq!(p, expected);
    }

    #[test]
    fn projection_is_idempotent() {
        let mut t = TensorElement::zero(3);
        t.add_term(vec![2, 0, 1], &one().scale(Complex64::new(0.3, 1.0)));
        t.add_term(vec![0, 3, 1], &WeylElement::weyl(GroupElement::new(vec![1])));
        t.add_term(vec![1, 1, 3], &one());
        let p = antisymmetrize_tensor(&t);
        let pp = antisymmetrize_tensor(&p);
        assert!(p.max_abs_diff(&pp) < 1e-12);
    }

    #[test]
    fn normal_form_inner_of_product_states() {
        let m = module(false);
        let a = WeylElement::term(GroupElement::new(vec![1]), Complex64::new(0.5, 0.5));
        let b = WeylElement::weyl(GroupElement::new(vec![-2]));
        let mut v = TensorElement::zero(2);
        v.add_term(vec![0, 1], &a);
        let mut w = TensorElement::zero(2);
        w.add_term(vec![0, 1], &b);
        let expected = m.algebra().mul(&a.adjoint(), &b);
        assert_eq!(v.inner(m.algebra(), &w).unwrap(), expected);
        let mut u = TensorElement::zero(2);
        u.add_term(vec![0, 1], &one());
        assert_eq!(u.inner(m.algebra(), &u).unwrap(), one());
        assert!(u.inner(m.algebra(), &TensorElement::zero(3)).is_err());
    }

    #[test]
    fn elementary_moves_coefficients_right() {
        let m = module(false);
        let w1 = WeylElement::weyl(GroupElement::new(vec![1]));
        let f = ModuleVector::basis(0, w1.clone());
        let g = ModuleVector::basis(0, one());
        let t = TensorElement::elementary(&m, &[f, g]).unwrap();
        // W(1) e_0 = e^{-0.4 i} e_0 W(1)
        let mut expected = TensorElement::zero(2);
        expected.add_term(vec![0, 0], &w1.scale(Complex64::from_polar(1.0, -0.4)));
        assert_eq!(t, expected);
    }

    #[test]
    fn twisted_left_action_matches_full_expansion() {
        for dense in [false, true] {
            let m = module(dense);
            let mut v = AntisymmetricElement::zero(2);
            v.try_add_term(vec![0, 1], &one().scale(Complex64::new(0.0, 1.0))).unwrap();
            v.try_add_term(vec![1, 2], &WeylElement::weyl(GroupElement::new(vec![1]))).unwrap();
            let a = WeylElement::from_terms([
                (GroupElement::new(vec![1]), Complex64::new(0.7, 0.0)),
                (GroupElement::new(vec![-1]), Complex64::new(0.0, 0.2)),
            ]);
            let direct = v.left_action(&m, &a).expand();
            let via_full = v.expand().left_action(&m, &a);
            assert!(direct.max_abs_diff(&via_full) < 1e-12, "dense = {dense}");
            let reproj = antisymmetrize(&via_full).expand();
            assert!(reproj.max_abs_diff(&via_full) < 1e-12);
        }
    }

    #[test]
    fn antisymmetric_inner_counts_permutations() {
        let m = module(false);
        let v = AntisymmetricElement::single(vec![0, 1, 3], one()).unwrap();
        let full = v.expand();
        let a = v.inner(m.algebra(), &v).unwrap();
        let b = full.inner(m.algebra(), &full).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, one().scale(Complex64::new(6.0, 0.0)));
        assert!(AntisymmetricElement::single(vec![1, 0], one()).is_err());
    }
}
