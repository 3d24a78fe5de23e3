//! Seeded engine-vs-oracle comparisons on small random bimodules.

use fockmod::bimodule::{FreeBimodule, OneParticleBasis, Twist, Unitary};
use fockmod::fock::{antisymmetrize as engine_antisymmetrize, FockElement, FockSpace, TensorElement};
use fockmod::sampling;
use fockmod::weyl::{GeneratorSet, GridSpec, TestFunctionPair, WeylAlgebra};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::{
    annihilate, antisymmetrize, create, dense_inner, elementary, nested_inner, DenseTensor, DenseVector, OracleError,
    OracleModule,
};

/// Operations compared against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Antisymmetrize,
    Inner,
    Create,
    Annihilate,
}

impl Operation {
    pub const ALL: [Operation; 4] = [
        Operation::Antisymmetrize,
        Operation::Inner,
        Operation::Create,
        Operation::Annihilate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Operation::Antisymmetrize => "antisymmetrize",
            Operation::Inner => "inner",
            Operation::Create => "create",
            Operation::Annihilate => "annihilate",
        }
    }
}

/// Random unitary from Gram-Schmidt on a random complex matrix, as columns.
fn random_unitary(rng: &mut impl Rng, dim: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| sampling::complex(rng)).collect();
        for c in &cols {
            let p: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    cols
}

/// `V diag(e^{iθₖ}) V†` for each generator, with a shared random `V` so
/// the generators commute.
fn commuting_twist(rng: &mut impl Rng, dim: usize, rank: usize) -> Vec<Unitary> {
    let v = random_unitary(rng, dim);
    (0..rank)
        .map(|_| {
            let phases: Vec<Complex64> = (0..dim).map(|_| Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0))).collect();
            Unitary::Dense(DMatrix::from_fn(dim, dim, |r, c| {
                (0..dim).map(|k| v[k][r] * phases[k] * v[k][c].conj()).sum()
            }))
        })
        .collect()
}

/// Random bimodule over a 3-point grid with one spinor component (`dim h = 6`),
/// two Weyl generators and a dense commuting twist.
pub fn random_module(rng: &mut impl Rng) -> FreeBimodule {
    let grid = GridSpec::new(1, 3, 1.0, 1).expect("valid grid");
    let gens = loop {
        let pairs = (0..2)
            .map(|_| {
                let s0 = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s1 = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                TestFunctionPair::new(&grid, s0, s1).expect("grid length")
            })
            .collect();
        if let Ok(g) = GeneratorSet::new(grid.clone(), pairs) {
            break g;
        }
    };
    let basis = OneParticleBasis::new(&grid);
    let twist = Twist::new(basis.dim(), commuting_twist(rng, basis.dim(), 2)).expect("commuting unitaries");
    FreeBimodule::new(WeylAlgebra::new(gens), basis, twist).expect("consistent sizes")
}

fn random_tensor(rng: &mut impl Rng, module: &FreeBimodule, level: usize, terms: usize) -> TensorElement {
    let mut t = TensorElement::zero(level);
    for _ in 0..terms {
        let key = (0..level).map(|_| rng.gen_range(0..module.dim())).collect();
        t.add_term(key, &sampling::weyl_element(rng, module.algebra().rank(), 2, 2));
    }
    t
}

/// Max deviation of one seeded case.
pub fn compare_case(op: Operation, rng: &mut impl Rng) -> Result<f64, OracleError> {
    let module = random_module(rng);
    let oracle = OracleModule::from_engine(&module)?;
    let dim = module.dim();
    let rank = module.algebra().rank();
    let truncation = 3;
    let space = FockSpace::new(module.clone(), truncation).expect("truncation in range");
    let random_f = |rng: &mut _| sampling::module_vector(rng, dim, rank, 2, 2, 2);
    match op {
        Operation::Antisymmetrize => {
            let level = rng.gen_range(1..=3);
            let t = random_tensor(rng, &module, level, 4);
            let expected = antisymmetrize(&DenseTensor::from_tensor(dim, &t)?)?;
            let twice = antisymmetrize(&expected)?;
            Ok(expected
                .max_abs_diff(&engine_antisymmetrize(&t).expand())
                .max(expected.max_abs_diff_dense(&twice)))
        }
        Operation::Inner => {
            let level = rng.gen_range(1..=3);
            let v: Vec<_> = (0..level).map(|_| random_f(rng)).collect();
            let w: Vec<_> = (0..level).map(|_| random_f(rng)).collect();
            let dv: Vec<DenseVector> = v.iter().map(|f| oracle.from_module_vector(f)).collect();
            let dw: Vec<DenseVector> = w.iter().map(|f| oracle.from_module_vector(f)).collect();
            let nested = nested_inner(&oracle, &dv, &dw)?;
            let ev = TensorElement::elementary(&module, &v).expect("nonempty");
            let ew = TensorElement::elementary(&module, &w).expect("nonempty");
            let engine = ev.inner(module.algebra(), &ew).expect("same level");
            let ov = elementary(&oracle, &dv)?;
            let ow = elementary(&oracle, &dw)?;
            let normal = dense_inner(&oracle, &ov, &ow)?;
            let av = engine_antisymmetrize(&ev);
            let aw = engine_antisymmetrize(&ew);
            let anti = dense_inner(&oracle, &antisymmetrize(&ov)?, &antisymmetrize(&ow)?)?;
            let engine_anti = av.inner(module.algebra(), &aw).expect("same level");
            Ok(nested
                .max_abs_diff(&engine)
                .max(normal.max_abs_diff(&nested))
                .max(ov.max_abs_diff(&ev))
                .max(anti.max_abs_diff(&engine_anti)))
        }
        Operation::Create | Operation::Annihilate => {
            let f = random_f(rng);
            let df = oracle.from_module_vector(&f);
            let v = sampling::fock_element(rng, &space, truncation, 3, 2);
            let mut worst: f64 = 0.0;
            if op == Operation::Create {
                let out = space.create(&f, &v);
                for l in 0..truncation {
                    let expected = create(&oracle, &df, &level_dense(dim, &v, l)?)?;
                    worst = worst.max(expected.max_abs_diff_dense(&level_dense(dim, &out, l + 1)?));
                }
            } else {
                let out = space.annihilate(&f, &v);
                for l in 1..=truncation {
                    let expected = annihilate(&oracle, &df, &level_dense(dim, &v, l)?)?;
                    worst = worst.max(expected.max_abs_diff_dense(&level_dense(dim, &out, l - 1)?));
                }
            }
            Ok(worst)
        }
    }
}

fn level_dense(dim: usize, v: &FockElement, level: usize) -> Result<DenseTensor, OracleError> {
    if level == 0 {
        let mut out = DenseTensor::zero(dim, 0)?;
        out.add(&[], v.vacuum_part());
        return Ok(out);
    }
    DenseTensor::from_antisymmetric(dim, v.level(level))
}

/// Largest deviation over `cases` seeded cases.
pub fn max_deviation(op: Operation, seed: u64, cases: usize) -> Result<f64, OracleError> {
    let mut rng = sampling::rng(sampling::derive_seed(seed, op.name()));
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        worst = worst.max(compare_case(op, &mut rng)?);
    }
    Ok(worst)
}
