use fockmod::sampling;
use fockmod::weyl::WeylElement;
use fockmod_oracle::equivalence::{max_deviation, random_module, Operation};
use fockmod_oracle::{
    annihilate, annihilate_full, antisymmetrize, create, create_full, dense_inner, elementary, nested_inner,
    DenseTensor, DenseVector, OracleModule,
};
use num_complex::Complex64;
use rand::Rng;

fn random_dense(rng: &mut impl Rng, m: &OracleModule, level: usize) -> DenseTensor {
    let mut t = DenseTensor::zero(m.dim(), level).unwrap();
    for _ in 0..3 {
        let key: Vec<usize> = (0..level).map(|_| rng.gen_range(0..m.dim())).collect();
        t.add(&key, &sampling::weyl_element(rng, m.algebra().rank(), 2, 2));
    }
    t
}

fn random_vector(rng: &mut impl Rng, m: &OracleModule) -> DenseVector {
    (0..m.dim())
        .map(|_| if rng.gen_bool(0.5) { sampling::weyl_element(rng, m.algebra().rank(), 2, 1) } else { WeylElement::zero() })
        .collect()
}

fn setup(seed: u64) -> (OracleModule, sampling::SeededRng) {
    let mut rng = sampling::rng(seed);
    let module = random_module(&mut rng);
    (OracleModule::from_engine(&module).unwrap(), rng)
}

#[test]
fn engine_matches_oracle() {
    for op in Operation::ALL {
        let dev = max_deviation(op, 11, 40).unwrap();
        assert!(dev <= 1e-10, "{}: {dev:e}", op.name());
    }
}

#[test]
fn antisymmetrizer_is_a_projection() {
    let (m, mut rng) = setup(1);
    for level in 1..=3 {
        let t = random_dense(&mut rng, &m, level);
        let p = antisymmetrize(&t).unwrap();
        assert!(p.max_abs_diff_dense(&antisymmetrize(&p).unwrap()) < 1e-12);
        if level == 1 {
            assert!(p.max_abs_diff_dense(&t) < 1e-15);
        }
    }
}

#[test]
fn vacuum_creation_gives_the_vector() {
    let (m, mut rng) = setup(2);
    let f = random_vector(&mut rng, &m);
    let mut vac = DenseTensor::zero(m.dim(), 0).unwrap();
    vac.add(&[], &m.algebra().one());
    let out = create(&m, &f, &vac).unwrap();
    for (b, fb) in f.iter().enumerate() {
        assert!(out.get(&[b]).max_abs_diff(fb) < 1e-14);
    }
}

#[test]
fn full_fock_contraction_relation() {
    // a(f) a*(g) v = (n+1) ⟨f, g⟩ v on the full Fock space
    let (m, mut rng) = setup(3);
    for level in 1..=2 {
        let f = random_vector(&mut rng, &m);
        let g = random_vector(&mut rng, &m);
        let v = random_dense(&mut rng, &m, level);
        let lhs = annihilate_full(&m, &f, &create_full(&m, &g, &v).unwrap()).unwrap();
        let fg = m.inner(&f, &g);
        let rhs = fockmod_oracle::tensor_left_action(&m, &fg, &v)
            .unwrap()
            .scale(Complex64::new((level + 1) as f64, 0.0));
        let scale = rhs.entries().map(|(_, a)| a.max_abs()).fold(1.0, f64::max);
        assert!(lhs.max_abs_diff_dense(&rhs) <= 1e-12 * scale, "level {level}");
    }
}

#[test]
fn creation_is_adjoint_to_annihilation() {
    let (m, mut rng) = setup(4);
    for level in 2..=3 {
        let f = random_vector(&mut rng, &m);
        let v = antisymmetrize(&random_dense(&mut rng, &m, level)).unwrap();
        let w = antisymmetrize(&random_dense(&mut rng, &m, level - 1)).unwrap();
        let lhs = dense_inner(&m, &v, &create(&m, &f, &w).unwrap()).unwrap();
        let rhs = dense_inner(&m, &annihilate(&m, &f, &v).unwrap(), &w).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10, "level {level}");
    }
}

#[test]
fn nested_inner_uses_the_left_action() {
    // ⟨f₁⊗f₂, g₁⊗g₂⟩ = ⟨f₂, ⟨f₁,g₁⟩g₂⟩ differs from ⟨f₁,g₁⟩⟨f₂,g₂⟩ once the twist acts
    let (m, mut rng) = setup(5);
    let f: Vec<DenseVector> = (0..2).map(|_| random_vector(&mut rng, &m)).collect();
    let g: Vec<DenseVector> = (0..2).map(|_| random_vector(&mut rng, &m)).collect();
    let nested = nested_inner(&m, &f, &g).unwrap();
    let normal = dense_inner(&m, &elementary(&m, &f).unwrap(), &elementary(&m, &g).unwrap()).unwrap();
    assert!(nested.max_abs_diff(&normal) < 1e-10);
}
