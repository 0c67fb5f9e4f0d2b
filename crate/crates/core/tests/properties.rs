use proptest::prelude::*;
use qspace_core::inner::inner_auto;
use qspace_core::ladder::OperatorExpr;
use qspace_core::oracle::{self, LabeledTensor};
use qspace_core::sampling;
use qspace_core::second_quant::{build_hamiltonian, hermitian_deviation, matrix_in_basis};
use qspace_core::{
    apply, basis_product, modes, Complex64, FockSpace, FockVector, LadderOp, ProductKind,
    Statistics, TruncatedBasis,
};

const MODES: usize = 3;

fn stats_strategy() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

fn complex_strategy() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Random vector on the `n ≤ 3` truncated basis of a 3-mode space.
fn vector(stats: Statistics) -> impl Strategy<Value = FockVector> {
    let basis = TruncatedBasis::up_to(FockSpace::new(stats, MODES), 3).unwrap();
    let len = basis.len();
    proptest::collection::vec((0..len, complex_strategy()), 0..6).prop_map(move |terms| {
        FockVector::from_terms(
            basis.space(),
            terms
                .into_iter()
                .map(|(i, a)| (basis.states()[i].clone(), a)),
        )
        .unwrap()
    })
}

fn triple() -> impl Strategy<Value = (FockVector, FockVector, FockVector)> {
    stats_strategy().prop_flat_map(|s| (vector(s), vector(s), vector(s)))
}

fn pair() -> impl Strategy<Value = (FockVector, FockVector)> {
    stats_strategy().prop_flat_map(|s| (vector(s), vector(s)))
}

fn close(a: &FockVector, b: &FockVector) -> bool {
    a.max_abs_diff(b).unwrap() < 1e-12
}

proptest! {
    #[test]
    fn vector_space_axioms((u, v, w) in triple(), a in complex_strategy(), b in complex_strategy()) {
        let zero = u.space().zero();
        prop_assert!(close(&u.add(&v).unwrap(), &v.add(&u).unwrap()));
        prop_assert!(close(&u.add(&v).unwrap().add(&w).unwrap(), &u.add(&v.add(&w).unwrap()).unwrap()));
        prop_assert!(close(&u.add(&zero).unwrap(), &u));
        prop_assert!(u.add(&u.scale(Complex64::new(-1.0, 0.0))).unwrap().is_zero());
        prop_assert!(close(&u.scale(a).scale(b), &u.scale(a * b)));
        prop_assert!(close(&u.scale(Complex64::new(1.0, 0.0)), &u));
        prop_assert!(close(&u.add(&v).unwrap().scale(a), &u.scale(a).add(&v.scale(a)).unwrap()));
        prop_assert!(close(&u.scale(a + b), &u.scale(a).add(&u.scale(b)).unwrap()));
    }

    #[test]
    fn conjugate_symmetry_and_positivity((u, v) in pair()) {
        let uv = inner_auto(&u, &v).unwrap();
        let vu = inner_auto(&v, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-12);
        let uu = inner_auto(&u, &u).unwrap();
        prop_assert!(uu.im.abs() < 1e-12);
        prop_assert!(uu.re >= 0.0);
    }

    #[test]
    fn ladder_adjointness((u, v) in pair(), mode in 0..MODES) {
        let up = apply(LadderOp::create(mode), &u).unwrap();
        let down = apply(LadderOp::annihilate(mode), &v).unwrap();
        let lhs = inner_auto(&up, &v).unwrap();
        let rhs = inner_auto(&u, &down).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn fermion_creation_is_nilpotent(v in vector(Statistics::Fermion), mode in 0..MODES) {
        let once = apply(LadderOp::create(mode), &v).unwrap();
        prop_assert!(apply(LadderOp::create(mode), &once).unwrap().is_zero());
    }

    #[test]
    fn symmetric_product_ignores_order(
        f in proptest::collection::vec(0usize..4, 0..6),
        seed in any::<u64>(),
    ) {
        let mut rng = sampling::rng(seed);
        let g = sampling::permutation(&mut rng, f.len());
        let fp: Vec<usize> = g.iter().map(|&i| f[i]).collect();
        let h = sampling::permutation(&mut rng, f.len());
        let fh: Vec<usize> = h.iter().map(|&i| f[i]).collect();
        let base = basis_product(ProductKind::Symmetric, &modes(&f), &modes(&f));
        prop_assert_eq!(basis_product(ProductKind::Symmetric, &modes(&fp), &modes(&fh)), base);
    }

    #[test]
    fn to_occupation_is_an_isometry(seed in any::<u64>(), stats in stats_strategy(), n in 1usize..=3) {
        let mut rng = sampling::rng(seed);
        let m = 3;
        let random_tensor = |rng: &mut sampling::CheckRng| {
            let raw = LabeledTensor::from_amplitudes(m, n, sampling::complex_vec(rng, m.pow(n as u32))).unwrap();
            oracle::symmetrize(&raw, stats)
        };
        let (a, b) = (random_tensor(&mut rng), random_tensor(&mut rng));
        let qa = oracle::to_occupation(&a, stats).unwrap();
        let qb = oracle::to_occupation(&b, stats).unwrap();
        prop_assert!((inner_auto(&qa, &qb).unwrap() - a.inner(&b)).norm() < 1e-10);
    }
}

#[test]
fn number_operator_is_exact_on_basis_states() {
    for stats in [Statistics::Boson, Statistics::Fermion] {
        let space = FockSpace::new(stats, 4);
        let basis = TruncatedBasis::up_to(space, 5).unwrap();
        let n_op = OperatorExpr::total_number(4);
        for s in basis.states() {
            for v in [space.basis_vector(s.clone()), space.ket(s.clone())] {
                let out = qspace_core::apply_expr(&n_op, &v).unwrap();
                assert_eq!(out, v.scale(Complex64::new(s.total_n() as f64, 0.0)), "{s}");
            }
        }
    }
}

#[test]
fn conserving_hamiltonians_are_block_diagonal_and_hermitian() {
    let mut rng = sampling::rng(7);
    for stats in [Statistics::Boson, Statistics::Fermion] {
        for m in 1..=4 {
            let me = sampling::matrix_elements(&mut rng, m, 0.4);
            let basis = TruncatedBasis::up_to(FockSpace::new(stats, m), 3).unwrap();
            let built = matrix_in_basis(&build_hamiltonian(&me), &basis).unwrap();
            assert!(built.truncation.is_empty());
            assert!(hermitian_deviation(&built.matrix) < 1e-12);
            for (i, si) in basis.states().iter().enumerate() {
                for (j, sj) in basis.states().iter().enumerate() {
                    if si.total_n() != sj.total_n() {
                        assert_eq!(built.matrix[(i, j)], Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }
}

#[test]
fn first_quantized_h_commutes_with_transpositions() {
    let mut rng = sampling::rng(11);
    for m in 1..=3 {
        for n in 2..=3 {
            let me = sampling::matrix_elements(&mut rng, m, 0.5);
            let h = oracle::first_quantized_h(&me, n).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.swap(i, j);
                    let p = oracle::permutation_matrix(m, n, &perm).unwrap();
                    assert!((&p * &h - &h * &p).norm() < 1e-12, "M={m} n={n} P_{i}{j}");
                }
            }
        }
    }
}

#[test]
fn sampled_matrix_elements_satisfy_invariants() {
    let mut rng = sampling::rng(3);
    let me = sampling::matrix_elements(&mut rng, 3, 0.5);
    for (&(k, l, p, q), &v) in me.two_body() {
        assert!((v - me.v(q, p, l, k).conj()).norm() < 1e-15);
    }
}

#[test]
fn tiny_tolerance_override_forces_failure() {
    use qspace_core::acceptance::{run_criterion, CheckConfig, CriterionId};
    let cfg = CheckConfig {
        seed: 42,
        tolerance_override: Some(1e-300),
    };
    let report = run_criterion(CriterionId::Motivation, &cfg).unwrap();
    assert!(!report.passed, "{report}");
}
