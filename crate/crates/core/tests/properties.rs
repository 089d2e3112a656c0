mod common;

use common::{naive_permanent, random_matrix, random_network, rng};
use lopsim::fock::{enumerate_fock, evolve, transition_amplitude, FockState, StateVector};
use lopsim::gates::{
    ccz_network, cz_network, encode, logical_map, postselect, Qubit, QubitLayout, QubitRegister, Settings,
};
use lopsim::fock::Limits;
use lopsim::mesh::{build_network, NetworkElement, NetworkSpec, Scheme};
use lopsim::numerics::{permanent, ComplexMatrix};
use lopsim::solver::{residual_jacobian, ConditionProblem};
use lopsim::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn defect(u: &ComplexMatrix) -> f64 {
    u.adjoint().matmul(u).unwrap().max_abs_diff(&ComplexMatrix::identity(u.rows())).unwrap()
}

fn qubit_strategy() -> impl Strategy<Value = Qubit> {
    (0.0..std::f64::consts::PI, -3.2..3.2f64).prop_map(|(theta, phi): (f64, f64)| {
        Qubit::new(Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ryser_matches_naive(n in 1usize..=7, seed in any::<u64>()) {
        let m = random_matrix(n, &mut rng(seed));
        let (fast, slow) = (permanent(&m).unwrap(), naive_permanent(&m));
        prop_assert!((fast - slow).norm() <= 1e-12 * slow.norm().max(1.0));
    }

    #[test]
    fn permanent_ignores_row_order(n in 2usize..=6, seed in any::<u64>()) {
        let m = random_matrix(n, &mut rng(seed));
        let mut data = m.as_slice().to_vec();
        let (a, b) = (seed as usize % n, (seed as usize / 7 + 1) % n);
        for c in 0..n {
            data.swap(a * n + c, b * n + c);
        }
        let swapped = ComplexMatrix::from_vec(n, n, data).unwrap();
        prop_assert!((permanent(&m).unwrap() - permanent(&swapped).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn meshes_are_unitary(modes in 1usize..=14, len in 0usize..40, seed in any::<u64>()) {
        let spec = random_network(modes, len, &mut rng(seed));
        prop_assert!(defect(&build_network(&spec).unwrap()) < 1e-12);
    }

    #[test]
    fn evolution_conserves_norm(modes in 2usize..=6, photons in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = build_network(&random_network(modes, 12, &mut r)).unwrap();
        let basis = enumerate_fock(modes, photons).unwrap();
        let picks = rand::seq::index::sample(&mut r, basis.len(), basis.len().min(3));
        let weights: Vec<Complex64> =
            picks.iter().map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
        let total: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
        prop_assume!(total > 1e-6);
        let mut sv = StateVector::new(modes);
        for (p, w) in picks.iter().zip(weights) {
            sv.add(basis[p].clone(), w / total.sqrt()).unwrap();
        }
        let out = evolve(&u, &sv).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identity_round_trip(qs in prop::collection::vec(qubit_strategy(), 1..=3), k in 1u32..=2) {
        let layout = QubitLayout::new(qs.len(), k).unwrap();
        let reg = QubitRegister::new(qs).unwrap();
        let out = evolve(&ComplexMatrix::identity(layout.modes()), &encode(&reg, &layout).unwrap()).unwrap();
        let ps = postselect(&out, &layout);
        for (a, b) in ps.logical_amplitudes.iter().zip(reg.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn local_gates_preserve_structure(t0 in -1.0..=1.0f64, t1 in -1.0..=1.0f64, phi in -3.2..3.2f64,
                                      qs in prop::collection::vec(qubit_strategy(), 2)) {
        // MZIs only inside each qubit's own rail pair
        let spec = NetworkSpec::new(5).push(NetworkElement::mzi(1, t0, phi)).push(NetworkElement::mzi(4, t1, -phi));
        let layout = QubitLayout::standard(2);
        let reg = QubitRegister::new(qs).unwrap();
        let out = evolve(&build_network(&spec).unwrap(), &encode(&reg, &layout).unwrap()).unwrap();
        prop_assert!((postselect(&out, &layout).success_probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn postselection_is_linear(qs in prop::collection::vec(qubit_strategy(), 2)) {
        let layout = QubitLayout::standard(2);
        let u = build_network(&cz_network(Settings::Printed)).unwrap();
        let reg = QubitRegister::new(qs).unwrap();
        let got = postselect(&evolve(&u, &encode(&reg, &layout).unwrap()).unwrap(), &layout).logical_amplitudes;
        let map = logical_map(&u, &layout, Limits::default()).unwrap();
        let input = reg.amplitudes();
        for (o, g) in got.iter().enumerate() {
            let want: Complex64 = (0..4).map(|i| map[(o, i)] * input[i]).sum();
            prop_assert!((g - want).norm() < 1e-10);
        }
    }
}

#[test]
fn hom_dip_at_balanced_splitter() {
    let u = build_network(&NetworkSpec::new(2).push(NetworkElement::mzi(1, std::f64::consts::FRAC_1_SQRT_2, 0.0))).unwrap();
    let s = FockState::new(vec![1, 1]);
    assert!(transition_amplitude(&u, &s, &s).unwrap().norm() < 1e-12);
}

#[test]
fn jacobian_matches_coarser_differences() {
    let mut r = rng(2024);
    let problems = [
        ConditionProblem::Cz,
        ConditionProblem::Tower { k: 3 },
        ConditionProblem::Ccz { scheme: Scheme::Clements },
        ConditionProblem::Ccz { scheme: Scheme::Reck },
    ];
    for i in 0..20 {
        let p = problems[i % problems.len()];
        let t: Vec<f64> = (0..p.dim()).map(|_| r.random_range(-0.95..0.95)).collect();
        let fine = residual_jacobian(&p, &t, 1e-7).unwrap();
        let coarse = residual_jacobian(&p, &t, 1e-6).unwrap();
        let (mut diff, mut scale) = (0.0, 0.0);
        for (a, b) in fine.iter().flatten().zip(coarse.iter().flatten()) {
            diff += (a - b) * (a - b);
            scale += b * b;
        }
        assert!(diff.sqrt() <= 1e-5 * scale.sqrt(), "{p} at {t:?}");
    }
}

#[test]
fn success_probability_is_input_independent() {
    for (spec, n) in [(cz_network(Settings::Refined), 2), (ccz_network(Scheme::Reck, Settings::Refined), 3)] {
        let layout = QubitLayout::standard(n);
        let u = build_network(&spec).unwrap();
        let mut r = rng(5);
        let ps: Vec<f64> = (0..100)
            .map(|_| {
                let reg = lopsim::gates::random_register(n, &mut r);
                postselect(&evolve(&u, &encode(&reg, &layout).unwrap()).unwrap(), &layout).success_probability
            })
            .collect();
        let spread = ps.iter().cloned().fold(f64::MIN, f64::max) - ps.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-9, "spread {spread}");
    }
}
