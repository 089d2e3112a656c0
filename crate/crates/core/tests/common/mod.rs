//! Shared oracles and reference data for the integration tests.
#![allow(dead_code)]

use lopsim::mesh::{NetworkElement, NetworkSpec};
use lopsim::numerics::ComplexMatrix;
use lopsim::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Permanent by explicit sum over permutations.
pub fn naive_permanent(m: &ComplexMatrix) -> Complex64 {
    fn rec(m: &ComplexMatrix, row: usize, used: &mut [bool]) -> Complex64 {
        if row == m.rows() {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::default();
        for j in 0..m.cols() {
            if !used[j] {
                used[j] = true;
                acc += m[(row, j)] * rec(m, row + 1, used);
                used[j] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.cols()])
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let data = (0..n * n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ComplexMatrix::from_vec(n, n, data).unwrap()
}

/// Random element list mixing every element kind.
pub fn random_network(modes: usize, len: usize, rng: &mut impl Rng) -> NetworkSpec {
    let mut spec = NetworkSpec::new(modes);
    if modes < 2 {
        return spec;
    }
    for _ in 0..len {
        let i = rng.random_range(1..modes);
        let e = match rng.random_range(0..4) {
            0 => NetworkElement::swap(i),
            1 => NetworkElement::HardwareMzi {
                modes: [i, i + 1],
                theta1: rng.random_range(-6.0..6.0),
                theta2: rng.random_range(-6.0..6.0),
                phi1: rng.random_range(-6.0..6.0),
                phi2: rng.random_range(-6.0..6.0),
            },
            2 => {
                let a: f64 = rng.random_range(0.0..std::f64::consts::PI);
                NetworkElement::Beamsplitter { modes: [i, i + 1], t: a.cos(), r: a.sin() }
            }
            _ => NetworkElement::mzi(i, rng.random_range(-1.0..=1.0), rng.random_range(-3.2..3.2)),
        };
        spec.elements.push(e);
    }
    spec
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real_matrix(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap()
}

/// Five-mode CZ network at the four-digit settings, four digits.
pub fn cz_golden() -> ComplexMatrix {
    real_matrix(&[
        &[1.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.2192, 0.8475, 0.0, 0.4834],
        &[0.0, 0.3597, 0.3904, 0.0, -0.8475],
        &[0.0, 0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.9070, -0.3597, 0.0, 0.2192],
    ])
}

/// Eight-mode CCZ network, four digits; identical for both meshes.
pub fn ccz_golden() -> ComplexMatrix {
    real_matrix(&[
        &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, -0.2531, -0.1447, 0.0, -0.2891, -0.8597, 0.0, 0.3039],
        &[0.0, -0.0950, -0.3670, 0.0, 0.8626, -0.0859, 0.0, 0.3236],
        &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, -0.4875, -0.7133, 0.0, -0.1747, 0.1660, 0.0, -0.4421],
        &[0.0, 0.7106, -0.2853, 0.0, 0.1100, -0.3780, 0.0, -0.5086],
        &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.4293, -0.5042, 0.0, -0.3601, 0.2883, 0.0, 0.5905],
    ])
}

/// `(k, t, |A|)` for CZ with `k` auxiliary photons, four digits.
pub const TOWER: [(u32, [f64; 3], f64); 7] = [
    (1, [0.3686, -0.2192, 0.8686], 0.3904),
    (2, [0.3095, -0.1517, 0.7812], 0.3101),
    (3, [0.2758, -0.1166, 0.7090], 0.2811),
    (4, [0.2517, -0.09463, 0.6518], 0.2664),
    (5, [0.2331, -0.07963, 0.6058], 0.2576),
    (6, [0.2181, -0.06873, 0.5681], 0.2518),
    (7, [0.2057, -0.06044, 0.5364], 0.2476),
];

pub const CZ_AMPLITUDE: f64 = 0.3904;
pub const CZ_PROBABILITY: f64 = 0.15241;
pub const CCZ_AMPLITUDE: f64 = 0.163231;
pub const CCZ_PROBABILITY: f64 = 0.02665;

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
