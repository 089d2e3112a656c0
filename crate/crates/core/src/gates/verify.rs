//! Checking networks against ideal gates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{evolve_with_limits, Limits};
use crate::mesh::{build_network, NetworkSpec, Scheme};
use crate::numerics::ComplexMatrix;

use super::{
    bit_of, bit_string, encode, gate_network, logical_map, postselect, GateKind, IdealGate, Qubit, QubitLayout,
    QubitRegister, Settings,
};

/// Product state with each qubit uniform on the Bloch sphere.
pub fn random_register<R: Rng>(n: usize, rng: &mut R) -> QubitRegister {
    let qubits = (0..n)
        .map(|_| {
            let cos_theta: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
            Qubit::new(Complex64::new(half.cos(), 0.0), Complex64::from_polar(half.sin(), phi))
        })
        .collect();
    QubitRegister { qubits }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub gate: GateKind,
    pub trials: usize,
    pub seed: u64,
    pub min_fidelity: f64,
    pub max_fidelity: f64,
    pub mean_fidelity: f64,
    pub p_succ_min: f64,
    pub p_succ_max: f64,
    /// Largest probability lost to non-logical outcomes.
    pub discarded_max: f64,
    /// Inputs whose post-selected state vanished; excluded from the extrema.
    pub zero_success: usize,
}

struct Trial {
    fidelity: Option<f64>,
    p_succ: f64,
    discarded: f64,
}

/// Random-input fidelity of a network against `ideal`, through the full
/// encode → evolve → post-select pipeline. Deterministic for a given seed.
pub fn gate_fidelity(
    spec: &NetworkSpec,
    layout: &QubitLayout,
    ideal: IdealGate,
    trials: usize,
    seed: u64,
) -> Result<FidelityReport> {
    if spec.modes != layout.modes() {
        return Err(Error::Dimension(format!("{}-mode network for a {}-mode layout", spec.modes, layout.modes())));
    }
    if ideal.n_qubits() != layout.n_qubits {
        return Err(Error::Dimension(format!("{}-qubit gate on {} qubits", ideal.n_qubits(), layout.n_qubits)));
    }
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let limits = Limits { photons: layout.photons().max(Limits::default().photons), ..Limits::default() };
    let u = build_network(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<QubitRegister> = (0..trials).map(|_| random_register(layout.n_qubits, &mut rng)).collect();

    let run = |reg: &QubitRegister| -> Result<Trial> {
        let out = evolve_with_limits(&u, &encode(reg, layout)?, limits)?;
        let ps = postselect(&out, layout);
        let want = ideal.apply(&reg.amplitudes());
        let fidelity = ps.normalized().map(|got| {
            let overlap: Complex64 = want.iter().zip(&got).map(|(w, g)| w.conj() * g).sum();
            overlap.norm_sqr()
        });
        Ok(Trial { fidelity, p_succ: ps.success_probability, discarded: ps.discarded_probability })
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Trial> = {
        use rayon::prelude::*;
        inputs.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Trial> = inputs.iter().map(run).collect::<Result<_>>()?;

    let fids: Vec<f64> = results.iter().filter_map(|t| t.fidelity).collect();
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (min_f, max_f) = fold(&mut fids.iter().copied());
    let (p_lo, p_hi) = fold(&mut results.iter().map(|t| t.p_succ));
    let (_, d_hi) = fold(&mut results.iter().map(|t| t.discarded));
    Ok(FidelityReport {
        gate: ideal.kind,
        trials,
        seed,
        min_fidelity: if fids.is_empty() { 0.0 } else { min_f },
        max_fidelity: if fids.is_empty() { 0.0 } else { max_f },
        mean_fidelity: if fids.is_empty() { 0.0 } else { fids.iter().sum::<f64>() / fids.len() as f64 },
        p_succ_min: p_lo,
        p_succ_max: p_hi,
        discarded_max: d_hi,
        zero_success: trials - fids.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub input: String,
    /// Ideal output basis state.
    pub output: String,
    pub sign: f64,
    /// Post-selected amplitude on the ideal output.
    pub amplitude: Complex64,
    /// Post-selected probability on every other logical output.
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub gate: GateKind,
    pub rows: Vec<TruthRow>,
    /// Common amplitude after removing the global phase.
    pub success_amplitude: f64,
    /// Largest entry of `|M − A·e^{iγ}·G|` over the whole logical map.
    pub max_deviation: f64,
}

impl TruthTable {
    pub fn matches(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// Basis-by-basis comparison of a network's logical map with `ideal`, modulo
/// one global phase.
pub fn truth_table(u: &ComplexMatrix, layout: &QubitLayout, ideal: IdealGate) -> Result<TruthTable> {
    if ideal.n_qubits() != layout.n_qubits {
        return Err(Error::Dimension(format!("{}-qubit gate on {} qubits", ideal.n_qubits(), layout.n_qubits)));
    }
    let limits = Limits { photons: layout.photons().max(Limits::default().photons), ..Limits::default() };
    let m = logical_map(u, layout, limits)?;
    let g = ideal.matrix();
    let (s0, o0) = ideal.apply_basis(0);
    let reference = m[(o0, 0)] * s0;
    let mut max_deviation: f64 = 0.0;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            max_deviation = max_deviation.max((m[(r, c)] - reference * g[(r, c)]).norm());
        }
    }
    let n = layout.n_qubits;
    let rows = (0..layout.basis_count())
        .map(|i| {
            let (sign, o) = ideal.apply_basis(i);
            let leakage = (0..m.rows()).filter(|&r| r != o).map(|r| m[(r, i)].norm_sqr()).sum();
            TruthRow { input: bit_string(i, n), output: bit_string(o, n), sign, amplitude: m[(o, i)], leakage }
        })
        .collect();
    Ok(TruthTable { gate: ideal.kind, rows, success_amplitude: reference.norm(), max_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeRow {
    pub bits: String,
    pub amplitude: Complex64,
    pub magnitude: f64,
    pub expected_sign: f64,
    pub sign_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub gate: GateKind,
    pub n_qubits: usize,
    pub modes: usize,
    pub photons: usize,
    pub groups: Vec<Vec<usize>>,
    pub rows: Vec<CascadeRow>,
    pub magnitude_min: f64,
    pub magnitude_max: f64,
    /// Success probability of each basis input, `|amplitude|²`.
    pub success_probability: f64,
    /// Largest off-diagonal logical amplitude.
    pub off_diagonal_max: f64,
}

impl CascadeReport {
    pub fn signs_ok(&self) -> bool {
        self.rows.iter().all(|r| r.sign_ok)
    }

    pub fn magnitudes_within(&self, target: f64, tol: f64) -> bool {
        (self.magnitude_min - target).abs() <= tol && (self.magnitude_max - target).abs() <= tol
    }
}

fn validate_groups(kind: GateKind, n_qubits: usize, groups: &[Vec<usize>]) -> Result<()> {
    let size = kind.n_qubits();
    for g in groups {
        let consecutive = g.len() == size && g.windows(2).all(|w| w[1] == w[0] + 1);
        if !consecutive || g.last().is_none_or(|&q| q >= n_qubits) {
            return Err(Error::Cascade(format!(
                "{kind} needs {size} consecutive qubits below {n_qubits}, got {g:?}"
            )));
        }
    }
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            let shared = ga.iter().filter(|q| gb.contains(q)).count();
            if shared >= 2 {
                return Err(Error::Cascade(format!(
                    "{kind} on {ga:?} and {gb:?} share {shared} qubits; post-selected gates only compose when \
                     consecutive groups share at most one qubit"
                )));
            }
        }
    }
    Ok(())
}

/// Applies `kind` to each qubit group in order and checks the diagonal phase
/// pattern `(−1)^{Σ_groups Π bits}` of the post-selected map.
pub fn cascade(
    kind: GateKind,
    n_qubits: usize,
    groups: &[Vec<usize>],
    scheme: Scheme,
    settings: Settings,
    limits: Limits,
) -> Result<CascadeReport> {
    if !matches!(kind, GateKind::Cz | GateKind::Ccz) {
        return Err(Error::Cascade(format!("only cz and ccz cascades are diagonal; got {kind}")));
    }
    validate_groups(kind, n_qubits, groups)?;
    let layout = QubitLayout::standard(n_qubits);
    let gate = gate_network(kind, scheme, settings)?;
    let mut spec = NetworkSpec::new(layout.modes());
    for g in groups {
        spec = spec.then(&gate.shifted(3 * g[0], layout.modes())?)?;
    }
    let m = logical_map(&build_network(&spec)?, &layout, limits)?;

    let reference = m[(0, 0)];
    let phase = if reference.norm() > 0.0 { reference / reference.norm() } else { Complex64::new(1.0, 0.0) };
    let rows: Vec<CascadeRow> = (0..layout.basis_count())
        .map(|i| {
            let parity: usize = groups.iter().map(|g| usize::from(g.iter().all(|&q| bit_of(i, q, n_qubits)))).sum();
            let expected_sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            let amplitude = m[(i, i)];
            let rotated = amplitude / phase;
            let sign_ok = rotated.re * expected_sign > 0.0 && rotated.im.abs() < 1e-3 * rotated.norm().max(1e-300);
            CascadeRow { bits: bit_string(i, n_qubits), amplitude, magnitude: amplitude.norm(), expected_sign, sign_ok }
        })
        .collect();
    let mut off_diagonal_max: f64 = 0.0;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if r != c {
                off_diagonal_max = off_diagonal_max.max(m[(r, c)].norm());
            }
        }
    }
    let magnitude_min = rows.iter().map(|r| r.magnitude).fold(f64::INFINITY, f64::min);
    let magnitude_max = rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    Ok(CascadeReport {
        gate: kind,
        n_qubits,
        modes: layout.modes(),
        photons: layout.photons(),
        groups: groups.to_vec(),
        success_probability: magnitude_max * magnitude_max,
        rows,
        magnitude_min,
        magnitude_max,
        off_diagonal_max,
    })
}

/// CZ on qubits (0,1) then (1,2).
pub fn cascade_cz(settings: Settings) -> Result<CascadeReport> {
    cascade(GateKind::Cz, 3, &[vec![0, 1], vec![1, 2]], Scheme::Clements, settings, Limits::default())
}

/// CCZ on qubits (0,1,2) then (2,3,4).
pub fn cascade_ccz(scheme: Scheme, settings: Settings) -> Result<CascadeReport> {
    cascade(GateKind::Ccz, 5, &[vec![0, 1, 2], vec![2, 3, 4]], scheme, settings, Limits::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::cz_network;

    #[test]
    fn bloch_sampling_is_normalized_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let (ra, rb) = (random_register(3, &mut a), random_register(3, &mut b));
        assert_eq!(ra, rb);
        assert!(QubitRegister::new(ra.qubits).is_ok());
    }

    #[test]
    fn identity_network_is_not_cz() {
        let layout = QubitLayout::standard(2);
        let r = gate_fidelity(&NetworkSpec::new(5), &layout, IdealGate::new(GateKind::Cz), 50, 1).unwrap();
        assert!(r.min_fidelity < 0.99);
        assert!((r.p_succ_min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cz_fidelity_is_deterministic() {
        let layout = QubitLayout::standard(2);
        let spec = cz_network(Settings::Printed);
        let a = gate_fidelity(&spec, &layout, IdealGate::new(GateKind::Cz), 20, 3).unwrap();
        let b = gate_fidelity(&spec, &layout, IdealGate::new(GateKind::Cz), 20, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.min_fidelity > 1.0 - 1e-4);
    }

    #[test]
    fn cascade_refuses_shared_pairs() {
        let e = cascade(GateKind::Cz, 3, &[vec![0, 1], vec![0, 1]], Scheme::Clements, Settings::Printed, Limits::default());
        assert!(matches!(e, Err(Error::Cascade(_))));
        let e = cascade(
            GateKind::Ccz,
            4,
            &[vec![0, 1, 2], vec![1, 2, 3]],
            Scheme::Clements,
            Settings::Printed,
            Limits::default(),
        );
        assert!(matches!(e, Err(Error::Cascade(_))));
        let e = cascade(GateKind::Cz, 3, &[vec![0, 2]], Scheme::Clements, Settings::Printed, Limits::default());
        assert!(matches!(e, Err(Error::Cascade(_))));
    }

    #[test]
    fn cz_cascade_phase_pattern() {
        let r = cascade_cz(Settings::Printed).unwrap();
        assert!(r.signs_ok());
        assert!(r.magnitudes_within(0.15241, 1e-3));
        assert_eq!(r.rows[7].expected_sign, 1.0);
        assert_eq!(r.rows[6].expected_sign, -1.0);
    }
}
