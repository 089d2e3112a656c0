//! Dual-rail qubits with auxiliary photons, post-selection, and the gate networks.
//!
//! Modes are interleaved as `w₀⁰ w₁⁰ A¹ w₀¹ w₁¹ A² … w₀ⁿ⁻¹ w₁ⁿ⁻¹`, so `n`
//! qubits use `3n − 1` modes and `n + k(n − 1)` photons when each auxiliary
//! rail carries `k` photons. Logical basis indices put qubit 0 in the most
//! significant bit, so `|110⟩` is index 6.

mod ideal;
mod networks;
mod verify;

pub use ideal::{GateKind, IdealGate};
pub use networks::{
    ccz_block, ccz_network, ccz_network_with, cnot_network, cnot_network_with, cz_block, cz_network,
    cz_network_with, gate_network, toffoli_network, toffoli_network_with, Settings, CCZ_CLEMENTS_PRINTED,
    CCZ_CLEMENTS_REFINED, CCZ_RECK_PRINTED, CCZ_RECK_REFINED, CZ_PRINTED, CZ_REFINED,
};
pub use verify::{
    cascade, cascade_ccz, cascade_cz, gate_fidelity, random_register, truth_table, CascadeReport, CascadeRow,
    FidelityReport, TruthRow, TruthTable,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{amplitude_from_inverse, FockState, Limits, StateVector, UNITARY_TOL};
use crate::numerics::ComplexMatrix;

const NORM_TOL: f64 = 1e-12;

/// Single-qubit amplitudes `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Qubit {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Qubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::default())
    }

    pub fn one() -> Self {
        Self::new(Complex64::default(), Complex64::new(1.0, 0.0))
    }

    pub fn basis(bit: bool) -> Self {
        if bit {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn amplitude(&self, bit: bool) -> Complex64 {
        if bit {
            self.beta
        } else {
            self.alpha
        }
    }
}

/// Product state of `n` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitRegister {
    pub qubits: Vec<Qubit>,
}

impl QubitRegister {
    pub fn new(qubits: Vec<Qubit>) -> Result<Self> {
        for (j, q) in qubits.iter().enumerate() {
            let norm = q.alpha.norm_sqr() + q.beta.norm_sqr();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Contract(format!("qubit {j} has |α|²+|β|² = {norm}")));
            }
        }
        Ok(Self { qubits })
    }

    /// Computational basis state; `bits[0]` is qubit 0.
    pub fn basis(bits: &[bool]) -> Self {
        Self { qubits: bits.iter().map(|&b| Qubit::basis(b)).collect() }
    }

    /// Parses a bit string such as `"101"`.
    pub fn from_bits(s: &str) -> Result<Self> {
        Ok(Self::basis(&parse_bits(s)?))
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Logical amplitude vector over `2ⁿ` basis states.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let n = self.len();
        (0..1usize << n)
            .map(|idx| (0..n).map(|j| self.qubits[j].amplitude(bit_of(idx, j, n))).product())
            .collect()
    }
}

pub(crate) fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Domain(format!("bad bit string `{s}`"))),
        })
        .collect()
}

/// Bit of qubit `j` in basis index `idx` of an `n`-qubit register.
pub fn bit_of(idx: usize, j: usize, n: usize) -> bool {
    (idx >> (n - 1 - j)) & 1 == 1
}

/// `"q₀q₁…"` label of a basis index.
pub fn bit_string(idx: usize, n: usize) -> String {
    (0..n).map(|j| if bit_of(idx, j, n) { '1' } else { '0' }).collect()
}

/// Mode assignment for `n` qubits with `k` photons per auxiliary rail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    pub n_qubits: usize,
    pub aux_photons: u32,
}

impl QubitLayout {
    pub fn new(n_qubits: usize, aux_photons: u32) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Domain("layout needs at least one qubit".into()));
        }
        if aux_photons == 0 && n_qubits > 1 {
            return Err(Error::Domain("auxiliary rails need at least one photon".into()));
        }
        Ok(Self { n_qubits, aux_photons })
    }

    /// One auxiliary photon per rail.
    pub fn standard(n_qubits: usize) -> Self {
        Self { n_qubits, aux_photons: 1 }
    }

    pub fn modes(&self) -> usize {
        3 * self.n_qubits - 1
    }

    pub fn photons(&self) -> usize {
        self.n_qubits + self.aux_photons as usize * (self.n_qubits - 1)
    }

    /// 0-based mode of rail `bit` of qubit `j`.
    pub fn rail(&self, j: usize, bit: bool) -> usize {
        3 * j + usize::from(bit)
    }

    /// 0-based mode of the auxiliary rail between qubits `j` and `j + 1`.
    pub fn aux(&self, j: usize) -> usize {
        3 * j + 2
    }

    pub fn basis_count(&self) -> usize {
        1 << self.n_qubits
    }

    /// Fock state encoding basis index `idx`.
    pub fn basis_state(&self, idx: usize) -> FockState {
        let mut occ = vec![0u32; self.modes()];
        for j in 0..self.n_qubits {
            occ[self.rail(j, bit_of(idx, j, self.n_qubits))] = 1;
            if j + 1 < self.n_qubits {
                occ[self.aux(j)] = self.aux_photons;
            }
        }
        FockState::new(occ)
    }

    /// Basis index of a structure-preserving Fock state, `None` otherwise.
    pub fn decode(&self, state: &FockState) -> Option<usize> {
        let occ = state.occupations();
        if occ.len() != self.modes() {
            return None;
        }
        let mut idx = 0usize;
        for j in 0..self.n_qubits {
            let (z, o) = (occ[self.rail(j, false)], occ[self.rail(j, true)]);
            idx <<= 1;
            match (z, o) {
                (1, 0) => {}
                (0, 1) => idx |= 1,
                _ => return None,
            }
            if j + 1 < self.n_qubits && occ[self.aux(j)] != self.aux_photons {
                return None;
            }
        }
        Some(idx)
    }
}

/// Path-encoded Fock superposition of a register.
pub fn encode(reg: &QubitRegister, layout: &QubitLayout) -> Result<StateVector> {
    if reg.len() != layout.n_qubits {
        return Err(Error::Dimension(format!("{} qubits for a {}-qubit layout", reg.len(), layout.n_qubits)));
    }
    let reg = QubitRegister::new(reg.qubits.clone())?;
    let mut sv = StateVector::new(layout.modes());
    for (idx, amp) in reg.amplitudes().into_iter().enumerate() {
        if amp.norm_sqr() > 0.0 {
            sv.add(layout.basis_state(idx), amp)?;
        }
    }
    Ok(sv)
}

/// Structure-preserving part of an output state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostSelectionResult {
    /// Indexed by basis index.
    pub logical_amplitudes: Vec<Complex64>,
    /// `√P_succ`, the common amplitude scale of the kept outcomes.
    pub success_amplitude: Complex64,
    pub success_probability: f64,
    pub discarded_probability: f64,
}

impl PostSelectionResult {
    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        let b = parse_bits(bits)?;
        let idx = b.iter().fold(0usize, |acc, &x| (acc << 1) | usize::from(x));
        self.logical_amplitudes.get(idx).copied().ok_or_else(|| Error::Domain(format!("no basis state {bits}")))
    }

    /// Logical state rescaled to unit norm, `None` when nothing survived.
    pub fn normalized(&self) -> Option<Vec<Complex64>> {
        if self.success_probability <= 0.0 {
            return None;
        }
        let s = self.success_probability.sqrt();
        Some(self.logical_amplitudes.iter().map(|a| a / s).collect())
    }
}

/// Keeps outcomes with one photon per qubit rail pair and `k` photons on each
/// auxiliary rail.
pub fn postselect(out: &StateVector, layout: &QubitLayout) -> PostSelectionResult {
    let mut logical = vec![Complex64::default(); layout.basis_count()];
    let mut total = 0.0;
    for (state, amp) in out.iter() {
        total += amp.norm_sqr();
        if let Some(idx) = layout.decode(state) {
            logical[idx] += amp;
        }
    }
    let p: f64 = logical.iter().map(|a| a.norm_sqr()).sum();
    PostSelectionResult {
        logical_amplitudes: logical,
        success_amplitude: Complex64::new(p.sqrt(), 0.0),
        success_probability: p,
        discarded_probability: total - p,
    }
}

/// Post-selected transfer matrix: entry `(out, in)` is the amplitude of
/// basis output `out` for basis input `in`. Only structure-preserving
/// configurations are evaluated, so cost does not grow with the Fock space.
pub fn logical_map(u: &ComplexMatrix, layout: &QubitLayout, limits: Limits) -> Result<ComplexMatrix> {
    if u.rows() != layout.modes() || !u.is_square() {
        return Err(Error::Dimension(format!("{}-mode network for a {}-mode layout", u.rows(), layout.modes())));
    }
    limits.check(layout.modes(), layout.photons())?;
    match u.unitarity_defect() {
        Some(d) if d < UNITARY_TOL => {}
        Some(d) => return Err(Error::Contract(format!("network is not unitary (defect {d:.3e})"))),
        None => unreachable!(),
    }
    let u_inv = u.adjoint();
    let dim = layout.basis_count();
    let states: Vec<FockState> = (0..dim).map(|i| layout.basis_state(i)).collect();
    let column = |input: usize| -> Vec<Complex64> {
        states.iter().map(|out| amplitude_from_inverse(&u_inv, &states[input], out)).collect()
    };

    #[cfg(feature = "parallel")]
    let columns: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        (0..dim).into_par_iter().map(column).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let columns: Vec<Vec<Complex64>> = (0..dim).map(column).collect();

    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, col) in columns.into_iter().enumerate() {
        for (o, a) in col.into_iter().enumerate() {
            m[(o, i)] = a;
        }
    }
    Ok(m)
}
