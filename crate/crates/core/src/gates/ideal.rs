use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

use super::bit_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Z,
    X,
    Cz,
    Cnot,
    Ccz,
    Toffoli,
}

impl GateKind {
    pub fn n_qubits(self) -> usize {
        match self {
            GateKind::Z | GateKind::X => 1,
            GateKind::Cz | GateKind::Cnot => 2,
            GateKind::Ccz | GateKind::Toffoli => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Z => "z",
            GateKind::X => "x",
            GateKind::Cz => "cz",
            GateKind::Cnot => "cnot",
            GateKind::Ccz => "ccz",
            GateKind::Toffoli => "toffoli",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "z" => GateKind::Z,
            "x" | "not" => GateKind::X,
            "cz" => GateKind::Cz,
            "cnot" | "cx" => GateKind::Cnot,
            "ccz" => GateKind::Ccz,
            "toffoli" | "ccnot" | "ccx" => GateKind::Toffoli,
            _ => return Err(Error::Unknown(s.into())),
        })
    }
}

/// Basis action of a gate: every basis state maps to `±` one basis state.
/// The last qubit is the target; the others are controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealGate {
    pub kind: GateKind,
}

impl IdealGate {
    pub fn new(kind: GateKind) -> Self {
        Self { kind }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        name.parse().map(Self::new)
    }

    pub fn n_qubits(&self) -> usize {
        self.kind.n_qubits()
    }

    /// `(sign, output index)` for basis input `idx`.
    pub fn apply_basis(&self, idx: usize) -> (f64, usize) {
        let n = self.n_qubits();
        let controls_set = (0..n - 1).all(|j| bit_of(idx, j, n));
        let target = bit_of(idx, n - 1, n);
        match self.kind {
            GateKind::Z | GateKind::Cz | GateKind::Ccz => {
                let sign = if controls_set && target { -1.0 } else { 1.0 };
                (sign, idx)
            }
            GateKind::X | GateKind::Cnot | GateKind::Toffoli => {
                let out = if controls_set { idx ^ 1 } else { idx };
                (1.0, out)
            }
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let dim = 1 << self.n_qubits();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            let (s, o) = self.apply_basis(i);
            m[(o, i)] = Complex64::new(s, 0.0);
        }
        m
    }

    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); amplitudes.len()];
        for (i, &a) in amplitudes.iter().enumerate() {
            let (s, o) = self.apply_basis(i);
            out[o] += a * s;
        }
        out
    }
}
