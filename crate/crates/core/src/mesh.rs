//! Two-mode optical elements and the meshes built from them.
//!
//! Mode indices in this module are 1-based, matching the `(i, i+1)` labels
//! used for MZI positions. Elements in a [`NetworkSpec`] are listed in
//! propagation order: the first element is the rightmost matrix factor.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

const LOSSLESS_TOL: f64 = 1e-12;

/// Ideal MZI setting: transmittance `t = sin(θ/2)` and input phase `φ`.
///
/// A negative `t` keeps the power ratio `t²` and adds a π shift between the
/// transmitted and reflected amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziSetting {
    pub t: f64,
    pub phi: f64,
}

impl MziSetting {
    pub fn new(t: f64, phi: f64) -> Result<Self> {
        let s = Self { t, phi };
        s.validate()?;
        Ok(s)
    }

    pub fn real(t: f64) -> Result<Self> {
        Self::new(t, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !self.t.is_finite() || self.t.abs() > 1.0 || !self.phi.is_finite() {
            return Err(Error::Domain(format!("MZI transmittance {} outside [-1, 1]", self.t)));
        }
        Ok(())
    }

    pub fn reflectance(&self) -> f64 {
        (1.0 - self.t * self.t).max(0.0).sqrt()
    }
}

/// Four phase-shifter MZI: internal arms `theta1/theta2`, inputs `phi1/phi2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareMziSetting {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl HardwareMziSetting {
    /// Equivalent ideal setting, global phase dropped.
    pub fn ideal(&self) -> MziSetting {
        MziSetting { t: ((self.theta1 - self.theta2) / 2.0).sin(), phi: self.phi1 - self.phi2 }
    }
}

/// `[[e^{iφ} t, √(1−t²)], [e^{iφ} √(1−t²), −t]]`.
pub fn mzi_unitary(s: &MziSetting) -> Result<ComplexMatrix> {
    s.validate()?;
    let e = Complex64::from_polar(1.0, s.phi);
    let r = s.reflectance();
    ComplexMatrix::from_vec(2, 2, vec![e * s.t, r.into(), e * r, (-s.t).into()])
}

/// Balanced splitter · arm phases · balanced splitter · input phases,
/// including the global phase `i e^{i(θ₁+θ₂+2φ₂)/2}`.
pub fn hardware_mzi_unitary(h: &HardwareMziSetting) -> ComplexMatrix {
    let half = (h.theta1 - h.theta2) / 2.0;
    let (s, c) = half.sin_cos();
    let e = Complex64::from_polar(1.0, h.phi1 - h.phi2);
    let global = Complex64::i() * Complex64::from_polar(1.0, (h.theta1 + h.theta2 + 2.0 * h.phi2) / 2.0);
    ComplexMatrix::from_vec(2, 2, vec![e * s, c.into(), e * c, (-s).into()])
        .expect("2x2")
        .scale(global)
}

/// General splitter `[[t, ir], [ir, t]]`; only lossless `t² + r² = 1` is accepted.
pub fn beamsplitter_unitary(t: f64, r: f64) -> Result<ComplexMatrix> {
    let power = t * t + r * r;
    if (power - 1.0).abs() > LOSSLESS_TOL {
        return Err(Error::Lossy(power));
    }
    let ir = Complex64::new(0.0, r);
    ComplexMatrix::from_vec(2, 2, vec![t.into(), ir, ir, t.into()])
}

/// The cross state of an MZI, `U(0, 0)`.
pub fn swap_unitary() -> ComplexMatrix {
    mzi_unitary(&MziSetting { t: 0.0, phi: 0.0 }).expect("valid")
}

/// Places a 2×2 block on modes `(i, i+1)` of an `m`-mode identity.
pub fn embed(block: &ComplexMatrix, i: usize, m: usize) -> Result<ComplexMatrix> {
    if block.rows() != 2 || block.cols() != 2 {
        return Err(Error::Dimension("embed expects a 2x2 block".into()));
    }
    check_pair(i, m)?;
    let mut out = ComplexMatrix::identity(m);
    for a in 0..2 {
        for b in 0..2 {
            out[(i - 1 + a, i - 1 + b)] = block[(a, b)];
        }
    }
    Ok(out)
}

fn check_pair(i: usize, m: usize) -> Result<()> {
    if i == 0 || i >= m {
        return Err(Error::IndexOutOfRange { index: i, size: m });
    }
    Ok(())
}

/// One element of a planar mesh acting on adjacent modes `[i, i+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkElement {
    Mzi { modes: [usize; 2], t: f64, phi: f64 },
    Swap { modes: [usize; 2] },
    HardwareMzi { modes: [usize; 2], theta1: f64, theta2: f64, phi1: f64, phi2: f64 },
    Beamsplitter { modes: [usize; 2], t: f64, r: f64 },
}

impl NetworkElement {
    pub fn mzi(i: usize, t: f64, phi: f64) -> Self {
        Self::Mzi { modes: [i, i + 1], t, phi }
    }

    pub fn swap(i: usize) -> Self {
        Self::Swap { modes: [i, i + 1] }
    }

    pub fn modes(&self) -> [usize; 2] {
        match *self {
            Self::Mzi { modes, .. }
            | Self::Swap { modes }
            | Self::HardwareMzi { modes, .. }
            | Self::Beamsplitter { modes, .. } => modes,
        }
    }

    /// Upper mode of the pair (1-based).
    pub fn upper(&self) -> usize {
        self.modes()[0]
    }

    pub fn unitary(&self) -> Result<ComplexMatrix> {
        match *self {
            Self::Mzi { t, phi, .. } => mzi_unitary(&MziSetting { t, phi }),
            Self::Swap { .. } => Ok(swap_unitary()),
            Self::HardwareMzi { theta1, theta2, phi1, phi2, .. } => {
                Ok(hardware_mzi_unitary(&HardwareMziSetting { theta1, theta2, phi1, phi2 }))
            }
            Self::Beamsplitter { t, r, .. } => beamsplitter_unitary(t, r),
        }
    }

    fn shifted(mut self, offset: usize) -> Self {
        match &mut self {
            Self::Mzi { modes, .. }
            | Self::Swap { modes }
            | Self::HardwareMzi { modes, .. }
            | Self::Beamsplitter { modes, .. } => {
                modes[0] += offset;
                modes[1] += offset;
            }
        }
        self
    }

    fn validate(&self, m: usize) -> Result<()> {
        let [i, j] = self.modes();
        if j != i + 1 {
            return Err(Error::Domain(format!("element couples non-adjacent modes ({i}, {j})")));
        }
        check_pair(i, m)
    }
}

/// An `m`-mode mesh; elements in propagation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub modes: usize,
    pub elements: Vec<NetworkElement>,
}

impl NetworkSpec {
    pub fn new(modes: usize) -> Self {
        Self { modes, elements: Vec::new() }
    }

    pub fn push(mut self, e: NetworkElement) -> Self {
        self.elements.push(e);
        self
    }

    /// Appends `other`'s elements after this network's.
    pub fn then(mut self, other: &NetworkSpec) -> Result<Self> {
        if other.modes != self.modes {
            return Err(Error::Dimension(format!("{}-mode network after {}-mode", other.modes, self.modes)));
        }
        self.elements.extend_from_slice(&other.elements);
        Ok(self)
    }

    /// Moves the mesh down by `offset` modes inside a `total`-mode network.
    pub fn shifted(&self, offset: usize, total: usize) -> Result<Self> {
        if self.modes + offset > total {
            return Err(Error::Dimension(format!(
                "{}-mode network at offset {offset} does not fit {total} modes",
                self.modes
            )));
        }
        Ok(Self { modes: total, elements: self.elements.iter().map(|e| e.shifted(offset)).collect() })
    }

    pub fn mzi_count(&self) -> usize {
        self.elements.iter().filter(|e| matches!(e, NetworkElement::Mzi { .. })).count()
    }

    /// Copy with the MZI transmittances replaced in element order; phases untouched.
    pub fn with_transmittances(&self, ts: &[f64]) -> Result<Self> {
        if ts.len() != self.mzi_count() {
            return Err(Error::Dimension(format!("{} transmittances for {} MZIs", ts.len(), self.mzi_count())));
        }
        let mut it = ts.iter();
        let elements = self
            .elements
            .iter()
            .map(|e| match *e {
                NetworkElement::Mzi { modes, phi, .. } => {
                    NetworkElement::Mzi { modes, t: *it.next().expect("counted"), phi }
                }
                other => other,
            })
            .collect();
        Ok(Self { modes: self.modes, elements })
    }

    pub fn transmittances(&self) -> Vec<f64> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                NetworkElement::Mzi { t, .. } => Some(*t),
                _ => None,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::Domain("network needs at least one mode".into()));
        }
        self.elements.iter().try_for_each(|e| e.validate(self.modes))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s).map_err(|e| Error::Domain(format!("bad network JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Product of the embedded elements, last element leftmost.
pub fn build_network(spec: &NetworkSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let m = spec.modes;
    let mut u = ComplexMatrix::identity(m);
    for e in &spec.elements {
        let block = e.unitary()?;
        let (r0, r1) = (e.upper() - 1, e.upper());
        // rows r0, r1 of (E ⊕ I) · U
        for col in 0..m {
            let (a, b) = (u[(r0, col)], u[(r1, col)]);
            u[(r0, col)] = block[(0, 0)] * a + block[(0, 1)] * b;
            u[(r1, col)] = block[(1, 0)] * a + block[(1, 1)] * b;
        }
    }
    Ok(u)
}

/// Universal mesh arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Clements,
    Reck,
}

impl Scheme {
    pub fn layout(self, m: usize) -> NetworkSpec {
        match self {
            Scheme::Clements => clements_layout(m),
            Scheme::Reck => reck_layout(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Clements => "clements",
            Scheme::Reck => "reck",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clements" | "c" => Ok(Scheme::Clements),
            "reck" | "r" => Ok(Scheme::Reck),
            _ => Err(Error::Unknown(s.into())),
        }
    }
}

/// Triangular mesh: diagonals sweep from the bottom pair `(m−1, m)` upward,
/// each one stopping a mode lower than the last. `m(m−1)/2` MZIs, all at
/// `t = 1`, `φ = 0`.
pub fn reck_layout(m: usize) -> NetworkSpec {
    let mut spec = NetworkSpec::new(m);
    for top in 1..m {
        for i in (top..m).rev() {
            spec.elements.push(NetworkElement::mzi(i, 1.0, 0.0));
        }
    }
    spec
}

/// Rectangular mesh of `m` columns. Even columns (0-based) couple
/// `(2,3), (4,5), …`; odd columns couple `(1,2), (3,4), …`.
pub fn clements_layout(m: usize) -> NetworkSpec {
    let mut spec = NetworkSpec::new(m);
    for col in 0..m {
        let first = if col % 2 == 0 { 2 } else { 1 };
        for i in (first..m).step_by(2) {
            spec.elements.push(NetworkElement::mzi(i, 1.0, 0.0));
        }
    }
    spec
}

/// Which internal-arm shifter is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Upper,
    Lower,
}

impl std::str::FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" => Ok(Arm::Upper),
            "lower" => Ok(Arm::Lower),
            _ => Err(Error::Unknown(s.into())),
        }
    }
}

/// Arm phases after driving one shifter to reach a target `Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSetting {
    pub arm: Arm,
    pub target_theta: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl PhaseSetting {
    /// The driven shifter's value.
    pub fn driven(&self) -> f64 {
        match self.arm {
            Arm::Upper => self.theta1,
            Arm::Lower => self.theta2,
        }
    }

    /// Transmittance realised by the device, `sin(Θ/2)`.
    pub fn transmittance(&self) -> f64 {
        (self.target_theta / 2.0).sin()
    }
}

/// Drives one arm so the internal phase difference equals `Θ` modulo 2π,
/// starting from the offsets `theta1_0`, `theta2_0` present at zero drive.
/// The result is always a non-negative drive away from the offset.
pub fn phase_solve(target_theta: f64, theta1_0: f64, theta2_0: f64, arm: Arm) -> Result<PhaseSetting> {
    if !(target_theta > -TAU && target_theta < TAU) {
        return Err(Error::Domain(format!("Θ = {target_theta} outside (-2π, 2π)")));
    }
    let (theta1, theta2) = match arm {
        Arm::Upper => {
            let th = if target_theta >= 0.0 { theta2_0 + target_theta } else { theta2_0 + TAU + target_theta };
            (th, theta2_0)
        }
        Arm::Lower => {
            let th = if target_theta > 0.0 { theta1_0 + TAU - target_theta } else { theta1_0 - target_theta };
            (theta1_0, th)
        }
    };
    let out = PhaseSetting { arm, target_theta, theta1, theta2 };
    // Shifters are 2π-periodic: the realised phase difference equals Θ mod 2π.
    let diff = (theta1 - theta2 - target_theta).rem_euclid(TAU);
    debug_assert!(diff < 1e-9 || TAU - diff < 1e-9);
    Ok(out)
}

/// `Θ = 2 asin(t)` for a target transmittance.
pub fn theta_for_transmittance(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 {
        return Err(Error::Domain(format!("transmittance {t} outside [-1, 1]")));
    }
    Ok(2.0 * t.asin())
}
