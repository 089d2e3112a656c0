//! Gate networks in regular qubit labelling.
//!
//! Every network is an element list in propagation order: the first element
//! acts first on the input modes.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{NetworkElement, NetworkSpec, Scheme};

use super::GateKind;

/// Four-significant-figure CZ transmittances.
pub const CZ_PRINTED: [f64; 3] = [0.3686, -0.2192, 0.8686];
/// CZ transmittances converged to machine precision.
pub const CZ_REFINED: [f64; 3] = [0.3686227457838128, -0.2192235935955846, 0.8686227457838127];

/// Four-significant-figure CCZ transmittances, Clements mesh.
pub const CCZ_CLEMENTS_PRINTED: [f64; 10] =
    [-0.7893, -0.9428, -0.3809, -0.3284, -0.2583, 0.8719, 0.03792, 0.3689, 0.7943, 0.8559];
/// Four-significant-figure CCZ transmittances, Reck mesh.
pub const CCZ_RECK_PRINTED: [f64; 10] =
    [-0.9428, -0.3022, -0.1496, -0.2531, 0.9540, -0.3768, -0.09816, -0.9507, -0.5064, 0.8559];
/// Converged CCZ transmittances, Clements mesh.
pub const CCZ_CLEMENTS_REFINED: [f64; 10] = [
    -0.7893163677751553,
    -0.9428103349148383,
    -0.3809329008920752,
    -0.3284016853437156,
    -0.2582845846380066,
    0.8718848801144128,
    0.037898353567812196,
    0.3689230431066121,
    0.7943105971802924,
    0.8559060933546002,
];
/// Reck transmittances realising the same unitary as [`CCZ_CLEMENTS_REFINED`].
pub const CCZ_RECK_REFINED: [f64; 10] = [
    -0.9428103349148381,
    -0.3022164844410771,
    -0.14957591618678184,
    -0.2530757884960188,
    0.9539497470299478,
    -0.3767665891882477,
    -0.09817336554403175,
    -0.9507099197153823,
    -0.506358512280885,
    0.855906093354601,
];

/// Which frozen transmittance set to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Settings {
    /// As tabulated, four significant figures.
    Printed,
    /// Polished so the post-selection conditions hold to ~1e-12.
    #[default]
    Refined,
}

impl Settings {
    pub fn cz(self) -> [f64; 3] {
        match self {
            Settings::Printed => CZ_PRINTED,
            Settings::Refined => CZ_REFINED,
        }
    }

    pub fn ccz(self, scheme: Scheme) -> [f64; 10] {
        match (self, scheme) {
            (Settings::Printed, Scheme::Clements) => CCZ_CLEMENTS_PRINTED,
            (Settings::Printed, Scheme::Reck) => CCZ_RECK_PRINTED,
            (Settings::Refined, Scheme::Clements) => CCZ_CLEMENTS_REFINED,
            (Settings::Refined, Scheme::Reck) => CCZ_RECK_REFINED,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Settings::Printed => "printed",
            Settings::Refined => "refined",
        }
    }
}

impl FromStr for Settings {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(Settings::Printed),
            "refined" => Ok(Settings::Refined),
            _ => Err(Error::Unknown(s.into())),
        }
    }
}

/// Three-mode core; sits on modes 2–4 of the five-mode gate.
pub fn cz_block(t: &[f64; 3]) -> NetworkSpec {
    NetworkSpec::new(3)
        .push(NetworkElement::mzi(1, t[0], 0.0))
        .push(NetworkElement::mzi(2, t[1], 0.0))
        .push(NetworkElement::mzi(1, t[2], 0.0))
}

/// Five-mode CZ: the core sandwiched between swaps of the second qubit's rails.
pub fn cz_network_with(t: &[f64; 3]) -> NetworkSpec {
    let core = cz_block(t).shifted(1, 5).expect("fits");
    let mut spec = NetworkSpec::new(5).push(NetworkElement::swap(4));
    spec.elements.extend(core.elements);
    spec.push(NetworkElement::swap(4))
}

pub fn cz_network(settings: Settings) -> NetworkSpec {
    cz_network_with(&settings.cz())
}

/// CZ core conjugated by balanced splitters on the target rails. The trailing
/// `t = 1` MZI is a `−1` on the control's `|1⟩` rail, cancelling the sign the
/// splitters leave on that branch.
pub fn cnot_network_with(t: &[f64; 3]) -> NetworkSpec {
    let h = NetworkElement::mzi(4, FRAC_1_SQRT_2, 0.0);
    let core = cz_block(t).shifted(1, 5).expect("fits");
    let mut spec = NetworkSpec::new(5).push(h);
    spec.elements.extend(core.elements);
    spec.push(h).push(NetworkElement::mzi(1, 1.0, 0.0))
}

pub fn cnot_network(settings: Settings) -> NetworkSpec {
    cnot_network_with(&settings.cz())
}

/// Ten-MZI mesh over the five central modes `(w₁⁰, A¹, w₁¹, A², w₁²)` after
/// the label permutation.
pub fn ccz_block(t: &[f64; 10], scheme: Scheme) -> NetworkSpec {
    scheme.layout(5).with_transmittances(t).expect("ten MZIs")
}

/// Eight-mode CCZ: the mesh on modes 3–7 inside the label-permuting swaps.
pub fn ccz_network_with(t: &[f64; 10], scheme: Scheme) -> NetworkSpec {
    let swaps = [NetworkElement::swap(3), NetworkElement::swap(2), NetworkElement::swap(7)];
    let core = ccz_block(t, scheme).shifted(2, 8).expect("fits");
    let mut spec = NetworkSpec::new(8);
    spec.elements.extend(swaps);
    spec.elements.extend(core.elements);
    spec.elements.extend(swaps.iter().rev());
    spec
}

pub fn ccz_network(scheme: Scheme, settings: Settings) -> NetworkSpec {
    ccz_network_with(&settings.ccz(scheme), scheme)
}

/// CCZ conjugated by balanced splitters on the target rails.
pub fn toffoli_network_with(t: &[f64; 10], scheme: Scheme) -> NetworkSpec {
    let h = NetworkElement::mzi(7, FRAC_1_SQRT_2, 0.0);
    let mut spec = NetworkSpec::new(8).push(h);
    spec.elements.extend(ccz_network_with(t, scheme).elements);
    spec.push(h)
}

pub fn toffoli_network(scheme: Scheme, settings: Settings) -> NetworkSpec {
    toffoli_network_with(&settings.ccz(scheme), scheme)
}

/// Network for an entangling gate; single-qubit gates have no network here.
pub fn gate_network(kind: GateKind, scheme: Scheme, settings: Settings) -> Result<NetworkSpec> {
    match kind {
        GateKind::Cz => Ok(cz_network(settings)),
        GateKind::Cnot => Ok(cnot_network(settings)),
        GateKind::Ccz => Ok(ccz_network(scheme, settings)),
        GateKind::Toffoli => Ok(toffoli_network(scheme, settings)),
        GateKind::Z | GateKind::X => Err(Error::Domain(format!("`{kind}` is a single-rail operation, not a network"))),
    }
}
