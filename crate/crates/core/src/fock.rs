//! Fock states and multi-photon propagation through a linear network.
//!
//! A creation operator transforms as `a†_j → Σ_k U⁻¹(j,k) a†_k` with
//! `U⁻¹ = U†`. For input occupations `s` and output occupations `t` the
//! transition amplitude is `perm(U†[s,t]) / √(∏ s_j! ∏ t_k!)`, where `U†[s,t]`
//! repeats row `j` `s_j` times and column `k` `t_k` times.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{expand_occupations, permanent, ComplexMatrix};

/// Refuse to enumerate more states than this.
pub const MAX_FOCK_STATES: u128 = 10_000_000;

/// Unitarity tolerance for networks handed to the propagation routines.
pub const UNITARY_TOL: f64 = 1e-8;

/// Caps on the size of a dense evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub photons: usize,
    pub modes: usize,
}

impl Default for Limits {
    /// Nine photons in fourteen modes: the two-CCZ cascade on five qubits.
    fn default() -> Self {
        Self { photons: 9, modes: 14 }
    }
}

impl Limits {
    pub fn check(&self, modes: usize, photons: usize) -> Result<()> {
        if photons > self.photons {
            return Err(Error::Resource(format!("{photons} photons exceed the cap of {}", self.photons)));
        }
        if modes > self.modes {
            return Err(Error::Resource(format!("{modes} modes exceed the cap of {}", self.modes)));
        }
        Ok(())
    }
}

/// Occupation numbers, one per mode.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FockState(Vec<u32>);

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// One photon in each listed mode (0-based); repeats stack.
    pub fn from_modes(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut occ = vec![0; modes];
        for &m in occupied {
            *occ.get_mut(m).ok_or(Error::IndexOutOfRange { index: m, size: modes })? += 1;
        }
        Ok(Self(occ))
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// `∏ n_j!` over all modes.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "⟩")
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Superposition of Fock states sharing mode count and photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    modes: usize,
    photons: Option<usize>,
    terms: BTreeMap<FockState, Complex64>,
}

impl StateVector {
    pub fn new(modes: usize) -> Self {
        Self { modes, photons: None, terms: BTreeMap::new() }
    }

    pub fn basis(state: FockState) -> Self {
        let mut sv = Self::new(state.modes());
        sv.photons = Some(state.photons());
        sv.terms.insert(state, Complex64::new(1.0, 0.0));
        sv
    }

    /// Adds `amp` to the coefficient of `state`.
    pub fn add(&mut self, state: FockState, amp: Complex64) -> Result<()> {
        if state.modes() != self.modes {
            return Err(Error::Dimension(format!("{}-mode state in {}-mode vector", state.modes(), self.modes)));
        }
        let n = state.photons();
        match self.photons {
            Some(p) if p != n => {
                return Err(Error::Contract(format!("mixed photon numbers {p} and {n} in one state vector")))
            }
            _ => self.photons = Some(n),
        }
        *self.terms.entry(state).or_default() += amp;
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons.unwrap_or(0)
    }

    pub fn get(&self, state: &FockState) -> Complex64 {
        self.terms.get(state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }
}

/// Number of ways to place `photons` bosons in `modes` modes, `C(n+m−1, n)`.
pub fn fock_dimension(modes: usize, photons: usize) -> u128 {
    if modes == 0 {
        return u128::from(photons == 0);
    }
    let (n, k) = ((photons + modes - 1) as u128, photons.min(modes - 1) as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All occupation vectors with the given photon number, first mode most
/// occupied first: `(2,0), (1,1), (0,2)`.
pub fn enumerate_fock(modes: usize, photons: usize) -> Result<Vec<FockState>> {
    if modes == 0 {
        return Err(Error::Domain("need at least one mode".into()));
    }
    let dim = fock_dimension(modes, photons);
    if dim > MAX_FOCK_STATES {
        return Err(Error::Resource(format!("{dim} Fock states exceed {MAX_FOCK_STATES}")));
    }
    let mut out = Vec::with_capacity(dim as usize);
    let mut occ = vec![0u32; modes];
    fill(&mut occ, 0, photons as u32, &mut out);
    Ok(out)
}

fn fill(occ: &mut [u32], mode: usize, left: u32, out: &mut Vec<FockState>) {
    if mode == occ.len() - 1 {
        occ[mode] = left;
        out.push(FockState(occ.to_vec()));
        return;
    }
    for k in (0..=left).rev() {
        occ[mode] = k;
        fill(occ, mode + 1, left - k, out);
    }
    occ[mode] = 0;
}

fn check_network(u: &ComplexMatrix, modes: usize) -> Result<()> {
    if !u.is_square() || u.rows() != modes {
        return Err(Error::Dimension(format!(
            "{}x{} network for {modes}-mode states",
            u.rows(),
            u.cols()
        )));
    }
    match u.unitarity_defect() {
        Some(d) if d < UNITARY_TOL => Ok(()),
        Some(d) => Err(Error::Contract(format!("network is not unitary (defect {d:.3e})"))),
        None => unreachable!(),
    }
}

/// Amplitude from a precomputed `U†`; no validation.
pub(crate) fn amplitude_from_inverse(u_inv: &ComplexMatrix, input: &FockState, output: &FockState) -> Complex64 {
    if input.photons() != output.photons() {
        return Complex64::default();
    }
    if input.photons() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let rows = expand_occupations(input.occupations());
    let cols = expand_occupations(output.occupations());
    let sub = u_inv
        .select(&crate::numerics::IndexSelection::new(rows, cols))
        .expect("occupations index valid modes");
    let p = permanent(&sub).expect("photon number bounded by limits");
    p / (input.factorial_product() * output.factorial_product()).sqrt()
}

/// Amplitude of detecting `output` after sending `input` through `u`.
pub fn transition_amplitude(u: &ComplexMatrix, input: &FockState, output: &FockState) -> Result<Complex64> {
    if input.modes() != output.modes() {
        return Err(Error::Dimension("input and output have different mode counts".into()));
    }
    check_network(u, input.modes())?;
    Ok(amplitude_from_inverse(&u.adjoint(), input, output))
}

/// Full output state of `state` propagated through `u`, with the default [`Limits`].
pub fn evolve(u: &ComplexMatrix, state: &StateVector) -> Result<StateVector> {
    evolve_with_limits(u, state, Limits::default())
}

pub fn evolve_with_limits(u: &ComplexMatrix, state: &StateVector, limits: Limits) -> Result<StateVector> {
    let modes = state.modes();
    check_network(u, modes)?;
    let photons = state.photons();
    limits.check(modes, photons)?;
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Contract(format!("input state has norm² {norm}")));
    }
    let u_inv = u.adjoint();
    let inputs: Vec<(&FockState, Complex64)> =
        state.iter().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(s, &a)| (s, a)).collect();
    let outputs = enumerate_fock(modes, photons)?;

    let coefficient = |t: &FockState| -> Complex64 {
        inputs.iter().map(|&(s, a)| a * amplitude_from_inverse(&u_inv, s, t)).sum()
    };

    #[cfg(feature = "parallel")]
    let amps: Vec<Complex64> = {
        use rayon::prelude::*;
        outputs.par_iter().map(coefficient).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let amps: Vec<Complex64> = outputs.iter().map(coefficient).collect();

    let mut out = StateVector::new(modes);
    out.photons = Some(photons);
    out.terms = outputs.into_iter().zip(amps).collect();
    Ok(out)
}
