//! Simulation and design of post-selected entangling gates built from
//! universal Mach–Zehnder meshes and dual-rail qubits with auxiliary photons.
//!
//! * [`numerics`]: complex matrices and Ryser permanents.
//! * [`fock`]: Fock states and multi-photon propagation.
//! * [`mesh`]: MZI / beam-splitter models, mesh layouts, phase calibration.
//! * [`gates`]: qubit encoding, post-selection, CZ/CNOT/CCZ/Toffoli networks,
//!   fidelity and cascading checks.
//! * [`solver`]: permanent conditions as residual systems and a multi-start
//!   damped least-squares solver.

pub mod error;
pub mod fock;
pub mod gates;
pub mod mesh;
pub mod numerics;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
