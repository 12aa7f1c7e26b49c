//! Truncated Fock-space verifier.
//!
//! Builds the three-mode Hamiltonian from ladder matrices, evolves kets by
//! exact diagonalization and evaluates expectation values. Nothing in here
//! uses the closed-form propagator.

mod basis;
mod evolve;
mod hamiltonian;
mod operator;
mod sparse;
mod state;

pub use basis::{FockBasis, DEFAULT_N_MAX, MAX_N_MAX};
pub use evolve::{evolve, Diagonalization, Evolved, EvolvedMixture, Oracle, OracleSettings, Spectrum};
pub use hamiltonian::hamiltonian_matrix;
pub use operator::{annihilation_matrix, creation_matrix, Ladder, Observable, Operator};
pub use sparse::SparseMatrix;
pub use state::{MixedState, StateDump, TruncatedState, DEFAULT_TAIL_TOL};

use num_complex::Complex64;

use crate::{Mode, Result};

/// ⟨(ΔX_φ)²⟩ − 1 for X_φ = b†e^{iφ} + be^{−iφ}, from normally ordered
/// moments so the cutoff level does not distort ⟨b b†⟩.
pub fn quadrature_excess(state: &MixedState, mode: Mode, phi: f64) -> Result<f64> {
    Ok(quadrature_curve(state, mode, &[phi])?[0])
}

/// [`quadrature_excess`] over several phases, sharing the moment evaluation.
pub fn quadrature_curve(state: &MixedState, mode: Mode, phases: &[f64]) -> Result<Vec<f64>> {
    let basis = state.basis();
    let mean = state.expectation(&Observable::annihilate(mode).to_operator(basis))?;
    let pair = state.expectation(&Observable::pair(mode, mode).to_operator(basis))?;
    let number = state.expectation(&Observable::number(mode).to_operator(basis))?.re;
    Ok(phases
        .iter()
        .map(|phi| {
            let rot = Complex64::from_polar(1.0, -2.0 * phi);
            2.0 * (number - mean.norm_sqr()) + 2.0 * ((pair - mean * mean) * rot).re
        })
        .collect())
}
