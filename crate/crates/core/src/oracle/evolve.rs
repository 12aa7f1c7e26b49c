use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hamiltonian_matrix, FockBasis, MixedState, Operator, TruncatedState, DEFAULT_TAIL_TOL};
use crate::{CouplingParams, Error, Result, Warning};

/// Cutoff and truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSettings {
    pub n_max: usize,
    pub tail_tol: f64,
    /// Escalate truncation warnings to errors.
    pub strict: bool,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            n_max: super::DEFAULT_N_MAX,
            tail_tol: DEFAULT_TAIL_TOL,
            strict: false,
        }
    }
}

/// How the Hamiltonian is diagonalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diagonalization {
    /// One dense block per total-photon-number sector; H has no elements
    /// between sectors.
    #[default]
    Sectors,
    /// The whole matrix as a single dense block.
    Dense,
}

#[derive(Debug)]
struct Block {
    indices: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Eigensystem of the truncated Hamiltonian.
#[derive(Debug)]
pub struct Spectrum {
    blocks: Vec<Block>,
}

impl Spectrum {
    fn new(h: &Operator, method: Diagonalization) -> Result<Self> {
        let basis = h.basis();
        let m = h.matrix();
        if m.triplets().any(|(_, _, v)| v.im != 0.0) {
            return Err(Error::Resource(
                "oracle Hamiltonian must be real symmetric".into(),
            ));
        }
        let groups: Vec<Vec<usize>> = match method {
            Diagonalization::Dense => vec![(0..basis.dimension()).collect()],
            Diagonalization::Sectors => {
                let mut sectors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for i in 0..basis.dimension() {
                    sectors.entry(basis.total_photons(i)).or_default().push(i);
                }
                if m.triplets()
                    .any(|(r, c, _)| basis.total_photons(r) != basis.total_photons(c))
                {
                    return Err(Error::Resource(
                        "Hamiltonian couples photon-number sectors".into(),
                    ));
                }
                sectors.into_values().collect()
            }
        };
        let blocks = groups
            .into_iter()
            .map(|indices| {
                let local: BTreeMap<usize, usize> =
                    indices.iter().enumerate().map(|(k, &i)| (i, k)).collect();
                let mut dense = DMatrix::<f64>::zeros(indices.len(), indices.len());
                for (k, &i) in indices.iter().enumerate() {
                    for &(j, v) in m.row(i) {
                        dense[(k, local[&j])] = v.re;
                    }
                }
                let eigen = SymmetricEigen::new(dense);
                Block {
                    indices,
                    energies: eigen.eigenvalues,
                    vectors: eigen.eigenvectors,
                }
            })
            .collect();
        Ok(Spectrum { blocks })
    }

    /// All eigenvalues, unsorted.
    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.blocks.iter().flat_map(|b| b.energies.iter().copied())
    }

    /// Largest block dimension that had to be diagonalized.
    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }

    fn propagate(&self, amplitudes: &[Complex64], time: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];
        for block in &self.blocks {
            let n = block.indices.len();
            let v = &block.vectors;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c = block
                    .indices
                    .iter()
                    .enumerate()
                    .map(|(r, &i)| amplitudes[i] * v[(r, k)])
                    .sum::<Complex64>()
                    * Complex64::from_polar(1.0, -block.energies[k] * time);
            }
            for (r, &i) in block.indices.iter().enumerate() {
                out[i] = coeffs.iter().enumerate().map(|(k, c)| c * v[(r, k)]).sum();
            }
        }
        out
    }
}

/// Result of one oracle evolution.
#[derive(Debug, Clone)]
pub struct Evolved {
    pub state: TruncatedState,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone)]
pub struct EvolvedMixture {
    pub state: MixedState,
    pub warnings: Vec<Warning>,
}

/// Brute-force propagator: the three-mode Hamiltonian on a truncated Fock
/// space, diagonalized once on first use and shared afterwards.
#[derive(Debug)]
pub struct Oracle {
    settings: OracleSettings,
    basis: FockBasis,
    params: CouplingParams,
    hamiltonian: Operator,
    method: Diagonalization,
    spectrum: OnceLock<Spectrum>,
}

impl Oracle {
    pub fn new(params: &CouplingParams, settings: OracleSettings) -> Result<Self> {
        Self::with_method(params, settings, Diagonalization::Sectors)
    }

    pub fn with_method(
        params: &CouplingParams,
        settings: OracleSettings,
        method: Diagonalization,
    ) -> Result<Self> {
        if !(settings.tail_tol.is_finite() && settings.tail_tol > 0.0) {
            return Err(Error::validation("tail_tol", "must be positive"));
        }
        let basis = FockBasis::new(settings.n_max)?;
        let hamiltonian = hamiltonian_matrix(&basis, params)?;
        Ok(Oracle {
            settings,
            basis,
            params: *params,
            hamiltonian,
            method,
            spectrum: OnceLock::new(),
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn settings(&self) -> &OracleSettings {
        &self.settings
    }

    pub fn params(&self) -> &CouplingParams {
        &self.params
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = Spectrum::new(&self.hamiltonian, self.method)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    fn check_mass(&self, what: &'static str, mass: f64, warnings: &mut Vec<Warning>) -> Result<()> {
        let tolerance = self.settings.tail_tol;
        if mass < tolerance {
            return Ok(());
        }
        if self.settings.strict {
            return Err(Error::Truncation {
                what,
                mass,
                tolerance,
            });
        }
        warnings.push(Warning::Truncation {
            what: what.to_string(),
            mass,
            tolerance,
        });
        Ok(())
    }

    fn propagate(&self, state: &TruncatedState, time: f64) -> Result<TruncatedState> {
        if state.basis() != &self.basis {
            return Err(Error::BasisMismatch {
                operator: self.basis.n_max(),
                state: state.basis().n_max(),
            });
        }
        Ok(state.with_amplitudes(self.spectrum()?.propagate(state.amplitudes(), time)))
    }

    /// exp(−iHt)|ψ⟩ for an explicit time.
    pub fn evolve_for(&self, state: &TruncatedState, time: f64) -> Result<Evolved> {
        let mut warnings = Vec::new();
        self.check_mass("input tail", state.tail_mass(), &mut warnings)?;
        self.check_mass("input overflow", state.overflow_mass(), &mut warnings)?;
        let out = self.propagate(state, time)?;
        self.check_mass("output tail", out.tail_mass(), &mut warnings)?;
        Ok(Evolved {
            state: out,
            warnings,
        })
    }

    /// Evolution over the time stored in the coupling parameters.
    pub fn evolve(&self, state: &TruncatedState) -> Result<Evolved> {
        self.evolve_for(state, self.params.time)
    }

    /// Evolves every ket of a mixture; truncation masses are checked on the
    /// mixture as a whole.
    pub fn evolve_mixture_for(&self, state: &MixedState, time: f64) -> Result<EvolvedMixture> {
        let mut warnings = Vec::new();
        self.check_mass("input tail", state.tail_mass(), &mut warnings)?;
        self.check_mass("input overflow", state.overflow_mass(), &mut warnings)?;
        let components = state
            .components()
            .iter()
            .map(|(w, ket)| Ok((*w, self.propagate(ket, time)?)))
            .collect::<Result<Vec<_>>>()?;
        let out = MixedState::new(components)?;
        self.check_mass("output tail", out.tail_mass(), &mut warnings)?;
        Ok(EvolvedMixture {
            state: out,
            warnings,
        })
    }
}

/// One-shot evolution with default settings on the state's own basis.
pub fn evolve(state: &TruncatedState, params: &CouplingParams) -> Result<Evolved> {
    let settings = OracleSettings {
        n_max: state.basis().n_max(),
        ..OracleSettings::default()
    };
    Oracle::new(params, settings)?.evolve(state)
}
