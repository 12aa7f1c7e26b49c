use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockBasis, Operator};
use crate::{Error, Mode, Result};

/// Default truncation tolerance.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Pure three-mode ket on a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    basis: FockBasis,
    amplitudes: Vec<Complex64>,
}

impl TruncatedState {
    pub fn new(basis: FockBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::validation(
                "amplitudes",
                format!(
                    "length {} does not match basis dimension {}",
                    amplitudes.len(),
                    basis.dimension()
                ),
            ));
        }
        Ok(TruncatedState { basis, amplitudes })
    }

    pub fn vacuum(basis: FockBasis) -> Self {
        Self::fock(basis, [0, 0, 0]).expect("vacuum fits any basis")
    }

    pub fn fock(basis: FockBasis, occupation: [usize; 3]) -> Result<Self> {
        let index = basis.index(occupation).ok_or_else(|| {
            Error::Resource(format!(
                "occupation {occupation:?} exceeds cutoff {}",
                basis.n_max()
            ))
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(TruncatedState { basis, amplitudes })
    }

    /// Product state from single-mode number-basis amplitudes, in storage
    /// order. Levels beyond the cutoff are dropped, not renormalized.
    pub fn product(basis: FockBasis, modes: [&[Complex64]; 3]) -> Self {
        let amplitudes = (0..basis.dimension())
            .map(|i| {
                let occ = basis.occupation(i);
                (0..3)
                    .map(|m| {
                        modes[m]
                            .get(occ[m])
                            .copied()
                            .unwrap_or(Complex64::new(0.0, 0.0))
                    })
                    .product()
            })
            .collect();
        TruncatedState { basis, amplitudes }
    }

    /// Superposition Σ c_k |occupation_k⟩.
    pub fn from_components(
        basis: FockBasis,
        components: impl IntoIterator<Item = ([usize; 3], Complex64)>,
    ) -> Result<Self> {
        let mut state = Self::vacuum(basis);
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        for (occ, c) in components {
            let index = basis.index(occ).ok_or_else(|| {
                Error::Resource(format!("occupation {occ:?} exceeds cutoff {}", basis.n_max()))
            })?;
            state.amplitudes[index] += c;
        }
        Ok(state)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupation: [usize; 3]) -> Complex64 {
        self.basis
            .index(occupation)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        TruncatedState {
            basis: self.basis,
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        }
    }

    fn mass_where(&self, pred: impl Fn([usize; 3]) -> bool) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|&(i, _)| pred(self.basis.occupation(i)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Probability on basis states with some mode at the cutoff level.
    pub fn tail_mass(&self) -> f64 {
        let n = self.basis.n_max();
        self.mass_where(|occ| occ.contains(&n))
    }

    /// Probability in total-photon sectors above the cutoff, where the
    /// truncated Hamiltonian no longer acts like the full one.
    pub fn overflow_mass(&self) -> f64 {
        let n = self.basis.n_max();
        self.mass_where(|occ| occ.iter().sum::<usize>() > n)
    }

    /// Photon-number distribution of one mode.
    pub fn mode_distribution(&self, mode: Mode) -> Vec<f64> {
        let mut p = vec![0.0; self.basis.levels()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[self.basis.occupation(i)[mode.index()]] += a.norm_sqr();
        }
        p
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_basis(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨a|b⟩|² / (‖a‖²‖b‖²)
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// max |a_i − b_i|
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        self.same_basis(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// ⟨ψ|O|ψ⟩ (not divided by the norm).
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        op.check_basis(&self.basis)?;
        let applied = op.matrix().apply(&self.amplitudes);
        Ok(self
            .amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                operator: other.basis.n_max(),
                state: self.basis.n_max(),
            })
        }
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        TruncatedState {
            basis: self.basis,
            amplitudes,
        }
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            n_max: self.basis.n_max(),
            levels: self.basis.levels(),
            dimension: self.basis.dimension(),
            index_order: INDEX_ORDER.to_string(),
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_dump(dump: &StateDump) -> Result<Self> {
        let basis = FockBasis::new(dump.n_max)?;
        Self::new(
            basis,
            dump.amplitudes
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

const INDEX_ORDER: &str = "n_stokes*(N+1)^2 + n_probe*(N+1) + n_anti_stokes";

/// JSON debug form of a [`TruncatedState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub n_max: usize,
    pub levels: usize,
    pub dimension: usize,
    pub index_order: String,
    pub amplitudes: Vec<[f64; 2]>,
}

/// Weighted list of kets, ρ = Σ p_k |ψ_k⟩⟨ψ_k|.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    components: Vec<(f64, TruncatedState)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, TruncatedState)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::validation("components", "mixture is empty"));
        };
        let basis = *first.basis();
        if components.iter().any(|(_, s)| *s.basis() != basis) {
            return Err(Error::validation("components", "kets use different bases"));
        }
        if components.iter().any(|(w, _)| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::validation("components", "weights must be positive"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation(
                "components",
                format!("weights sum to {total}, not 1"),
            ));
        }
        Ok(MixedState { components })
    }

    pub fn pure(state: TruncatedState) -> Self {
        MixedState {
            components: vec![(1.0, state)],
        }
    }

    pub fn components(&self) -> &[(f64, TruncatedState)] {
        &self.components
    }

    pub fn basis(&self) -> &FockBasis {
        self.components[0].1.basis()
    }

    /// Σ p_k ⟨ψ_k|O|ψ_k⟩ / ⟨ψ_k|ψ_k⟩
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        self.components.iter().try_fold(Complex64::new(0.0, 0.0), |acc, (w, s)| {
            Ok(acc + s.expectation(op)? * (*w / s.norm_sqr()))
        })
    }

    pub fn tail_mass(&self) -> f64 {
        self.components.iter().map(|(w, s)| w * s.tail_mass() / s.norm_sqr()).sum()
    }

    pub fn overflow_mass(&self) -> f64 {
        self.components.iter().map(|(w, s)| w * s.overflow_mass() / s.norm_sqr()).sum()
    }
}
