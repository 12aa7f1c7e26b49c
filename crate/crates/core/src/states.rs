//! Input states, their closed-form evolution, and classicality structure.
//!
//! A product coherent state stays a product coherent state with amplitudes
//! α → Uα. Hence a point-mass mixture of coherent states (a non-negative
//! P-function) is mapped to another such mixture with the same weights and
//! is separable. A probe Fock state |n⟩ becomes
//!
//! ```text
//! Σ_{l≤n} Σ_{m≤l} √C(n,l) √C(l,m) u₀₋₁^{l−m} u₀₀^{n−l} u₀₁^m |l−m, n−l, m⟩
//! ```
//!
//! which is entangled whenever at least two of the u₀q are non-zero.

use std::collections::HashMap;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::oracle::{FockBasis, MixedState, TruncatedState};
use crate::propagator::PropagatorMatrix;
use crate::statistics::{gaussian_factorial_moment, ProbeMoments};
use crate::{Error, Mode, Result};

/// Entanglement threshold on reduced-state purity.
pub const PURITY_THRESHOLD: f64 = 1.0 - 1e-12;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Coherent amplitudes (α₋₁, α₀, α₁).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoherentTriple(pub [Complex64; 3]);

impl CoherentTriple {
    pub fn probe(alpha: Complex64) -> Self {
        CoherentTriple([zero(), alpha, zero()])
    }

    pub fn get(&self, mode: Mode) -> Complex64 {
        self.0[mode.index()]
    }

    pub fn total_photons(&self) -> f64 {
        self.0.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Product coherent state on a truncated basis (cutoff tail dropped).
    pub fn to_oracle(&self, basis: FockBasis) -> TruncatedState {
        let modes = self.0.map(|a| coherent_amplitudes(a, basis.levels()));
        TruncatedState::product(basis, [&modes[0], &modes[1], &modes[2]])
    }
}

/// α_q(t) = Σ u_{qq'} α_{q'}(0)
pub fn evolve_coherent(input: &CoherentTriple, u: &PropagatorMatrix) -> CoherentTriple {
    CoherentTriple(u.apply(&input.0))
}

/// e^{−|α|²/2} αⁿ/√n! for n < levels.
pub fn coherent_amplitudes(alpha: Complex64, levels: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(levels);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..levels {
        out.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    out
}

/// Squeezed vacuum S(ξ)|0⟩, ξ = r e^{iθ}:
/// c₂ₘ = (−e^{iθ} tanh r)^m √((2m)!) / (2^m m! √cosh r).
pub fn squeezed_amplitudes(r: f64, theta: f64, levels: usize) -> Vec<Complex64> {
    let mut out = vec![zero(); levels];
    let ratio = -Complex64::from_polar(r.tanh(), theta);
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    for m in 0..levels.div_ceil(2) {
        let n = 2 * m;
        if n < levels {
            out[n] = c;
        }
        // c₂ₘ₊₂ / c₂ₘ = ratio · √((2m+1)(2m+2)) / (2(m+1))
        c = c * ratio * (((n + 1) * (n + 2)) as f64).sqrt() / (2.0 * (m + 1) as f64);
    }
    out
}

/// Single-mode probe states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProbeState {
    Coherent { alpha: Complex64 },
    Fock { n: usize },
    /// Squeezed vacuum with squeeze parameter r and angle θ.
    Squeezed {
        r: f64,
        #[serde(default)]
        theta: f64,
    },
    /// Thermal state with mean photon number n̄.
    Thermal { mean: f64 },
    /// Number-diagonal mixture Σ p_n |n⟩⟨n|.
    NumberMixture { probabilities: Vec<f64> },
    /// Pure superposition Σ c_n |n⟩.
    Ket { amplitudes: Vec<Complex64> },
}

/// A probe state cut to a finite number basis, with the weight lost.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedProbe {
    pub state: ProbeState,
    pub discarded: f64,
}

impl ProbeState {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match self {
            ProbeState::Coherent { alpha } => {
                if !(finite(alpha.re) && finite(alpha.im)) {
                    return Err(Error::validation("alpha", "must be finite"));
                }
            }
            ProbeState::Fock { .. } => {}
            ProbeState::Squeezed { r, theta } => {
                if !(finite(*r) && *r >= 0.0 && finite(*theta)) {
                    return Err(Error::validation("r", "must be finite and non-negative"));
                }
            }
            ProbeState::Thermal { mean } => {
                if !(finite(*mean) && *mean >= 0.0) {
                    return Err(Error::validation("mean", "must be finite and non-negative"));
                }
            }
            ProbeState::NumberMixture { probabilities } => {
                if probabilities.is_empty() || probabilities.iter().any(|p| !(finite(*p) && *p >= 0.0)) {
                    return Err(Error::validation("probabilities", "must be non-negative"));
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::validation("probabilities", format!("sum to {total}, not 1")));
                }
            }
            ProbeState::Ket { amplitudes } => {
                let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
                if !((norm - 1.0).abs() <= 1e-12) {
                    return Err(Error::validation("amplitudes", format!("norm² is {norm}, not 1")));
                }
            }
        }
        Ok(())
    }

    /// Analytic input moments up to order `n_top`.
    pub fn moments(&self, n_top: usize) -> ProbeMoments {
        match self {
            ProbeState::Coherent { alpha } => ProbeMoments::coherent(*alpha, n_top),
            ProbeState::Fock { n } => ProbeMoments {
                mean: zero(),
                pair: zero(),
                factorial: (1..=n_top).map(|k| falling(*n, k)).collect(),
            },
            ProbeState::Squeezed { r, theta } => {
                let pair = -Complex64::from_polar(r.sinh() * r.cosh(), *theta);
                let number = r.sinh().powi(2);
                ProbeMoments {
                    mean: zero(),
                    pair,
                    factorial: (1..=n_top)
                        .map(|k| gaussian_factorial_moment(zero(), pair, number, k))
                        .collect(),
                }
            }
            ProbeState::Thermal { mean } => ProbeMoments {
                mean: zero(),
                pair: zero(),
                factorial: (1..=n_top)
                    .map(|k| (1..=k).map(|j| j as f64).product::<f64>() * mean.powi(k as i32))
                    .collect(),
            },
            ProbeState::NumberMixture { probabilities } => ProbeMoments {
                mean: zero(),
                pair: zero(),
                factorial: (1..=n_top)
                    .map(|k| probabilities.iter().enumerate().map(|(n, p)| p * falling(n, k)).sum())
                    .collect(),
            },
            ProbeState::Ket { amplitudes } => {
                let c = amplitudes;
                let shifted = |d: usize| -> Complex64 {
                    (d..c.len())
                        .map(|n| c[n - d].conj() * c[n] * falling(n, d).sqrt())
                        .sum()
                };
                ProbeMoments {
                    mean: shifted(1),
                    pair: shifted(2),
                    factorial: (1..=n_top)
                        .map(|k| c.iter().enumerate().map(|(n, a)| a.norm_sqr() * falling(n, k)).sum())
                        .collect(),
                }
            }
        }
    }

    /// Cuts the state to levels 0..=n_max and renormalizes.
    pub fn truncated(&self, n_max: usize) -> Result<TruncatedProbe> {
        self.validate()?;
        let levels = n_max + 1;
        let pure = |amps: Vec<Complex64>| {
            let kept: f64 = amps.iter().map(Complex64::norm_sqr).sum();
            TruncatedProbe {
                state: ProbeState::Ket {
                    amplitudes: amps.iter().map(|a| a / kept.sqrt()).collect(),
                },
                discarded: 1.0 - kept,
            }
        };
        let mixed = |probs: Vec<f64>| {
            let kept: f64 = probs.iter().sum();
            TruncatedProbe {
                state: ProbeState::NumberMixture {
                    probabilities: probs.iter().map(|p| p / kept).collect(),
                },
                discarded: 1.0 - kept,
            }
        };
        Ok(match self {
            ProbeState::Coherent { alpha } => pure(coherent_amplitudes(*alpha, levels)),
            ProbeState::Squeezed { r, theta } => pure(squeezed_amplitudes(*r, *theta, levels)),
            ProbeState::Fock { n } => {
                if *n > n_max {
                    return Err(Error::Resource(format!(
                        "Fock state |{n}⟩ does not fit below cutoff {n_max}"
                    )));
                }
                TruncatedProbe {
                    state: self.clone(),
                    discarded: 0.0,
                }
            }
            ProbeState::Thermal { mean } => {
                let q = mean / (1.0 + mean);
                mixed((0..levels).map(|n| (1.0 - q) * q.powi(n as i32)).collect())
            }
            ProbeState::NumberMixture { probabilities } => {
                mixed(probabilities.iter().take(levels).copied().collect())
            }
            ProbeState::Ket { amplitudes } => pure(amplitudes.iter().take(levels).copied().collect()),
        })
    }

    /// Probe in this state, sidebands in vacuum, on the given basis.
    ///
    /// Continuous-variable states are truncated to the basis first.
    pub fn to_oracle(&self, basis: FockBasis) -> Result<MixedState> {
        let vac = [Complex64::new(1.0, 0.0)];
        let probe_ket = |amps: &[Complex64]| TruncatedState::product(basis, [&vac, amps, &vac]);
        let fock = |n: usize| TruncatedState::fock(basis, [0, n, 0]);
        match self.truncated(basis.n_max())?.state {
            ProbeState::Fock { n } => Ok(MixedState::pure(fock(n)?)),
            ProbeState::Ket { amplitudes } => Ok(MixedState::pure(probe_ket(&amplitudes))),
            ProbeState::NumberMixture { probabilities } => {
                let components = probabilities
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(n, p)| Ok((*p, fock(n)?)))
                    .collect::<Result<Vec<_>>>()?;
                renormalized_mixture(components)
            }
            _ => unreachable!("truncation yields Fock, ket or number mixtures"),
        }
    }
}

fn renormalized_mixture(mut components: Vec<(f64, TruncatedState)>) -> Result<MixedState> {
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    for (w, _) in &mut components {
        *w /= total;
    }
    MixedState::new(components)
}

/// n(n−1)…(n−k+1)
fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|j| n.saturating_sub(j) as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|j| (n - j) as f64 / (j + 1) as f64).product()
}

/// Discrete P-function: Σ p_i |α_i⟩⟨α_i| with p_i > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MixtureComponent>", into = "Vec<MixtureComponent>")]
pub struct CoherentMixture {
    components: Vec<(f64, CoherentTriple)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub alphas: CoherentTriple,
}

impl TryFrom<Vec<MixtureComponent>> for CoherentMixture {
    type Error = Error;

    fn try_from(v: Vec<MixtureComponent>) -> Result<Self> {
        CoherentMixture::new(v.into_iter().map(|c| (c.weight, c.alphas)).collect())
    }
}

impl From<CoherentMixture> for Vec<MixtureComponent> {
    fn from(m: CoherentMixture) -> Self {
        m.components
            .into_iter()
            .map(|(weight, alphas)| MixtureComponent { weight, alphas })
            .collect()
    }
}

impl CoherentMixture {
    pub fn new(components: Vec<(f64, CoherentTriple)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::validation("components", "mixture is empty"));
        }
        if components.iter().any(|(w, a)| !(w.is_finite() && *w > 0.0) || !a.is_finite()) {
            return Err(Error::validation("components", "weights must be positive and amplitudes finite"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("components", format!("weights sum to {total}, not 1")));
        }
        Ok(CoherentMixture { components })
    }

    pub fn single(alphas: CoherentTriple) -> Self {
        CoherentMixture {
            components: vec![(1.0, alphas)],
        }
    }

    pub fn components(&self) -> &[(f64, CoherentTriple)] {
        &self.components
    }

    /// Weighted kets for the oracle.
    pub fn to_oracle(&self, basis: FockBasis) -> Result<MixedState> {
        MixedState::new(
            self.components
                .iter()
                .map(|(w, a)| (*w, a.to_oracle(basis)))
                .collect(),
        )
    }

    /// Σ p_i f(α_i)
    pub fn average<T>(&self, f: impl Fn(&CoherentTriple) -> T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        self.components.iter().map(|(w, a)| f(a) * *w).sum()
    }

    /// Normally ordered moments of a coherent mixture are averages of the
    /// corresponding products of amplitudes.
    pub fn first_moment(&self, q: Mode) -> Complex64 {
        self.average(|a| a.get(q))
    }

    /// ⟨b_q b_{q'}⟩
    pub fn pair_moment(&self, q: Mode, q2: Mode) -> Complex64 {
        self.average(|a| a.get(q) * a.get(q2))
    }

    /// ⟨b_q† b_{q'}⟩
    pub fn hopping_moment(&self, q: Mode, q2: Mode) -> Complex64 {
        self.average(|a| a.get(q).conj() * a.get(q2))
    }

    /// ⟨b_q†ⁿ b_qⁿ⟩
    pub fn number_moment(&self, q: Mode, n: usize) -> f64 {
        self.average(|a| a.get(q).norm_sqr().powi(n as i32))
    }

    /// ⟨n_k n_l⟩, k ≠ l
    pub fn cross_moment(&self, k: Mode, l: Mode) -> f64 {
        self.average(|a| a.get(k).norm_sqr() * a.get(l).norm_sqr())
    }

    /// S_q(φ) of the mixture.
    pub fn squeezing(&self, q: Mode, phi: f64) -> f64 {
        crate::statistics::squeezing_factor(
            self.first_moment(q),
            self.pair_moment(q, q),
            self.hopping_moment(q, q).re,
            phi,
        )
    }
}

/// Point-mass transport: weights unchanged, amplitudes α → Uα.
pub fn transform_mixture(input: &CoherentMixture, u: &PropagatorMatrix) -> CoherentMixture {
    CoherentMixture {
        components: input
            .components
            .iter()
            .map(|(w, a)| (*w, evolve_coherent(a, u)))
            .collect(),
    }
}

/// Thermal probe (sidebands vacuum) sampled into `count` equal-weight
/// coherent point masses with complex Gaussian amplitudes, E|α|² = n̄.
pub fn sample_thermal_mixture(mean: f64, count: usize, seed: u64) -> Result<CoherentMixture> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::validation("mean", "must be finite and non-negative"));
    }
    if count == 0 {
        return Err(Error::validation("samples", "need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (mean / 2.0).sqrt())
        .map_err(|e| Error::validation("mean", e.to_string()))?;
    let w = 1.0 / count as f64;
    let components = (0..count)
        .map(|_| {
            let alpha = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            (w, CoherentTriple::probe(alpha))
        })
        .collect();
    CoherentMixture::new(components)
}

/// Output P-function support for a probe point-mass P and vacuum sidebands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PReduction {
    /// Output point masses (α u₀₋₁, α u₀₀, α u₀₁).
    pub support: Vec<(f64, CoherentTriple)>,
    /// max over points of |Σ_q' u*_{q'q} α_{q'}| for q = ±1 (the delta
    /// constraints), and of the probe argument's deviation from α.
    pub constraint_residual: f64,
}

pub fn vacuum_sideband_p_reduction(
    probe: &[(f64, Complex64)],
    u: &PropagatorMatrix,
) -> Result<PReduction> {
    let mixture = CoherentMixture::new(
        probe
            .iter()
            .map(|&(w, a)| (w, CoherentTriple::probe(a)))
            .collect(),
    )?;
    let out = transform_mixture(&mixture, u);
    let back = u.entries().adjoint();
    let mut residual: f64 = 0.0;
    for ((_, alpha), (_, triple)) in probe.iter().zip(out.components()) {
        let pulled = back * Vector3::from(triple.0);
        residual = residual
            .max(pulled[Mode::Stokes.index()].norm())
            .max(pulled[Mode::AntiStokes.index()].norm())
            .max((pulled[Mode::Probe.index()] - alpha).norm());
    }
    Ok(PReduction {
        support: out.components,
        constraint_residual: residual,
    })
}

/// Output of a probe Fock state |n⟩ with vacuum sidebands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripartiteFockOutput {
    pub n: usize,
    /// c_{l,m} at `amplitudes[l][m]`, 0 ≤ m ≤ l ≤ n, for the component
    /// |l−m⟩₋₁ |n−l⟩₀ |m⟩₁.
    pub amplitudes: Vec<Vec<Complex64>>,
}

pub fn fock_output(n: usize, u: &PropagatorMatrix) -> TripartiteFockOutput {
    let [us, up, ua] = [Mode::Stokes, Mode::Probe, Mode::AntiStokes].map(|q| u.get(Mode::Probe, q));
    let amplitudes = (0..=n)
        .map(|l| {
            (0..=l)
                .map(|m| {
                    let weight = (binomial(n, l) * binomial(l, m)).sqrt();
                    us.powu((l - m) as u32) * up.powu((n - l) as u32) * ua.powu(m as u32) * weight
                })
                .collect()
        })
        .collect();
    TripartiteFockOutput { n, amplitudes }
}

impl TripartiteFockOutput {
    /// (occupation triple, amplitude) in storage order.
    pub fn components(&self) -> impl Iterator<Item = ([usize; 3], Complex64)> + '_ {
        self.amplitudes.iter().enumerate().flat_map(move |(l, row)| {
            row.iter()
                .enumerate()
                .map(move |(m, &c)| ([l - m, self.n - l, m], c))
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn to_oracle(&self, basis: FockBasis) -> Result<TruncatedState> {
        TruncatedState::from_components(basis, self.components())
    }

    /// Photon-number distribution of one mode.
    pub fn mode_distribution(&self, mode: Mode) -> Vec<f64> {
        let mut p = vec![0.0; self.n + 1];
        for (occ, c) in self.components() {
            p[occ[mode.index()]] += c.norm_sqr();
        }
        p
    }

    /// Tr ρ_q² of the single-mode reduced state, for each mode.
    pub fn reduced_purities(&self) -> [f64; 3] {
        Mode::ALL.map(|mode| {
            let q = mode.index();
            let mut by_rest: HashMap<[usize; 2], Vec<(usize, Complex64)>> = HashMap::new();
            for (occ, c) in self.components() {
                let rest = match q {
                    0 => [occ[1], occ[2]],
                    1 => [occ[0], occ[2]],
                    _ => [occ[0], occ[1]],
                };
                by_rest.entry(rest).or_default().push((occ[q], c));
            }
            let dim = self.n + 1;
            let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
            for entries in by_rest.values() {
                for &(k, a) in entries {
                    for &(k2, b) in entries {
                        rho[(k, k2)] += a * b.conj();
                    }
                }
            }
            rho.iter().map(Complex64::norm_sqr).sum()
        })
    }
}

/// Classification returned by [`separability_witness`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Separability {
    /// Convex mixture of product coherent states, listed explicitly.
    SeparableByConstruction { decomposition: Vec<MixtureComponent> },
    /// Pure state with at least one mixed single-mode marginal.
    Entangled { purities: [f64; 3] },
    /// Pure product state.
    Product { purities: [f64; 3] },
}

impl Separability {
    pub fn is_entangled(&self) -> bool {
        matches!(self, Separability::Entangled { .. })
    }
}

pub trait SeparabilityWitness {
    fn separability(&self) -> Separability;
}

impl SeparabilityWitness for CoherentMixture {
    fn separability(&self) -> Separability {
        Separability::SeparableByConstruction {
            decomposition: self.clone().into(),
        }
    }
}

impl SeparabilityWitness for TripartiteFockOutput {
    fn separability(&self) -> Separability {
        let purities = self.reduced_purities();
        if purities.iter().any(|&p| p < PURITY_THRESHOLD) {
            Separability::Entangled { purities }
        } else {
            Separability::Product { purities }
        }
    }
}

pub fn separability_witness<T: SeparabilityWitness + ?Sized>(state: &T) -> Separability {
    state.separability()
}
