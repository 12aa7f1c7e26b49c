//! Physical parameters and the reduced coupling parameters derived from them.
//!
//! The field operators obey, after removing the propagation phases and the
//! coherence phase φ₀ from the sideband envelopes,
//!
//! ```text
//! d b₀/dt  = iΔ b₀ + i(g₋₁ b₋₁ + g₁ b₁)
//! d b±₁/dt = -iΔ b±₁ + i g±₁ b₀
//! ```
//!
//! with β_q = 𝒩ħω_q/(ε₀c), κ_q = β_q a_q, Δk = 2κ₀ − κ₁ − κ₋₁, Δ = cΔk/4,
//! g₁ = (𝒩ħ/ε₀)√(ω₁ω₀) d₀ ρ₀ and g₋₁ = (𝒩ħ/ε₀)√(ω₋₁ω₀) d₋₁ ρ₀. The evolution
//! time is the transit time t = L/c. Everything downstream depends only on
//! (g₁, g₋₁, Δ, t).

use serde::{Deserialize, Serialize};

use crate::warning::{Warning, VALIDITY_BOUND_GT};
use crate::{Error, Result};

/// Largest off-diagonal coherence of a two-level density matrix.
pub const COHERENCE_BOUND: f64 = 0.5;

fn one() -> f64 {
    1.0
}

/// Raw physical description of the medium and the three fields.
///
/// Units are whatever the caller chooses; ħ, ε₀ and c default to 1.
/// Arrays are ordered (Stokes, probe, anti-Stokes); the coupling pair is
/// (d₋₁, d₀).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    pub number_density: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub epsilon0: f64,
    #[serde(default = "one")]
    pub light_speed: f64,
    pub frequencies: [f64; 3],
    pub dispersion: [f64; 3],
    pub coupling: [f64; 2],
    pub coherence_magnitude: f64,
    #[serde(default)]
    pub coherence_phase: f64,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_mismatch: Option<f64>,
}

/// The four numbers that fully determine the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    /// Anti-Stokes coupling g₁.
    #[serde(rename = "g1")]
    pub g_anti: f64,
    /// Stokes coupling g₋₁.
    #[serde(rename = "gm1")]
    pub g_stokes: f64,
    /// Phase-mismatch detuning Δ.
    #[serde(rename = "delta")]
    pub detuning: f64,
    #[serde(rename = "time")]
    pub time: f64,
}

impl CouplingParams {
    pub fn new(g_anti: f64, g_stokes: f64, detuning: f64, time: f64) -> Result<Self> {
        let p = CouplingParams {
            g_anti,
            g_stokes,
            detuning,
            time,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |field, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(field, format!("{v} is not finite")))
            }
        };
        finite("g1", self.g_anti)?;
        finite("gm1", self.g_stokes)?;
        finite("delta", self.detuning)?;
        finite("time", self.time)?;
        if self.g_anti < 0.0 {
            return Err(Error::validation("g1", "must be non-negative"));
        }
        if self.g_stokes < 0.0 {
            return Err(Error::validation("gm1", "must be non-negative"));
        }
        if self.time < 0.0 {
            return Err(Error::validation("time", "must be non-negative"));
        }
        if self.g_anti == 0.0 && self.g_stokes == 0.0 {
            return Err(Error::DegenerateCoupling);
        }
        Ok(())
    }

    pub fn with_time(self, time: f64) -> Self {
        CouplingParams { time, ..self }
    }

    pub fn with_detuning(self, detuning: f64) -> Self {
        CouplingParams { detuning, ..self }
    }

    /// Coupling of the sideband mode selected by `q` (`+1` or `-1`).
    pub fn sideband_coupling(&self, q: i32) -> f64 {
        if q > 0 {
            self.g_anti
        } else {
            self.g_stokes
        }
    }

    /// g_c = √(g₁² + g₋₁²).
    pub fn coupled_rate(&self) -> f64 {
        self.g_anti.hypot(self.g_stokes)
    }

    /// g = √(g_c² + Δ²).
    pub fn rate(&self) -> f64 {
        self.coupled_rate().hypot(self.detuning)
    }

    /// Dimensionless g·t.
    pub fn phase(&self) -> f64 {
        self.rate() * self.time
    }

    pub fn validity_warning(&self) -> Option<Warning> {
        let gt = self.phase();
        (gt > VALIDITY_BOUND_GT).then_some(Warning::ValidityBound { gt })
    }
}

/// Reduced parameters together with any warnings raised while deriving them.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub params: CouplingParams,
    /// Phase mismatch Δk actually used (computed or overridden).
    pub phase_mismatch: f64,
    pub warnings: Vec<Warning>,
}

impl PhysicalConfig {
    /// Natural units (𝒩 = ħ = ε₀ = c = 1) with zero dispersion.
    pub fn natural(frequencies: [f64; 3], coupling: [f64; 2], rho0: f64, length: f64) -> Self {
        PhysicalConfig {
            number_density: 1.0,
            hbar: 1.0,
            epsilon0: 1.0,
            light_speed: 1.0,
            frequencies,
            dispersion: [0.0; 3],
            coupling,
            coherence_magnitude: rho0,
            coherence_phase: 0.0,
            length,
            phase_mismatch: None,
        }
    }

    pub fn validate(&self, strict: bool) -> Result<Vec<Warning>> {
        let positive = |field, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("{v} must be positive and finite")))
            }
        };
        positive("number_density", self.number_density)?;
        positive("hbar", self.hbar)?;
        positive("epsilon0", self.epsilon0)?;
        positive("light_speed", self.light_speed)?;
        positive("length", self.length)?;
        for &w in &self.frequencies {
            positive("frequencies", w)?;
        }
        let [w_s, w_p, w_a] = self.frequencies;
        if !(w_a > w_p && w_p > w_s) {
            return Err(Error::validation(
                "frequencies",
                "expected Stokes < probe < anti-Stokes",
            ));
        }
        if self.dispersion.iter().any(|a| !a.is_finite()) {
            return Err(Error::validation("dispersion", "must be finite"));
        }
        if self.coupling.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::validation("coupling", "must be finite and non-negative"));
        }
        if !self.coherence_phase.is_finite() {
            return Err(Error::validation("coherence_phase", "must be finite"));
        }
        if let Some(dk) = self.phase_mismatch {
            if !dk.is_finite() {
                return Err(Error::validation("phase_mismatch", "must be finite"));
            }
        }
        let rho0 = self.coherence_magnitude;
        if !rho0.is_finite() || rho0 < 0.0 {
            return Err(Error::validation(
                "coherence_magnitude",
                "must be finite and non-negative",
            ));
        }
        let mut warnings = Vec::new();
        if rho0 > COHERENCE_BOUND {
            if strict {
                return Err(Error::validation(
                    "coherence_magnitude",
                    format!("{rho0} exceeds {COHERENCE_BOUND}"),
                ));
            }
            warnings.push(Warning::CoherenceAboveHalf { rho0 });
        }
        Ok(warnings)
    }

    /// β_q = 𝒩ħω_q/(ε₀c) in (Stokes, probe, anti-Stokes) order.
    pub fn propagation_betas(&self) -> [f64; 3] {
        let scale = self.number_density * self.hbar / (self.epsilon0 * self.light_speed);
        self.frequencies.map(|w| scale * w)
    }

    /// Δk = 2κ₀ − κ₁ − κ₋₁ with κ_q = β_q a_q, unless overridden.
    pub fn phase_mismatch(&self) -> f64 {
        if let Some(dk) = self.phase_mismatch {
            return dk;
        }
        let beta = self.propagation_betas();
        let kappa: [f64; 3] = std::array::from_fn(|i| beta[i] * self.dispersion[i]);
        2.0 * kappa[1] - kappa[2] - kappa[0]
    }
}

/// Reduces a physical configuration to (g₁, g₋₁, Δ, t).
///
/// Warnings: g·t above the validity bound, and ρ₀ above 1/2 (an error when
/// `strict`).
pub fn derive_couplings(cfg: &PhysicalConfig, strict: bool) -> Result<Derivation> {
    let mut warnings = cfg.validate(strict)?;
    let [w_s, w_p, w_a] = cfg.frequencies;
    let [d_s, d_p] = cfg.coupling;
    let prefactor = cfg.number_density * cfg.hbar / cfg.epsilon0;
    let rho0 = cfg.coherence_magnitude;
    let g_anti = prefactor * (w_a * w_p).sqrt() * d_p * rho0;
    let g_stokes = prefactor * (w_s * w_p).sqrt() * d_s * rho0;
    let phase_mismatch = cfg.phase_mismatch();
    let detuning = cfg.light_speed * phase_mismatch / 4.0;
    let time = cfg.length / cfg.light_speed;
    let params = CouplingParams::new(g_anti, g_stokes, detuning, time)?;
    warnings.extend(params.validity_warning());
    Ok(Derivation {
        params,
        phase_mismatch,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural() -> PhysicalConfig {
        PhysicalConfig::natural([0.8, 1.0, 1.2], [1.0, 1.0], 0.1, 1.0)
    }

    #[test]
    fn natural_units_couplings() {
        let d = derive_couplings(&natural(), false).unwrap();
        assert_eq!(d.params.g_anti, 0.1 * 1.2f64.sqrt());
        assert_eq!(d.params.g_stokes, 0.1 * 0.8f64.sqrt());
        assert_eq!(d.params.detuning, 0.0);
        assert_eq!(d.params.time, 1.0);
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn zero_coherence_is_degenerate() {
        let mut cfg = natural();
        cfg.coherence_magnitude = 0.0;
        assert!(matches!(
            derive_couplings(&cfg, false),
            Err(Error::DegenerateCoupling)
        ));
    }

    #[test]
    fn zero_dispersion_gives_zero_detuning() {
        let mut cfg = natural();
        cfg.dispersion = [0.0; 3];
        cfg.coupling = [0.3, 2.0];
        assert_eq!(derive_couplings(&cfg, false).unwrap().params.detuning, 0.0);
    }

    #[test]
    fn detuning_from_dispersion_and_override() {
        let mut cfg = natural();
        cfg.dispersion = [1.0, 2.0, 0.5];
        // κ = (0.8, 2.0, 0.6), Δk = 4 − 0.6 − 0.8 = 2.6, Δ = 0.65
        let d = derive_couplings(&cfg, false).unwrap();
        assert!((d.phase_mismatch - 2.6).abs() < 1e-15);
        assert!((d.params.detuning - 0.65).abs() < 1e-15);
        cfg.phase_mismatch = Some(-0.4);
        assert_eq!(derive_couplings(&cfg, false).unwrap().params.detuning, -0.1);
    }

    #[test]
    fn coherence_bound_warns_or_fails() {
        let mut cfg = natural();
        cfg.coherence_magnitude = 0.6;
        let d = derive_couplings(&cfg, false).unwrap();
        assert!(d
            .warnings
            .contains(&Warning::CoherenceAboveHalf { rho0: 0.6 }));
        match derive_couplings(&cfg, true) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "coherence_magnitude"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validity_bound_warning() {
        let mut cfg = natural();
        cfg.length = 10.0;
        let d = derive_couplings(&cfg, false).unwrap();
        assert!(matches!(d.warnings[..], [Warning::ValidityBound { .. }]));
    }

    #[test]
    fn invariant_violations_name_the_field() {
        let cases: Vec<(&str, Box<dyn Fn(&mut PhysicalConfig)>)> = vec![
            ("frequencies", Box::new(|c| c.frequencies = [1.2, 1.0, 0.8])),
            ("frequencies", Box::new(|c| c.frequencies[0] = -1.0)),
            ("length", Box::new(|c| c.length = 0.0)),
            ("light_speed", Box::new(|c| c.light_speed = 0.0)),
            ("hbar", Box::new(|c| c.hbar = -1.0)),
            ("epsilon0", Box::new(|c| c.epsilon0 = f64::NAN)),
            ("coherence_magnitude", Box::new(|c| c.coherence_magnitude = -0.1)),
        ];
        for (expected, mutate) in cases {
            let mut cfg = natural();
            mutate(&mut cfg);
            match derive_couplings(&cfg, false) {
                Err(Error::Validation { field, .. }) => assert_eq!(field, expected),
                other => panic!("{expected}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn rates() {
        let p = CouplingParams::new(0.6, 0.8, 0.5, 2.0).unwrap();
        assert!((p.coupled_rate() - 1.0).abs() < 1e-15);
        assert!((p.rate() - 1.25f64.sqrt()).abs() < 1e-15);
        assert!(CouplingParams::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(CouplingParams::new(0.1, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn reduced_block_field_names() {
        let p: CouplingParams =
            serde_json::from_str(r#"{"g1": 0.6, "gm1": 0.8, "delta": 0.0, "time": 1.0}"#).unwrap();
        assert_eq!(p.g_anti, 0.6);
        assert_eq!(p.g_stokes, 0.8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn config() -> impl Strategy<Value = PhysicalConfig> {
            (
                0.1f64..10.0,
                0.1f64..2.0,
                0.01f64..1.0,
                (0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0),
                (0.1f64..2.0, 0.1f64..2.0),
                0.01f64..0.5,
            )
                .prop_map(|(density, w_p, spacing, (a_s, a_p, a_a), (d_s, d_p), rho0)| {
                    PhysicalConfig {
                        number_density: density,
                        dispersion: [a_s, a_p, a_a],
                        ..PhysicalConfig::natural(
                            [w_p, w_p + spacing, w_p + 2.0 * spacing],
                            [d_s, d_p],
                            rho0,
                            0.3,
                        )
                    }
                })
        }

        proptest! {
            #[test]
            fn coherence_scales_couplings(cfg in config(), s in 0.1f64..1.0) {
                let base = derive_couplings(&cfg, false).unwrap().params;
                let mut scaled_cfg = cfg.clone();
                scaled_cfg.coherence_magnitude *= s;
                let scaled = derive_couplings(&scaled_cfg, false).unwrap().params;
                prop_assert!((scaled.g_anti - s * base.g_anti).abs() <= 1e-15 * base.g_anti);
                prop_assert!((scaled.g_stokes - s * base.g_stokes).abs() <= 1e-15 * base.g_stokes);
                prop_assert_eq!(scaled.detuning, base.detuning);
            }

            #[test]
            fn detuning_ignores_coupling_constants(cfg in config(), d in 0.1f64..3.0) {
                let base = derive_couplings(&cfg, false).unwrap();
                let mut other = cfg.clone();
                other.coupling = [d, 2.0 * d];
                prop_assert_eq!(derive_couplings(&other, false).unwrap().params.detuning, base.params.detuning);
                // pure
                prop_assert_eq!(derive_couplings(&cfg, false).unwrap(), base);
            }
        }
    }
}
