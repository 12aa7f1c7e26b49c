use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::oracle::OracleSettings;
use crate::states::{CoherentMixture, CoherentTriple, ProbeState};
use crate::statistics::{DEFAULT_N_TOP, DEFAULT_PHASE_POINTS};
use crate::{derive_couplings, CouplingParams, Error, PhysicalConfig, Result, Warning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PropagatorDump,
    Statistics,
    Squeezing,
    Fock,
    Coherent,
    Mixture,
    Verify,
    Sweep,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::PropagatorDump,
        Scenario::Statistics,
        Scenario::Squeezing,
        Scenario::Fock,
        Scenario::Coherent,
        Scenario::Mixture,
        Scenario::Verify,
        Scenario::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::PropagatorDump => "propagator-dump",
            Scenario::Statistics => "statistics",
            Scenario::Squeezing => "squeezing",
            Scenario::Fock => "fock",
            Scenario::Coherent => "coherent",
            Scenario::Mixture => "mixture",
            Scenario::Verify => "verify",
            Scenario::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// Exactly one of the two parameter forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ParameterBlock {
    Physical(PhysicalConfig),
    Reduced(CouplingParams),
}

/// Input state as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputSpec {
    /// Coherent probe amplitude, optionally with coherent sidebands.
    Coherent {
        alpha: Complex64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stokes: Option<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anti_stokes: Option<Complex64>,
    },
    Fock {
        n: usize,
    },
    Squeezed {
        r: f64,
        #[serde(default)]
        theta: f64,
    },
    /// Thermal probe; `samples` > 0 turns it into a seeded coherent mixture
    /// for the mixture scenario.
    Thermal {
        mean: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    Mixture {
        components: CoherentMixture,
    },
}

impl InputSpec {
    /// Probe-only view; `None` for mixtures and coherent sidebands.
    pub fn probe_state(&self) -> Option<ProbeState> {
        match *self {
            InputSpec::Coherent {
                alpha,
                stokes,
                anti_stokes,
            } => {
                let zero = Complex64::new(0.0, 0.0);
                (stokes.unwrap_or(zero) == zero && anti_stokes.unwrap_or(zero) == zero)
                    .then_some(ProbeState::Coherent { alpha })
            }
            InputSpec::Fock { n } => Some(ProbeState::Fock { n }),
            InputSpec::Squeezed { r, theta } => Some(ProbeState::Squeezed { r, theta }),
            InputSpec::Thermal { mean, .. } => Some(ProbeState::Thermal { mean }),
            InputSpec::Mixture { .. } => None,
        }
    }

    pub fn coherent_triple(&self) -> Option<CoherentTriple> {
        match *self {
            InputSpec::Coherent {
                alpha,
                stokes,
                anti_stokes,
            } => {
                let zero = Complex64::new(0.0, 0.0);
                Some(CoherentTriple([
                    stokes.unwrap_or(zero),
                    alpha,
                    anti_stokes.unwrap_or(zero),
                ]))
            }
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InputSpec::Coherent { .. } => "coherent",
            InputSpec::Fock { .. } => "fock",
            InputSpec::Squeezed { .. } => "squeezed",
            InputSpec::Thermal { .. } => "thermal",
            InputSpec::Mixture { .. } => "mixture",
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(probe) = self.probe_state() {
            probe.validate()?;
        }
        if let Some(triple) = self.coherent_triple() {
            if !triple.is_finite() {
                return Err(Error::validation("input", "amplitudes must be finite"));
            }
        }
        if let InputSpec::Thermal { samples: Some(0), .. } = self {
            return Err(Error::validation("samples", "must be positive when given"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Time,
    Delta,
    G1,
    Gm1,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Time => "t",
            SweepParameter::Delta => "delta",
            SweepParameter::G1 => "g1",
            SweepParameter::Gm1 => "gm1",
        }
    }

    pub fn apply(self, mut p: CouplingParams, value: f64) -> CouplingParams {
        match self {
            SweepParameter::Time => p.time = value,
            SweepParameter::Delta => p.detuning = value,
            SweepParameter::G1 => p.g_anti = value,
            SweepParameter::Gm1 => p.g_stokes = value,
        }
        p
    }
}

/// Inclusive linear grid over one reduced parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::validation("sweep.count", "must be positive"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::validation("sweep.start", "range must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Report file name inside the output directory.
    pub report: String,
    /// Write CSV curve files.
    pub csv: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            report: "report.json".into(),
            csv: true,
        }
    }
}

fn default_phase_points() -> usize {
    DEFAULT_PHASE_POINTS
}

fn default_n_top() -> usize {
    DEFAULT_N_TOP
}

/// One experiment, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional here; the command line names the scenario and the two must
    /// agree when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParameterBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default = "default_phase_points")]
    pub phase_points: usize,
    #[serde(default = "default_n_top")]
    pub n_top: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: None,
            parameters: None,
            input: None,
            sweep: None,
            oracle: OracleSettings::default(),
            phase_points: DEFAULT_PHASE_POINTS,
            n_top: DEFAULT_N_TOP,
            seed: 0,
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Settles the scenario against a command-line choice.
    pub fn resolve_scenario(&self, requested: Option<Scenario>) -> Result<Scenario> {
        match (self.scenario, requested) {
            (Some(a), Some(b)) if a != b => Err(Error::Config(format!(
                "config names scenario `{a}` but `{b}` was requested"
            ))),
            (Some(s), _) | (None, Some(s)) => Ok(s),
            (None, None) => Err(Error::Config("no scenario given".into())),
        }
    }

    /// Reduced parameters plus any derivation warnings.
    pub fn coupling_params(&self, strict: bool) -> Result<Option<(CouplingParams, Vec<Warning>)>> {
        Ok(match &self.parameters {
            None => None,
            Some(ParameterBlock::Reduced(p)) => {
                p.validate()?;
                Some((*p, Vec::new()))
            }
            Some(ParameterBlock::Physical(cfg)) => {
                let d = derive_couplings(cfg, strict)?;
                Some((d.params, d.warnings))
            }
        })
    }

    pub fn require_params(&self, scenario: Scenario, strict: bool) -> Result<(CouplingParams, Vec<Warning>)> {
        self.coupling_params(strict)?
            .ok_or_else(|| Error::Config(format!("scenario `{scenario}` needs a `parameters` block")))
    }

    pub fn require_input(&self, scenario: Scenario) -> Result<&InputSpec> {
        self.input
            .as_ref()
            .ok_or_else(|| Error::Config(format!("scenario `{scenario}` needs an `input` block")))
    }

    /// Structural checks that do not need a scenario.
    pub fn validate(&self) -> Result<()> {
        if self.n_top < 2 {
            return Err(Error::validation("n_top", "must be at least 2"));
        }
        if let Some(input) = &self.input {
            input.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        if !(self.oracle.tail_tol.is_finite() && self.oracle.tail_tol > 0.0) {
            return Err(Error::validation("oracle.tail_tol", "must be positive"));
        }
        if self.output.report.is_empty() || Path::new(&self.output.report).components().count() != 1 {
            return Err(Error::validation("output.report", "must be a plain file name"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reduced_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"scenario": "statistics",
                "parameters": {"reduced": {"g1": 0.6, "gm1": 0.8, "delta": 0.0, "time": 1.0}},
                "input": {"kind": "coherent", "alpha": [0.5, 0.0]}}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.scenario, Some(Scenario::Statistics));
        assert_eq!(cfg.n_top, 4);
        assert_eq!(cfg.phase_points, 720);
        let (p, w) = cfg.coupling_params(false).unwrap().unwrap();
        assert_eq!(p.g_anti, 0.6);
        assert!(w.is_empty());
        assert_eq!(
            cfg.input.unwrap().probe_state(),
            Some(ProbeState::Coherent { alpha: Complex64::new(0.5, 0.0) })
        );
    }

    #[test]
    fn rejects_both_parameter_forms_and_unknown_fields() {
        let both = r#"{"parameters": {"reduced": {"g1": 1, "gm1": 1, "delta": 0, "time": 1},
                                      "physical": {}}}"#;
        assert!(ExperimentConfig::from_json(both).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"input": {"kind": "laser"}}"#).is_err());
    }

    #[test]
    fn scenario_resolution() {
        let cfg = ExperimentConfig {
            scenario: Some(Scenario::Fock),
            ..Default::default()
        };
        assert_eq!(cfg.resolve_scenario(None).unwrap(), Scenario::Fock);
        assert_eq!(cfg.resolve_scenario(Some(Scenario::Fock)).unwrap(), Scenario::Fock);
        assert!(cfg.resolve_scenario(Some(Scenario::Sweep)).is_err());
        assert!(ExperimentConfig::default().resolve_scenario(None).is_err());
        assert_eq!("propagator-dump".parse::<Scenario>().unwrap(), Scenario::PropagatorDump);
    }

    #[test]
    fn sweep_grid_is_inclusive() {
        let s = SweepSpec {
            parameter: SweepParameter::Time,
            start: 0.0,
            stop: 3.0,
            count: 4,
        };
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn mixture_input() {
        let cfg = ExperimentConfig::from_json(
            r#"{"input": {"kind": "mixture", "components": [
                  {"weight": 0.5, "alphas": [[0,0],[0.5,0],[0,0]]},
                  {"weight": 0.5, "alphas": [[0,0],[-0.5,0],[0,0]]}]}}"#,
        )
        .unwrap();
        assert!(cfg.input.unwrap().probe_state().is_none());
    }
}
