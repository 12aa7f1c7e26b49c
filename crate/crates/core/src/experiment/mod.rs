//! JSON-configured experiments: scenario dispatch, reports and CSV output.

mod compare;
mod config;
mod report;
pub mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use compare::{
    comparison_phases, mixture_moment_set, moment_gaps, shared_probe_input, MomentGaps,
    OracleMoments, OracleObservables, SharedProbeInput,
};
pub use config::{
    ExperimentConfig, InputSpec, OutputSpec, ParameterBlock, Scenario, SweepParameter, SweepSpec,
};
pub use report::{emit_plot_data, format_float, CsvTable, LibraryInfo, Report, Residual, Timing, SCHEMA_VERSION};

use crate::oracle::{quadrature_curve, FockBasis, Oracle, OracleSettings};
use crate::propagator::{build_propagator, decompose_modes, propagator_via_generator, propagator_via_modes};
use crate::states::{
    evolve_coherent, fock_output, sample_thermal_mixture, separability_witness, transform_mixture,
    vacuum_sideband_p_reduction, CoherentMixture, CoherentTriple, ProbeState,
};
use crate::statistics::{
    propagate_moments, squeezing_minimum, squeezing_transfer, statistics_report, MomentSet, PhaseGrid,
};
use crate::{CouplingParams, Error, Mode, Result, Warning};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RAMAN_MULTIPLEX_OUT";
/// Output directory when neither `--out` nor the environment names one.
pub const DEFAULT_OUT_DIR: &str = "raman-multiplex-out";
/// Default number of coherent samples for a thermal input in the mixture
/// scenario.
pub const DEFAULT_THERMAL_SAMPLES: usize = 64;

/// Tolerance for oracle comparisons reported outside `verify`.
pub const ORACLE_TOLERANCE: f64 = 1e-8;
/// Tolerance for the cross-route propagator comparison.
pub const ROUTE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario: Option<Scenario>,
    pub out_dir: Option<PathBuf>,
    pub strict: bool,
    /// Worker threads for sweeps and verification; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl RunOptions {
    /// `--out`, then the environment variable, then the fixed default.
    pub fn resolve_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub report_path: PathBuf,
    /// Residuals that missed their tolerance.
    pub failures: Vec<String>,
}

impl RunOutcome {
    /// Turns verification failures into an error (exit code 3).
    pub fn into_result(self) -> Result<Self> {
        if self.failures.is_empty() {
            Ok(self)
        } else {
            Err(Error::Verification(self.failures.join("; ")))
        }
    }
}

struct Output {
    payload: Value,
    parameters: Option<CouplingParams>,
    residuals: BTreeMap<String, Residual>,
    warnings: Vec<Warning>,
    tables: Vec<CsvTable>,
    failures: Vec<String>,
    criteria_seconds: BTreeMap<String, f64>,
}

impl Output {
    fn new(payload: Value) -> Self {
        Output {
            payload,
            parameters: None,
            residuals: BTreeMap::new(),
            warnings: Vec::new(),
            tables: Vec::new(),
            failures: Vec::new(),
            criteria_seconds: BTreeMap::new(),
        }
    }

    fn warn(&mut self, new: impl IntoIterator<Item = Warning>) {
        crate::warning::merge_warnings(&mut self.warnings, new);
    }

    fn residual(&mut self, name: &str, value: f64, tolerance: f64) {
        self.residuals.insert(name.into(), Residual::new(value, tolerance));
    }
}

/// Runs one experiment, writing the JSON report and any CSV files into the
/// output directory.
pub fn run(config: &ExperimentConfig, options: &RunOptions) -> Result<RunOutcome> {
    let started = Instant::now();
    config.validate()?;
    let scenario = config.resolve_scenario(options.scenario)?;
    let strict = options.strict || config.oracle.strict;
    let jobs = match options.jobs {
        Some(0) => return Err(Error::validation("jobs", "must be at least 1")),
        Some(n) => n,
        None => rayon::current_num_threads(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let settings = OracleSettings {
        strict,
        ..config.oracle
    };

    let mut out = pool.install(|| dispatch(scenario, config, &settings))?;

    let dir = options.resolve_out_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    if config.output.csv {
        for table in std::mem::take(&mut out.tables) {
            match emit_plot_data(&table, &dir)? {
                Ok(file) => files.push(file),
                Err(w) => out.warn([w]),
            }
        }
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        library: LibraryInfo::current(),
        scenario,
        seed: config.seed,
        strict,
        config: config.clone(),
        parameters: out.parameters,
        payload: out.payload,
        residuals: out.residuals,
        warnings: out.warnings,
        files,
        timing: Timing {
            elapsed_seconds: started.elapsed().as_secs_f64(),
            jobs,
            criteria_seconds: out.criteria_seconds,
        },
    };
    let report_path = dir.join(&config.output.report);
    let text = serde_json::to_string_pretty(&report)?;
    fs::write(&report_path, text + "\n").map_err(|e| Error::io(&report_path, e))?;
    let mut failures = out.failures;
    if failures.is_empty() {
        failures = report.failed_residuals();
    }
    Ok(RunOutcome {
        report,
        report_path,
        failures,
    })
}

fn dispatch(scenario: Scenario, config: &ExperimentConfig, settings: &OracleSettings) -> Result<Output> {
    if scenario == Scenario::Verify {
        return verify_scenario(config, settings);
    }
    if scenario == Scenario::Sweep {
        return sweep(config, settings);
    }
    let (p, derivation_warnings) = config.require_params(scenario, settings.strict)?;
    let mut out = match scenario {
        Scenario::PropagatorDump => propagator_dump(&p)?,
        Scenario::Statistics => statistics(config, &p, settings)?,
        Scenario::Squeezing => squeezing(config, &p, settings)?,
        Scenario::Fock => fock(config, &p, settings)?,
        Scenario::Coherent => coherent(config, &p, settings)?,
        Scenario::Mixture => mixture(config, &p, settings)?,
        Scenario::Verify | Scenario::Sweep => unreachable!("handled above"),
    };
    out.parameters = Some(p);
    let mut warnings = derivation_warnings;
    warnings.extend(p.validity_warning());
    warnings.append(&mut out.warnings);
    out.warnings = Vec::new();
    out.warn(warnings);
    Ok(out)
}

fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn matrix_pairs(m: &Matrix3<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..3).map(|r| (0..3).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

fn propagator_dump(p: &CouplingParams) -> Result<Output> {
    let u = build_propagator(p)?;
    let modes = decompose_modes(p)?;
    let mut out = Output::new(json!({
        "propagator": u.to_pairs(),
        "order": ["stokes", "probe", "anti-stokes"],
        "unitarity_defect": u.unitarity_defect(),
        "reference_angle": u.reference_angle(),
        "coupled_rate": p.coupled_rate(),
        "rate": p.rate(),
        "phase": p.phase(),
        "modes": modes,
    }));
    out.residual("unitarity", u.unitarity_defect(), 1e-12);
    out.residual("mode_route", u.max_deviation(&propagator_via_modes(p)?), ROUTE_TOLERANCE);
    out.residual("generator_route", u.max_deviation(&propagator_via_generator(p)?), ROUTE_TOLERANCE);
    Ok(out)
}

/// Input moments for the closed-form route, with the matching oracle state.
enum PreparedInput {
    Probe(ProbeState),
    Coherent(CoherentTriple),
}

fn prepare_input(config: &ExperimentConfig, scenario: Scenario) -> Result<PreparedInput> {
    let input = config.require_input(scenario)?;
    if let Some(probe) = input.probe_state() {
        return Ok(PreparedInput::Probe(probe));
    }
    if let Some(triple) = input.coherent_triple() {
        return Ok(PreparedInput::Coherent(triple));
    }
    Err(Error::Config(format!(
        "scenario `{scenario}` needs a probe-state or coherent input, not `{}`",
        input.kind()
    )))
}

fn coherent_moment_set(t: &CoherentTriple, n_top: usize) -> MomentSet {
    let a = t.0;
    MomentSet::gaussian(
        a,
        Matrix3::from_fn(|k, l| a[k] * a[l]),
        Matrix3::from_fn(|k, l| a[k].conj() * a[l]),
        n_top,
    )
}

fn oracle_for(p: &CouplingParams, settings: &OracleSettings) -> Result<Oracle> {
    Oracle::new(p, *settings)
}

/// Closed form and oracle on the same truncated input; fills residuals.
fn oracle_moment_check(
    out: &mut Output,
    input: &PreparedInput,
    p: &CouplingParams,
    settings: &OracleSettings,
    n_top: usize,
) -> Result<()> {
    let basis = FockBasis::new(settings.n_max)?;
    let (closed_in, oracle_in) = match input {
        PreparedInput::Probe(state) => {
            let shared = shared_probe_input(&[(1.0, state.clone())], basis, n_top)?;
            if shared.discarded > settings.tail_tol {
                let what = "input truncation";
                if settings.strict {
                    return Err(Error::Truncation {
                        what,
                        mass: shared.discarded,
                        tolerance: settings.tail_tol,
                    });
                }
                out.warn([Warning::Truncation {
                    what: what.into(),
                    mass: shared.discarded,
                    tolerance: settings.tail_tol,
                }]);
            }
            (MomentSet::from_probe(&shared.moments), shared.oracle)
        }
        PreparedInput::Coherent(t) => (
            coherent_moment_set(t, n_top),
            CoherentMixture::single(*t).to_oracle(basis)?,
        ),
    };
    let u = build_propagator(p)?;
    let closed = propagate_moments(&closed_in, &u)?;
    let evolved = oracle_for(p, settings)?.evolve_mixture_for(&oracle_in, p.time)?;
    out.warn(evolved.warnings);
    let obs = OracleObservables::new(basis, 2);
    let gaps = moment_gaps(&closed, &obs.measure(&evolved.state)?, &comparison_phases(16));
    out.residual("oracle_first_moments", gaps.first, ORACLE_TOLERANCE);
    out.residual("oracle_mean_photons", gaps.number, ORACLE_TOLERANCE);
    out.residual("oracle_second_factorial", gaps.second_factorial, ORACLE_TOLERANCE);
    out.residual("oracle_cross_moments", gaps.cross, ORACLE_TOLERANCE);
    out.residual("oracle_quadrature", gaps.quadrature, ORACLE_TOLERANCE);
    Ok(())
}

fn per_mode_correlations(set: &MomentSet) -> Value {
    let autos: Vec<Value> = (2..=set.n_top)
        .map(|n| {
            json!({
                "order": n,
                "per_mode": Mode::ALL.map(|q| set.autocorrelation(q, n).ok()),
            })
        })
        .collect();
    let cross: Vec<Value> = [(Mode::Probe, Mode::AntiStokes), (Mode::Probe, Mode::Stokes), (Mode::AntiStokes, Mode::Stokes)]
        .iter()
        .map(|&(k, l)| {
            json!({
                "modes": [k, l],
                "value": set.cross_correlation(k, l).ok(),
            })
        })
        .collect();
    json!({"autocorrelations": autos, "cross_correlations": cross})
}

fn statistics(config: &ExperimentConfig, p: &CouplingParams, settings: &OracleSettings) -> Result<Output> {
    let input = prepare_input(config, Scenario::Statistics)?;
    let u = build_propagator(p)?;
    let (summary, closed) = match &input {
        PreparedInput::Probe(state) => {
            let moments = state.moments(config.n_top);
            let summary = serde_json::to_value(statistics_report(&moments, p)?)?;
            (summary, propagate_moments(&MomentSet::from_probe(&moments), &u)?)
        }
        PreparedInput::Coherent(t) => {
            let set = propagate_moments(&coherent_moment_set(t, config.n_top), &u)?;
            let minima: Vec<(f64, f64)> = Mode::ALL
                .iter()
                .map(|&q| {
                    let i = q.index();
                    squeezing_minimum(set.first[i], set.pair[(i, i)], set.mean_photons(q))
                })
                .collect();
            (json!({"squeezing_minima": minima}), set)
        }
    };
    let mut out = Output::new(json!({
        "input": config.input,
        "summary": summary,
        "mean_photons": Mode::ALL.map(|q| closed.mean_photons(q)),
        "total_photons": closed.total_photons(),
        "propagated": per_mode_correlations(&closed),
    }));
    oracle_moment_check(&mut out, &input, p, settings, 2)?;
    Ok(out)
}

fn squeezing(config: &ExperimentConfig, p: &CouplingParams, settings: &OracleSettings) -> Result<Output> {
    let input = prepare_input(config, Scenario::Squeezing)?;
    let PreparedInput::Probe(state) = &input else {
        return Err(Error::Config("squeezing transfer needs vacuum sidebands".into()));
    };
    let moments = state.moments(2);
    let mut out;
    if config.phase_points == 0 {
        let (in_min, in_phase) = squeezing_minimum(moments.mean, moments.pair, moments.number());
        out = Output::new(json!({
            "input": config.input,
            "phases": [],
            "input_minimum": [in_min, in_phase],
        }));
        out.tables.push(CsvTable::new("squeezing", &["phi", "S_m1", "S_0", "S_1"]));
    } else {
        let grid = PhaseGrid::uniform(config.phase_points)?;
        let report = squeezing_transfer(&moments, p, &grid)?;
        let mut table = CsvTable::new("squeezing", &["phi", "S_m1", "S_0", "S_1"]);
        let mut input_table = CsvTable::new("squeezing_input", &["phi", "S_in"]);
        for (k, &phi) in report.phases.iter().enumerate() {
            table.rows.push(vec![
                phi,
                report.modes[0].curve[k],
                report.modes[1].curve[k],
                report.modes[2].curve[k],
            ]);
            input_table.rows.push(vec![phi, report.input[k]]);
        }
        let normalized: Vec<Option<Vec<f64>>> = report.modes.iter().map(|m| m.normalized_curve().ok()).collect();
        out = Output::new(json!({
            "input": config.input,
            "report": report,
            "normalized": normalized,
        }));
        out.residual("normalized_relations", report.relation_residual, ORACLE_TOLERANCE);
        out.tables.push(table);
        out.tables.push(input_table);

        // oracle quadrature variances on a subsample of the grid
        let basis = FockBasis::new(settings.n_max)?;
        let shared = shared_probe_input(&[(1.0, state.clone())], basis, 2)?;
        let shared_report = squeezing_transfer(&shared.moments, p, &grid)?;
        let evolved = oracle_for(p, settings)?.evolve_mixture_for(&shared.oracle, p.time)?;
        out.warn(evolved.warnings);
        let stride = (grid.points.len() / 24).max(1);
        let idx: Vec<usize> = (0..grid.points.len()).step_by(stride).collect();
        let phases: Vec<f64> = idx.iter().map(|&k| grid.points[k]).collect();
        let mut gap: f64 = 0.0;
        for q in Mode::ALL {
            let curve = quadrature_curve(&evolved.state, q, &phases)?;
            for (v, &k) in curve.iter().zip(&idx) {
                gap = gap.max((v - shared_report.modes[q.index()].curve[k]).abs());
            }
        }
        out.residual("oracle_quadrature", gap, ORACLE_TOLERANCE);
    }
    Ok(out)
}

fn fock(config: &ExperimentConfig, p: &CouplingParams, settings: &OracleSettings) -> Result<Output> {
    let input = config.require_input(Scenario::Fock)?;
    let InputSpec::Fock { n } = *input else {
        return Err(Error::Config(format!("scenario `fock` needs a fock input, not `{}`", input.kind())));
    };
    let u = build_propagator(p)?;
    let table = fock_output(n, &u);
    let distributions = Mode::ALL.map(|q| table.mode_distribution(q));
    let mut out = Output::new(json!({
        "n": n,
        "components": table.components().map(|(occ, c)| json!({"occupation": occ, "amplitude": [c.re, c.im]})).collect::<Vec<_>>(),
        "norm": table.norm_sqr(),
        "mode_distributions": distributions,
        "separability": separability_witness(&table),
        "input_classical": n == 0,
    }));
    out.residual("normalization", (table.norm_sqr() - 1.0).abs(), 1e-12);
    if n <= settings.n_max {
        let basis = FockBasis::new(settings.n_max)?;
        let ket = crate::oracle::TruncatedState::fock(basis, [0, n, 0])?;
        let evolved = oracle_for(p, settings)?.evolve(&ket)?;
        out.warn(evolved.warnings);
        out.residual("oracle_amplitudes", table.to_oracle(basis)?.max_deviation(&evolved.state)?, ORACLE_TOLERANCE);
    } else {
        out.warn([Warning::Truncation {
            what: format!("Fock input n = {n} above oracle cutoff {}; oracle check skipped", settings.n_max),
            mass: 1.0,
            tolerance: settings.tail_tol,
        }]);
    }
    Ok(out)
}

fn coherent(config: &ExperimentConfig, p: &CouplingParams, settings: &OracleSettings) -> Result<Output> {
    let input = config.require_input(Scenario::Coherent)?;
    let triple = input
        .coherent_triple()
        .ok_or_else(|| Error::Config(format!("scenario `coherent` needs a coherent input, not `{}`", input.kind())))?;
    let u = build_propagator(p)?;
    let output = evolve_coherent(&triple, &u);
    let mut out = Output::new(json!({
        "input": pairs(&triple.0),
        "output": pairs(&output.0),
        "input_photons": triple.0.map(|a| a.norm_sqr()),
        "output_photons": output.0.map(|a| a.norm_sqr()),
        "propagator": matrix_pairs(u.entries()),
    }));
    out.residual("photon_number", (output.total_photons() - triple.total_photons()).abs(), 1e-12);
    let basis = FockBasis::new(settings.n_max)?;
    let evolved = oracle_for(p, settings)?.evolve(&triple.to_oracle(basis))?;
    out.warn(evolved.warnings);
    out.residual("oracle_infidelity", 1.0 - evolved.state.fidelity(&output.to_oracle(basis))?, ORACLE_TOLERANCE);
    Ok(out)
}

fn mixture(config: &ExperimentConfig, p: &CouplingParams, settings: &OracleSettings) -> Result<Output> {
    let input = config.require_input(Scenario::Mixture)?;
    let (mix, sampled) = match input {
        InputSpec::Mixture { components } => (components.clone(), false),
        InputSpec::Thermal { mean, samples } => (
            sample_thermal_mixture(*mean, samples.unwrap_or(DEFAULT_THERMAL_SAMPLES), config.seed)?,
            true,
        ),
        other => match other.coherent_triple() {
            Some(t) => (CoherentMixture::single(t), false),
            None => {
                return Err(Error::Config(format!(
                    "scenario `mixture` needs a mixture, thermal or coherent input, not `{}`",
                    other.kind()
                )))
            }
        },
    };
    let u = build_propagator(p)?;
    let transported = transform_mixture(&mix, &u);
    let probe_only = mix
        .components()
        .iter()
        .all(|(_, t)| t.get(Mode::Stokes) == Complex64::new(0.0, 0.0) && t.get(Mode::AntiStokes) == Complex64::new(0.0, 0.0));
    let out_moments = mixture_moment_set(&transported, 2);
    let mut out = Output::new(json!({
        "sampled": sampled,
        "input": serde_json::to_value(&mix)?,
        "output": serde_json::to_value(&transported)?,
        "separability": separability_witness(&transported),
        "mean_photons": Mode::ALL.map(|q| out_moments.mean_photons(q)),
    }));
    let weight_gap = mix
        .components()
        .iter()
        .zip(transported.components())
        .map(|((a, _), (b, _))| (a - b).abs())
        .fold(0.0, f64::max);
    out.residual("weights", weight_gap, 0.0);
    if probe_only {
        let points: Vec<(f64, Complex64)> = mix.components().iter().map(|(w, t)| (*w, t.get(Mode::Probe))).collect();
        let reduction = vacuum_sideband_p_reduction(&points, &u)?;
        out.residual("delta_constraints", reduction.constraint_residual, 1e-12);
    }
    let basis = FockBasis::new(settings.n_max)?;
    let evolved = oracle_for(p, settings)?.evolve_mixture_for(&mix.to_oracle(basis)?, p.time)?;
    out.warn(evolved.warnings);
    let obs = OracleObservables::new(basis, 2);
    let gaps = moment_gaps(&out_moments, &obs.measure(&evolved.state)?, &comparison_phases(16));
    out.residual("oracle_moments", gaps.max(), ORACLE_TOLERANCE);
    Ok(out)
}

fn sweep(config: &ExperimentConfig, settings: &OracleSettings) -> Result<Output> {
    let spec = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("scenario `sweep` needs a `sweep` block".into()))?;
    let (base, derivation_warnings) = config.require_params(Scenario::Sweep, settings.strict)?;
    let input = prepare_input(config, Scenario::Sweep)?;
    let input_set = match &input {
        PreparedInput::Probe(s) => MomentSet::from_probe(&s.moments(config.n_top)),
        PreparedInput::Coherent(t) => coherent_moment_set(t, config.n_top),
    };
    let n_in = input_set.total_photons();
    let g2_in = match &input {
        PreparedInput::Probe(s) => {
            let m = s.moments(2);
            (m.number() > 0.0).then(|| m.factorial[1] / m.number().powi(2))
        }
        PreparedInput::Coherent(_) => (n_in > 0.0).then_some(1.0),
    };
    let values = spec.values();
    let points: Vec<Result<(CouplingParams, MomentSet)>> = values
        .par_iter()
        .map(|&v| {
            let p = spec.parameter.apply(base, v);
            let u = build_propagator(&p)?;
            Ok((p, propagate_moments(&input_set, &u)?))
        })
        .collect();
    let name = spec.parameter.name();
    let mut combined = CsvTable::new("sweep", &[name, "n_m1", "n_0", "n_1", "g2"]);
    let files = [
        ("sweep_n_m1", "n_m1"),
        ("sweep_n_0", "n_0"),
        ("sweep_n_1", "n_1"),
        ("sweep_n_total", "n_total"),
        ("sweep_g2_m1", "g2_m1"),
        ("sweep_g2_0", "g2_0"),
        ("sweep_g2_1", "g2_1"),
    ];
    let mut singles: Vec<CsvTable> = files.iter().map(|(f, col)| CsvTable::new(*f, &[name, col])).collect();
    let mut max_gt: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut rows = Vec::new();
    for (v, r) in values.iter().zip(points) {
        let (p, set) = r?;
        max_gt = max_gt.max(p.phase());
        let n = Mode::ALL.map(|q| set.mean_photons(q));
        let g2 = Mode::ALL.map(|q| set.autocorrelation(q, 2).unwrap_or(f64::NAN));
        let shared = g2_in.unwrap_or(f64::NAN);
        combined.rows.push(vec![*v, n[0], n[1], n[2], shared]);
        let total = n.iter().sum::<f64>();
        drift = drift.max((total - n_in).abs());
        let cols = [n[0], n[1], n[2], total, g2[0], g2[1], g2[2]];
        for (t, c) in singles.iter_mut().zip(cols) {
            t.rows.push(vec![*v, c]);
        }
        rows.push(json!({"value": v, "mean_photons": n, "g2": g2.map(|g| (!g.is_nan()).then_some(g))}));
    }
    let mut out = Output::new(json!({
        "input": config.input,
        "parameter": spec.parameter,
        "base": base,
        "input_g2": g2_in,
        "points": rows,
    }));
    out.residual("photon_number_drift", drift, 1e-10);
    out.tables.push(combined);
    out.tables.extend(singles);
    let mut warnings = derivation_warnings;
    if max_gt > crate::warning::VALIDITY_BOUND_GT {
        warnings.push(Warning::ValidityBound { gt: max_gt });
    }
    out.warn(warnings);
    Ok(out)
}

fn verify_scenario(config: &ExperimentConfig, settings: &OracleSettings) -> Result<Output> {
    let extra = config.coupling_params(settings.strict)?;
    let verify_settings = verify::VerifySettings {
        seed: config.seed,
        n_max: settings.n_max,
        tail_tol: settings.tail_tol,
        strict: settings.strict,
    };
    let run = verify::run_verification(&verify_settings, extra.as_ref().map(|(p, _)| *p), &verify::all_criteria())?;
    let mut out = Output::new(serde_json::to_value(&run.report)?);
    for c in &run.report.criteria {
        for check in &c.checks {
            out.residuals.insert(
                format!("c{:02} {}", c.id, check.name),
                Residual {
                    value: check.residual,
                    tolerance: check.tolerance,
                    passed: check.passed,
                },
            );
        }
    }
    for (id, secs) in &run.timings {
        out.criteria_seconds.insert(format!("c{id:02}"), *secs);
    }
    out.failures = run.report.failures();
    if let Some((p, w)) = extra {
        out.parameters = Some(p);
        out.warn(w);
    }
    let max_gt = run
        .report
        .parameter_sets
        .iter()
        .map(|p| p.rate() * std::f64::consts::PI)
        .fold(0.0, f64::max);
    out.warn([Warning::ValidityBound { gt: max_gt }]);
    out.warn(run.warnings);
    Ok(out)
}

/// Reads a config file and runs it.
pub fn run_file(path: &Path, options: &RunOptions) -> Result<RunOutcome> {
    run(&ExperimentConfig::from_file(path)?, options)
}
