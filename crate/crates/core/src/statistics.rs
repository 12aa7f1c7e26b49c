//! Photon statistics of the output fields from moment propagation.
//!
//! With vacuum sidebands every output operator is b_q(t) = u_{q0} b₀(0) plus
//! vacuum parts, which gives
//!
//! ```text
//! ⟨b₀†ⁿb₀ⁿ⟩   = [1 − (g_c/g)² sin²(gt)]ⁿ ⟨b₀†ⁿb₀ⁿ⟩_in
//! ⟨b±₁†ⁿb±₁ⁿ⟩ = (g±₁/g)²ⁿ sin²ⁿ(gt) ⟨b₀†ⁿb₀ⁿ⟩_in
//! ```
//!
//! so every normalized autocorrelation and two-mode cross-correlation of
//! the output equals the input probe's ⟨b†ⁿbⁿ⟩/⟨b†b⟩ⁿ. Squeezing factors
//! S_q(φ) = 2[⟨b†b⟩ − |⟨b⟩|²] + 2Re[(⟨b²⟩ − ⟨b⟩²)e^{−2iφ}] are scaled copies
//! of the input curve, rotated by φ_L = arg u₀₀ for the probe and by π/2 for
//! the sidebands.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::propagator::{build_propagator, sin_over_rate, PropagatorMatrix};
use crate::{CouplingParams, Error, Mode, Result};

/// Highest normally ordered order tracked by default.
pub const DEFAULT_N_TOP: usize = 4;
/// Default number of φ samples on [0, π).
pub const DEFAULT_PHASE_POINTS: usize = 720;
/// Normalized squeezing relations are only checked where ⟨n_q⟩ exceeds this.
pub const NORMALIZATION_FLOOR: f64 = 1e-6;

/// Single-mode moments of the input probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeMoments {
    /// ⟨b⟩
    pub mean: Complex64,
    /// ⟨b²⟩
    pub pair: Complex64,
    /// ⟨b†ⁿbⁿ⟩ for n = 1..=n_top, stored at index n − 1.
    pub factorial: Vec<f64>,
}

impl ProbeMoments {
    pub fn coherent(alpha: Complex64, n_top: usize) -> Self {
        ProbeMoments {
            mean: alpha,
            pair: alpha * alpha,
            factorial: (1..=n_top).map(|n| alpha.norm_sqr().powi(n as i32)).collect(),
        }
    }

    /// ⟨b†b⟩
    pub fn number(&self) -> f64 {
        self.factorial.first().copied().unwrap_or(0.0)
    }

    pub fn n_top(&self) -> usize {
        self.factorial.len()
    }

    /// ⟨b†ⁿbⁿ⟩ for 1 ≤ n ≤ n_top.
    pub fn moment(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(1.0);
        }
        self.factorial.get(n - 1).copied().ok_or(Error::Order {
            order: n,
            n_top: self.n_top(),
        })
    }

    /// S(φ) of this mode.
    pub fn squeezing(&self, phi: f64) -> f64 {
        squeezing_factor(self.mean, self.pair, self.number(), phi)
    }
}

/// S(φ) = 2[⟨b†b⟩ − |⟨b⟩|²] + [(⟨b²⟩ − ⟨b⟩²)e^{−2iφ} + c.c.]
pub fn squeezing_factor(mean: Complex64, pair: Complex64, number: f64, phi: f64) -> f64 {
    let (floor, swing) = squeezing_coefficients(mean, pair, number);
    floor + 2.0 * (swing * Complex64::from_polar(1.0, -2.0 * phi)).re
}

fn squeezing_coefficients(mean: Complex64, pair: Complex64, number: f64) -> (f64, Complex64) {
    (2.0 * (number - mean.norm_sqr()), pair - mean * mean)
}

/// Exact minimum of S(φ) and a minimizing phase in [0, π).
pub fn squeezing_minimum(mean: Complex64, pair: Complex64, number: f64) -> (f64, f64) {
    let (floor, swing) = squeezing_coefficients(mean, pair, number);
    let phase = (swing.arg() / 2.0 + FRAC_PI_2).rem_euclid(PI);
    (floor - 2.0 * swing.norm(), phase)
}

/// Which higher-order moments can be propagated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputClass {
    /// Arbitrary probe state, Stokes and anti-Stokes in vacuum.
    VacuumSidebands,
    /// Gaussian three-mode state: higher moments follow from first and
    /// second moments.
    Gaussian,
    /// Only first and second moments are meaningful.
    General,
}

/// First and second moments of the three modes, plus normally ordered
/// number moments where they can be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    /// ⟨b_q⟩
    pub first: [Complex64; 3],
    /// ⟨b_q b_{q'}⟩
    pub pair: Matrix3<Complex64>,
    /// ⟨b_q† b_{q'}⟩
    pub hermitian: Matrix3<Complex64>,
    /// ⟨b_q†ⁿ b_qⁿ⟩ for n = 1..=n_top, per mode.
    pub number_moments: Option<[Vec<f64>; 3]>,
    /// ⟨n_k n_l⟩, meaningful off the diagonal.
    pub cross_number: Option<Matrix3<f64>>,
    pub n_top: usize,
    pub class: InputClass,
    probe: Option<ProbeMoments>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl MomentSet {
    pub fn vacuum(n_top: usize) -> Self {
        Self::from_probe(&ProbeMoments {
            mean: zero(),
            pair: zero(),
            factorial: vec![0.0; n_top],
        })
    }

    /// Probe in an arbitrary state, sidebands in vacuum.
    pub fn from_probe(probe: &ProbeMoments) -> Self {
        let p = Mode::Probe.index();
        let mut first = [zero(); 3];
        first[p] = probe.mean;
        let mut pair = Matrix3::zeros();
        pair[(p, p)] = probe.pair;
        let mut hermitian = Matrix3::zeros();
        hermitian[(p, p)] = Complex64::new(probe.number(), 0.0);
        let n_top = probe.n_top();
        let mut number_moments = [vec![0.0; n_top], vec![0.0; n_top], vec![0.0; n_top]];
        number_moments[p] = probe.factorial.clone();
        MomentSet {
            first,
            pair,
            hermitian,
            number_moments: Some(number_moments),
            cross_number: Some(Matrix3::zeros()),
            n_top,
            class: InputClass::VacuumSidebands,
            probe: Some(probe.clone()),
        }
    }

    /// Gaussian state; number moments follow from Wick's theorem.
    pub fn gaussian(
        first: [Complex64; 3],
        pair: Matrix3<Complex64>,
        hermitian: Matrix3<Complex64>,
        n_top: usize,
    ) -> Self {
        let mut set = Self::general(first, pair, hermitian, n_top);
        set.class = InputClass::Gaussian;
        set.fill_gaussian_higher();
        set
    }

    pub fn general(
        first: [Complex64; 3],
        pair: Matrix3<Complex64>,
        hermitian: Matrix3<Complex64>,
        n_top: usize,
    ) -> Self {
        MomentSet {
            first,
            pair,
            hermitian,
            number_moments: None,
            cross_number: None,
            n_top,
            class: InputClass::General,
            probe: None,
        }
    }

    fn fill_gaussian_higher(&mut self) {
        let number_moments = Mode::ALL.map(|q| {
            (1..=self.n_top)
                .map(|n| self.wick(&normal_ordered(&[(q, n)])).re)
                .collect()
        });
        let mut cross = Matrix3::zeros();
        for k in Mode::ALL {
            for l in Mode::ALL {
                if k != l {
                    cross[(k.index(), l.index())] = self.wick(&normal_ordered(&[(k, 1), (l, 1)])).re;
                }
            }
        }
        self.number_moments = Some(number_moments);
        self.cross_number = Some(cross);
    }

    /// Normally ordered Gaussian moment of the listed ladder factors.
    fn wick(&self, ops: &[Factor]) -> Complex64 {
        gaussian_normal_moment(ops, &self.first, &self.pair, &self.hermitian)
    }

    /// ⟨b_q† b_q⟩
    pub fn mean_photons(&self, mode: Mode) -> f64 {
        self.hermitian[(mode.index(), mode.index())].re
    }

    pub fn total_photons(&self) -> f64 {
        Mode::ALL.iter().map(|&q| self.mean_photons(q)).sum()
    }

    /// ⟨b_q†ⁿ b_qⁿ⟩
    pub fn number_moment(&self, mode: Mode, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(1.0);
        }
        if n > self.n_top {
            return Err(Error::Order {
                order: n,
                n_top: self.n_top,
            });
        }
        if n == 1 {
            return Ok(self.mean_photons(mode));
        }
        let moments = self.number_moments.as_ref().ok_or_else(|| {
            Error::UnsupportedMoment(format!(
                "order-{n} moments need a Gaussian or vacuum-sideband input"
            ))
        })?;
        Ok(moments[mode.index()][n - 1])
    }

    /// ⟨n_k n_l⟩ for k ≠ l.
    pub fn cross_moment(&self, k: Mode, l: Mode) -> Result<f64> {
        if k == l {
            return Err(Error::validation("mode", "cross moments need two distinct modes"));
        }
        self.cross_number
            .as_ref()
            .map(|m| m[(k.index(), l.index())])
            .ok_or_else(|| {
                Error::UnsupportedMoment(
                    "⟨n_k n_l⟩ needs a Gaussian or vacuum-sideband input".into(),
                )
            })
    }

    /// g_q^(n) = ⟨b†ⁿbⁿ⟩/⟨b†b⟩ⁿ
    pub fn autocorrelation(&self, mode: Mode, n: usize) -> Result<f64> {
        let mean = self.mean_photons(mode);
        if mean <= 0.0 {
            return Err(Error::UndefinedCorrelation);
        }
        Ok(self.number_moment(mode, n)? / mean.powi(n as i32))
    }

    /// g_{kl}^(2) = ⟨n_k n_l⟩/(⟨n_k⟩⟨n_l⟩)
    pub fn cross_correlation(&self, k: Mode, l: Mode) -> Result<f64> {
        let denom = self.mean_photons(k) * self.mean_photons(l);
        if denom <= 0.0 {
            return Err(Error::UndefinedCorrelation);
        }
        Ok(self.cross_moment(k, l)? / denom)
    }

    /// S_q(φ) from the stored first and second moments.
    pub fn squeezing(&self, mode: Mode, phi: f64) -> f64 {
        let q = mode.index();
        squeezing_factor(self.first[q], self.pair[(q, q)], self.mean_photons(mode), phi)
    }
}

/// One ladder factor in a normally ordered product: (mode, is_creation).
type Factor = (Mode, bool);

/// b_{q1}†^{n1} b_{q2}†^{n2} … b_{q2}^{n2} b_{q1}^{n1}
fn normal_ordered(powers: &[(Mode, usize)]) -> Vec<Factor> {
    let creators = powers
        .iter()
        .flat_map(|&(q, n)| std::iter::repeat_n((q, true), n));
    let annihilators = powers
        .iter()
        .rev()
        .flat_map(|&(q, n)| std::iter::repeat_n((q, false), n));
    creators.chain(annihilators).collect()
}

/// Moment of a normally ordered product for a Gaussian state, by recursive
/// Wick expansion over singletons (means) and pairings (centred
/// covariances).
pub fn gaussian_normal_moment(
    ops: &[Factor],
    first: &[Complex64; 3],
    pair: &Matrix3<Complex64>,
    hermitian: &Matrix3<Complex64>,
) -> Complex64 {
    let mean = |&(q, dag): &Factor| {
        let m = first[q.index()];
        if dag {
            m.conj()
        } else {
            m
        }
    };
    let cov = |a: &Factor, b: &Factor| {
        let (i, j) = (a.0.index(), b.0.index());
        match (a.1, b.1) {
            (false, false) => pair[(i, j)] - first[i] * first[j],
            (true, true) => (pair[(i, j)] - first[i] * first[j]).conj(),
            (true, false) => hermitian[(i, j)] - first[i].conj() * first[j],
            (false, true) => hermitian[(j, i)] - first[j].conj() * first[i],
        }
    };
    fn expand(
        ops: &[Factor],
        mean: &dyn Fn(&Factor) -> Complex64,
        cov: &dyn Fn(&Factor, &Factor) -> Complex64,
    ) -> Complex64 {
        let Some((head, rest)) = ops.split_first() else {
            return Complex64::new(1.0, 0.0);
        };
        let mut total = mean(head) * expand(rest, mean, cov);
        for j in 0..rest.len() {
            let c = cov(head, &rest[j]);
            if c != Complex64::new(0.0, 0.0) {
                let remaining: Vec<Factor> = rest
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, f)| *f)
                    .collect();
                total += c * expand(&remaining, mean, cov);
            }
        }
        total
    }
    expand(ops, &mean, &cov)
}

/// ⟨b†ⁿbⁿ⟩ of a single-mode Gaussian state.
pub fn gaussian_factorial_moment(mean: Complex64, pair: Complex64, number: f64, n: usize) -> f64 {
    let mut first = [zero(); 3];
    first[1] = mean;
    let mut p = Matrix3::zeros();
    p[(1, 1)] = pair;
    let mut h = Matrix3::zeros();
    h[(1, 1)] = Complex64::new(number, 0.0);
    gaussian_normal_moment(&normal_ordered(&[(Mode::Probe, n)]), &first, &p, &h).re
}

/// Transforms every tracked moment through b → U b.
///
/// First and second moments always propagate. Higher number moments are
/// produced for vacuum-sideband inputs (closed form in |u_{q0}|) and for
/// Gaussian inputs (Wick's theorem on the output); a general input that
/// carries higher moments is rejected.
pub fn propagate_moments(input: &MomentSet, u: &PropagatorMatrix) -> Result<MomentSet> {
    let m = u.entries();
    let f = m * Vector3::from(input.first);
    let first = [f[0], f[1], f[2]];
    let pair = m * input.pair * m.transpose();
    let hermitian = m.conjugate() * input.hermitian * m.transpose();
    let mut out = MomentSet::general(first, pair, hermitian, input.n_top);
    match input.class {
        InputClass::General => {
            if input.number_moments.is_some() || input.cross_number.is_some() {
                return Err(Error::UnsupportedMoment(
                    "higher-order moments of a general input cannot be propagated".into(),
                ));
            }
        }
        InputClass::Gaussian => {
            out.class = InputClass::Gaussian;
            out.fill_gaussian_higher();
        }
        InputClass::VacuumSidebands => {
            let probe = input
                .probe
                .as_ref()
                .expect("vacuum-sideband moment sets keep their probe moments");
            let weights = u.probe_column().map(|z| z.norm_sqr());
            out.number_moments = Some(weights.map(|w| {
                probe
                    .factorial
                    .iter()
                    .enumerate()
                    .map(|(k, m)| w.powi(k as i32 + 1) * m)
                    .collect()
            }));
            let second = probe.moment(2).ok();
            out.cross_number = second.map(|m2| {
                Matrix3::from_fn(|k, l| if k == l { 0.0 } else { weights[k] * weights[l] * m2 })
            });
        }
    }
    Ok(out)
}

/// Output ⟨b_q†ⁿb_qⁿ⟩ in storage order for a vacuum-sideband input.
pub fn photon_moments_vacuum_sidebands(
    probe: &ProbeMoments,
    p: &CouplingParams,
    n: usize,
) -> Result<[f64; 3]> {
    p.validate()?;
    if n == 0 {
        return Err(Error::validation("order", "moment order starts at 1"));
    }
    let input = probe.moment(n)?;
    let s = sin_over_rate(p.rate(), p.time);
    let gc = p.coupled_rate();
    let probe_weight = 1.0 - (gc * s).powi(2);
    let stokes_weight = (p.g_stokes * s).powi(2);
    let anti_weight = (p.g_anti * s).powi(2);
    Ok([stokes_weight, probe_weight, anti_weight].map(|w| w.powi(n as i32) * input))
}

/// A correlation value shared by all three output modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharedCorrelation {
    pub order: usize,
    pub value: f64,
}

impl SharedCorrelation {
    pub fn per_mode(&self) -> [f64; 3] {
        [self.value; 3]
    }
}

/// g^(n), identical for probe, Stokes and anti-Stokes outputs and for any
/// coupling parameters.
pub fn autocorrelation(probe: &ProbeMoments, n: usize) -> Result<SharedCorrelation> {
    let mean = probe.number();
    if mean <= 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(SharedCorrelation {
        order: n,
        value: probe.moment(n)? / mean.powi(n as i32),
    })
}

/// g_{0,1}^(2) = g_{0,−1}^(2) = g_{1,−1}^(2), equal to g^(2) of the input.
pub fn cross_correlation(probe: &ProbeMoments) -> Result<SharedCorrelation> {
    autocorrelation(probe, 2)
}

/// Uniform phases on [0, π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub points: Vec<f64>,
}

impl PhaseGrid {
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 3 {
            return Err(Error::validation("phase_points", "need at least 3 points"));
        }
        Ok(PhaseGrid {
            points: (0..count).map(|k| PI * k as f64 / count as f64).collect(),
        })
    }

    fn step(&self) -> f64 {
        PI / self.points.len() as f64
    }
}

impl Default for PhaseGrid {
    fn default() -> Self {
        PhaseGrid::uniform(DEFAULT_PHASE_POINTS).expect("default grid is valid")
    }
}

/// Squeezing curve and its minimum for one output mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSqueezing {
    pub mode: Mode,
    pub curve: Vec<f64>,
    /// Grid minimum refined by a parabola through the neighbours.
    pub minimum: f64,
    pub minimum_phase: f64,
    /// Analytic minimum of the sinusoid.
    pub exact_minimum: f64,
    pub exact_minimum_phase: f64,
    pub mean_photons: f64,
}

impl ModeSqueezing {
    /// s_q = S_q/⟨n_q⟩ on the grid.
    pub fn normalized_curve(&self) -> Result<Vec<f64>> {
        if self.mean_photons <= 0.0 {
            return Err(Error::UndefinedNormalization(self.mode));
        }
        Ok(self.curve.iter().map(|s| s / self.mean_photons).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub phases: Vec<f64>,
    pub input: Vec<f64>,
    /// Storage order: Stokes, probe, anti-Stokes.
    pub modes: [ModeSqueezing; 3],
    /// φ_L = arg u₀₀.
    pub reference_angle: f64,
    /// Largest violation of s₁(φ+π/2) = s₋₁(φ+π/2) = s₀(φ+φ_L) = s₀ᶦⁿ(φ)
    /// over the grid, among modes with ⟨n_q⟩ above the floor.
    pub relation_residual: f64,
}

impl SqueezingReport {
    pub fn mode(&self, mode: Mode) -> &ModeSqueezing {
        &self.modes[mode.index()]
    }
}

/// Output squeezing of each mode, for vacuum sidebands:
/// S₀(φ) = |u₀₀|² S₀ᶦⁿ(φ − φ_L), S±₁(φ) = |u₀±₁|² S₀ᶦⁿ(φ − π/2).
pub fn squeezing_transfer(
    probe: &ProbeMoments,
    p: &CouplingParams,
    grid: &PhaseGrid,
) -> Result<SqueezingReport> {
    let u = build_propagator(p)?;
    let phi_l = u.reference_angle();
    let weights = u.probe_column().map(|z| z.norm_sqr());
    let shift = |mode: Mode| if mode.is_sideband() { FRAC_PI_2 } else { phi_l };
    let output = |mode: Mode, phi: f64| weights[mode.index()] * probe.squeezing(phi - shift(mode));
    let n_in = probe.number();
    let (in_min, in_phase) = squeezing_minimum(probe.mean, probe.pair, n_in);

    let modes = Mode::ALL.map(|mode| {
        let curve: Vec<f64> = grid.points.iter().map(|&phi| output(mode, phi)).collect();
        let (minimum, minimum_phase) = refine_minimum(&curve, grid);
        let w = weights[mode.index()];
        ModeSqueezing {
            mode,
            minimum,
            minimum_phase,
            exact_minimum: w * in_min,
            exact_minimum_phase: (in_phase + shift(mode)).rem_euclid(PI),
            mean_photons: w * n_in,
            curve,
        }
    });

    let mut relation_residual: f64 = 0.0;
    if n_in > NORMALIZATION_FLOOR {
        for &phi in &grid.points {
            let target = probe.squeezing(phi) / n_in;
            for mode in Mode::ALL {
                let n_q = weights[mode.index()] * n_in;
                if n_q > NORMALIZATION_FLOOR {
                    let s = output(mode, phi + shift(mode)) / n_q;
                    relation_residual = relation_residual.max((s - target).abs());
                }
            }
        }
    }

    Ok(SqueezingReport {
        phases: grid.points.clone(),
        input: grid.points.iter().map(|&phi| probe.squeezing(phi)).collect(),
        modes,
        reference_angle: phi_l,
        relation_residual,
    })
}

/// Grid argmin, refined by the vertex of the parabola through the point and
/// its (π-periodic) neighbours.
fn refine_minimum(curve: &[f64], grid: &PhaseGrid) -> (f64, f64) {
    let n = curve.len();
    let (i, &y0) = curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let ym = curve[(i + n - 1) % n];
    let yp = curve[(i + 1) % n];
    let h = grid.step();
    let curvature = ym - 2.0 * y0 + yp;
    if curvature <= 1e-15 * (ym.abs() + y0.abs() + yp.abs()).max(f64::MIN_POSITIVE) {
        return (y0, grid.points[i]);
    }
    let offset = h * (ym - yp) / (2.0 * curvature);
    let value = y0 - (ym - yp).powi(2) / (8.0 * curvature);
    (value, (grid.points[i] + offset).rem_euclid(PI))
}

/// Per-mode output summary for a vacuum-sideband input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub params: CouplingParams,
    pub input: ProbeMoments,
    /// ⟨n_q⟩ in storage order.
    pub mean_photons: [f64; 3],
    /// g^(n) for n = 2..=n_top; `None` when the input has no photons.
    pub autocorrelations: Vec<SharedCorrelation>,
    pub cross_correlation: Option<SharedCorrelation>,
    /// Minimum S_q and its phase, storage order.
    pub squeezing_minima: [(f64, f64); 3],
    pub reference_angle: f64,
}

pub fn statistics_report(probe: &ProbeMoments, p: &CouplingParams) -> Result<StatisticsReport> {
    let mean_photons = photon_moments_vacuum_sidebands(probe, p, 1)?;
    let defined = probe.number() > 0.0;
    let autocorrelations = if defined {
        (2..=probe.n_top())
            .map(|n| autocorrelation(probe, n))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let cross = if defined && probe.n_top() >= 2 {
        Some(cross_correlation(probe)?)
    } else {
        None
    };
    let u = build_propagator(p)?;
    let weights = u.probe_column().map(|z| z.norm_sqr());
    let (in_min, in_phase) = squeezing_minimum(probe.mean, probe.pair, probe.number());
    let phi_l = u.reference_angle();
    let squeezing_minima = Mode::ALL.map(|q| {
        let shift = if q.is_sideband() { FRAC_PI_2 } else { phi_l };
        (weights[q.index()] * in_min, (in_phase + shift).rem_euclid(PI))
    });
    Ok(StatisticsReport {
        params: *p,
        input: probe.clone(),
        mean_photons,
        autocorrelations,
        cross_correlation: cross,
        squeezing_minima,
        reference_angle: phi_l,
    })
}
