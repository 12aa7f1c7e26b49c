//! Closed-form three-mode propagator and its equivalent constructions.
//!
//! The Heisenberg solution is b_q(t) = Σ_{q'} u_{qq'}(t) b_{q'}(0) with
//!
//! ```text
//! u₀₀     = cos(gt) + i(Δ/g) sin(gt)
//! u₁₁     = (g₁/g_c)² u₀₀* + (g₋₁/g_c)² e^{-iΔt}
//! u₋₁₋₁   = (g₋₁/g_c)² u₀₀* + (g₁/g_c)² e^{-iΔt}
//! u₁₋₁    = u₋₁₁ = (g₁g₋₁/g_c²)[u₀₀* − e^{-iΔt}]
//! u₀±₁    = u±₁₀ = i(g±₁/g) sin(gt)
//! ```
//!
//! Two further routes build the same matrix: conjugating the diagonal
//! evolution of the uncoupled mode b_u and the normal modes b± through the
//! mode basis change, and exponentiating the Hamiltonian coefficient matrix.

use std::ops::Mul;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::{CouplingParams, Mode, Result};

/// Below this value of g·t, sin(gt)/g is evaluated by its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// sin(gt)/g, continuous through g·t = 0.
pub fn sin_over_rate(rate: f64, time: f64) -> f64 {
    if (rate * time).abs() < SERIES_THRESHOLD {
        sin_over_rate_series(rate, time)
    } else {
        sin_over_rate_direct(rate, time)
    }
}

/// Two-term series t − (gt)² t/6.
pub fn sin_over_rate_series(rate: f64, time: f64) -> f64 {
    let gt = rate * time;
    time - gt * gt * time / 6.0
}

pub fn sin_over_rate_direct(rate: f64, time: f64) -> f64 {
    (rate * time).sin() / rate
}

/// 3×3 unitary u_{qq'}(t) in (Stokes, probe, anti-Stokes) storage order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix {
    entries: Matrix3<Complex64>,
    params: CouplingParams,
}

impl PropagatorMatrix {
    pub fn from_entries(entries: Matrix3<Complex64>, params: CouplingParams) -> Self {
        PropagatorMatrix { entries, params }
    }

    pub fn entries(&self) -> &Matrix3<Complex64> {
        &self.entries
    }

    pub fn params(&self) -> &CouplingParams {
        &self.params
    }

    /// u_{qq'} with `row` = q and `col` = q'.
    pub fn get(&self, row: Mode, col: Mode) -> Complex64 {
        self.entries[(row.index(), col.index())]
    }

    /// Column u_{q0}: where a probe photon ends up.
    pub fn probe_column(&self) -> [Complex64; 3] {
        Mode::ALL.map(|q| self.get(q, Mode::Probe))
    }

    /// max |(U†U − I)_{ij}|
    pub fn unitarity_defect(&self) -> f64 {
        max_abs(&(self.entries.adjoint() * self.entries - Matrix3::identity()))
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_deviation(&self, other: &PropagatorMatrix) -> f64 {
        max_abs(&(self.entries - other.entries))
    }

    /// φ_L = arg(u₀₀), the phase the probe quadratures pick up.
    pub fn reference_angle(&self) -> f64 {
        self.get(Mode::Probe, Mode::Probe).arg()
    }

    /// U·α for a triple of amplitudes.
    pub fn apply(&self, amplitudes: &[Complex64; 3]) -> [Complex64; 3] {
        let v = self.entries * Vector3::from(*amplitudes);
        [v[0], v[1], v[2]]
    }

    /// Rows as `[re, im]` pairs, the layout used for JSON dumps.
    pub fn to_pairs(&self) -> [[[f64; 2]; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| {
            let z = self.entries[(i, j)];
            [z.re, z.im]
        }))
    }
}

impl Mul for PropagatorMatrix {
    type Output = PropagatorMatrix;

    /// Composition `later * earlier`; the time parameter is summed.
    fn mul(self, rhs: PropagatorMatrix) -> PropagatorMatrix {
        PropagatorMatrix {
            entries: self.entries * rhs.entries,
            params: self.params.with_time(self.params.time + rhs.params.time),
        }
    }
}

impl Serialize for PropagatorMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

pub(crate) fn max_abs(m: &Matrix3<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Closed-form u_{qq'}(t).
pub fn build_propagator(p: &CouplingParams) -> Result<PropagatorMatrix> {
    p.validate()?;
    let (g1, gm1, delta, t) = (p.g_anti, p.g_stokes, p.detuning, p.time);
    let gc = p.coupled_rate();
    let g = p.rate();
    let s = sin_over_rate(g, t);
    let u00 = Complex64::new((g * t).cos(), delta * s);
    let free = Complex64::from_polar(1.0, -delta * t);
    let (wa, ws) = (g1 / gc, gm1 / gc);

    let u_aa = wa * wa * u00.conj() + ws * ws * free;
    let u_ss = ws * ws * u00.conj() + wa * wa * free;
    let u_sa = wa * ws * (u00.conj() - free);
    let u_pa = Complex64::new(0.0, g1 * s);
    let u_ps = Complex64::new(0.0, gm1 * s);

    #[rustfmt::skip]
    let entries = Matrix3::new(
        u_ss, u_ps, u_sa,
        u_ps, u00,  u_pa,
        u_sa, u_pa, u_aa,
    );
    Ok(PropagatorMatrix { entries, params: *p })
}

/// Coupled/uncoupled sideband modes and the normal modes b±.
///
/// Weight vectors are real, in storage order, and define mode operators as
/// b_x = Σ_q w_q b_q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDecomposition {
    /// (g₁/g_c, g₋₁/g_c) on (b₁, b₋₁).
    pub coupled_weights: [f64; 2],
    /// (g₋₁/g_c, −g₁/g_c) on (b₁, b₋₁).
    pub uncoupled_weights: [f64; 2],
    /// b₊ on (b₀, b_c): (√g₋, −√g₊)/√(2g).
    pub plus_weights: [f64; 2],
    /// b₋ on (b₀, b_c): (√g₊, √g₋)/√(2g).
    pub minus_weights: [f64; 2],
    /// g₊ = g + Δ, g₋ = g − Δ.
    pub split_rates: [f64; 2],
    /// Oscillation frequencies of (b_u, b₊, b₋): (Δ, g, −g).
    pub frequencies: [f64; 3],
}

impl ModeDecomposition {
    pub fn coupled(&self) -> Vector3<f64> {
        let [a, s] = self.coupled_weights;
        Vector3::new(s, 0.0, a)
    }

    pub fn uncoupled(&self) -> Vector3<f64> {
        let [a, s] = self.uncoupled_weights;
        Vector3::new(s, 0.0, a)
    }

    pub fn plus(&self) -> Vector3<f64> {
        let [p, c] = self.plus_weights;
        Vector3::new(0.0, p, 0.0) + self.coupled() * c
    }

    pub fn minus(&self) -> Vector3<f64> {
        let [p, c] = self.minus_weights;
        Vector3::new(0.0, p, 0.0) + self.coupled() * c
    }

    /// Rows b_u, b₊, b₋ over (b₋₁, b₀, b₁); orthogonal.
    pub fn basis_change(&self) -> Matrix3<f64> {
        Matrix3::from_rows(&[
            self.uncoupled().transpose(),
            self.plus().transpose(),
            self.minus().transpose(),
        ])
    }

    /// Sideband weights recovered from (b_c, b_u):
    /// b₁ = (g₁b_c + g₋₁b_u)/g_c, b₋₁ = (g₋₁b_c − g₁b_u)/g_c.
    /// Returned as [[c, u] for b₋₁, [c, u] for b₁].
    pub fn sidebands_from_modes(&self) -> [[f64; 2]; 2] {
        let [ca, cs] = self.coupled_weights;
        [[cs, -ca], [ca, cs]]
    }
}

pub fn decompose_modes(p: &CouplingParams) -> Result<ModeDecomposition> {
    p.validate()?;
    let gc = p.coupled_rate();
    let g = p.rate();
    let delta = p.detuning;
    // g₊g₋ = g_c²; take the cancelling one from the product
    let (g_plus, g_minus) = if delta >= 0.0 {
        let gp = g + delta;
        (gp, gc * gc / gp)
    } else {
        let gm = g - delta;
        (gc * gc / gm, gm)
    };
    let norm = (2.0 * g).sqrt();
    let (sp, sm) = (g_plus.sqrt() / norm, g_minus.sqrt() / norm);
    Ok(ModeDecomposition {
        coupled_weights: [p.g_anti / gc, p.g_stokes / gc],
        uncoupled_weights: [p.g_stokes / gc, -p.g_anti / gc],
        plus_weights: [sm, -sp],
        minus_weights: [sp, sm],
        split_rates: [g_plus, g_minus],
        frequencies: [delta, g, -g],
    })
}

/// Reconstructs U by evolving b_u, b₊, b₋ with their phases
/// (e^{-iΔt}, e^{-igt}, e^{+igt}) and transforming back.
pub fn propagator_via_modes(p: &CouplingParams) -> Result<PropagatorMatrix> {
    let modes = decompose_modes(p)?;
    let basis = modes.basis_change().map(|x| Complex64::new(x, 0.0));
    let phases = Matrix3::from_diagonal(&Vector3::from(
        modes
            .frequencies
            .map(|w| Complex64::from_polar(1.0, -w * p.time)),
    ));
    Ok(PropagatorMatrix {
        entries: basis.transpose() * phases * basis,
        params: *p,
    })
}

/// Coefficients h with H = ħ Σ h_{qq'} b_q† b_{q'}.
///
/// Real symmetric, hence Hermitian: diagonal (Δ, −Δ, Δ), probe–sideband
/// entries −g₋₁ and −g₁, no direct sideband–sideband term.
pub fn hamiltonian_coefficients(p: &CouplingParams) -> Result<Matrix3<f64>> {
    p.validate()?;
    let (g1, gm1, d) = (p.g_anti, p.g_stokes, p.detuning);
    #[rustfmt::skip]
    let h = Matrix3::new(
        d,    -gm1,  0.0,
        -gm1, -d,   -g1,
        0.0,  -g1,   d,
    );
    Ok(h)
}

/// U = exp(−i h t) through the eigendecomposition of h.
pub fn propagator_via_generator(p: &CouplingParams) -> Result<PropagatorMatrix> {
    let h = hamiltonian_coefficients(p)?;
    let eigen = SymmetricEigen::new(h);
    let v = eigen.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = Matrix3::from_diagonal(
        &eigen
            .eigenvalues
            .map(|e| Complex64::from_polar(1.0, -e * p.time)),
    );
    Ok(PropagatorMatrix {
        entries: v * phases * v.transpose(),
        params: *p,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Taylor series with scaling and squaring, for exp(A) of a small matrix.
    fn expm_taylor(a: Matrix3<Complex64>) -> Matrix3<Complex64> {
        let norm = max_abs(&a) * 3.0;
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = a / Complex64::from(2f64.powi(squarings as i32));
        let mut term = Matrix3::identity();
        let mut sum = Matrix3::identity();
        for k in 1..30 {
            term = term * scaled / Complex64::from(k as f64);
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    /// exp(iMt) with M read directly off the coupled-mode equations.
    fn oracle(p: &CouplingParams) -> Matrix3<Complex64> {
        let (g1, gm1, d) = (p.g_anti, p.g_stokes, p.detuning);
        #[rustfmt::skip]
        let m = Matrix3::new(
            -d,  gm1, 0.0,
            gm1, d,   g1,
            0.0, g1,  -d,
        );
        expm_taylor(m.map(|x| c(0.0, x * p.time)))
    }

    fn standard(delta: f64, t: f64) -> CouplingParams {
        CouplingParams::new(0.6, 0.8, delta, t).unwrap()
    }

    #[test]
    fn identity_at_zero_time() {
        let u = build_propagator(&standard(0.3, 0.0)).unwrap();
        assert!(max_abs(&(u.entries() - Matrix3::identity())) < 1e-15);
        let v = propagator_via_modes(&standard(0.3, 0.0)).unwrap();
        assert!(max_abs(&(v.entries() - Matrix3::identity())) < 1e-15);
    }

    #[test]
    fn quarter_period_values() {
        let p = standard(0.0, FRAC_PI_2);
        let u = build_propagator(&p).unwrap();
        let expect = [
            (Mode::Probe, Mode::Probe, c(0.0, 0.0)),
            (Mode::Probe, Mode::Stokes, c(0.0, 0.8)),
            (Mode::Probe, Mode::AntiStokes, c(0.0, 0.6)),
            (Mode::AntiStokes, Mode::AntiStokes, c(0.64, 0.0)),
            (Mode::Stokes, Mode::Stokes, c(0.36, 0.0)),
            (Mode::AntiStokes, Mode::Stokes, c(-0.48, 0.0)),
        ];
        for (r, col, z) in expect {
            assert!((u.get(r, col) - z).norm() < 1e-15, "{r} {col}");
        }
        assert!(max_abs(&(u.entries() - oracle(&p))) < 1e-13);
    }

    #[test]
    fn exchange_symmetry_is_exact() {
        let u = build_propagator(&standard(0.37, 1.3)).unwrap();
        assert_eq!(
            u.get(Mode::Stokes, Mode::AntiStokes),
            u.get(Mode::AntiStokes, Mode::Stokes)
        );
        for q in [Mode::Stokes, Mode::AntiStokes] {
            assert_eq!(u.get(Mode::Probe, q), u.get(q, Mode::Probe));
        }
    }

    #[test]
    fn detuned_rows_are_normalized() {
        for k in 0..20 {
            let u = build_propagator(&standard(0.5, 0.37 * k as f64)).unwrap();
            for i in 0..3 {
                let row: f64 = u.entries().row(i).iter().map(|z| z.norm_sqr()).sum();
                assert!((row - 1.0).abs() < 1e-12);
            }
            assert!(u.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn degenerate_coupling_rejected() {
        let p = CouplingParams {
            g_anti: 0.0,
            g_stokes: 0.0,
            detuning: 0.1,
            time: 1.0,
        };
        assert!(matches!(build_propagator(&p), Err(crate::Error::DegenerateCoupling)));
        assert!(matches!(decompose_modes(&p), Err(crate::Error::DegenerateCoupling)));
        assert!(propagator_via_modes(&p).is_err());
    }

    #[test]
    fn symmetric_couplings_weights() {
        let m = decompose_modes(&CouplingParams::new(0.7, 0.7, 0.2, 1.0).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (x, y) in m.coupled_weights.iter().zip([r, r]) {
            assert!((x - y).abs() < 1e-15);
        }
        for (x, y) in m.uncoupled_weights.iter().zip([r, -r]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn resonant_normal_weights() {
        let m = decompose_modes(&standard(0.0, 1.0)).unwrap();
        assert_eq!(m.split_rates[0], m.split_rates[1]);
        for w in m.plus_weights.iter().chain(&m.minus_weights) {
            assert!((w.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn detuned_decomposition_is_orthonormal() {
        let m = decompose_modes(&standard(0.5, 1.0)).unwrap();
        assert_eq!(m.frequencies, [0.5, 1.25f64.sqrt(), -(1.25f64.sqrt())]);
        let b = m.basis_change();
        assert!((b * b.transpose() - Matrix3::identity()).abs().max() < 1e-15);
        let [[sc, su], [ac, au]] = m.sidebands_from_modes();
        // b₋₁ and b₁ rebuilt from b_c, b_u equal the unit vectors
        let stokes = m.coupled() * sc + m.uncoupled() * su;
        let anti = m.coupled() * ac + m.uncoupled() * au;
        assert!((stokes - Vector3::new(1.0, 0.0, 0.0)).abs().max() < 1e-15);
        assert!((anti - Vector3::new(0.0, 0.0, 1.0)).abs().max() < 1e-15);
    }

    #[test]
    fn split_rates_stable_for_large_detuning() {
        let p = CouplingParams::new(1e-6, 2e-6, 10.0, 1.0).unwrap();
        let m = decompose_modes(&p).unwrap();
        let gc2 = p.coupled_rate().powi(2);
        assert!((m.split_rates[0] * m.split_rates[1] - gc2).abs() < 1e-12 * gc2);
        let neg = decompose_modes(&p.with_detuning(-10.0)).unwrap();
        assert!((neg.split_rates[0] * neg.split_rates[1] - gc2).abs() < 1e-12 * gc2);
    }

    /// The explicit b₀(t), b±₁(t) expressions in terms of b_c, b_u.
    #[test]
    fn coupled_mode_expressions() {
        let p = standard(0.5, 0.9);
        let u = build_propagator(&p).unwrap();
        let m = decompose_modes(&p).unwrap();
        let (g, gc, d, t) = (p.rate(), p.coupled_rate(), p.detuning, p.time);
        let (cos, sin) = ((g * t).cos(), (g * t).sin());
        let i = c(0.0, 1.0);
        let bc = m.coupled().map(|x| c(x, 0.0));
        let bu = m.uncoupled().map(|x| c(x, 0.0));
        let b0 = Vector3::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let probe = b0 * c(cos, 0.0) + (b0 * c(d / g, 0.0) + bc * c(gc / g, 0.0)) * (i * sin);
        assert!((u.entries().row(1).transpose() - probe).camax() < 1e-15);
        for (row, sign, g_own, g_other) in [(2, 1.0, p.g_anti, p.g_stokes), (0, -1.0, p.g_stokes, p.g_anti)] {
            let free = Complex64::from_polar(1.0, -d * t);
            let expr = bu * (free * sign * g_other / gc)
                + bc * c(g_own / gc * cos, 0.0)
                + (b0 - bc * c(d / gc, 0.0)) * (i * g_own / g * sin);
            assert!((u.entries().row(row).transpose() - expr).camax() < 1e-15);
        }
    }

    #[test]
    fn generator_eigenvalues() {
        let h = hamiltonian_coefficients(&standard(0.5, 0.0)).unwrap();
        assert_eq!(h, h.transpose());
        let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        let g = 1.25f64.sqrt();
        for (x, y) in e.iter().zip([-g, 0.5, g]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn composition() {
        let (p1, p2) = (standard(0.3, 0.7), standard(0.3, 1.9));
        let u12 = build_propagator(&p2).unwrap() * build_propagator(&p1).unwrap();
        let direct = build_propagator(&standard(0.3, 2.6)).unwrap();
        assert!(u12.max_deviation(&direct) < 1e-10);
    }

    #[test]
    fn probe_column_normalized() {
        let u = build_propagator(&standard(-0.4, 2.2)).unwrap();
        let sum: f64 = u.probe_column().iter().map(|z| z.norm_sqr()).sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn series_branch_matches_direct() {
        let g = 0.7;
        let t = 1e-7 / g;
        let (s, d) = (sin_over_rate_series(g, t), sin_over_rate_direct(g, t));
        assert!((s - d).abs() < 1e-12 * t.max(1.0));
        assert_eq!(sin_over_rate(0.0, 2.0), 2.0);
    }

    #[test]
    fn reference_angle_matches_arctan_on_principal_branch() {
        for k in 1..15 {
            let p = standard(0.4, k as f64 * 0.1);
            let gt = p.phase();
            assert!(gt < FRAC_PI_2);
            let arctan = ((p.detuning / p.rate()) * gt.tan()).atan();
            let u = build_propagator(&p).unwrap();
            assert!((u.reference_angle() - arctan).abs() < 1e-14);
        }
        // past gt = π/2 the arg form stays continuous while arctan jumps by π
        let before = build_propagator(&standard(0.4, (FRAC_PI_2 - 1e-6) / 1.2f64.sqrt())).unwrap();
        let after = build_propagator(&standard(0.4, (FRAC_PI_2 + 1e-6) / 1.2f64.sqrt())).unwrap();
        assert!((before.reference_angle() - after.reference_angle()).abs() < 1e-5);
        let _ = PI;
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = CouplingParams> {
            (0.0f64..2.0, 0.0f64..2.0, -2.0f64..2.0, 0.0f64..PI)
                .prop_filter("non-degenerate", |(a, s, _, _)| a.hypot(*s) > 1e-3)
                .prop_map(|(a, s, d, t)| CouplingParams::new(a, s, d, t).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn three_routes_agree(p in params()) {
                let closed = build_propagator(&p).unwrap();
                prop_assert!(closed.unitarity_defect() < 1e-12);
                prop_assert!(closed.max_deviation(&propagator_via_modes(&p).unwrap()) < 1e-12);
                prop_assert!(closed.max_deviation(&propagator_via_generator(&p).unwrap()) < 1e-10);
                prop_assert!(max_abs(&(closed.entries() - oracle(&p))) < 1e-10);
            }

            #[test]
            fn composition_holds(p in params(), t2 in 0.0f64..PI) {
                let later = build_propagator(&p.with_time(t2)).unwrap();
                let earlier = build_propagator(&p).unwrap();
                let total = build_propagator(&p.with_time(p.time + t2)).unwrap();
                prop_assert!((later * earlier).max_deviation(&total) < 1e-10);
            }
        }
    }
}
