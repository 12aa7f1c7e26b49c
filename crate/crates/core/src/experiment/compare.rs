//! Closed-form moments against the truncated Fock-space oracle.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::oracle::{FockBasis, MixedState, Observable, Operator};
use crate::states::{CoherentMixture, ProbeState};
use crate::statistics::{squeezing_factor, MomentSet, ProbeMoments};
use crate::{Mode, Result};

/// Operators for every tracked moment on one basis.
pub struct OracleObservables {
    basis: FockBasis,
    annihilate: Vec<Operator>,
    pair: Vec<Vec<Operator>>,
    hopping: Vec<Vec<Operator>>,
    /// normal_moment(q, n) at [q][n − 1]
    normal: Vec<Vec<Operator>>,
    cross: Vec<Vec<Operator>>,
}

/// Moments measured on an oracle state.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMoments {
    pub first: [Complex64; 3],
    pub pair: Matrix3<Complex64>,
    pub hermitian: Matrix3<Complex64>,
    /// ⟨b_q†ⁿb_qⁿ⟩ at [q][n − 1]
    pub number_moments: [Vec<f64>; 3],
    /// ⟨n_k n_l⟩
    pub cross: Matrix3<f64>,
}

impl OracleMoments {
    pub fn mean_photons(&self, q: Mode) -> f64 {
        self.number_moments[q.index()][0]
    }

    pub fn total_photons(&self) -> f64 {
        Mode::ALL.iter().map(|&q| self.mean_photons(q)).sum()
    }

    pub fn squeezing(&self, q: Mode, phi: f64) -> f64 {
        let i = q.index();
        squeezing_factor(self.first[i], self.pair[(i, i)], self.mean_photons(q), phi)
    }

    /// Ratio ⟨b†ⁿbⁿ⟩/⟨n⟩ⁿ, only where ⟨n_q⟩ ≥ `floor`.
    pub fn autocorrelation(&self, q: Mode, n: usize, floor: f64) -> Option<f64> {
        let mean = self.mean_photons(q);
        (mean >= floor).then(|| self.number_moments[q.index()][n - 1] / mean.powi(n as i32))
    }
}

impl OracleObservables {
    pub fn new(basis: FockBasis, n_top: usize) -> Self {
        let op = |o: Observable| o.to_operator(&basis);
        let modes = Mode::ALL;
        OracleObservables {
            basis,
            annihilate: modes.iter().map(|&q| op(Observable::annihilate(q))).collect(),
            pair: modes
                .iter()
                .map(|&k| modes.iter().map(|&l| op(Observable::pair(k, l))).collect())
                .collect(),
            hopping: modes
                .iter()
                .map(|&k| modes.iter().map(|&l| op(Observable::hopping(k, l))).collect())
                .collect(),
            normal: modes
                .iter()
                .map(|&q| (1..=n_top).map(|n| op(Observable::normal_moment(q, n))).collect())
                .collect(),
            cross: modes
                .iter()
                .map(|&k| {
                    modes
                        .iter()
                        .map(|&l| op(Observable::number(k) * Observable::number(l)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn measure(&self, state: &MixedState) -> Result<OracleMoments> {
        let ev = |o: &Operator| state.expectation(o);
        let mut first = [Complex64::new(0.0, 0.0); 3];
        for (slot, o) in first.iter_mut().zip(&self.annihilate) {
            *slot = ev(o)?;
        }
        let mut pair = Matrix3::zeros();
        let mut hermitian = Matrix3::zeros();
        let mut cross = Matrix3::zeros();
        for k in 0..3 {
            for l in 0..3 {
                pair[(k, l)] = ev(&self.pair[k][l])?;
                hermitian[(k, l)] = ev(&self.hopping[k][l])?;
                cross[(k, l)] = ev(&self.cross[k][l])?.re;
            }
        }
        let mut number_moments: [Vec<f64>; 3] = Default::default();
        for (q, ops) in self.normal.iter().enumerate() {
            number_moments[q] = ops.iter().map(|o| ev(o).map(|z| z.re)).collect::<Result<_>>()?;
        }
        Ok(OracleMoments {
            first,
            pair,
            hermitian,
            number_moments,
            cross,
        })
    }
}

/// Largest absolute gap, per family of moments.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentGaps {
    pub first: f64,
    pub number: f64,
    pub second_factorial: f64,
    pub cross: f64,
    pub quadrature: f64,
    pub second_order: f64,
}

impl MomentGaps {
    pub fn max(&self) -> f64 {
        [
            self.first,
            self.number,
            self.second_factorial,
            self.cross,
            self.quadrature,
            self.second_order,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Phases at which quadrature variances are compared.
pub fn comparison_phases(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| std::f64::consts::PI * k as f64 / count as f64)
        .collect()
}

/// Gaps between a propagated moment set and oracle moments. Higher moments
/// are skipped when the moment set does not carry them.
pub fn moment_gaps(closed: &MomentSet, oracle: &OracleMoments, phases: &[f64]) -> MomentGaps {
    let mut g = MomentGaps::default();
    for q in Mode::ALL {
        let i = q.index();
        g.first = g.first.max((closed.first[i] - oracle.first[i]).norm());
        g.number = g.number.max((closed.mean_photons(q) - oracle.mean_photons(q)).abs());
        if let Ok(m2) = closed.number_moment(q, 2) {
            g.second_factorial = g.second_factorial.max((m2 - oracle.number_moments[i][1]).abs());
        }
        for &phi in phases {
            g.quadrature = g.quadrature.max((closed.squeezing(q, phi) - oracle.squeezing(q, phi)).abs());
        }
        for l in Mode::ALL {
            let j = l.index();
            g.second_order = g
                .second_order
                .max((closed.pair[(i, j)] - oracle.pair[(i, j)]).norm())
                .max((closed.hermitian[(i, j)] - oracle.hermitian[(i, j)]).norm());
            if l != q {
                if let Ok(c) = closed.cross_moment(q, l) {
                    g.cross = g.cross.max((c - oracle.cross[(i, j)]).abs());
                }
            }
        }
    }
    g
}

/// Moments of a coherent mixture: averages of amplitude products.
pub fn mixture_moment_set(mixture: &CoherentMixture, n_top: usize) -> MomentSet {
    let mut set = MomentSet::general(
        Mode::ALL.map(|q| mixture.first_moment(q)),
        Matrix3::from_fn(|k, l| mixture.pair_moment(Mode::ALL[k], Mode::ALL[l])),
        Matrix3::from_fn(|k, l| mixture.hopping_moment(Mode::ALL[k], Mode::ALL[l])),
        n_top,
    );
    set.number_moments = Some(Mode::ALL.map(|q| (1..=n_top).map(|n| mixture.number_moment(q, n)).collect()));
    set.cross_number = Some(Matrix3::from_fn(|k, l| {
        if k == l {
            0.0
        } else {
            mixture.cross_moment(Mode::ALL[k], Mode::ALL[l])
        }
    }));
    set
}

/// Probe input shared by both routes: every component is cut to the oracle
/// basis and renormalized, so closed form and oracle see the same state.
#[derive(Debug, Clone)]
pub struct SharedProbeInput {
    pub moments: ProbeMoments,
    pub oracle: MixedState,
    /// Weighted probability lost in the cut.
    pub discarded: f64,
}

pub fn shared_probe_input(
    components: &[(f64, ProbeState)],
    basis: FockBasis,
    n_top: usize,
) -> Result<SharedProbeInput> {
    let mut mean = Complex64::new(0.0, 0.0);
    let mut pair = Complex64::new(0.0, 0.0);
    let mut factorial = vec![0.0; n_top];
    let mut kets = Vec::new();
    let mut discarded = 0.0;
    for (w, state) in components {
        let cut = state.truncated(basis.n_max())?;
        discarded += w * cut.discarded;
        let m = cut.state.moments(n_top);
        mean += m.mean * *w;
        pair += m.pair * *w;
        for (acc, v) in factorial.iter_mut().zip(&m.factorial) {
            *acc += w * v;
        }
        for (w2, ket) in cut.state.to_oracle(basis)?.components() {
            kets.push((w * w2, ket.clone()));
        }
    }
    let total: f64 = kets.iter().map(|(w, _)| w).sum();
    for (w, _) in &mut kets {
        *w /= total;
    }
    Ok(SharedProbeInput {
        moments: ProbeMoments {
            mean,
            pair,
            factorial,
        },
        oracle: MixedState::new(kets)?,
        discarded,
    })
}
