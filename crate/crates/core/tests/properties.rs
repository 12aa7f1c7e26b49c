//! Randomized invariants across the public API.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use raman_multiplex::experiment::{OracleObservables, SharedProbeInput};
use raman_multiplex::oracle::{FockBasis, MixedState, Oracle, OracleSettings};
use raman_multiplex::propagator::decompose_modes;
use raman_multiplex::states::{evolve_coherent, fock_output, transform_mixture};
use raman_multiplex::statistics::propagate_moments;
use raman_multiplex::{
    build_propagator, CoherentMixture, CoherentTriple, CouplingParams, Mode, MomentSet, ProbeState,
};

fn params() -> impl Strategy<Value = CouplingParams> {
    (0.0f64..2.0, 0.0f64..2.0, -2.0f64..2.0, 0.0f64..PI)
        .prop_filter("not both zero", |(a, s, _, _)| a.hypot(*s) > 1e-3)
        .prop_map(|(a, s, d, t)| CouplingParams::new(a, s, d, t).unwrap())
}

fn complex(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn triple(max: f64) -> impl Strategy<Value = CoherentTriple> {
    (complex(max), complex(max), complex(max)).prop_map(|(a, b, c)| CoherentTriple([a, b, c]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rates_are_ordered(p in params()) {
        prop_assert!(p.rate() >= p.coupled_rate());
        prop_assert!(p.coupled_rate() > 0.0);
    }

    #[test]
    fn invalid_couplings_are_rejected(g in 0.01f64..2.0, t in 0.0f64..PI) {
        prop_assert!(CouplingParams::new(-g, 1.0, 0.0, t).is_err());
        prop_assert!(CouplingParams::new(1.0, -g, 0.0, t).is_err());
        prop_assert!(CouplingParams::new(1.0, 1.0, 0.0, -g).is_err());
        prop_assert!(CouplingParams::new(0.0, 0.0, g, t).is_err());
    }

    #[test]
    fn propagator_symmetry_is_exact(p in params()) {
        let u = build_propagator(&p).unwrap();
        let (s, o, a) = (Mode::Stokes, Mode::Probe, Mode::AntiStokes);
        prop_assert_eq!(u.get(s, a), u.get(a, s));
        prop_assert_eq!(u.get(o, s), u.get(s, o));
        prop_assert_eq!(u.get(o, a), u.get(a, o));
    }

    #[test]
    fn mode_bases_are_orthonormal(p in params()) {
        let d = decompose_modes(&p).unwrap();
        prop_assert!((d.coupled().norm() - 1.0).abs() < 1e-14);
        prop_assert!(d.coupled().dot(&d.uncoupled()).abs() < 1e-14);
        let r = d.basis_change();
        prop_assert!((r * r.transpose() - Matrix3::identity()).amax() < 1e-12);
    }

    #[test]
    fn coherent_evolution_conserves_photons(p in params(), input in triple(2.0)) {
        let out = evolve_coherent(&input, &build_propagator(&p).unwrap());
        prop_assert!((out.total_photons() - input.total_photons()).abs() < 1e-12 * (1.0 + input.total_photons()));
    }

    #[test]
    fn mixture_transport_keeps_weights(
        p in params(),
        parts in prop::collection::vec((0.05f64..1.0, triple(1.0)), 1..6),
    ) {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        let input = CoherentMixture::new(parts.iter().map(|(w, t)| (w / total, *t)).collect()).unwrap();
        let u = build_propagator(&p).unwrap();
        let out = transform_mixture(&input, &u);
        for ((w_in, t_in), (w_out, t_out)) in input.components().iter().zip(out.components()) {
            prop_assert_eq!(w_in, w_out);
            prop_assert_eq!(evolve_coherent(t_in, &u), *t_out);
        }
        let sum: f64 = out.components().iter().map(|(w, _)| w).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_tables_are_normalized(p in params(), n in 0usize..9) {
        let table = fock_output(n, &build_propagator(&p).unwrap());
        prop_assert!((table.norm_sqr() - 1.0).abs() < 1e-12);
        for q in Mode::ALL {
            let dist = table.mode_distribution(q);
            prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn propagated_second_moments_are_physical(p in params(), r in 0.0f64..0.6, theta in 0.0f64..PI, alpha in complex(1.0)) {
        // squeezed coherent probe: displace the squeezed vacuum moments
        let vac = ProbeState::Squeezed { r, theta }.moments(2);
        let mut probe = vac.clone();
        probe.mean = alpha;
        probe.pair = vac.pair + alpha * alpha;
        probe.factorial[0] = vac.factorial[0] + alpha.norm_sqr();
        let out = propagate_moments(&MomentSet::from_probe(&probe), &build_propagator(&p).unwrap()).unwrap();
        let h = out.hermitian;
        prop_assert!((h - h.adjoint()).camax() < 1e-12);
        // real part of a Hermitian PSD matrix is PSD
        let eig = SymmetricEigen::new(h.map(|z| z.re)).eigenvalues;
        prop_assert!(eig.min() > -1e-12);
        for k in 0..3 {
            prop_assert!(h[(k, k)].re >= -1e-15);
            for l in 0..3 {
                prop_assert!(h[(k, l)].norm_sqr() <= h[(k, k)].re * h[(l, l)].re + 1e-12);
            }
        }
        for q in Mode::ALL {
            for k in 0..16 {
                let phi = PI * k as f64 / 16.0;
                prop_assert!(out.squeezing(q, phi) + 1.0 >= -1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn oracle_matches_closed_form(p in params(), alpha in complex(0.6), n in 0usize..4) {
        let basis = FockBasis::new(10).unwrap();
        for probe in [ProbeState::Coherent { alpha }, ProbeState::Fock { n }] {
            let SharedProbeInput { moments, oracle: input, .. } =
                raman_multiplex::experiment::shared_probe_input(&[(1.0, probe)], basis, 2).unwrap();
            let closed = propagate_moments(&MomentSet::from_probe(&moments), &build_propagator(&p).unwrap()).unwrap();
            let oracle = Oracle::new(&p, OracleSettings::default()).unwrap();
            let evolved = oracle.evolve_mixture_for(&input, p.time).unwrap().state;
            let m = OracleObservables::new(basis, 2).measure(&evolved).unwrap();
            for q in Mode::ALL {
                prop_assert!((closed.first[q.index()] - m.first[q.index()]).norm() < 1e-8);
                prop_assert!((closed.mean_photons(q) - m.mean_photons(q)).abs() < 1e-8);
            }
            prop_assert!((m.total_photons() - closed.total_photons()).abs() < 1e-8);
        }
    }

    #[test]
    fn oracle_mixture_is_weight_linear(p in params(), a in triple(0.4), b in triple(0.4), w in 0.1f64..0.9) {
        let basis = FockBasis::new(10).unwrap();
        let oracle = Oracle::new(&p, OracleSettings::default()).unwrap();
        let obs = OracleObservables::new(basis, 2);
        let measure = |m: &CoherentMixture| -> MixedState {
            oracle.evolve_mixture_for(&m.to_oracle(basis).unwrap(), p.time).unwrap().state
        };
        let mixed = obs.measure(&measure(&CoherentMixture::new(vec![(w, a), (1.0 - w, b)]).unwrap())).unwrap();
        let ma = obs.measure(&measure(&CoherentMixture::single(a))).unwrap();
        let mb = obs.measure(&measure(&CoherentMixture::single(b))).unwrap();
        for q in Mode::ALL {
            let blend = w * ma.mean_photons(q) + (1.0 - w) * mb.mean_photons(q);
            prop_assert!((mixed.mean_photons(q) - blend).abs() < 1e-10);
        }
    }
}

#[test]
fn flat_index_layout() {
    let basis = FockBasis::new(4).unwrap();
    for i in 0..basis.dimension() {
        let [a, b, c] = basis.occupation(i);
        assert_eq!(i, a * 25 + b * 5 + c);
        assert_eq!(basis.index([a, b, c]), Some(i));
    }
}
