//! Mean photon numbers of a Fock-2 probe over time, as CSV on stdout.

use raman_multiplex::statistics::propagate_moments;
use raman_multiplex::{build_propagator, CouplingParams, Mode, MomentSet, ProbeState};

fn main() -> raman_multiplex::Result<()> {
    let base = CouplingParams::new(0.6, 0.8, 0.2, 0.0)?;
    let input = MomentSet::from_probe(&ProbeState::Fock { n: 2 }.moments(2));
    println!("t,n_m1,n_0,n_1,total");
    for k in 0..=32 {
        let t = std::f64::consts::PI * k as f64 / 32.0;
        let out = propagate_moments(&input, &build_propagator(&base.with_time(t))?)?;
        let n = Mode::ALL.map(|q| out.mean_photons(q));
        println!("{t:.6},{:.9},{:.9},{:.9},{:.9}", n[0], n[1], n[2], out.total_photons());
    }
    Ok(())
}
