//! A single-photon-number probe becomes a tripartite entangled state.

use raman_multiplex::states::{fock_output, separability_witness};
use raman_multiplex::{build_propagator, CouplingParams, Separability};

fn main() -> raman_multiplex::Result<()> {
    let p = CouplingParams::new(0.6, 0.8, 0.0, std::f64::consts::FRAC_PI_2)?;
    let u = build_propagator(&p)?;
    for n in 1..=3 {
        let table = fock_output(n, &u);
        println!("n = {n}");
        for (occ, c) in table.components().filter(|(_, c)| c.norm() > 1e-12) {
            println!("  |{},{},{}⟩  {:+.6}{:+.6}i", occ[0], occ[1], occ[2], c.re, c.im);
        }
        match separability_witness(&table) {
            Separability::Entangled { purities } => println!("  entangled, reduced purities {purities:.6?}"),
            other => println!("  {other:?}"),
        }
    }
    Ok(())
}
