//! Prints the 3×3 propagator and checks it against the two other routes.

use raman_multiplex::propagator::{decompose_modes, propagator_via_generator, propagator_via_modes};
use raman_multiplex::{build_propagator, CouplingParams, Mode};

fn main() -> raman_multiplex::Result<()> {
    let p = CouplingParams::new(0.6, 0.8, 0.3, 1.2)?;
    let u = build_propagator(&p)?;
    println!("g_c = {:.6}, g = {:.6}, g·t = {:.6}", p.coupled_rate(), p.rate(), p.rate() * p.time);
    for row in Mode::ALL {
        let cells: Vec<String> = Mode::ALL
            .iter()
            .map(|&col| {
                let z = u.get(row, col);
                format!("{:+.6}{:+.6}i", z.re, z.im)
            })
            .collect();
        println!("{:>11}: {}", format!("{row:?}"), cells.join("  "));
    }
    println!("|U†U − I|          = {:.2e}", u.unitarity_defect());
    println!("vs mode route      = {:.2e}", u.max_deviation(&propagator_via_modes(&p)?));
    println!("vs generator route = {:.2e}", u.max_deviation(&propagator_via_generator(&p)?));
    println!("φ_L = arg u00      = {:.6}", u.reference_angle());
    let d = decompose_modes(&p)?;
    println!("normal-mode frequencies (b_u, b+, b-) = {:?}", d.frequencies);
    Ok(())
}
