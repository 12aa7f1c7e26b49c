//! Squeezed probe: the sidebands inherit the probe's squeezing, scaled by
//! |u0q|² and rotated by π/2.

use raman_multiplex::statistics::{squeezing_transfer, PhaseGrid};
use raman_multiplex::{CouplingParams, ProbeState};

fn main() -> raman_multiplex::Result<()> {
    let p = CouplingParams::new(0.6, 0.8, 0.0, std::f64::consts::FRAC_PI_2)?;
    let probe = ProbeState::Squeezed { r: 0.3, theta: 0.0 }.moments(4);
    let report = squeezing_transfer(&probe, &p, &PhaseGrid::uniform(360)?)?;
    println!("φ_L = {:.6}", report.reference_angle);
    for m in &report.modes {
        println!(
            "{:>10}: min S = {:+.9} at φ = {:.6} (exact {:+.9} at {:.6}), ⟨n⟩ = {:.6}",
            format!("{:?}", m.mode), m.minimum, m.minimum_phase, m.exact_minimum, m.exact_minimum_phase, m.mean_photons
        );
    }
    println!("input minimum e^(-2r) - 1 = {:+.9}", (-0.6f64).exp() - 1.0);
    println!("normalized-relation residual = {:.2e}", report.relation_residual);
    Ok(())
}
