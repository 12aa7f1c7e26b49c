//! g⁽ⁿ⁾ of the input probe reappears unchanged in all three output modes.

use num_complex::Complex64;
use raman_multiplex::statistics::{autocorrelation, propagate_moments};
use raman_multiplex::{build_propagator, CouplingParams, Mode, MomentSet, ProbeState};

fn main() -> raman_multiplex::Result<()> {
    let p = CouplingParams::new(0.5, 0.9, 0.3, 0.8)?;
    let u = build_propagator(&p)?;
    let inputs = [
        ("coherent α = 0.5", ProbeState::Coherent { alpha: Complex64::new(0.5, 0.0) }),
        ("Fock n = 2", ProbeState::Fock { n: 2 }),
        ("thermal n̄ = 0.2", ProbeState::Thermal { mean: 0.2 }),
    ];
    for (name, state) in inputs {
        let probe = state.moments(4);
        let out = propagate_moments(&MomentSet::from_probe(&probe), &u)?;
        println!("{name}");
        for n in 2..=4 {
            let shared = autocorrelation(&probe, n)?.value;
            let per_mode: Vec<String> = Mode::ALL
                .iter()
                .map(|&q| format!("{:.12}", out.autocorrelation(q, n).unwrap_or(f64::NAN)))
                .collect();
            println!("  g({n}) input {shared:.12}  output {}", per_mode.join(" "));
        }
        let g_kl = out.cross_correlation(Mode::Stokes, Mode::AntiStokes)?;
        println!("  g(-1,1) = {g_kl:.12}");
    }
    Ok(())
}
