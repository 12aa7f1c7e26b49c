//! A coherent probe stays a product of coherent states; the oracle agrees.

use num_complex::Complex64;
use raman_multiplex::oracle::{FockBasis, Oracle, OracleSettings};
use raman_multiplex::states::evolve_coherent;
use raman_multiplex::{build_propagator, CoherentTriple, CouplingParams};

fn main() -> raman_multiplex::Result<()> {
    let p = CouplingParams::new(0.6, 0.8, 0.0, std::f64::consts::FRAC_PI_2)?;
    let input = CoherentTriple::probe(Complex64::new(0.5, 0.0));
    let output = evolve_coherent(&input, &build_propagator(&p)?);
    let shown: Vec<String> = output.0.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
    println!("output amplitudes (Stokes, probe, anti-Stokes): {}", shown.join(", "));

    let basis = FockBasis::new(10)?;
    let oracle = Oracle::new(&p, OracleSettings::default())?;
    let evolved = oracle.evolve(&input.to_oracle(basis))?;
    let fidelity = evolved.state.fidelity(&output.to_oracle(basis))?;
    println!("oracle fidelity with the product coherent state: 1 - {:.2e}", 1.0 - fidelity);
    Ok(())
}
