//! A classical (coherent-mixture) probe stays classical: every component is
//! moved by U and the weights are untouched.

use raman_multiplex::states::{sample_thermal_mixture, separability_witness, transform_mixture};
use raman_multiplex::{build_propagator, CouplingParams, Mode};

fn main() -> raman_multiplex::Result<()> {
    let p = CouplingParams::new(1.1, 0.4, -0.7, 1.0)?;
    let u = build_propagator(&p)?;
    let thermal = sample_thermal_mixture(0.3, 2000, 7)?;
    let out = transform_mixture(&thermal, &u);
    let weights_same = thermal
        .components()
        .iter()
        .zip(out.components())
        .all(|((a, _), (b, _))| a == b);
    println!("weights unchanged: {weights_same}");
    for q in Mode::ALL {
        let n = out.number_moment(q, 1);
        let g2 = out.number_moment(q, 2) / (n * n);
        println!("{:>10}: ⟨n⟩ = {n:.6}, sampled g(2) = {g2:.4}", format!("{q:?}"));
    }
    let class = match separability_witness(&out) {
        raman_multiplex::Separability::SeparableByConstruction { decomposition } => {
            format!("separable by construction ({} components)", decomposition.len())
        }
        other => format!("{other:?}"),
    };
    println!("{class}");
    Ok(())
}
