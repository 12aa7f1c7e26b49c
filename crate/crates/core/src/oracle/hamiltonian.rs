use num_complex::Complex64;

use super::{annihilation_matrix, FockBasis, Operator, SparseMatrix};
use crate::{CouplingParams, Mode, Result};

/// H/ħ = Δ(b₁†b₁ + b₋₁†b₋₁ − b₀†b₀)
///       − g₁(b₀b₁† + b₁b₀†) − g₋₁(b₀b₋₁† + b₋₁b₀†)
///
/// built from truncated ladder matrices.
pub fn hamiltonian_matrix(basis: &FockBasis, p: &CouplingParams) -> Result<Operator> {
    p.validate()?;
    let b = Mode::ALL.map(|q| annihilation_matrix(basis, q));
    let bd = b.clone().map(|m| m.adjoint());
    let [s, pr, a] = [Mode::Stokes, Mode::Probe, Mode::AntiStokes].map(Mode::index);
    let re = |x: f64| Complex64::new(x, 0.0);

    let number = |i: usize| bd[i].matmul(&b[i]);
    let detuning = number(a)
        .add(&number(s))
        .sub(&number(pr))
        .scale(re(p.detuning));
    let exchange = |i: usize, g: f64| {
        b[pr]
            .matmul(&bd[i])
            .add(&b[i].matmul(&bd[pr]))
            .scale(re(-g))
    };
    let h: SparseMatrix = detuning
        .add(&exchange(a, p.g_anti))
        .add(&exchange(s, p.g_stokes));
    Operator::new(*basis, h)
}
