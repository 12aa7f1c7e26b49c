//! Three-mode quantum model of a weak probe field beating with a prepared
//! Raman coherence.
//!
//! The probe (q = 0) exchanges photons with a Stokes (q = −1) and an
//! anti-Stokes (q = 1) sideband through the linear coupled-mode equations
//!
//! ```text
//! db₋₁/dt = i(−Δ b₋₁ + g₋₁ b₀)
//! db₀/dt  = i( Δ b₀  + g₋₁ b₋₁ + g₁ b₁)
//! db₁/dt  = i(−Δ b₁ + g₁ b₀)
//! ```
//!
//! whose solution is b(t) = U(t) b(0) with a 3×3 unitary U.
//!
//! * [`params`] turns raw medium parameters into (g₁, g₋₁, Δ, t).
//! * [`propagator`] builds U in closed form (plus two independent routes).
//! * [`statistics`] propagates moments: g⁽ⁿ⁾, cross-correlations, squeezing.
//! * [`states`] covers coherent, Fock and classical-mixture inputs.
//! * [`oracle`] is a brute-force truncated Fock-space check of all of it.
//! * [`experiment`] runs JSON-configured scenarios and writes reports.
//!
//! Arrays indexed by mode use storage order Stokes, probe, anti-Stokes.

pub mod error;
pub mod experiment;
pub mod mode;
pub mod oracle;
pub mod params;
pub mod propagator;
pub mod states;
pub mod statistics;
pub mod warning;

pub use error::{Error, Result};
pub use mode::Mode;
pub use params::{derive_couplings, CouplingParams, Derivation, PhysicalConfig};
pub use propagator::{build_propagator, PropagatorMatrix};
pub use states::{CoherentMixture, CoherentTriple, ProbeState, Separability, TripartiteFockOutput};
pub use statistics::{MomentSet, ProbeMoments};
pub use warning::Warning;
