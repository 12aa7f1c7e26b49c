use std::fmt;

use serde::{Deserialize, Serialize};

/// Above this value of g·t second-order sidebands stop being negligible.
pub const VALIDITY_BOUND_GT: f64 = 0.5;

/// Non-fatal conditions collected while running a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// g·t exceeds [`VALIDITY_BOUND_GT`].
    ValidityBound { gt: f64 },
    /// Raman coherence magnitude above 1/2.
    CoherenceAboveHalf { rho0: f64 },
    Truncation {
        what: String,
        mass: f64,
        tolerance: f64,
    },
    EmptyCurve { name: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ValidityBound { gt } => write!(
                f,
                "g*t = {gt:.4} exceeds {VALIDITY_BOUND_GT}; higher-order sidebands are no longer negligible"
            ),
            Warning::CoherenceAboveHalf { rho0 } => {
                write!(f, "coherence magnitude {rho0} exceeds the two-level bound 0.5")
            }
            Warning::Truncation {
                what,
                mass,
                tolerance,
            } => write!(f, "{what} mass {mass:.3e} is not below {tolerance:.1e}"),
            Warning::EmptyCurve { name } => write!(f, "curve `{name}` is empty; no file written"),
        }
    }
}

/// Adds warnings to a list, keeping one entry per kind and subject: repeated
/// truncation warnings keep the largest mass, validity warnings the largest
/// g·t.
pub fn merge_warnings(list: &mut Vec<Warning>, new: impl IntoIterator<Item = Warning>) {
    for w in new {
        let slot = list.iter_mut().find(|old| match (&**old, &w) {
            (Warning::ValidityBound { .. }, Warning::ValidityBound { .. }) => true,
            (
                Warning::Truncation { what: a, tolerance: ta, .. },
                Warning::Truncation { what: b, tolerance: tb, .. },
            ) => a == b && ta == tb,
            (a, b) => a == b,
        });
        match (slot, w) {
            (None, w) => list.push(w),
            (Some(Warning::ValidityBound { gt }), Warning::ValidityBound { gt: new }) => *gt = gt.max(new),
            (Some(Warning::Truncation { mass, .. }), Warning::Truncation { mass: new, .. }) => {
                *mass = mass.max(new)
            }
            (Some(_), _) => {}
        }
    }
}
