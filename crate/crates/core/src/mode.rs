use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the three field modes.
///
/// Storage order is fixed crate-wide: Stokes (q = -1) at index 0, probe
/// (q = 0) at index 1, anti-Stokes (q = +1) at index 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Stokes,
    Probe,
    AntiStokes,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Stokes, Mode::Probe, Mode::AntiStokes];

    /// Storage index (0, 1, 2).
    pub const fn index(self) -> usize {
        match self {
            Mode::Stokes => 0,
            Mode::Probe => 1,
            Mode::AntiStokes => 2,
        }
    }

    /// Sideband order q (-1, 0, +1).
    pub const fn order(self) -> i32 {
        self.index() as i32 - 1
    }

    pub fn from_index(index: usize) -> Option<Mode> {
        Mode::ALL.get(index).copied()
    }

    pub fn from_order(order: i32) -> Option<Mode> {
        Mode::from_index(usize::try_from(order + 1).ok()?)
    }

    pub const fn is_sideband(self) -> bool {
        !matches!(self, Mode::Probe)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Stokes => "Stokes",
            Mode::Probe => "probe",
            Mode::AntiStokes => "anti-Stokes",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_order_agree() {
        for mode in Mode::ALL {
            assert_eq!(Mode::from_index(mode.index()), Some(mode));
            assert_eq!(Mode::from_order(mode.order()), Some(mode));
        }
        assert_eq!(Mode::from_order(2), None);
        assert_eq!(Mode::from_order(-2), None);
    }
}
