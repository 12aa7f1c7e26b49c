use serde::{Deserialize, Serialize};

use crate::{Error, Mode, Result};

/// Default photon-number cutoff per mode (dimension 1331).
pub const DEFAULT_N_MAX: usize = 10;
/// Hard ceiling on the cutoff (dimension 4913).
pub const MAX_N_MAX: usize = 16;

/// Three-mode Fock basis cut at `n_max` photons per mode.
///
/// Flat index of |n₋₁, n₀, n₁⟩ is n₋₁(N+1)² + n₀(N+1) + n₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockBasis {
    n_max: usize,
}

impl FockBasis {
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_ceiling(n_max, MAX_N_MAX)
    }

    pub fn with_ceiling(n_max: usize, ceiling: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::validation("n_max", "cutoff must be at least 1"));
        }
        if n_max > ceiling {
            return Err(Error::Resource(format!(
                "cutoff {n_max} exceeds the ceiling {ceiling} (dimension {} > {})",
                (n_max + 1).pow(3),
                (ceiling + 1).pow(3)
            )));
        }
        Ok(FockBasis { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Levels per mode, N + 1.
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn dimension(&self) -> usize {
        self.levels().pow(3)
    }

    /// Flat index of an occupation triple in storage order, or `None` if any
    /// occupation exceeds the cutoff.
    pub fn index(&self, occupation: [usize; 3]) -> Option<usize> {
        if occupation.iter().any(|&n| n > self.n_max) {
            return None;
        }
        let l = self.levels();
        Some((occupation[0] * l + occupation[1]) * l + occupation[2])
    }

    pub fn occupation(&self, index: usize) -> [usize; 3] {
        let l = self.levels();
        [index / (l * l), (index / l) % l, index % l]
    }

    /// Index of the state with one photon moved by `delta` in `mode`.
    pub(crate) fn shifted(&self, index: usize, mode: Mode, delta: isize) -> Option<usize> {
        let mut occ = self.occupation(index);
        let n = occ[mode.index()].checked_add_signed(delta)?;
        occ[mode.index()] = n;
        self.index(occ)
    }

    pub fn total_photons(&self, index: usize) -> usize {
        self.occupation(index).iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout() {
        let b = FockBasis::new(DEFAULT_N_MAX).unwrap();
        assert_eq!(b.dimension(), 1331);
        assert_eq!(b.index([1, 0, 0]), Some(121));
        assert_eq!(b.index([0, 1, 0]), Some(11));
        assert_eq!(b.index([0, 0, 1]), Some(1));
        assert_eq!(b.index([0, 11, 0]), None);
        for i in 0..b.dimension() {
            assert_eq!(b.index(b.occupation(i)), Some(i));
        }
    }

    #[test]
    fn ceiling() {
        assert_eq!(FockBasis::new(MAX_N_MAX).unwrap().dimension(), 4913);
        assert!(matches!(FockBasis::new(17), Err(Error::Resource(_))));
        assert!(FockBasis::new(0).is_err());
        assert!(FockBasis::with_ceiling(5, 4).is_err());
    }
}
