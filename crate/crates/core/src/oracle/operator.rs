use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::{FockBasis, SparseMatrix};
use crate::{Error, Mode, Result};

/// Truncated b_q: ⟨n−1|b|n⟩ = √n on the given mode, identity elsewhere.
pub fn annihilation_matrix(basis: &FockBasis, mode: Mode) -> SparseMatrix {
    let triplets = (0..basis.dimension()).filter_map(|col| {
        let n = basis.occupation(col)[mode.index()];
        let row = basis.shifted(col, mode, -1)?;
        Some((row, col, Complex64::new((n as f64).sqrt(), 0.0)))
    });
    SparseMatrix::from_triplets(basis.dimension(), triplets)
}

pub fn creation_matrix(basis: &FockBasis, mode: Mode) -> SparseMatrix {
    annihilation_matrix(basis, mode).adjoint()
}

/// A sparse matrix tied to the basis it was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: FockBasis,
    matrix: SparseMatrix,
}

impl Operator {
    pub fn new(basis: FockBasis, matrix: SparseMatrix) -> Result<Self> {
        if matrix.dim() != basis.dimension() {
            return Err(Error::Resource(format!(
                "matrix dimension {} does not match basis dimension {}",
                matrix.dim(),
                basis.dimension()
            )));
        }
        Ok(Operator { basis, matrix })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub(crate) fn check_basis(&self, basis: &FockBasis) -> Result<()> {
        if &self.basis == basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                operator: self.basis.n_max(),
                state: basis.n_max(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Annihilate(Mode),
    Create(Mode),
}

/// Linear combination of ladder-operator products, applied right to left.
///
/// Products are evaluated with the truncated matrices as written; keep them
/// normally ordered, since b b† is wrong on the cutoff level.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observable {
    terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl Observable {
    pub fn identity() -> Self {
        Observable {
            terms: vec![(Complex64::new(1.0, 0.0), Vec::new())],
        }
    }

    pub fn product(ops: impl IntoIterator<Item = Ladder>) -> Self {
        Observable {
            terms: vec![(Complex64::new(1.0, 0.0), ops.into_iter().collect())],
        }
    }

    pub fn annihilate(mode: Mode) -> Self {
        Self::product([Ladder::Annihilate(mode)])
    }

    pub fn create(mode: Mode) -> Self {
        Self::product([Ladder::Create(mode)])
    }

    pub fn number(mode: Mode) -> Self {
        Self::normal_moment(mode, 1)
    }

    /// b†ⁿ bⁿ
    pub fn normal_moment(mode: Mode, n: usize) -> Self {
        Self::product(
            std::iter::repeat_n(Ladder::Create(mode), n)
                .chain(std::iter::repeat_n(Ladder::Annihilate(mode), n)),
        )
    }

    /// b_q b_{q'}
    pub fn pair(q: Mode, q2: Mode) -> Self {
        Self::product([Ladder::Annihilate(q), Ladder::Annihilate(q2)])
    }

    /// b_q† b_{q'}
    pub fn hopping(q: Mode, q2: Mode) -> Self {
        Self::product([Ladder::Create(q), Ladder::Annihilate(q2)])
    }

    pub fn scale(mut self, k: Complex64) -> Self {
        for (c, _) in &mut self.terms {
            *c *= k;
        }
        self
    }

    pub fn terms(&self) -> &[(Complex64, Vec<Ladder>)] {
        &self.terms
    }

    pub fn to_operator(&self, basis: &FockBasis) -> Operator {
        let dim = basis.dimension();
        let mut total = SparseMatrix::zeros(dim);
        for (coef, ops) in &self.terms {
            let mut m = SparseMatrix::identity(dim);
            for op in ops {
                let factor = match *op {
                    Ladder::Annihilate(q) => annihilation_matrix(basis, q),
                    Ladder::Create(q) => creation_matrix(basis, q),
                };
                m = m.matmul(&factor);
            }
            total = total.add(&m.scale(*coef));
        }
        Operator {
            basis: *basis,
            matrix: total,
        }
    }
}

impl Add for Observable {
    type Output = Observable;

    fn add(mut self, rhs: Observable) -> Observable {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Sub for Observable {
    type Output = Observable;

    fn sub(self, rhs: Observable) -> Observable {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Observable {
    type Output = Observable;

    fn mul(self, rhs: Observable) -> Observable {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, left) in &self.terms {
            for (b, right) in &rhs.terms {
                terms.push((a * b, left.iter().chain(right).copied().collect()));
            }
        }
        Observable { terms }
    }
}
