use num_complex::Complex64;

/// Row-compressed complex matrix; rows hold `(column, value)` sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))))
    }

    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside {dim}x{dim}");
            rows[r].push((c, v));
        }
        for row in &mut rows {
            compress(row);
        }
        SparseMatrix { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map_or(Complex64::new(0.0, 0.0), |k| self.rows[r][k].1)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (r, c, k * v)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = Vec::new();
                for &(k, a) in row {
                    out.extend(other.rows[k].iter().map(|&(c, b)| (c, a * b)));
                }
                compress(&mut out);
                out
            })
            .collect();
        SparseMatrix {
            dim: self.dim,
            rows,
        }
    }

    /// AB − BA
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.triplets().all(|(r, c, v)| self.get(c, r) == v.conj())
    }
}

fn compress(row: &mut Vec<(usize, Complex64)>) {
    row.sort_by_key(|&(c, _)| c);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
    for &(c, v) in row.iter() {
        match out.last_mut() {
            Some((last, acc)) if *last == c => *acc += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| *v != Complex64::new(0.0, 0.0));
    *row = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn products_and_duplicates() {
        let a = SparseMatrix::from_triplets(2, [(0, 1, c(2.0)), (0, 1, c(1.0)), (1, 0, c(4.0))]);
        assert_eq!(a.get(0, 1), c(3.0));
        let aa = a.matmul(&a);
        assert_eq!(aa.get(0, 0), c(12.0));
        assert_eq!(aa.get(1, 1), c(12.0));
        assert_eq!(aa.nnz(), 2);
        assert_eq!(a.commutator(&a).nnz(), 0);
        assert_eq!(a.apply(&[c(1.0), c(1.0)]), vec![c(3.0), c(4.0)]);
        assert!(!a.is_hermitian());
        assert!(a.add(&a.adjoint()).is_hermitian());
    }
}
