//! Square nonnegative matrices and their 0/1 specialisation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything with a support digraph: edge `i -> j` whenever entry `(i, j)` is positive.
pub trait SupportDigraph {
    fn dim(&self) -> usize;
    fn has_edge(&self, i: usize, j: usize) -> bool;

    fn successors(&self) -> Vec<Vec<usize>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).filter(|&j| self.has_edge(i, j)).collect())
            .collect()
    }
}

/// Dense square matrix with nonnegative real entries, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct NonnegativeMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl NonnegativeMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(Error::NotSquare {
                    row,
                    len: entries.len(),
                    dim,
                });
            }
            for (col, value) in entries.into_iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidEntry {
                        row,
                        col,
                        value,
                        reason: "entries must be finite and nonnegative",
                    });
                }
                data.push(value);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn ones(dim: usize) -> Self {
        Self {
            dim,
            data: vec![1.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self { dim: d, data }
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ A`, returned as a column vector (equivalently `Aᵀ x`).
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (i, row) in self.data.chunks(d).enumerate() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o += xi * a;
            }
        }
        out
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        Self { dim: k, data }
    }

    pub fn zero_row(&self) -> Option<usize> {
        (0..self.dim).find(|&i| (0..self.dim).all(|j| self.get(i, j) == 0.0))
    }

    pub fn zero_column(&self) -> Option<usize> {
        (0..self.dim).find(|&j| (0..self.dim).all(|i| self.get(i, j) == 0.0))
    }
}

impl SupportDigraph for NonnegativeMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) > 0.0
    }
}

impl TryFrom<Vec<Vec<f64>>> for NonnegativeMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<NonnegativeMatrix> for Vec<Vec<f64>> {
    fn from(m: NonnegativeMatrix) -> Self {
        m.rows()
    }
}

/// Square matrix with entries in {0, 1}, such as the transition matrix of a
/// Markov subshift.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct ZeroOneMatrix {
    dim: usize,
    data: Vec<u8>,
    has_zero_row: bool,
    has_zero_column: bool,
}

impl ZeroOneMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(Error::NotSquare {
                    row,
                    len: entries.len(),
                    dim,
                });
            }
            for (col, value) in entries.into_iter().enumerate() {
                if value > 1 {
                    return Err(Error::InvalidEntry {
                        row,
                        col,
                        value: f64::from(value),
                        reason: "entries must be 0 or 1",
                    });
                }
                data.push(value);
            }
        }
        Ok(Self::from_data(dim, data))
    }

    fn from_data(dim: usize, data: Vec<u8>) -> Self {
        let has_zero_row = (0..dim).any(|i| (0..dim).all(|j| data[i * dim + j] == 0));
        let has_zero_column = (0..dim).any(|j| (0..dim).all(|i| data[i * dim + j] == 0));
        Self {
            dim,
            data,
            has_zero_row,
            has_zero_column,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1;
        }
        Self::from_data(dim, data)
    }

    pub fn ones(dim: usize) -> Self {
        Self::from_data(dim, vec![1; dim * dim])
    }

    /// `[[1,1],[1,0]]`.
    pub fn golden_mean() -> Self {
        Self::from_data(2, vec![1, 1, 1, 0])
    }

    /// Permutation matrix with `a[i][perm[i]] = 1`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in perm {
            if p >= d || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation of 0..{d}"
                )));
            }
        }
        let mut data = vec![0; d * d];
        for (i, &p) in perm.iter().enumerate() {
            data[i * d + p] = 1;
        }
        Ok(Self::from_data(d, data))
    }

    /// Cyclic permutation `i -> i+1 mod d`.
    pub fn cycle(dim: usize) -> Self {
        let perm: Vec<usize> = (0..dim).map(|i| (i + 1) % dim).collect();
        Self::permutation(&perm).expect("cycle is a permutation")
    }

    pub fn block_diagonal(blocks: &[ZeroOneMatrix]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut data = vec![0; dim * dim];
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    data[(offset + i) * dim + offset + j] = b.get(i, j);
                }
            }
            offset += b.dim;
        }
        Self::from_data(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.get(i, j) == 1
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn has_zero_row(&self) -> bool {
        self.has_zero_row
    }

    pub fn has_zero_column(&self) -> bool {
        self.has_zero_column
    }

    /// Checks the standing hypothesis for a Cuntz-Krieger system: no zero
    /// row and no zero column.
    pub fn check_no_zero_lines(&self) -> Result<()> {
        let d = self.dim;
        if let Some(i) = (0..d).find(|&i| (0..d).all(|j| self.get(i, j) == 0)) {
            return Err(Error::ZeroRow(i));
        }
        if let Some(j) = (0..d).find(|&j| (0..d).all(|i| self.get(i, j) == 0)) {
            return Err(Error::ZeroColumn(j));
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut data = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self::from_data(d, data)
    }

    /// `A x`, with `A` read as a real matrix.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).filter(|(a, _)| **a == 1).map(|(_, b)| b).sum())
            .collect()
    }

    pub fn to_nonnegative(&self) -> NonnegativeMatrix {
        NonnegativeMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| f64::from(x)).collect(),
        }
    }
}

impl SupportDigraph for ZeroOneMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.allows(i, j)
    }
}

impl TryFrom<Vec<Vec<u8>>> for ZeroOneMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<ZeroOneMatrix> for Vec<Vec<u8>> {
    fn from(m: ZeroOneMatrix) -> Self {
        m.rows()
    }
}

impl From<&ZeroOneMatrix> for NonnegativeMatrix {
    fn from(m: &ZeroOneMatrix) -> Self {
        m.to_nonnegative()
    }
}
