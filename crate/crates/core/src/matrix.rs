//! Dense row-major matrices of residues mod p.

use alloc::vec;
use alloc::vec::Vec;

use crate::modp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize) -> ModMatrix {
        ModMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[u64]]) -> ModMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        ModMatrix { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_scalar(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    pub fn scalar(&self) -> u64 {
        debug_assert!(self.is_scalar());
        self.data[0]
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut out = ModMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `sum(X, 1)`: collapse rows into a 1 x cols vector.
    pub fn col_sum(&self, p: u64) -> ModMatrix {
        let mut out = ModMatrix::zeros(1, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = modp::add(out.get(0, j), self.get(i, j), p);
                out.set(0, j, v);
            }
        }
        out
    }

    /// `sum(X, 2)`: collapse columns into a rows x 1 vector.
    pub fn row_sum(&self, p: u64) -> ModMatrix {
        let mut out = ModMatrix::zeros(self.rows, 1);
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = modp::add(acc, self.get(i, j), p);
            }
            out.set(i, 0, acc);
        }
        out
    }

    /// `repmat(X, 1, times)` for a column.
    pub fn col_repeat(&self, times: usize) -> ModMatrix {
        debug_assert_eq!(self.cols, 1);
        let mut out = ModMatrix::zeros(self.rows, times);
        for i in 0..self.rows {
            let v = self.get(i, 0);
            for j in 0..times {
                out.set(i, j, v);
            }
        }
        out
    }

    /// `repmat(X, times, 1)` for a row.
    pub fn row_repeat(&self, times: usize) -> ModMatrix {
        debug_assert_eq!(self.rows, 1);
        let mut out = ModMatrix::zeros(times, self.cols);
        for i in 0..times {
            for j in 0..self.cols {
                out.set(i, j, self.get(0, j));
            }
        }
        out
    }

    /// `repmat(X, r, c)` for a scalar.
    pub fn elem_repeat(&self, r: usize, c: usize) -> ModMatrix {
        debug_assert!(self.is_scalar());
        let v = self.data[0];
        ModMatrix {
            rows: r,
            cols: c,
            data: vec![v; r * c],
        }
    }

    pub fn matmul(&self, other: &ModMatrix, p: u64) -> ModMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = ModMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = modp::add(out.get(i, j), modp::mul(a, other.get(k, j), p), p);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn elem_mul(&self, other: &ModMatrix, p: u64) -> ModMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| modp::mul(a, b, p))
            .collect();
        ModMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Sum of all entries.
    pub fn total(&self, p: u64) -> u64 {
        let mut acc = 0u64;
        for &v in &self.data {
            acc = modp::add(acc, v, p);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ops() {
        let p = 101;
        let a = ModMatrix::from_rows(&[&[2, 3], &[5, 7]]);
        assert_eq!(a.total(p), 17);
        assert_eq!(a.col_sum(p).data(), &[7, 10]);
        assert_eq!(a.row_sum(p).data(), &[5, 12]);
        assert_eq!(a.transpose().data(), &[2, 5, 3, 7]);
        let sq = a.matmul(&a, p);
        // [[2,3],[5,7]]^2 = [[19,27],[45,64]]
        assert_eq!(sq.data(), &[19, 27, 45, 64]);
        let em = a.elem_mul(&a, p);
        assert_eq!(em.data(), &[4, 9, 25, 49]);
    }

    #[test]
    fn repeats() {
        let col = ModMatrix::from_rows(&[&[1], &[2]]);
        assert_eq!(col.col_repeat(3).data(), &[1, 1, 1, 2, 2, 2]);
        let row = ModMatrix::from_rows(&[&[4, 5]]);
        assert_eq!(row.row_repeat(2).data(), &[4, 5, 4, 5]);
        let s = ModMatrix::from_rows(&[&[9]]);
        assert_eq!(s.elem_repeat(2, 2).data(), &[9, 9, 9, 9]);
    }
}
