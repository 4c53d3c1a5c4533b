//! Compressed sparse row matrices and a sparse direct solver.

mod lu;
mod ordering;

pub use lu::{LuOptions, SparseLu};
pub use ordering::nested_dissection;

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Triplet accumulator; duplicates are summed on conversion.
#[derive(Debug, Clone, Default)]
pub struct Coo {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Coo {
    pub fn new(nrows: usize, ncols: usize) -> Coo {
        Coo { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Coo {
        Coo { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    /// Adds `scale * m` with its (0, 0) entry placed at (`row0`, `col0`).
    pub fn push_block(&mut self, m: &Csr, row0: usize, col0: usize, scale: f64) {
        if scale == 0.0 {
            return;
        }
        for i in 0..m.nrows {
            for p in m.row_ptr[i]..m.row_ptr[i + 1] {
                self.push(row0 + i, col0 + m.col_idx[p], scale * m.values[p]);
            }
        }
    }

    /// Same as [`Coo::push_block`] with the transpose of `m`.
    pub fn push_block_transposed(&mut self, m: &Csr, row0: usize, col0: usize, scale: f64) {
        if scale == 0.0 {
            return;
        }
        for i in 0..m.nrows {
            for p in m.row_ptr[i]..m.row_ptr[i + 1] {
                self.push(row0 + m.col_idx[p], col0 + i, scale * m.values[p]);
            }
        }
    }

    pub fn to_csr(&self) -> Csr {
        let mut counts = vec![0usize; self.nrows + 1];
        for &(i, _, _) in &self.entries {
            counts[i + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; self.entries.len()];
        let mut vals = vec![0.0; self.entries.len()];
        for &(i, j, v) in &self.entries {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for i in 0..self.nrows {
            order.clear();
            order.extend(counts[i]..counts[i + 1]);
            order.sort_unstable_by_key(|&p| cols[p]);
            let mut last = usize::MAX;
            for &p in &order {
                if cols[p] == last {
                    *values.last_mut().unwrap() += vals[p];
                } else {
                    col_idx.push(cols[p]);
                    values.push(vals[p]);
                    last = cols[p];
                }
            }
            row_ptr.push(col_idx.len());
        }
        Csr { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

/// Compressed sparse row matrix with sorted, unique column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Csr {
        Csr { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Csr {
        Csr {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// y += alpha · A x
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let s: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            *yi += alpha * s;
        }
    }

    /// y += alpha · Aᵀ x
    pub fn matvec_transpose_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += alpha * v * xi;
            }
        }
    }

    pub fn transpose(&self) -> Csr {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        Csr { nrows: self.ncols, ncols: self.nrows, row_ptr: counts, col_idx, values }
    }

    /// alpha · self + beta · other, both of the same shape.
    pub fn add(&self, alpha: f64, other: &Csr, beta: f64) -> Result<Csr> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: other.nrows });
        }
        let mut coo = Coo::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        coo.push_block(self, 0, 0, alpha);
        coo.push_block(other, 0, 0, beta);
        Ok(coo.to_csr())
    }

    pub fn scaled(&self, alpha: f64) -> Csr {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= alpha);
        m
    }

    /// Row-major dense copy, intended for tests on small matrices.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        d
    }

    /// Largest |a_ij − a_ji| relative to the largest |a_ij|.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let diff = self.add(1.0, &t, -1.0).expect("square");
        diff.values.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Csr {
        let mut c = Coo::new(3, 4);
        c.push(0, 1, 2.0);
        c.push(2, 3, -1.0);
        c.push(0, 1, 0.5);
        c.push(1, 0, 4.0);
        c.push(0, 0, 1.0);
        c.to_csr()
    }

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let m = sample();
        assert_eq!(m.row_ptr, vec![0, 2, 3, 4]);
        assert_eq!(m.col_idx, vec![0, 1, 0, 3]);
        assert_eq!(m.get(0, 1), 2.5);
        assert_eq!(m.get(2, 2), 0.0);
    }

    #[test]
    fn transpose_and_products() {
        let m = sample();
        let t = m.transpose();
        assert_eq!(t.nrows, 4);
        assert_eq!(t.transpose(), m);
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(m.matvec(&x), vec![6.0, 4.0, -4.0]);
        let mut y = vec![0.0; 4];
        m.matvec_transpose_add(1.0, &[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, t.matvec(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn blocks_and_sums() {
        let m = sample();
        let mut c = Coo::new(7, 7);
        c.push_block(&m, 0, 0, 1.0);
        c.push_block_transposed(&m, 3, 4, 2.0);
        let b = c.to_csr();
        assert_eq!(b.get(1, 0), 4.0);
        assert_eq!(b.get(3, 5), 8.0);
        assert_eq!(b.get(6, 6), -2.0);
        let s = m.add(2.0, &m, -1.0).unwrap();
        assert_eq!(s.to_dense(), m.to_dense());
        assert!(m.add(1.0, &Csr::zeros(2, 4), 1.0).is_err());
    }

    #[test]
    fn identity_is_symmetric() {
        let i = Csr::identity(5);
        assert_eq!(i.asymmetry(), 0.0);
        assert_eq!(i.diagonal(), vec![1.0; 5]);
    }
}
