//! Compressed sparse row matrix assembled from triplets.

use std::io::Write;

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl SparseMatrix {
    /// Sums duplicate entries; columns sorted within each row. Explicit zeros
    /// are kept so the pattern does not depend on cancellation.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> SparseMatrix {
        trip.sort_unstable_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(trip.len());
        let mut val: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}×{n}");
            if last == Some((r, c)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(c);
                val.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { n, row_ptr, col, val }
    }

    pub fn zeros(n: usize) -> SparseMatrix {
        SparseMatrix {
            n,
            row_ptr: vec![0; n + 1],
            col: Vec::new(),
            val: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let cols = &self.col[self.row_ptr[r]..self.row_ptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(k) => self.val[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.par_iter_mut().enumerate().for_each(|(r, yr)| {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            *yr = s;
        });
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| self.val[self.row_ptr[r]..self.row_ptr[r + 1]].iter().sum())
            .collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                d[(r, self.col[k])] += self.val[k];
            }
        }
        d
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                worst = worst.max((self.val[k] - self.get(self.col[k], r)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `row col value` lines.
    pub fn write_triplets(&self, mut w: impl Write) -> std::io::Result<()> {
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(w, "{} {} {:.17e}", r, self.col[k], self.val[k])?;
            }
        }
        Ok(())
    }

    /// Entry-wise sum of two matrices of equal size.
    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.n, other.n);
        let mut trip = self.triplets();
        trip.extend(other.triplets());
        SparseMatrix::from_triplets(self.n, trip)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push((r, self.col[k], self.val[k]));
            }
        }
        t
    }
}
