//! Dense square matrices over `Z_p[[T]] / (p^N, T^b)` that skip zero
//! entries in products.

use rayon::prelude::*;

use crate::padic::{ZpRing, ZpTSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    ring: ZpRing,
    dim: usize,
    t_len: usize,
    entries: Vec<ZpTSeries>,
    nonzero: Vec<bool>,
}

impl SeriesMatrix {
    pub fn zero(ring: ZpRing, dim: usize, t_len: usize) -> Self {
        SeriesMatrix {
            ring,
            dim,
            t_len,
            entries: vec![ZpTSeries::zero(ring, t_len); dim * dim],
            nonzero: vec![false; dim * dim],
        }
    }

    pub fn identity(ring: ZpRing, dim: usize, t_len: usize) -> Self {
        let mut m = Self::zero(ring, dim, t_len);
        for i in 0..dim {
            m.set(i, i, ZpTSeries::one(ring, t_len));
        }
        m
    }

    /// Row-major entries; `entries.len()` must be `dim^2`.
    pub fn from_rows(ring: ZpRing, dim: usize, t_len: usize, entries: Vec<ZpTSeries>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        assert!(entries.iter().all(|e| e.len() == t_len));
        let nonzero = entries.iter().map(|e| !e.is_zero()).collect();
        SeriesMatrix { ring, dim, t_len, entries, nonzero }
    }

    pub fn ring(&self) -> ZpRing {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    /// Entry in row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> &ZpTSeries {
        &self.entries[i * self.dim + j]
    }

    pub fn is_nonzero(&self, i: usize, j: usize) -> bool {
        self.nonzero[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ZpTSeries) {
        let k = i * self.dim + j;
        self.nonzero[k] = !v.is_zero();
        self.entries[k] = v;
    }

    pub fn entries(&self) -> &[ZpTSeries] {
        &self.entries
    }

    /// Number of nonzero entries.
    pub fn support(&self) -> usize {
        self.nonzero.iter().filter(|&&b| b).count()
    }

    pub fn trace(&self) -> ZpTSeries {
        let mut acc = ZpTSeries::zero(self.ring, self.t_len);
        for i in 0..self.dim {
            if self.is_nonzero(i, i) {
                acc += self.get(i, i);
            }
        }
        acc
    }

    /// Leading principal `r x r` submatrix.
    pub fn leading(&self, r: usize) -> Self {
        let mut out = Self::zero(self.ring, r, self.t_len);
        for i in 0..r {
            for j in 0..r {
                if self.is_nonzero(i, j) {
                    out.set(i, j, self.get(i, j).clone());
                }
            }
        }
        out
    }

    pub fn truncate_t(&self, t_len: usize) -> Self {
        let entries = self.entries.iter().map(|e| e.truncate(t_len)).collect();
        Self::from_rows(self.ring, self.dim, t_len, entries)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let rows: Vec<Vec<ZpTSeries>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![ZpTSeries::zero(self.ring, self.t_len); n];
                for k in 0..n {
                    if !self.is_nonzero(i, k) {
                        continue;
                    }
                    let a = self.get(i, k);
                    for j in 0..n {
                        if other.is_nonzero(k, j) {
                            row[j] += &(a * other.get(k, j));
                        }
                    }
                }
                row
            })
            .collect();
        Self::from_rows(self.ring, n, self.t_len, rows.into_iter().flatten().collect())
    }

    /// `M v` for a column vector given with its nonzero mask.
    pub fn mul_vec(&self, v: &[ZpTSeries], mask: &[bool], rows: usize) -> Vec<ZpTSeries> {
        (0..rows)
            .map(|i| {
                let mut acc = ZpTSeries::zero(self.ring, self.t_len);
                for (k, x) in v.iter().enumerate() {
                    if mask[k] && self.is_nonzero(i, k) {
                        acc += &(self.get(i, k) * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// The matrix with every entry reduced modulo `T`.
    pub fn mod_t(&self) -> Self {
        let entries = self.entries.iter().map(|e| ZpTSeries::constant(e.coeff(0), self.t_len)).collect();
        Self::from_rows(self.ring, self.dim, self.t_len, entries)
    }
}
