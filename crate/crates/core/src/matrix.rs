//! Dense matrices over a [`Gf`] and Gaussian elimination.

use crate::gf::{Fe, Gf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<Fe>>, cols: usize) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Fe]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Columns `idx` of `self`, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, gf: &Gf, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Fe::ZERO; self.cols];
        for (r, &coef) in v.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.row(r)) {
                *o = gf.mul_add(*o, coef, x);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] -= factor * row[src]`, starting at column `from`.
    fn eliminate(&mut self, gf: &Gf, dst: usize, src: usize, factor: Fe, from: usize) {
        let cols = self.cols;
        let (s, d) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * cols);
            (&lo[src * cols..(src + 1) * cols], &mut hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * cols);
            (&hi[..cols], &mut lo[dst * cols..(dst + 1) * cols])
        };
        let neg = gf.neg(factor);
        for c in from..cols {
            if !s[c].is_zero() {
                d[c] = gf.mul_add(d[c], neg, s[c]);
            }
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, gf: &Gf) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = gf.inv(self.get(r, c)).expect("pivot is nonzero");
            for cc in c..self.cols {
                let v = self.get(r, cc);
                self.set(r, cc, gf.mul(v, inv));
            }
            for i in 0..self.rows {
                if i != r {
                    let f = self.get(i, c);
                    if !f.is_zero() {
                        self.eliminate(gf, i, r, f, c);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, gf: &Gf) -> usize {
        self.clone().rref(gf).len()
    }

    /// Basis of `{ v : self * v = 0 }`, one vector per free column in
    /// increasing column order, with a 1 at that column.
    pub fn nullspace(&self, gf: &Gf) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.rref(gf);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Fe::ZERO; self.cols];
            v[free] = Fe::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = gf.neg(m.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Nonzero rows of the RREF: a canonical basis of the row space.
    pub fn row_space_basis(&self, gf: &Gf) -> Matrix {
        let mut m = self.clone();
        let rank = m.rref(gf).len();
        m.data.truncate(rank * m.cols);
        m.rows = rank;
        m
    }
}

/// Greedy selection of rows that raise the rank, in input order.
pub fn independent_rows(gf: &Gf, rows: &[Vec<Fe>], cols: usize) -> Vec<usize> {
    // incremental echelon basis: (pivot column, normalized row)
    let mut basis: Vec<(usize, Vec<Fe>)> = Vec::new();
    let mut keep = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for (pc, b) in &basis {
            let f = v[*pc];
            if !f.is_zero() {
                let neg = gf.neg(f);
                for c in 0..cols {
                    if !b[c].is_zero() {
                        v[c] = gf.mul_add(v[c], neg, b[c]);
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            let inv = gf.inv(v[pc]).expect("nonzero");
            for x in v.iter_mut() {
                *x = gf.mul(*x, inv);
            }
            basis.push((pc, v));
            keep.push(idx);
        }
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(gf: &Gf, rows: &[&[u64]]) -> Matrix {
        let cols = rows[0].len();
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| gf.elem(x).unwrap()).collect()).collect(),
            cols,
        )
    }

    #[test]
    fn rank_and_nullspace_over_gf2() {
        let gf = Gf::new(2, 1).unwrap();
        let a = m(&gf, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(a.rank(&gf), 2);
        let ns = a.nullspace(&gf);
        assert_eq!(ns.len(), 1);
        for r in 0..3 {
            let dot = (0..3).fold(Fe::ZERO, |acc, c| gf.mul_add(acc, a.get(r, c), ns[0][c]));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn nullspace_vectors_are_annihilated_gf9() {
        let gf = Gf::new(3, 2).unwrap();
        let a = m(&gf, &[&[1, 2, 3, 4, 5], &[6, 7, 8, 0, 1], &[2, 4, 6, 8, 1]]);
        let ns = a.nullspace(&gf);
        assert_eq!(ns.len() + a.rank(&gf), 5);
        for v in &ns {
            for r in 0..a.rows() {
                let dot = (0..a.cols()).fold(Fe::ZERO, |acc, c| gf.mul_add(acc, a.get(r, c), v[c]));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn independent_rows_skips_dependent_ones() {
        let gf = Gf::new(2, 2).unwrap();
        let rows = vec![
            vec![Fe::ONE, Fe::ZERO, Fe::ONE],
            vec![gf.elem(2).unwrap(), Fe::ZERO, gf.elem(2).unwrap()],
            vec![Fe::ZERO, Fe::ONE, Fe::ONE],
        ];
        assert_eq!(independent_rows(&gf, &rows, 3), vec![0, 2]);
    }
}
