//! Exact sparse Gaussian elimination over GF(p).
//!
//! Columns are eliminated in index order; the pivot for a column is the
//! lowest-numbered unused row holding a nonzero there. Callers control fill-in
//! by choosing the column and row numbering. Several right-hand sides
//! ("lanes") can ride along so one elimination serves a batch of systems that
//! share a coefficient matrix.

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

type SparseVec = Vec<(u32, Fe)>;

pub struct SparseSystem {
    field: Field,
    ncols: usize,
    lanes: usize,
    rows: Vec<SparseVec>,
    rhs: Vec<Vec<Fe>>,
}

impl SparseSystem {
    pub fn new(field: Field, ncols: usize, lanes: usize) -> Self {
        assert!(ncols < u32::MAX as usize);
        SparseSystem { field, ncols, lanes, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds one equation. Duplicate columns are summed; zero coefficients dropped.
    pub fn push_row(&mut self, mut entries: Vec<(u32, Fe)>, rhs: Vec<Fe>) {
        assert_eq!(rhs.len(), self.lanes, "rhs width");
        entries.sort_unstable_by_key(|e| e.0);
        let mut row: SparseVec = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            assert!((c as usize) < self.ncols, "column {c} out of range");
            match row.last_mut() {
                Some(last) if last.0 == c => last.1 = self.field.add(last.1, v),
                _ => row.push((c, v)),
            }
        }
        row.retain(|e| !e.1.is_zero());
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Rank of the coefficient matrix.
    pub fn rank(mut self) -> usize {
        self.eliminate().iter().filter(|p| p.is_some()).count()
    }

    /// Unique solution, as `x[col][lane]`.
    ///
    /// Fails with [`Error::Singular`] when the columns are dependent and with
    /// [`Error::Inconsistent`] when a redundant equation disagrees.
    pub fn solve(mut self) -> Result<Vec<Vec<Fe>>> {
        let pivots = self.eliminate();
        let rank = pivots.iter().filter(|p| p.is_some()).count();
        if rank < self.ncols {
            return Err(Error::Singular { rank, size: self.ncols });
        }
        let mut is_pivot = vec![false; self.rows.len()];
        for p in pivots.iter().flatten() {
            is_pivot[*p] = true;
        }
        for (i, used) in is_pivot.iter().enumerate() {
            if !used && self.rhs[i].iter().any(|v| !v.is_zero()) {
                return Err(Error::Inconsistent(format!("redundant equation {i} is violated")));
            }
        }
        let f = self.field;
        let mut x = vec![vec![Fe::ZERO; self.lanes]; self.ncols];
        for col in (0..self.ncols).rev() {
            let prow = pivots[col].expect("full rank");
            let row = &self.rows[prow];
            let mut acc = self.rhs[prow].clone();
            let mut lead = Fe::ZERO;
            for &(c, v) in row {
                if c as usize == col {
                    lead = v;
                    continue;
                }
                debug_assert!(c as usize > col);
                for (a, xv) in acc.iter_mut().zip(&x[c as usize]) {
                    *a = f.sub(*a, f.mul(v, *xv));
                }
            }
            let inv = f.inv(lead)?;
            for (dst, a) in x[col].iter_mut().zip(acc) {
                *dst = f.mul(a, inv);
            }
        }
        Ok(x)
    }

    /// Forward elimination. Returns the pivot row of every column.
    fn eliminate(&mut self) -> Vec<Option<usize>> {
        let f = self.field;
        let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, _) in row {
                col_rows[c as usize].push(i as u32);
            }
        }
        let mut used = vec![false; self.rows.len()];
        let mut pivots = vec![None; self.ncols];
        let mut scratch: SparseVec = Vec::new();

        for col in 0..self.ncols {
            let mut cands = std::mem::take(&mut col_rows[col]);
            cands.sort_unstable();
            cands.dedup();
            cands.retain(|&i| !used[i as usize] && coeff_at(&self.rows[i as usize], col as u32).is_some());
            let Some((&prow, others)) = cands.split_first() else {
                continue;
            };
            let prow = prow as usize;
            used[prow] = true;
            pivots[col] = Some(prow);
            let pivot = std::mem::take(&mut self.rows[prow]);
            let pivot_rhs = std::mem::take(&mut self.rhs[prow]);
            let inv = f.inv(coeff_at(&pivot, col as u32).unwrap()).expect("nonzero pivot");

            for &other in others {
                let other = other as usize;
                let factor = f.mul(coeff_at(&self.rows[other], col as u32).unwrap(), inv);
                // row -= factor * pivot
                scratch.clear();
                let row = &self.rows[other];
                let (mut i, mut j) = (0, 0);
                while i < row.len() || j < pivot.len() {
                    let take_row = j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
                    let take_piv = i == row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
                    if take_row {
                        scratch.push(row[i]);
                        i += 1;
                    } else if take_piv {
                        let (c, v) = pivot[j];
                        let nv = f.neg(f.mul(factor, v));
                        if !nv.is_zero() {
                            scratch.push((c, nv));
                            col_rows[c as usize].push(other as u32);
                        }
                        j += 1;
                    } else {
                        let c = row[i].0;
                        let nv = f.sub(row[i].1, f.mul(factor, pivot[j].1));
                        if !nv.is_zero() {
                            scratch.push((c, nv));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                std::mem::swap(&mut self.rows[other], &mut scratch);
                if self.lanes > 0 {
                    for (a, &b) in self.rhs[other].iter_mut().zip(&pivot_rhs) {
                        *a = f.sub(*a, f.mul(factor, b));
                    }
                }
            }
            self.rows[prow] = pivot;
            self.rhs[prow] = pivot_rhs;
        }
        pivots
    }
}

fn coeff_at(row: &[(u32, Fe)], col: u32) -> Option<Fe> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| row[i].1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::DenseMatrix;
    use proptest::prelude::*;

    #[test]
    fn solves_small_system_with_lanes() {
        let f = Field::new(11).unwrap();
        let e = |v| f.elem(v);
        let mut s = SparseSystem::new(f, 2, 2);
        s.push_row(vec![(0, e(1)), (1, e(1))], vec![e(5), e(0)]);
        s.push_row(vec![(1, e(3)), (0, e(1))], vec![e(7), e(0)]);
        let x = s.solve().unwrap();
        assert_eq!(x[0], vec![e(4), e(0)]);
        assert_eq!(x[1], vec![e(1), e(0)]);
    }

    #[test]
    fn overdetermined_consistent_and_inconsistent() {
        let f = Field::new(13).unwrap();
        let e = |v| f.elem(v);
        let build = |third: u64| {
            let mut s = SparseSystem::new(f, 2, 1);
            s.push_row(vec![(0, e(1))], vec![e(3)]);
            s.push_row(vec![(1, e(2))], vec![e(4)]);
            s.push_row(vec![(0, e(1)), (1, e(1))], vec![e(third)]);
            s
        };
        assert_eq!(build(5).solve().unwrap(), vec![vec![e(3)], vec![e(2)]]);
        assert!(matches!(build(6).solve(), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn duplicate_columns_are_merged() {
        let f = Field::new(13).unwrap();
        let mut s = SparseSystem::new(f, 1, 0);
        s.push_row(vec![(0, f.elem(6)), (0, f.elem(7))], vec![]);
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn singular_reports_rank() {
        let f = Field::new(13).unwrap();
        let e = |v| f.elem(v);
        let mut s = SparseSystem::new(f, 3, 1);
        s.push_row(vec![(0, e(1)), (1, e(2))], vec![e(0)]);
        s.push_row(vec![(0, e(2)), (1, e(4))], vec![e(0)]);
        s.push_row(vec![(2, e(1))], vec![e(0)]);
        assert!(matches!(s.solve(), Err(Error::Singular { rank: 2, size: 3 })));
    }

    proptest! {
        #[test]
        fn rank_and_solution_agree_with_dense(
            rows in 3usize..=8,
            cols in 1usize..=6,
            vals in prop::collection::vec(0u64..7, 64),
            x in prop::collection::vec(0u64..7, 6),
        ) {
            let f = Field::new(7).unwrap();
            let mut dense = DenseMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    // keep it sparse-ish
                    let v = vals[i * 8 + j];
                    dense.set(i, j, f.elem(if v > 3 { 0 } else { v }));
                }
            }
            let xs: Vec<Fe> = x[..cols].iter().map(|&v| f.elem(v)).collect();
            let b = f.mat_vec(&dense, &xs);
            let mk = || {
                let mut s = SparseSystem::new(f, cols, 1);
                for i in 0..rows {
                    let entries = (0..cols).map(|j| (j as u32, dense.get(i, j))).collect();
                    s.push_row(entries, vec![b[i]]);
                }
                s
            };
            let rank = f.rank(&dense);
            prop_assert_eq!(mk().rank(), rank);
            if rank == cols {
                let sol = mk().solve().unwrap();
                let got: Vec<Fe> = sol.into_iter().map(|v| v[0]).collect();
                prop_assert_eq!(got, xs);
            }
        }
    }
}
