//! Prime-field arithmetic and small dense linear algebra.
//!
//! Elements are stored as canonical residues in `[0, p)`. A [`Fe`] does not
//! carry its modulus; every operation goes through the owning [`Field`], and
//! values entering from outside are checked with [`Field::try_elem`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest system [`Field::solve_dense`] accepts.
pub const DENSE_SOLVE_LIMIT: usize = 64;

/// A field element: the canonical residue of some integer modulo `p`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// GF(p) for a prime `3 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..(1u64 << 31)).contains(&p) {
            return Err(Error::ModulusRange { modulus: p });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { p: p as u32 })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe((v % self.p as u64) as u32)
    }

    /// Accepts `v` only if it already is a canonical residue of this field.
    pub fn try_elem(&self, v: u64) -> Result<Fe> {
        if v < self.p as u64 {
            Ok(Fe(v as u32))
        } else {
            Err(Error::NonCanonical { value: v, modulus: self.p })
        }
    }

    pub fn from_i64(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        let s = x.0 as u64 + y.0 as u64;
        let p = self.p as u64;
        Fe(if s >= p { s - p } else { s } as u32)
    }

    #[inline]
    pub fn sub(&self, x: Fe, y: Fe) -> Fe {
        if x.0 >= y.0 {
            Fe(x.0 - y.0)
        } else {
            Fe(x.0 + (self.p - y.0))
        }
    }

    #[inline]
    pub fn neg(&self, x: Fe) -> Fe {
        if x.0 == 0 {
            x
        } else {
            Fe(self.p - x.0)
        }
    }

    #[inline]
    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        Fe(((x.0 as u64 * y.0 as u64) % self.p as u64) as u32)
    }

    /// `acc + x * y`
    #[inline]
    pub fn mul_add(&self, acc: Fe, x: Fe, y: Fe) -> Fe {
        Fe(((acc.0 as u64 + x.0 as u64 * y.0 as u64) % self.p as u64) as u32)
    }

    /// Square-and-multiply; `pow(x, 0) == 1` for every `x`, zero included.
    pub fn pow(&self, x: Fe, mut e: u64) -> Fe {
        let mut base = x;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: Fe) -> Result<Fe> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(x, self.p as u64 - 2))
    }

    pub fn div(&self, x: Fe, y: Fe) -> Result<Fe> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Solves the square system `a * x = b` exactly.
    pub fn solve_dense(&self, a: &DenseMatrix, b: &[Fe]) -> Result<Vec<Fe>> {
        let q = a.rows;
        if a.cols != q {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", a.rows, a.cols)));
        }
        if b.len() != q {
            return Err(Error::Dimension(format!("rhs length {} for {q} unknowns", b.len())));
        }
        if q > DENSE_SOLVE_LIMIT {
            return Err(Error::GuardExceeded {
                what: "dense system size",
                value: q as u64,
                limit: DENSE_SOLVE_LIMIT as u64,
            });
        }
        let mut m = a.clone();
        let mut rhs = b.to_vec();
        for col in 0..q {
            let Some(piv) = (col..q).find(|&row| !m.get(row, col).is_zero()) else {
                return Err(Error::Singular { rank: self.rank(a), size: q });
            };
            m.swap_rows(col, piv);
            rhs.swap(col, piv);
            let inv = self.inv(m.get(col, col))?;
            for row in 0..q {
                if row == col {
                    continue;
                }
                let f = self.mul(m.get(row, col), inv);
                if f.is_zero() {
                    continue;
                }
                for c in col..q {
                    let v = self.sub(m.get(row, c), self.mul(f, m.get(col, c)));
                    m.set(row, c, v);
                }
                rhs[row] = self.sub(rhs[row], self.mul(f, rhs[col]));
            }
        }
        Ok((0..q).map(|i| self.mul(rhs[i], self.inv(m.get(i, i)).unwrap())).collect())
    }

    /// Exact rank by row reduction.
    pub fn rank(&self, a: &DenseMatrix) -> usize {
        let mut m = a.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(piv) = (rank..m.rows).find(|&row| !m.get(row, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, piv);
            let inv = self.inv(m.get(rank, col)).expect("nonzero pivot");
            for row in rank + 1..m.rows {
                let f = self.mul(m.get(row, col), inv);
                if f.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = self.sub(m.get(row, c), self.mul(f, m.get(rank, c)));
                    m.set(row, c, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// For a full-column-rank `a` (rows >= cols), returns `g` with `g * a = I`.
    ///
    /// The result selects a maximal independent row subset of `a` and
    /// inverts it, so `g * b` is the unique solution of `a * x = b` whenever
    /// that system is consistent.
    pub fn left_inverse(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        let (rows, cols) = (a.rows, a.cols);
        // Row-reduce [a | I_rows]; row operations are tracked in the right block.
        let mut m = DenseMatrix::zeros(rows, cols + rows);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, a.get(i, j));
            }
            m.set(i, cols + i, Fe::ONE);
        }
        for col in 0..cols {
            let Some(piv) = (col..rows).find(|&row| !m.get(row, col).is_zero()) else {
                return Err(Error::Singular { rank: self.rank(a), size: cols });
            };
            m.swap_rows(col, piv);
            let inv = self.inv(m.get(col, col))?;
            for c in 0..m.cols {
                m.set(col, c, self.mul(m.get(col, c), inv));
            }
            for row in 0..rows {
                if row == col {
                    continue;
                }
                let f = m.get(row, col);
                if f.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let v = self.sub(m.get(row, c), self.mul(f, m.get(col, c)));
                    m.set(row, c, v);
                }
            }
        }
        let mut g = DenseMatrix::zeros(cols, rows);
        for i in 0..cols {
            for j in 0..rows {
                g.set(i, j, m.get(i, cols + j));
            }
        }
        Ok(g)
    }

    pub fn mat_vec(&self, a: &DenseMatrix, x: &[Fe]) -> Vec<Fe> {
        debug_assert_eq!(a.cols, x.len());
        (0..a.rows)
            .map(|i| {
                a.row(i)
                    .iter()
                    .zip(x)
                    .fold(Fe::ZERO, |acc, (&c, &v)| self.mul_add(acc, c, v))
            })
            .collect()
    }
}

/// Row-major dense matrix over some field.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(q: usize) -> Self {
        let mut m = Self::zeros(q, q);
        for i in 0..q {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.elem(v));
            }
        }
        m
    }

    /// `points[j]^i` at `(i, j)`.
    pub fn vandermonde(field: &Field, points: &[Fe], rows: usize) -> Self {
        let mut m = Self::zeros(rows, points.len());
        for (j, &x) in points.iter().enumerate() {
            let mut acc = Fe::ONE;
            for i in 0..rows {
                m.set(i, j, acc);
                acc = field.mul(acc, x);
            }
        }
        m
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
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// The submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf11() -> Field {
        Field::new(11).unwrap()
    }

    #[test]
    fn make_field_accepts_primes_and_rejects_composites() {
        assert_eq!(Field::new(11).unwrap().modulus(), 11);
        assert_eq!(Field::new(65537).unwrap().modulus(), 65537);
        assert!(matches!(Field::new(15), Err(Error::NotPrime(15))));
        assert!(matches!(Field::new(2), Err(Error::ModulusRange { .. })));
        assert!(matches!(Field::new(1 << 31), Err(Error::ModulusRange { .. })));
    }

    #[test]
    fn small_field_examples() {
        let f = gf11();
        let e = |v| f.elem(v);
        assert_eq!(f.add(e(7), e(8)), e(4));
        assert_eq!(f.sub(e(3), e(8)), e(6));
        assert_eq!(f.neg(e(0)), e(0));
        assert_eq!(f.neg(e(3)), e(8));
        for x in 0..11 {
            assert_eq!(f.add(e(x), Fe::ZERO), e(x));
        }
    }

    #[test]
    fn multiplication_matches_brute_force_table() {
        let f = gf11();
        // Table built by repeated addition, independent of `mul`.
        for x in 0..11u64 {
            for y in 0..11u64 {
                let mut acc = Fe::ZERO;
                for _ in 0..y {
                    acc = f.add(acc, f.elem(x));
                }
                assert_eq!(f.mul(f.elem(x), f.elem(y)), acc, "{x}*{y}");
            }
        }
        assert_eq!(f.mul(f.elem(7), f.elem(8)), f.elem(1));
    }

    #[test]
    fn inverse_examples() {
        let f = gf11();
        assert_eq!(f.inv(Fe::ONE).unwrap(), Fe::ONE);
        // exhaustive search for y with 7y = 1
        let y = (0..11).find(|&y| (7 * y) % 11 == 1).unwrap();
        assert_eq!(y, 8);
        assert_eq!(f.inv(f.elem(7)).unwrap(), f.elem(y));
        assert!(matches!(f.inv(Fe::ZERO), Err(Error::DivisionByZero)));
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 101, 257] {
            let f = Field::new(p).unwrap();
            for x in 1..p {
                let x = f.elem(x);
                assert_eq!(f.mul(x, f.inv(x).unwrap()), Fe::ONE);
            }
        }
    }

    #[test]
    fn pow_examples() {
        let f = gf11();
        assert_eq!(f.pow(f.elem(2), 3), f.elem(8));
        assert_eq!(f.pow(f.elem(5), 0), Fe::ONE);
        assert_eq!(f.pow(Fe::ZERO, 0), Fe::ONE);
        assert_eq!(f.pow(Fe::ZERO, 3), Fe::ZERO);
        let mut acc = Fe::ONE;
        for _ in 0..10 {
            acc = f.mul(acc, f.elem(7));
        }
        assert_eq!(acc, Fe::ONE);
        assert_eq!(f.pow(f.elem(7), 10), acc);
    }

    #[test]
    fn try_elem_rejects_foreign_residues() {
        let f = gf11();
        assert_eq!(f.try_elem(10).unwrap(), f.elem(10));
        assert!(matches!(f.try_elem(11), Err(Error::NonCanonical { value: 11, modulus: 11 })));
        assert_eq!(f.from_i64(-1), f.elem(10));
    }

    #[test]
    fn solve_dense_examples() {
        let f = gf11();
        let a = DenseMatrix::from_rows(&f, &[vec![1, 1], vec![1, 3]]);
        let x = f.solve_dense(&a, &[f.elem(5), f.elem(7)]).unwrap();
        assert_eq!(x, vec![f.elem(4), f.elem(1)]);

        let b: Vec<Fe> = (0..5).map(|v| f.elem(v * 2)).collect();
        assert_eq!(f.solve_dense(&DenseMatrix::identity(5), &b).unwrap(), b);

        let pts: Vec<Fe> = (1..=4).map(|v| f.elem(v)).collect();
        let v = DenseMatrix::vandermonde(&f, &pts, 4);
        assert_eq!(f.solve_dense(&v, &[Fe::ZERO; 4]).unwrap(), vec![Fe::ZERO; 4]);
    }

    #[test]
    fn solve_dense_reports_rank_on_singular() {
        let f = gf11();
        let a = DenseMatrix::from_rows(&f, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        match f.solve_dense(&a, &[Fe::ZERO; 3]) {
            Err(Error::Singular { rank, size }) => assert_eq!((rank, size), (2, 3)),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn solve_dense_enforces_limit() {
        let f = gf11();
        let q = DENSE_SOLVE_LIMIT + 1;
        let err = f.solve_dense(&DenseMatrix::identity(q), &vec![Fe::ZERO; q]).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn left_inverse_of_tall_vandermonde() {
        let f = Field::new(13).unwrap();
        let pts: Vec<Fe> = (1..=3).map(|v| f.elem(v)).collect();
        let v = DenseMatrix::vandermonde(&f, &pts, 5);
        let g = f.left_inverse(&v).unwrap();
        let x = vec![f.elem(4), f.elem(9), f.elem(12)];
        let b = f.mat_vec(&v, &x);
        assert_eq!(f.mat_vec(&g, &b), x);
    }

    proptest! {
        #[test]
        fn ring_axioms(x in 0u64..65537, y in 0u64..65537, z in 0u64..65537) {
            let f = Field::new(65537).unwrap();
            let (x, y, z) = (f.elem(x), f.elem(y), f.elem(z));
            prop_assert_eq!(f.add(x, y), f.add(y, x));
            prop_assert_eq!(f.mul(x, y), f.mul(y, x));
            prop_assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
            prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
            prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
            prop_assert_eq!(f.sub(f.add(x, y), y), x);
        }

        #[test]
        fn inverse_property_large_prime(x in 1u64..2147483647) {
            let f = Field::new(2147483647).unwrap();
            let x = f.elem(x);
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), Fe::ONE);
        }

        #[test]
        fn solve_recovers_planted_solution(
            q in 1usize..=8,
            seed in prop::collection::vec(0u64..65537, 64 + 8),
        ) {
            let f = Field::new(65537).unwrap();
            let mut a = DenseMatrix::zeros(q, q);
            for i in 0..q {
                for j in 0..q {
                    a.set(i, j, f.elem(seed[i * 8 + j]));
                }
            }
            let x: Vec<Fe> = seed[64..64 + q].iter().map(|&v| f.elem(v)).collect();
            let b = f.mat_vec(&a, &x);
            if f.rank(&a) == q {
                prop_assert_eq!(f.solve_dense(&a, &b).unwrap(), x);
            } else {
                prop_assert!(f.solve_dense(&a, &b).is_err());
            }
        }

        #[test]
        fn vandermonde_on_distinct_points_is_invertible(
            pts in prop::collection::btree_set(0u64..65537, 1..=8),
        ) {
            let f = Field::new(65537).unwrap();
            let pts: Vec<Fe> = pts.into_iter().map(|v| f.elem(v)).collect();
            let v = DenseMatrix::vandermonde(&f, &pts, pts.len());
            prop_assert_eq!(f.rank(&v), pts.len());
        }
    }
}
