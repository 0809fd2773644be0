//! Lazy generation of parity-check rows.

use serde::Serialize;

use super::CodeParams;
use crate::error::{Error, Result};
use crate::gf::Fe;

/// An evaluation point of the construction (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Point {
    Lambda(usize),
    Gamma(usize),
}

/// One nonzero of the row family labelled `a`, independent of `t`.
///
/// Its coefficient in row `(t, a)` is `point^(t-1)`, times `tau` when `tau` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternEntry {
    pub node: usize,
    pub col: u64,
    pub point: Point,
    pub tau: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowPattern {
    pub a: u64,
    pub entries: Vec<PatternEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowEntry {
    pub node: usize,
    pub col: u64,
    pub coeff: Fe,
}

/// Row `(t, a)` of the parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRow {
    pub t: usize,
    pub a: u64,
    pub entries: Vec<RowEntry>,
}

/// Reusable scratch space for pattern generation.
pub(crate) struct PatternBuf {
    touched: Vec<u64>,
    out: Vec<PatternEntry>,
}

impl PatternBuf {
    pub(crate) fn new(params: &CodeParams) -> Self {
        PatternBuf { touched: vec![0; params.n() + 1], out: Vec::with_capacity(4 * params.n()) }
    }

    /// Entries of the row family `a`, grouped by node in ascending node order.
    pub(crate) fn fill(&mut self, params: &CodeParams, a: u64) -> Result<&[PatternEntry]> {
        let space = params.space();
        let pairs = params.pairs();
        let r = params.r() as u64;
        let g = params.g();
        self.out.clear();
        self.touched.iter_mut().for_each(|t| *t = 0);

        for j in 1..=params.n() {
            self.out.push(PatternEntry { node: j, col: a, point: Point::Lambda(j), tau: false });
            if let Some((u, v)) = pairs.group_of(j) {
                if space.digit(a, u) == v as u64 {
                    self.touched[j] |= 1 << u;
                    for vp in 0..r {
                        if vp == v as u64 {
                            continue;
                        }
                        self.out.push(PatternEntry {
                            node: j,
                            col: space.subst(a, u, vp),
                            point: Point::Lambda(pairs.node_at(u, vp as usize)),
                            tau: (vp as usize) < v,
                        });
                    }
                }
            }
        }
        if r > 2 {
            for (i, &(j0, j1)) in params.cross_owner.iter().enumerate() {
                let rho = g + 1 + i;
                let owner = match space.digit(a, rho) {
                    0 => j0,
                    1 => j1,
                    _ => continue,
                };
                let bit = 1u64 << rho;
                if self.touched[owner] & bit != 0 {
                    return Err(Error::internal(format!("row {a}: node {owner} touched twice at digit {rho}")));
                }
                self.touched[owner] |= bit;
                for w in 2..r {
                    self.out.push(PatternEntry {
                        node: owner,
                        col: space.subst(a, rho, w),
                        point: Point::Gamma(w as usize - 1),
                        tau: false,
                    });
                }
            }
            // node order keeps consumers simple
            self.out.sort_by_key(|e| e.node);
        }
        Ok(&self.out)
    }
}

impl CodeParams {
    /// Support of the `r` rows labelled `a`.
    pub fn row_pattern(&self, a: u64) -> Result<RowPattern> {
        if a >= self.ell() {
            return Err(Error::OutOfRange(format!("row index {a} not in [0, {})", self.ell())));
        }
        let mut buf = PatternBuf::new(self);
        let entries = buf.fill(self, a)?.to_vec();
        Ok(RowPattern { a, entries })
    }

    /// Coefficient of a pattern entry in row `(t, a)`.
    #[inline]
    pub fn coefficient(&self, e: &PatternEntry, t: usize) -> Fe {
        let base = self.power(e.point, t);
        if e.tau {
            self.field().mul(base, self.tau())
        } else {
            base
        }
    }

    pub fn parity_row(&self, t: usize, a: u64) -> Result<SparseRow> {
        if t == 0 || t > self.r() {
            return Err(Error::OutOfRange(format!("row block {t} not in [1, {}]", self.r())));
        }
        let pattern = self.row_pattern(a)?;
        let entries = pattern
            .entries
            .iter()
            .map(|e| RowEntry { node: e.node, col: e.col, coeff: self.coefficient(e, t) })
            .collect();
        Ok(SparseRow { t, a, entries })
    }
}
