//! Class-by-class erasure solver used for encoding and production decoding.
//!
//! Fix the pair digits `g+1..=m` of an index: the `r^g` indices sharing them
//! form a class. Within a class the rows couple erased symbols only through
//! the group digits, and every gamma term points into a class of strictly
//! lower shell. Processing classes in shell order therefore reduces the full
//! system to one small dense solve per class, always with the same matrix.

use super::row::PatternBuf;
use super::{CodeParams, Codeword};
use crate::error::{Error, Result};
use crate::gf::{DenseMatrix, Fe};

pub(crate) struct ClassSolver {
    erased: Vec<usize>,
    /// Left inverse of the class matrix, `(|E| r^g) x (r r^g)`.
    inverse: DenseMatrix,
}

impl ClassSolver {
    pub(crate) fn new(params: &CodeParams, erased: &[usize]) -> Result<Self> {
        let block = params.space().stride(params.g());
        let r = params.r();
        let ne = erased.len();
        let slot = slot_map(params.n(), erased);
        let mut mat = DenseMatrix::zeros(r * block as usize, ne * block as usize);
        let mut buf = PatternBuf::new(params);
        for gi in 0..block {
            for e in buf.fill(params, gi)? {
                let Some(s) = slot[e.node] else { continue };
                if e.col >= block {
                    continue;
                }
                let c = e.col as usize * ne + s;
                for t in 1..=r {
                    let row = gi as usize * r + t - 1;
                    let v = params.field().add(mat.get(row, c), params.coefficient(e, t));
                    mat.set(row, c, v);
                }
            }
        }
        let inverse = params.field().left_inverse(&mat).map_err(|err| match err {
            Error::Singular { rank, size } => {
                Error::internal(format!("erasure pattern {erased:?} not recoverable: class rank {rank} < {size}"))
            }
            other => other,
        })?;
        Ok(ClassSolver { erased: erased.to_vec(), inverse })
    }
}

fn slot_map(n: usize, erased: &[usize]) -> Vec<Option<usize>> {
    let mut slot = vec![None; n + 1];
    for (s, &j) in erased.iter().enumerate() {
        slot[j] = Some(s);
    }
    slot
}

/// Overwrites the erased nodes with the unique completion.
///
/// Symbols of non-erased nodes are trusted; redundant parity rows are not
/// re-checked (see [`super::erasure_decode`] for the checked oracle).
pub fn recover_erasures(params: &CodeParams, cw: &mut Codeword, erased: &[usize]) -> Result<()> {
    cw.check_shape(params)?;
    let erased = params.check_erased(erased)?;
    if erased.is_empty() {
        return Ok(());
    }
    params.check_materializable()?;
    let solver = params.solver_for(&erased)?;
    debug_assert_eq!(solver.erased, erased);
    for &j in &erased {
        cw.node_mut(j).iter_mut().for_each(|x| *x = Fe::ZERO);
    }

    let f = params.field();
    let r = params.r();
    let ne = erased.len();
    let block = params.space().stride(params.g());
    let slot = slot_map(params.n(), &erased);
    let mut buf = PatternBuf::new(params);
    let mut rhs = vec![Fe::ZERO; r * block as usize];

    for &class in params.class_order() {
        let base = class * block;
        rhs.iter_mut().for_each(|x| *x = Fe::ZERO);
        for gi in 0..block {
            for e in buf.fill(params, base + gi)? {
                if slot[e.node].is_some() && (base..base + block).contains(&e.col) {
                    continue;
                }
                let c = cw.symbol(e.node, e.col);
                if c.is_zero() {
                    continue;
                }
                for t in 1..=r {
                    let s = &mut rhs[gi as usize * r + t - 1];
                    *s = f.sub(*s, f.mul(params.coefficient(e, t), c));
                }
            }
        }
        let x = f.mat_vec(&solver.inverse, &rhs);
        for (gi, chunk) in x.chunks(ne).enumerate() {
            for (&j, &v) in erased.iter().zip(chunk) {
                cw.node_mut(j)[(base + gi as u64) as usize] = v;
            }
        }
    }
    Ok(())
}

/// Systematic encoding: nodes `1..=k` carry `data`, nodes `k+1..=n` are parity.
pub fn encode(params: &CodeParams, data: &[Vec<Fe>]) -> Result<Codeword> {
    if data.len() != params.k() {
        return Err(Error::Dimension(format!("expected {} data vectors, got {}", params.k(), data.len())));
    }
    params.check_materializable()?;
    let ell = params.ell() as usize;
    if let Some(bad) = data.iter().find(|v| v.len() != ell) {
        return Err(Error::Dimension(format!("data vector of length {} (ell = {ell})", bad.len())));
    }
    for v in data {
        for &x in v {
            params.field().try_elem(x.value() as u64)?;
        }
    }
    let mut nodes = data.to_vec();
    nodes.resize(params.n(), vec![Fe::ZERO; ell]);
    let mut cw = Codeword::new(nodes)?;
    let parity: Vec<usize> = (params.k() + 1..=params.n()).collect();
    recover_erasures(params, &mut cw, &parity)?;
    Ok(cw)
}
