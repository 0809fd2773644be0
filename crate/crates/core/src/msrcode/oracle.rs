//! Generic sparse-elimination decoder and exhaustive MDS check.
//!
//! Neither routine uses the class structure exploited by the production
//! decoder; both just hand every parity row to [`SparseSystem`].

use rayon::prelude::*;
use serde::Serialize;

use super::row::PatternBuf;
use super::{max_verify_ell, syndrome, CodeParams, Codeword};
use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::sparse::SparseSystem;

/// Completes `cw` on the erased nodes by solving all `r * ell` parity rows.
pub fn erasure_decode(params: &CodeParams, cw: &Codeword, erased: &[usize]) -> Result<Codeword> {
    let mut out = erasure_decode_batch(params, std::slice::from_ref(cw), erased)?;
    Ok(out.pop().expect("one codeword in, one out"))
}

/// [`erasure_decode`] for several codewords sharing one erasure pattern.
pub fn erasure_decode_batch(params: &CodeParams, cws: &[Codeword], erased: &[usize]) -> Result<Vec<Codeword>> {
    for cw in cws {
        cw.check_shape(params)?;
    }
    let erased = params.check_erased(erased)?;
    if erased.is_empty() || cws.is_empty() {
        return Ok(cws.to_vec());
    }
    params.check_materializable()?;
    let ne = erased.len();
    let ell = params.ell() as usize;
    let mut slot = vec![None; params.n() + 1];
    for (s, &j) in erased.iter().enumerate() {
        slot[j] = Some(s);
    }
    // low-shell columns first keeps fill-in small
    let order = params.space().shell_order();
    let mut pos = vec![0u32; ell];
    for (p, &a) in order.iter().enumerate() {
        pos[a as usize] = p as u32;
    }

    let f = params.field();
    let lanes = cws.len();
    let mut sys = SparseSystem::new(*f, ne * ell, lanes);
    let mut buf = PatternBuf::new(params);
    for &a in &order {
        let pattern = buf.fill(params, a)?;
        for t in 1..=params.r() {
            let mut entries = Vec::new();
            let mut rhs = vec![Fe::ZERO; lanes];
            for e in pattern {
                let coeff = params.coefficient(e, t);
                match slot[e.node] {
                    Some(s) => entries.push((pos[e.col as usize] * ne as u32 + s as u32, coeff)),
                    None => {
                        for (acc, cw) in rhs.iter_mut().zip(cws) {
                            *acc = f.sub(*acc, f.mul(coeff, cw.symbol(e.node, e.col)));
                        }
                    }
                }
            }
            sys.push_row(entries, rhs);
        }
    }
    let x = sys.solve()?;

    let mut out = cws.to_vec();
    for (lane, cw) in out.iter_mut().enumerate() {
        for (p, &a) in order.iter().enumerate() {
            for (s, &j) in erased.iter().enumerate() {
                cw.node_mut(j)[a as usize] = x[p * ne + s][lane];
            }
        }
        if syndrome(params, cw)?.iter().any(|v| !v.is_zero()) {
            return Err(Error::internal("decoded word violates a parity row"));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MdsFailure {
    pub nodes: Vec<usize>,
    pub rank: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MdsVerdict {
    pub subsets_checked: usize,
    pub failure: Option<MdsFailure>,
}

impl MdsVerdict {
    pub fn is_mds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exact rank of every `r`-node column restriction of the parity-check matrix.
pub fn verify_mds(params: &CodeParams) -> Result<MdsVerdict> {
    let limit = max_verify_ell();
    if params.ell() > limit {
        return Err(Error::GuardExceeded { what: "sub-packetization for MDS verification", value: params.ell(), limit });
    }
    let subsets = combinations(params.n(), params.r());
    let results: Vec<Result<Option<MdsFailure>>> = subsets.par_iter().map(|s| check_subset(params, s)).collect();
    let mut failure = None;
    for res in results {
        if let Some(fail) = res? {
            failure = Some(fail);
            break;
        }
    }
    Ok(MdsVerdict { subsets_checked: subsets.len(), failure })
}

fn check_subset(params: &CodeParams, nodes: &[usize]) -> Result<Option<MdsFailure>> {
    let ne = nodes.len();
    let ell = params.ell() as usize;
    let mut slot = vec![None; params.n() + 1];
    for (s, &j) in nodes.iter().enumerate() {
        slot[j] = Some(s);
    }
    let order = params.space().shell_order();
    let mut pos = vec![0u32; ell];
    for (p, &a) in order.iter().enumerate() {
        pos[a as usize] = p as u32;
    }
    let mut sys = SparseSystem::new(*params.field(), ne * ell, 0);
    let mut buf = PatternBuf::new(params);
    for &a in &order {
        let pattern = buf.fill(params, a)?;
        for t in 1..=params.r() {
            let entries = pattern
                .iter()
                .filter_map(|e| slot[e.node].map(|s| (pos[e.col as usize] * ne as u32 + s as u32, params.coefficient(e, t))))
                .collect();
            sys.push_row(entries, Vec::new());
        }
    }
    let size = ne * ell;
    let rank = sys.rank();
    Ok((rank < size).then(|| MdsFailure { nodes: nodes.to_vec(), rank, size }))
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    if k == 0 || k > n {
        return if k == 0 { vec![Vec::new()] } else { out };
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i + 1) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
