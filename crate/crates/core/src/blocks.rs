//! The two `ell = r` building-block codes.
//!
//! Type-I cooperatively repairs the pair `{1, 2}`; Type-II repairs any pair
//! inside `[r]`. Both are small enough to hold `H` densely, and repair is
//! driven directly off the dense rows: each newcomer reads one parity row
//! family, groups the failed-node columns by evaluation point, solves the
//! resulting Vandermonde system and ships the bundles that mention its peer.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{DenseMatrix, Fe, Field};
use crate::msrcode::{MdsFailure, MdsVerdict};
use crate::sparse::SparseSystem;

/// Largest number of column-block subsets [`check_mds`] will enumerate.
pub const MAX_MDS_SUBSETS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    TypeI,
    TypeII,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCodeSpec {
    kind: BlockKind,
    n: usize,
    k: usize,
    field: Field,
    lambdas: Vec<Fe>,
    gammas: Vec<Fe>,
    tau: Fe,
}

impl BlockCodeSpec {
    /// Type-I code with `lambda_j = j`, `gamma_w = n + w`.
    pub fn type1(n: usize, k: usize, p: u64) -> Result<Self> {
        let field = Field::new(p)?;
        check_nk(n, k)?;
        let lambdas = (1..=n as u64).map(|j| field.elem(j)).collect();
        let gammas = (1..=(n - k - 2) as u64).map(|w| field.elem(n as u64 + w)).collect();
        Self::type1_with(n, k, field, lambdas, gammas)
    }

    /// Type-II code with `lambda_j = j`, `tau = p - 1`.
    pub fn type2(n: usize, k: usize, p: u64) -> Result<Self> {
        let field = Field::new(p)?;
        check_nk(n, k)?;
        let lambdas = (1..=n as u64).map(|j| field.elem(j)).collect();
        Self::type2_with(n, k, field, lambdas, field.elem(p - 1))
    }

    pub fn type1_with(n: usize, k: usize, field: Field, lambdas: Vec<Fe>, gammas: Vec<Fe>) -> Result<Self> {
        check_nk(n, k)?;
        let r = n - k;
        if lambdas.len() != n || gammas.len() != r - 2 {
            return Err(Error::InvalidParams(format!("Type-I needs {n} lambdas and {} gammas", r - 2)));
        }
        if (field.modulus() as usize) <= n + r - 2 {
            return Err(Error::FieldTooSmall { modulus: field.modulus(), needed: (n + r - 2) as u64 });
        }
        distinct(&field, lambdas.iter().chain(&gammas))?;
        Ok(BlockCodeSpec { kind: BlockKind::TypeI, n, k, field, lambdas, gammas, tau: Fe::ZERO })
    }

    pub fn type2_with(n: usize, k: usize, field: Field, lambdas: Vec<Fe>, tau: Fe) -> Result<Self> {
        check_nk(n, k)?;
        if lambdas.len() != n {
            return Err(Error::InvalidParams(format!("Type-II needs {n} lambdas")));
        }
        if (field.modulus() as usize) <= n {
            return Err(Error::FieldTooSmall { modulus: field.modulus(), needed: n as u64 });
        }
        distinct(&field, lambdas.iter())?;
        field.try_elem(tau.value() as u64)?;
        if tau == Fe::ZERO || tau == Fe::ONE {
            return Err(Error::InvalidParams("tau must differ from 0 and 1".into()));
        }
        Ok(BlockCodeSpec { kind: BlockKind::TypeII, n, k, field, lambdas, gammas: Vec::new(), tau })
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.n - self.k
    }

    /// Sub-packetization, equal to `r`.
    pub fn ell(&self) -> usize {
        self.r()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Entry `(a, b)` of block `H_{t,j}` (0-based `a`, `b`; 1-based `t`, `j`).
    fn block_entry(&self, t: usize, j: usize, a: usize, b: usize) -> Fe {
        let f = &self.field;
        let pw = |x: Fe| f.pow(x, t as u64 - 1);
        let lam = |i: usize| pw(self.lambdas[i - 1]);
        let diag = if a == b { lam(j) } else { Fe::ZERO };
        match self.kind {
            BlockKind::TypeI if j <= 2 => {
                // row j-1 of H_{t,j}: the own column and the gamma columns 2..r-1
                if a != j - 1 {
                    return diag;
                }
                match b {
                    _ if b == a => lam(j),
                    0 | 1 => Fe::ZERO,
                    w => pw(self.gammas[w - 2]),
                }
            }
            BlockKind::TypeII if j <= self.r() => {
                if a != j - 1 || b == a {
                    return diag;
                }
                if b < a {
                    f.mul(self.tau, lam(b + 1))
                } else {
                    lam(b + 1)
                }
            }
            _ => diag,
        }
    }

    /// `H` as an `(r ell) x (n ell)` matrix: row `(t-1) ell + a`, column `(j-1) ell + b`.
    pub fn parity_matrix(&self) -> DenseMatrix {
        let ell = self.ell();
        let mut h = DenseMatrix::zeros(self.r() * ell, self.n * ell);
        for t in 1..=self.r() {
            for j in 1..=self.n {
                for a in 0..ell {
                    for b in 0..ell {
                        h.set((t - 1) * ell + a, (j - 1) * ell + b, self.block_entry(t, j, a, b));
                    }
                }
            }
        }
        h
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || n < k + 2 {
        return Err(Error::InvalidParams(format!("need n - k >= 2 and k >= 1, got n = {n}, k = {k}")));
    }
    Ok(())
}

fn distinct<'a>(field: &Field, values: impl Iterator<Item = &'a Fe>) -> Result<()> {
    let mut v: Vec<Fe> = Vec::new();
    for &x in values {
        field.try_elem(x.value() as u64)?;
        v.push(x);
    }
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParams("evaluation points must be pairwise distinct".into()));
    }
    Ok(())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::msrcode::combinations(n, k)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Rank of every `r`-block column restriction of `H`.
pub fn check_mds(spec: &BlockCodeSpec) -> Result<MdsVerdict> {
    let count = binomial(spec.n as u64, spec.r() as u64);
    if count > MAX_MDS_SUBSETS {
        return Err(Error::GuardExceeded { what: "column-block subsets", value: count, limit: MAX_MDS_SUBSETS });
    }
    let h = spec.parity_matrix();
    let ell = spec.ell();
    let all = subsets(spec.n, spec.r());
    for nodes in &all {
        let cols: Vec<usize> = nodes.iter().flat_map(|&j| (j - 1) * ell..j * ell).collect();
        let rank = spec.field.rank(&h.select_columns(&cols));
        if rank < cols.len() {
            let failure = MdsFailure { nodes: nodes.clone(), rank, size: cols.len() };
            return Ok(MdsVerdict { subsets_checked: all.len(), failure: Some(failure) });
        }
    }
    Ok(MdsVerdict { subsets_checked: all.len(), failure: None })
}

fn check_nodes(spec: &BlockCodeSpec, nodes: &[Vec<Fe>]) -> Result<()> {
    if nodes.len() != spec.n || nodes.iter().any(|v| v.len() != spec.ell()) {
        return Err(Error::Dimension(format!("expected {} nodes of {} symbols", spec.n, spec.ell())));
    }
    Ok(())
}

/// Completes the erased nodes by a dense left-inverse solve over all rows.
pub fn erasure_decode(spec: &BlockCodeSpec, nodes: &[Vec<Fe>], erased: &[usize]) -> Result<Vec<Vec<Fe>>> {
    check_nodes(spec, nodes)?;
    if erased.len() > spec.r() {
        return Err(Error::BeyondMdsRadius { erased: erased.len(), r: spec.r() });
    }
    if erased.iter().any(|&j| j == 0 || j > spec.n) {
        return Err(Error::OutOfRange(format!("erased node outside [1, {}]", spec.n)));
    }
    let f = &spec.field;
    let ell = spec.ell();
    let h = spec.parity_matrix();
    let cols: Vec<usize> = erased.iter().flat_map(|&j| (j - 1) * ell..j * ell).collect();
    let mut rhs = vec![Fe::ZERO; h.rows()];
    for j in (1..=spec.n).filter(|j| !erased.contains(j)) {
        for b in 0..ell {
            let c = nodes[j - 1][b];
            for (row, acc) in rhs.iter_mut().enumerate() {
                *acc = f.sub(*acc, f.mul(h.get(row, (j - 1) * ell + b), c));
            }
        }
    }
    let x = f.mat_vec(&f.left_inverse(&h.select_columns(&cols))?, &rhs);
    let mut out = nodes.to_vec();
    for (i, &j) in erased.iter().enumerate() {
        out[j - 1].copy_from_slice(&x[i * ell..(i + 1) * ell]);
    }
    Ok(out)
}

/// Systematic encoding with data on nodes `1..=k`.
pub fn encode(spec: &BlockCodeSpec, data: &[Vec<Fe>]) -> Result<Vec<Vec<Fe>>> {
    if data.len() != spec.k {
        return Err(Error::Dimension(format!("expected {} data vectors", spec.k)));
    }
    let mut nodes = data.to_vec();
    nodes.resize(spec.n, vec![Fe::ZERO; spec.ell()]);
    let parity: Vec<usize> = (spec.k + 1..=spec.n).collect();
    erasure_decode(spec, &nodes, &parity)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockTranscript {
    pub pair: (usize, usize),
    /// `(helper, symbols read)` summed over both newcomers.
    pub helper_access: Vec<(usize, usize)>,
    pub downloaded: usize,
    pub collaborated: usize,
}

impl BlockTranscript {
    pub fn bandwidth(&self) -> usize {
        self.downloaded + self.collaborated
    }

    pub fn access(&self) -> usize {
        self.helper_access.iter().map(|h| h.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRepair {
    pub first: Vec<Fe>,
    pub second: Vec<Fe>,
    pub transcript: BlockTranscript,
}

/// A linear combination of failed-node symbols with known value.
#[derive(Clone, Debug)]
struct Bundle {
    terms: Vec<((usize, usize), Fe)>,
    value: Fe,
}

/// Newcomer `me` repairs from row `a` of every block row.
///
/// Returns the bundles (one per unknown evaluation point) and the helper
/// symbols it read.
fn solve_row(spec: &BlockCodeSpec, h: &DenseMatrix, nodes: &[Vec<Fe>], failed: [usize; 2], a: usize) -> Result<(Vec<Bundle>, Vec<(usize, usize)>)> {
    let f = &spec.field;
    let ell = spec.ell();
    let r = spec.r();
    // point -> (known sum, unknown terms)
    let mut by_point: BTreeMap<Fe, (Fe, Vec<((usize, usize), Fe)>)> = BTreeMap::new();
    let mut reads = Vec::new();
    for j in 1..=spec.n {
        for b in 0..ell {
            let coeffs: Vec<Fe> = (0..r).map(|t| h.get(t * ell + a, (j - 1) * ell + b)).collect();
            if coeffs.iter().all(|c| c.is_zero()) {
                continue;
            }
            let scale = coeffs[0];
            let point = f.div(coeffs[1], scale)?;
            if coeffs.iter().enumerate().any(|(t, &c)| c != f.mul(scale, f.pow(point, t as u64))) {
                return Err(Error::internal(format!("column ({j}, {b}) of row {a} is not a scaled power vector")));
            }
            let slot = by_point.entry(point).or_insert((Fe::ZERO, Vec::new()));
            if failed.contains(&j) {
                slot.1.push(((j, b), scale));
            } else {
                reads.push((j, b));
                slot.0 = f.mul_add(slot.0, scale, nodes[j - 1][b]);
            }
        }
    }
    let points: Vec<Fe> = by_point.keys().copied().collect();
    let unknown: Vec<usize> = (0..points.len()).filter(|&i| !by_point[&points[i]].1.is_empty()).collect();
    let q = unknown.len();
    if q > r {
        return Err(Error::internal(format!("row {a} has {q} unknown points for {r} equations")));
    }
    // sum_p p^t (known_p + bundle_p) = 0 for t < r; the first q equations suffice
    let upts: Vec<Fe> = unknown.iter().map(|&i| points[i]).collect();
    let vm = DenseMatrix::vandermonde(f, &upts, q);
    let rhs: Vec<Fe> = (0..q)
        .map(|t| {
            let s = by_point.iter().fold(Fe::ZERO, |acc, (&p, (known, _))| f.mul_add(acc, f.pow(p, t as u64), *known));
            f.neg(s)
        })
        .collect();
    let sol = f.solve_dense(&vm, &rhs)?;
    for t in q..r {
        let mut s = Fe::ZERO;
        for (i, (&p, (known, _))) in by_point.iter().enumerate() {
            let bundle = unknown.iter().position(|&u| u == i).map_or(Fe::ZERO, |pos| sol[pos]);
            s = f.mul_add(s, f.pow(p, t as u64), f.add(*known, bundle));
        }
        if !s.is_zero() {
            return Err(Error::Inconsistent(format!("helper data violates parity row {a}")));
        }
    }
    let bundles = unknown
        .iter()
        .zip(sol)
        .map(|(&i, value)| Bundle { terms: by_point[&points[i]].1.clone(), value })
        .collect();
    Ok((bundles, reads))
}

/// Recovers node `me` from its own bundles plus those received from the peer.
fn finish(spec: &BlockCodeSpec, me: usize, own: &[Bundle], received: &[Bundle]) -> Result<Vec<Fe>> {
    let mut vars: Vec<(usize, usize)> = own.iter().chain(received).flat_map(|b| b.terms.iter().map(|t| t.0)).collect();
    vars.sort_unstable();
    vars.dedup();
    let mut sys = SparseSystem::new(spec.field, vars.len(), 1);
    for b in own.iter().chain(received) {
        let entries = b.terms.iter().map(|&(v, c)| (vars.binary_search(&v).unwrap() as u32, c)).collect();
        sys.push_row(entries, vec![b.value]);
    }
    let x = sys.solve()?;
    (0..spec.ell())
        .map(|b| {
            vars.binary_search(&(me, b))
                .map(|i| x[i][0])
                .map_err(|_| Error::internal(format!("symbol ({me}, {b}) not covered by repair equations")))
        })
        .collect()
}

fn repair_rows(spec: &BlockCodeSpec, nodes: &[Vec<Fe>], pair: (usize, usize), rows: (usize, usize)) -> Result<BlockRepair> {
    check_nodes(spec, nodes)?;
    let h = spec.parity_matrix();
    let failed = [pair.0, pair.1];
    let (b1, reads1) = solve_row(spec, &h, nodes, failed, rows.0)?;
    let (b2, reads2) = solve_row(spec, &h, nodes, failed, rows.1)?;
    let mentions = |b: &Bundle, j: usize| b.terms.iter().any(|t| t.0 .0 == j);
    let to2: Vec<Bundle> = b1.iter().filter(|b| mentions(b, pair.1)).cloned().collect();
    let to1: Vec<Bundle> = b2.iter().filter(|b| mentions(b, pair.0)).cloned().collect();
    let first = finish(spec, pair.0, &b1, &to1)?;
    let second = finish(spec, pair.1, &b2, &to2)?;

    let mut access: BTreeMap<usize, usize> = BTreeMap::new();
    for &(j, _) in reads1.iter().chain(&reads2) {
        *access.entry(j).or_default() += 1;
    }
    let transcript = BlockTranscript {
        pair,
        helper_access: access.into_iter().collect(),
        downloaded: reads1.len() + reads2.len(),
        collaborated: to1.len() + to2.len(),
    };
    Ok(BlockRepair { first, second, transcript })
}

/// Cooperative repair of nodes 1 and 2 of a Type-I code.
pub fn repair_type1(spec: &BlockCodeSpec, nodes: &[Vec<Fe>]) -> Result<BlockRepair> {
    if spec.kind != BlockKind::TypeI {
        return Err(Error::UnsupportedPattern("repair_type1 needs a Type-I code".into()));
    }
    repair_rows(spec, nodes, (1, 2), (0, 1))
}

/// Cooperative repair of nodes `j1 < j2 <= r` of a Type-II code.
pub fn repair_type2(spec: &BlockCodeSpec, nodes: &[Vec<Fe>], j1: usize, j2: usize) -> Result<BlockRepair> {
    if spec.kind != BlockKind::TypeII {
        return Err(Error::UnsupportedPattern("repair_type2 needs a Type-II code".into()));
    }
    if j1 == 0 || j1 >= j2 || j2 > spec.r() {
        return Err(Error::UnsupportedPattern(format!("pair ({j1}, {j2}) is not inside [1, {}]", spec.r())));
    }
    repair_rows(spec, nodes, (j1, j2), (j1 - 1, j2 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_codeword(spec: &BlockCodeSpec, rng: &mut impl Rng) -> Vec<Vec<Fe>> {
        let p = spec.field().modulus() as u64;
        let data: Vec<Vec<Fe>> = (0..spec.k()).map(|_| (0..spec.ell()).map(|_| spec.field().elem(rng.gen_range(0..p))).collect()).collect();
        encode(spec, &data).unwrap()
    }

    fn syndrome_zero(spec: &BlockCodeSpec, nodes: &[Vec<Fe>]) -> bool {
        let flat: Vec<Fe> = nodes.concat();
        spec.field().mat_vec(&spec.parity_matrix(), &flat).iter().all(|v| v.is_zero())
    }

    #[test]
    fn type1_r2_layout() {
        let f = Field::new(11).unwrap();
        let spec = BlockCodeSpec::type1(4, 2, 11).unwrap();
        let h = spec.parity_matrix();
        for t in 1..=2u64 {
            let l1 = f.pow(f.elem(1), t - 1);
            let l2 = f.pow(f.elem(2), t - 1);
            let row0 = (t as usize - 1) * 2;
            assert_eq!(&h.row(row0)[..4], &[l1, Fe::ZERO, l2, Fe::ZERO]);
            assert_eq!(&h.row(row0 + 1)[..4], &[Fe::ZERO, l1, Fe::ZERO, l2]);
        }
    }

    #[test]
    fn type1_first_row_support() {
        let spec = BlockCodeSpec::type1(7, 3, 101).unwrap();
        let f = spec.field();
        let h = spec.parity_matrix();
        for t in 1..=4usize {
            let row = h.row((t - 1) * 4);
            let pw = |x| f.pow(f.elem(x), t as u64 - 1);
            let want = [pw(1), Fe::ZERO, pw(8), pw(9)];
            assert_eq!(&row[..4], &want[..]);
        }
    }

    #[test]
    fn type2_tau_positions_at_t1() {
        let spec = BlockCodeSpec::type2(6, 2, 13).unwrap();
        let h = spec.parity_matrix();
        let ell = spec.ell();
        for i in 1..=4 {
            for j in 1..i {
                // entry (i, j) of H_{1,i}, 1-based
                assert_eq!(h.get(i - 1, (i - 1) * ell + j - 1), spec.field().elem(12));
            }
            for j in i + 1..=4 {
                assert_eq!(h.get(i - 1, (i - 1) * ell + j - 1), Fe::ONE);
            }
        }
    }

    #[test]
    fn spec_validation() {
        let f = Field::new(13).unwrap();
        let lam: Vec<Fe> = (1..=6).map(|j| f.elem(j)).collect();
        assert!(BlockCodeSpec::type2_with(6, 3, f, lam.clone(), Fe::ONE).is_err());
        assert!(BlockCodeSpec::type2_with(6, 3, f, lam.clone(), Fe::ZERO).is_err());
        assert!(BlockCodeSpec::type1_with(6, 3, f, lam.clone(), vec![f.elem(6)]).is_err());
        assert!(BlockCodeSpec::type1_with(6, 3, f, lam, vec![f.elem(7)]).is_ok());
        assert!(BlockCodeSpec::type1(4, 3, 13).is_err());
    }

    #[test]
    fn mds_examples() {
        let f11 = Field::new(11).unwrap();
        let t1 = BlockCodeSpec::type1_with(6, 3, f11, (1..=6).map(|j| f11.elem(j)).collect(), vec![f11.elem(7)]).unwrap();
        let v = check_mds(&t1).unwrap();
        assert_eq!(v.subsets_checked, 20);
        assert!(v.is_mds());
        let f13 = Field::new(13).unwrap();
        let t2 = BlockCodeSpec::type2_with(6, 3, f13, (1..=6).map(|j| f13.elem(j)).collect(), f13.elem(12)).unwrap();
        assert!(check_mds(&t2).unwrap().is_mds());
    }

    #[test]
    fn repair_matches_decoder_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, k) in [(4, 2), (5, 2), (6, 3), (6, 2)] {
            let t1 = BlockCodeSpec::type1(n, k, 11).unwrap();
            let t2 = BlockCodeSpec::type2(n, k, 13).unwrap();
            for _ in 0..10 {
                let cw = random_codeword(&t1, &mut rng);
                assert!(syndrome_zero(&t1, &cw));
                let rep = repair_type1(&t1, &cw).unwrap();
                assert_eq!((&rep.first, &rep.second), (&cw[0], &cw[1]));
                assert_eq!(rep.transcript.bandwidth(), 2 * (n - 1));
                assert_eq!(rep.transcript.access(), 2 * (n - 2));

                let cw = random_codeword(&t2, &mut rng);
                for j1 in 1..=t2.r() {
                    for j2 in j1 + 1..=t2.r() {
                        let rep = repair_type2(&t2, &cw, j1, j2).unwrap();
                        assert_eq!((&rep.first, &rep.second), (&cw[j1 - 1], &cw[j2 - 1]));
                        assert_eq!(rep.transcript.bandwidth(), 2 * (n - 1));
                        assert_eq!(rep.transcript.access(), 2 * (n - 2));
                        assert!(rep.transcript.helper_access.iter().all(|&(_, c)| c == 2));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_codeword_repairs_to_zero() {
        let spec = BlockCodeSpec::type1(5, 2, 11).unwrap();
        let zero = vec![vec![Fe::ZERO; 3]; 5];
        let rep = repair_type1(&spec, &zero).unwrap();
        assert!(rep.first.iter().chain(&rep.second).all(|v| v.is_zero()));
    }

    #[test]
    fn type2_rejects_outside_pairs() {
        let spec = BlockCodeSpec::type2(5, 2, 13).unwrap();
        let zero = vec![vec![Fe::ZERO; 3]; 5];
        assert!(matches!(repair_type2(&spec, &zero, 1, 4), Err(Error::UnsupportedPattern(_))));
        assert!(matches!(repair_type2(&spec, &zero, 2, 2), Err(Error::UnsupportedPattern(_))));
        assert!(matches!(repair_type1(&spec, &zero), Err(Error::UnsupportedPattern(_))));
    }
}
