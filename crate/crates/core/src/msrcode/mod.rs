//! The `(n, k, r^m)` cooperative MSR code.
//!
//! The code is defined by a parity-check matrix that is never materialized:
//! [`CodeParams::row_pattern`] generates the support of the `r` parity rows
//! labelled by one coordinate index `a`, and every consumer (encoder,
//! decoders, repair) works row by row.

mod decode;
mod oracle;
mod row;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::pairmap::PairMap;
use crate::rindex::IndexSpace;

pub use decode::{encode, recover_erasures};
pub(crate) use oracle::combinations;
pub(crate) use row::PatternBuf;
pub use oracle::{erasure_decode, erasure_decode_batch, verify_mds, MdsFailure, MdsVerdict};
pub use row::{PatternEntry, Point, RowEntry, RowPattern, SparseRow};

/// Prime used when none is given: every byte value embeds injectively.
pub const DEFAULT_PRIME: u64 = 65537;

/// Default ceiling on the sub-packetization of codewords held in memory.
pub const DEFAULT_MAX_ELL: u64 = 1 << 20;

/// Default ceiling on the sub-packetization for exhaustive MDS verification.
pub const DEFAULT_MAX_VERIFY_ELL: u64 = 8192;

/// Environment variable that overrides both ceilings above.
pub const MAX_ELL_ENV: &str = "COOP_MSR_MAX_ELL";

fn env_limit() -> Option<u64> {
    std::env::var(MAX_ELL_ENV).ok().and_then(|v| v.trim().parse().ok())
}

pub fn max_materialized_ell() -> u64 {
    env_limit().unwrap_or(DEFAULT_MAX_ELL)
}

pub fn max_verify_ell() -> u64 {
    env_limit().unwrap_or(DEFAULT_MAX_VERIFY_ELL)
}

/// Everything that determines the code.
#[derive(Clone)]
pub struct CodeParams {
    n: usize,
    k: usize,
    r: usize,
    field: Field,
    pairs: PairMap,
    space: IndexSpace,
    lambdas: Vec<Fe>,
    gammas: Vec<Fe>,
    tau: Fe,
    /// `powers[point][t - 1]`, points ordered `lambda_1..lambda_n, gamma_1..gamma_{r-2}`.
    powers: Vec<Vec<Fe>>,
    /// Pair digit `g + 1 + i` -> (owner through Omega_0, owner through Omega_1).
    cross_owner: Vec<(usize, usize)>,
    cache: Arc<Cache>,
}

#[derive(Default)]
struct Cache {
    class_order: OnceLock<Vec<u64>>,
    solvers: Mutex<HashMap<Vec<usize>, Arc<decode::ClassSolver>>>,
}

impl std::fmt::Debug for CodeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CodeParams")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("p", &self.field.modulus())
            .field("m", &self.space.m())
            .field("ell", &self.space.ell())
            .field("lambdas", &self.lambdas)
            .field("gammas", &self.gammas)
            .field("tau", &self.tau)
            .finish()
    }
}

impl PartialEq for CodeParams {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.field == other.field
            && self.lambdas == other.lambdas
            && self.gammas == other.gammas
            && self.tau == other.tau
    }
}

impl Eq for CodeParams {}

/// Sub-packetization exponent `C(n,2) - floor(n/r) (C(r,2) - 1)`.
pub fn digit_count(n: usize, k: usize) -> Result<usize> {
    validate_nk(n, k)?;
    let r = n - k;
    let c2 = |x: usize| x * (x - 1) / 2;
    Ok(c2(n) - (n / r) * (c2(r) - 1))
}

fn validate_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || n <= k {
        return Err(Error::InvalidParams(format!("need n > k >= 1, got n = {n}, k = {k}")));
    }
    if n - k < 2 {
        return Err(Error::InvalidParams(format!("need r = n - k >= 2, got {}", n - k)));
    }
    if n > 64 {
        return Err(Error::InvalidParams(format!("n = {n} exceeds 64 nodes")));
    }
    Ok(())
}

impl CodeParams {
    /// Default points: `lambda_j = j`, `gamma_w = n + w`, `tau = p - 1`.
    pub fn new(n: usize, k: usize, p: u64) -> Result<Self> {
        validate_nk(n, k)?;
        let field = Field::new(p)?;
        let r = n - k;
        let lambdas = (1..=n as u64).map(|j| field.elem(j)).collect();
        let gammas = (1..=r.saturating_sub(2) as u64).map(|w| field.elem(n as u64 + w)).collect();
        let tau = field.elem(p - 1);
        Self::with_points(n, k, field, lambdas, gammas, tau)
    }

    pub fn with_points(n: usize, k: usize, field: Field, lambdas: Vec<Fe>, gammas: Vec<Fe>, tau: Fe) -> Result<Self> {
        validate_nk(n, k)?;
        let r = n - k;
        let needed = (n + r - 2) as u64;
        if (field.modulus() as u64) <= needed {
            return Err(Error::FieldTooSmall { modulus: field.modulus(), needed });
        }
        if lambdas.len() != n || gammas.len() != r - 2 {
            return Err(Error::InvalidParams(format!(
                "expected {n} lambdas and {} gammas, got {} and {}",
                r - 2,
                lambdas.len(),
                gammas.len()
            )));
        }
        let mut points: Vec<Fe> = lambdas.iter().chain(&gammas).copied().collect();
        for &v in &points {
            field.try_elem(v.value() as u64)?;
        }
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("evaluation points must be pairwise distinct".into()));
        }
        if tau == Fe::ZERO || tau == Fe::ONE {
            return Err(Error::InvalidParams("tau must differ from 0 and 1".into()));
        }
        field.try_elem(tau.value() as u64)?;

        let pairs = PairMap::build(n, r)?;
        let space = IndexSpace::new(r as u64, pairs.m(), pairs.g())?;
        let powers = lambdas
            .iter()
            .chain(&gammas)
            .map(|&x| (0..r as u64).map(|e| field.pow(x, e)).collect())
            .collect();
        let cross_owner = (pairs.g() + 1..=pairs.m()).map(|rho| pairs.cross_pair(rho).expect("bijective")).collect();
        Ok(CodeParams {
            n,
            k,
            r,
            field,
            pairs,
            space,
            lambdas,
            gammas,
            tau,
            powers,
            cross_owner,
            cache: Arc::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn pairs(&self) -> &PairMap {
        &self.pairs
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    pub fn g(&self) -> usize {
        self.space.g()
    }

    pub fn ell(&self) -> u64 {
        self.space.ell()
    }

    pub fn lambdas(&self) -> &[Fe] {
        &self.lambdas
    }

    pub fn gammas(&self) -> &[Fe] {
        &self.gammas
    }

    pub fn tau(&self) -> Fe {
        self.tau
    }

    /// `1` when `x < v`, `tau` when `x > v`.
    pub fn coeff_f(&self, x: u64, v: u64) -> Result<Fe> {
        match x.cmp(&v) {
            std::cmp::Ordering::Less => Ok(Fe::ONE),
            std::cmp::Ordering::Greater => Ok(self.tau),
            std::cmp::Ordering::Equal => Err(Error::OutOfRange(format!("coeff_f is undefined on the diagonal ({x}, {x})"))),
        }
    }

    /// 1 iff `rho` is in `Omega_{j,0}` with `a_rho = 0`, or in `Omega_{j,1}` with `a_rho = 1`.
    pub fn coeff_chi(&self, a: u64, rho: usize, j: usize) -> Result<u8> {
        if rho <= self.g() || rho > self.m() {
            return Err(Error::OutOfRange(format!("pair digit {rho} not in [{}, {}]", self.g() + 1, self.m())));
        }
        let (o0, o1) = self.pairs.omega(j)?;
        let d = self.space.digit(a, rho);
        Ok(u8::from((d == 0 && o0.contains(&rho)) || (d == 1 && o1.contains(&rho))))
    }

    /// `x^(t-1)` for an evaluation point.
    #[inline]
    pub fn power(&self, point: Point, t: usize) -> Fe {
        self.powers[self.point_index(point)][t - 1]
    }

    #[inline]
    pub(crate) fn point_index(&self, point: Point) -> usize {
        match point {
            Point::Lambda(j) => j - 1,
            Point::Gamma(w) => self.n + w - 1,
        }
    }

    pub(crate) fn point_count(&self) -> usize {
        self.powers.len()
    }

    pub(crate) fn point_at(&self, idx: usize) -> Point {
        if idx < self.n {
            Point::Lambda(idx + 1)
        } else {
            Point::Gamma(idx - self.n + 1)
        }
    }

    /// The field value of an evaluation point.
    pub fn point_value(&self, point: Point) -> Fe {
        match point {
            Point::Lambda(j) => self.lambdas[j - 1],
            Point::Gamma(w) => self.gammas[w - 1],
        }
    }

    /// Fails unless a codeword of this code may be held in memory.
    pub fn check_materializable(&self) -> Result<()> {
        let limit = max_materialized_ell();
        if self.ell() > limit {
            return Err(Error::GuardExceeded { what: "sub-packetization", value: self.ell(), limit });
        }
        Ok(())
    }

    /// Suffix classes (indices with equal pair digits) in ascending shell order.
    pub(crate) fn class_order(&self) -> &[u64] {
        self.cache.class_order.get_or_init(|| {
            let block = self.space.stride(self.g());
            let mut classes: Vec<(usize, u64)> =
                (0..self.ell() / block).map(|c| (self.space.suffix_weight(c * block), c)).collect();
            classes.sort_unstable();
            classes.into_iter().map(|(_, c)| c).collect()
        })
    }

    pub(crate) fn solver_for(&self, erased: &[usize]) -> Result<Arc<decode::ClassSolver>> {
        if let Some(s) = self.cache.solvers.lock().expect("solver cache").get(erased) {
            return Ok(Arc::clone(s));
        }
        let solver = Arc::new(decode::ClassSolver::new(self, erased)?);
        self.cache.solvers.lock().expect("solver cache").insert(erased.to_vec(), Arc::clone(&solver));
        Ok(solver)
    }

    fn check_erased(&self, erased: &[usize]) -> Result<Vec<usize>> {
        let mut e = erased.to_vec();
        e.sort_unstable();
        e.dedup();
        if e.len() != erased.len() {
            return Err(Error::InvalidParams("duplicate erased node".into()));
        }
        if let Some(&bad) = e.iter().find(|&&j| j == 0 || j > self.n) {
            return Err(Error::OutOfRange(format!("node {bad} not in [1, {}]", self.n)));
        }
        if e.len() > self.r {
            return Err(Error::BeyondMdsRadius { erased: e.len(), r: self.r });
        }
        Ok(e)
    }
}

/// `n` node vectors of `ell` symbols each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    nodes: Vec<Vec<Fe>>,
}

impl Codeword {
    pub fn new(nodes: Vec<Vec<Fe>>) -> Result<Self> {
        let ell = nodes.first().map_or(0, Vec::len);
        if nodes.iter().any(|v| v.len() != ell) {
            return Err(Error::Dimension("node vectors differ in length".into()));
        }
        Ok(Codeword { nodes })
    }

    pub fn zeros(n: usize, ell: u64) -> Self {
        Codeword { nodes: vec![vec![Fe::ZERO; ell as usize]; n] }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn ell(&self) -> u64 {
        self.nodes.first().map_or(0, |v| v.len() as u64)
    }

    /// Contents of node `j` (1-based).
    pub fn node(&self, j: usize) -> &[Fe] {
        &self.nodes[j - 1]
    }

    pub fn node_mut(&mut self, j: usize) -> &mut Vec<Fe> {
        &mut self.nodes[j - 1]
    }

    #[inline]
    pub fn symbol(&self, j: usize, a: u64) -> Fe {
        self.nodes[j - 1][a as usize]
    }

    pub fn nodes(&self) -> &[Vec<Fe>] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Vec<Fe>> {
        self.nodes
    }

    pub(crate) fn check_shape(&self, params: &CodeParams) -> Result<()> {
        if self.n() != params.n() || self.ell() != params.ell() {
            return Err(Error::Dimension(format!(
                "codeword is {}x{}, code is {}x{}",
                self.n(),
                self.ell(),
                params.n(),
                params.ell()
            )));
        }
        Ok(())
    }
}

/// All `r * ell` parity checks, indexed `(t - 1) * ell + a`.
pub fn syndrome(params: &CodeParams, cw: &Codeword) -> Result<Vec<Fe>> {
    cw.check_shape(params)?;
    let f = params.field();
    let ell = params.ell() as usize;
    let mut out = vec![Fe::ZERO; params.r() * ell];
    let mut buf = row::PatternBuf::new(params);
    for a in 0..params.ell() {
        let entries = buf.fill(params, a)?;
        for e in entries {
            let c = cw.symbol(e.node, e.col);
            if c.is_zero() {
                continue;
            }
            for t in 1..=params.r() {
                let s = &mut out[(t - 1) * ell + a as usize];
                *s = f.mul_add(*s, params.coefficient(e, t), c);
            }
        }
    }
    Ok(out)
}

pub fn is_codeword(params: &CodeParams, cw: &Codeword) -> Result<bool> {
    Ok(syndrome(params, cw)?.iter().all(|v| v.is_zero()))
}
