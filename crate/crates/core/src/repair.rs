//! Cooperative repair of two failed nodes from `d = n - 2` helpers.
//!
//! Each newcomer downloads one axis set `A(pos, digit)` from every helper and
//! works row by row through the parity rows labelled by that set. Intra-group
//! pairs proceed shell by shell with one bundle exchange per shell; cross-group
//! pairs run a fixpoint over their rows and exchange once at the end.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{DenseMatrix, Fe};
use crate::msrcode::{CodeParams, Codeword, PatternBuf};
use crate::pairmap::PairClass;

/// Largest sub-packetization for which transcripts list accessed coordinates.
pub const MAX_LOGGED_ELL: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum RepairCase {
    IntraGroup { u: usize, v1: usize, v2: usize },
    CrossGroup { rho: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairPlan {
    pub pair: (usize, usize),
    pub case: RepairCase,
    /// `(position, digit)` of the axis set each newcomer downloads.
    pub row_sets: [(usize, u64); 2],
}

impl RepairPlan {
    pub fn new(params: &CodeParams, i1: usize, i2: usize) -> Result<Self> {
        let pairs = params.pairs();
        let (case, row_sets) = match pairs.classify(i1, i2)? {
            PairClass::IntraGroup { u } => {
                let (_, v1) = pairs.group_of(i1).expect("grouped");
                let (_, v2) = pairs.group_of(i2).expect("grouped");
                (RepairCase::IntraGroup { u, v1, v2 }, [(u, v1 as u64), (u, v2 as u64)])
            }
            PairClass::CrossGroup { rho } => (RepairCase::CrossGroup { rho }, [(rho, 0), (rho, 1)]),
        };
        Ok(RepairPlan { pair: (i1, i2), case, row_sets })
    }

    pub fn failed(&self) -> [usize; 2] {
        [self.pair.0, self.pair.1]
    }

    /// Helper nodes in ascending order.
    pub fn helpers(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|j| !self.failed().contains(j)).collect()
    }
}

/// What one helper ships: its symbols on each newcomer's axis set, read verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelperRead {
    pub node: usize,
    /// `symbols[side][axis_rank(a)]` for `a` in the axis set of newcomer `side`.
    pub symbols: [Vec<Fe>; 2],
}

impl HelperRead {
    /// Coordinates read from storage.
    pub fn accessed(&self) -> u64 {
        (self.symbols[0].len() + self.symbols[1].len()) as u64
    }
}

/// Reads the plan's two axis sets from helper `p`'s stored node vector.
pub fn helper_read(params: &CodeParams, plan: &RepairPlan, p: usize, data: &[Fe]) -> Result<HelperRead> {
    if p == 0 || p > params.n() {
        return Err(Error::OutOfRange(format!("node {p} not in [1, {}]", params.n())));
    }
    if plan.failed().contains(&p) {
        return Err(Error::NodeFailed(p));
    }
    if data.len() as u64 != params.ell() {
        return Err(Error::Dimension(format!("helper {p} holds {} symbols, ell = {}", data.len(), params.ell())));
    }
    let space = params.space();
    let read = |(pos, digit): (usize, u64)| -> Result<Vec<Fe>> {
        Ok(space.axis_set(pos, digit)?.map(|a| data[a as usize]).collect())
    };
    Ok(HelperRead { node: p, symbols: [read(plan.row_sets[0])?, read(plan.row_sets[1])?] })
}

/// Per-newcomer view of everything the helpers shipped.
struct HelperSet<'h> {
    slot: Vec<Option<&'h HelperRead>>,
}

impl<'h> HelperSet<'h> {
    fn new(params: &CodeParams, plan: &RepairPlan, reads: &'h [HelperRead]) -> Result<Self> {
        let mut slot = vec![None; params.n() + 1];
        let len = params.space().axis_len() as usize;
        for h in reads {
            if h.node == 0 || h.node > params.n() || plan.failed().contains(&h.node) {
                return Err(Error::InvalidParams(format!("node {} cannot act as a helper", h.node)));
            }
            if slot[h.node].replace(h).is_some() {
                return Err(Error::InvalidParams(format!("helper {} supplied twice", h.node)));
            }
            if h.symbols.iter().any(|s| s.len() != len) {
                return Err(Error::Dimension(format!("helper {} shipped a partial axis set", h.node)));
            }
        }
        if let Some(missing) = plan.helpers(params.n()).into_iter().find(|&j| slot[j].is_none()) {
            return Err(Error::InvalidParams(format!("helper {missing} did not respond")));
        }
        Ok(HelperSet { slot })
    }
}

/// Knowledge of one newcomer about the two failed nodes.
struct Store {
    me: usize,
    peer: usize,
    vals: [Vec<Fe>; 2],
    known: [Vec<bool>; 2],
}

impl Store {
    fn new(me: usize, peer: usize, ell: u64) -> Self {
        let ell = ell as usize;
        Store {
            me,
            peer,
            vals: [vec![Fe::ZERO; ell], vec![Fe::ZERO; ell]],
            known: [vec![false; ell], vec![false; ell]],
        }
    }

    #[inline]
    fn which(&self, node: usize) -> Option<usize> {
        if node == self.me {
            Some(0)
        } else if node == self.peer {
            Some(1)
        } else {
            None
        }
    }

    #[inline]
    fn get(&self, w: usize, col: u64) -> Option<Fe> {
        self.known[w][col as usize].then(|| self.vals[w][col as usize])
    }

    fn set(&mut self, node: usize, col: u64, v: Fe) {
        let w = self.which(node).expect("failed node");
        self.vals[w][col as usize] = v;
        self.known[w][col as usize] = true;
    }

    fn own_complete(&self) -> bool {
        self.known[0].iter().all(|&k| k)
    }
}

#[derive(Clone, Copy, Debug)]
struct Term {
    node: usize,
    col: u64,
    point: usize,
    scale: Fe,
}

/// Row `a` with every known contribution folded into per-point sums.
struct RowState {
    known: Vec<Fe>,
    unknown: Vec<Term>,
    /// Highest shell among failed-node symbols that were already known.
    known_failed_shell: Option<usize>,
}

#[derive(Clone, Debug)]
struct Bundle {
    terms: Vec<Term>,
    value: Fe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageKind {
    Download,
    Collab,
}

/// One transfer between nodes. Downloads are round 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub round: usize,
    pub from: usize,
    pub to: usize,
    pub kind: MessageKind,
    pub symbols: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HelperAccess {
    pub node: usize,
    pub accessed: u64,
    pub transmitted: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairTranscript {
    pub pair: (usize, usize),
    pub case: RepairCase,
    pub per_helper_access: Vec<HelperAccess>,
    pub downloaded: u64,
    pub collaborated: u64,
    pub gamma: u64,
    pub gamma_a: u64,
    pub bound_gamma: u64,
    pub bound_gamma_a: u64,
    pub rounds: usize,
    pub messages: Vec<Transfer>,
    /// Fixpoint passes per newcomer (cross-group pairs only).
    #[serde(skip)]
    pub fixpoint_passes: Option<[usize; 2]>,
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    pub first: Vec<Fe>,
    pub second: Vec<Fe>,
    pub transcript: RepairTranscript,
}

/// `(bandwidth, access)` lower bounds for `h = 2` failures and `d = n - 2` helpers.
pub fn repair_bounds(params: &CodeParams) -> (u64, u64) {
    let (n, k, ell) = (params.n() as u128, params.k() as u128, params.ell() as u128);
    let (d, h) = (n - 2, 2u128);
    let den = d - k + h;
    (((d + h - 1) * h * ell).div_ceil(den) as u64, (d * h * ell).div_ceil(den) as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptimalityVerdict {
    pub gamma: u64,
    pub bound_gamma: u64,
    pub gamma_a: u64,
    pub bound_gamma_a: u64,
    /// Every helper transmitted exactly what it accessed.
    pub verbatim_helpers: bool,
    pub optimal: bool,
}

pub fn check_optimal(t: &RepairTranscript, params: &CodeParams) -> OptimalityVerdict {
    let (bg, bga) = repair_bounds(params);
    let verbatim = t.per_helper_access.iter().all(|h| h.accessed == h.transmitted);
    let consistent = t.gamma == t.downloaded + t.collaborated
        && t.gamma_a == t.per_helper_access.iter().map(|h| h.accessed).sum::<u64>()
        && t.per_helper_access.len() == params.n() - 2;
    OptimalityVerdict {
        gamma: t.gamma,
        bound_gamma: bg,
        gamma_a: t.gamma_a,
        bound_gamma_a: bga,
        verbatim_helpers: verbatim,
        optimal: verbatim && consistent && t.gamma == bg && t.gamma_a == bga && t.bound_gamma == bg,
    }
}

enum Schedule {
    /// `rows[side][shell]`, ascending.
    Shells([Vec<Vec<u64>>; 2]),
    /// `passes[side][pass]`, ascending within a pass.
    Fixpoint([Vec<Vec<u64>>; 2]),
}

/// Repair procedure for one failed pair, reusable across codewords.
pub struct RepairEngine {
    params: CodeParams,
    plan: RepairPlan,
    schedule: Schedule,
}

impl RepairEngine {
    pub fn new(params: &CodeParams, plan: RepairPlan) -> Result<Self> {
        params.check_materializable()?;
        let space = params.space();
        let schedule = match plan.case {
            RepairCase::IntraGroup { .. } => {
                let rows = plan.row_sets.map(|(pos, digit)| {
                    let mut shells = vec![Vec::new(); space.max_shell() + 1];
                    for a in space.axis_set(pos, digit).expect("valid plan") {
                        shells[space.suffix_weight(a)].push(a);
                    }
                    shells
                });
                Schedule::Shells(rows)
            }
            RepairCase::CrossGroup { rho } => {
                let a0 = fixpoint_schedule(params, &plan, 0, rho)?;
                let a1 = fixpoint_schedule(params, &plan, 1, rho)?;
                Schedule::Fixpoint([a0, a1])
            }
        };
        Ok(RepairEngine { params: params.clone(), plan, schedule })
    }

    pub fn plan(&self) -> &RepairPlan {
        &self.plan
    }

    /// Runs both newcomers on the helpers' shipped data.
    pub fn repair(&self, reads: &[HelperRead]) -> Result<RepairOutcome> {
        let helpers = HelperSet::new(&self.params, &self.plan, reads)?;
        let (i1, i2) = self.plan.pair;
        let ell = self.params.ell();
        let mut stores = [Store::new(i1, i2, ell), Store::new(i2, i1, ell)];
        let mut messages = Vec::new();
        let share = self.params.space().axis_len();
        for p in self.plan.helpers(self.params.n()) {
            for to in [i1, i2] {
                messages.push(Transfer { round: 0, from: p, to, kind: MessageKind::Download, symbols: share });
            }
        }
        let (rounds, passes) = match &self.schedule {
            Schedule::Shells(rows) => (self.run_intra(rows, &helpers, &mut stores, &mut messages)?, None),
            Schedule::Fixpoint(passes) => {
                self.run_cross(passes, &helpers, &mut stores, &mut messages)?;
                (1, Some([passes[0].len(), passes[1].len()]))
            }
        };
        for s in &stores {
            if !s.own_complete() {
                return Err(Error::internal(format!("newcomer {} incomplete after repair", s.me)));
            }
        }
        let [s1, s2] = stores;
        let transcript = self.transcript(reads, messages, rounds, passes);
        Ok(RepairOutcome { first: s1.vals[0].clone(), second: s2.vals[0].clone(), transcript })
    }

    fn transcript(&self, reads: &[HelperRead], messages: Vec<Transfer>, rounds: usize, passes: Option<[usize; 2]>) -> RepairTranscript {
        let space = self.params.space();
        let mut per_helper_access: Vec<HelperAccess> = reads
            .iter()
            .map(|h| {
                let coordinates = (self.params.ell() <= MAX_LOGGED_ELL).then(|| {
                    let mut c: Vec<u64> = self
                        .plan
                        .row_sets
                        .iter()
                        .flat_map(|&(pos, digit)| space.axis_set(pos, digit).expect("valid plan"))
                        .collect();
                    c.sort_unstable();
                    c
                });
                HelperAccess { node: h.node, accessed: h.accessed(), transmitted: h.accessed(), coordinates }
            })
            .collect();
        per_helper_access.sort_by_key(|h| h.node);
        let sum = |kind| messages.iter().filter(|m| m.kind == kind).map(|m| m.symbols).sum::<u64>();
        let downloaded = sum(MessageKind::Download);
        let collaborated = sum(MessageKind::Collab);
        let (bound_gamma, bound_gamma_a) = repair_bounds(&self.params);
        RepairTranscript {
            pair: self.plan.pair,
            case: self.plan.case,
            gamma_a: per_helper_access.iter().map(|h| h.accessed).sum(),
            per_helper_access,
            downloaded,
            collaborated,
            gamma: downloaded + collaborated,
            bound_gamma,
            bound_gamma_a,
            rounds,
            messages,
            fixpoint_passes: passes,
        }
    }

    fn gather(&self, side: usize, a: u64, store: &Store, helpers: &HelperSet, buf: &mut PatternBuf, st: &mut RowState) -> Result<()> {
        let p = &self.params;
        let f = p.field();
        let (pos, digit) = self.plan.row_sets[side];
        st.known.iter_mut().for_each(|x| *x = Fe::ZERO);
        st.unknown.clear();
        st.known_failed_shell = None;
        for e in buf.fill(p, a)? {
            let point = p.point_index(e.point);
            let scale = if e.tau { p.tau() } else { Fe::ONE };
            let value = match store.which(e.node) {
                Some(w) => match store.get(w, e.col) {
                    Some(v) => {
                        let s = p.space().suffix_weight(e.col);
                        st.known_failed_shell = Some(st.known_failed_shell.map_or(s, |m| m.max(s)));
                        v
                    }
                    None => {
                        st.unknown.push(Term { node: e.node, col: e.col, point, scale });
                        continue;
                    }
                },
                None => {
                    if p.space().digit(e.col, pos) != digit {
                        return Err(Error::AccessViolation { node: e.node, index: e.col });
                    }
                    let h = helpers.slot[e.node].expect("helper present");
                    h.symbols[side][p.space().axis_rank(e.col, pos) as usize]
                }
            };
            st.known[point] = f.mul_add(st.known[point], scale, value);
        }
        Ok(())
    }

    /// Solves the row's Vandermonde system for one bundle value per unknown point.
    fn solve(&self, a: u64, st: &RowState) -> Result<Vec<Bundle>> {
        let p = &self.params;
        let f = p.field();
        let r = p.r();
        let mut pts: Vec<usize> = st.unknown.iter().map(|t| t.point).collect();
        pts.sort_unstable();
        pts.dedup();
        let q = pts.len();
        if q > r {
            return Err(Error::internal(format!("row {a}: {q} unknown points exceed {r} equations")));
        }
        let power = |idx: usize, e: usize| p.power(p.point_at(idx), e + 1);
        let known_sum = |e: usize| {
            st.known
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .fold(Fe::ZERO, |acc, (idx, &v)| f.mul_add(acc, power(idx, e), v))
        };
        let values: Vec<Fe> = pts.iter().map(|&i| p.point_value(p.point_at(i))).collect();
        let vm = DenseMatrix::vandermonde(f, &values, q);
        let rhs: Vec<Fe> = (0..q).map(|e| f.neg(known_sum(e))).collect();
        let sol = f.solve_dense(&vm, &rhs).map_err(|err| Error::internal(format!("row {a}: {err}")))?;
        for e in q..r {
            let s = pts.iter().zip(&sol).fold(known_sum(e), |acc, (&i, &v)| f.mul_add(acc, power(i, e), v));
            if !s.is_zero() {
                return Err(Error::Inconsistent(format!("helper data violates parity row {a}")));
            }
        }
        Ok(pts
            .iter()
            .zip(sol)
            .map(|(&i, value)| Bundle { terms: st.unknown.iter().filter(|t| t.point == i).copied().collect(), value })
            .collect())
    }

    fn row_state(&self) -> RowState {
        RowState { known: vec![Fe::ZERO; self.params.point_count()], unknown: Vec::new(), known_failed_shell: None }
    }

    fn run_intra(&self, rows: &[Vec<Vec<u64>>; 2], helpers: &HelperSet, stores: &mut [Store; 2], messages: &mut Vec<Transfer>) -> Result<usize> {
        let p = &self.params;
        let f = p.field();
        let (u, _) = self.plan.row_sets[0];
        let mut buf = PatternBuf::new(p);
        let mut st = self.row_state();
        let mut round = 0;
        for s in 0..rows[0].len() {
            let mut outgoing: [Vec<Bundle>; 2] = [Vec::new(), Vec::new()];
            for side in 0..2 {
                let store = &mut stores[side];
                for &a in &rows[side][s] {
                    self.gather(side, a, store, helpers, &mut buf, &mut st)?;
                    if st.known_failed_shell.is_some_and(|k| k >= s) {
                        return Err(Error::internal(format!("row {a} of shell {s} uses a failed symbol from shell {:?}", st.known_failed_shell)));
                    }
                    // unknowns: the newcomer's whole fiber through digit u, plus the peer's symbol at a
                    let expected = p.r() + 1;
                    let fiber_ok = st.unknown.iter().all(|t| {
                        (t.node == store.me && p.space().subst(t.col, u, 0) == p.space().subst(a, u, 0))
                            || (t.node == store.peer && t.col == a)
                    });
                    if st.unknown.len() != expected || !fiber_ok {
                        return Err(Error::internal(format!("row {a}: unexpected unknown set for intra-group repair")));
                    }
                    for b in self.solve(a, &st)? {
                        match b.terms[..] {
                            [t] => store.set(t.node, t.col, f.div(b.value, t.scale)?),
                            [_, _] => outgoing[side].push(b),
                            _ => return Err(Error::internal(format!("row {a}: bundle of {} terms", b.terms.len()))),
                        }
                    }
                }
            }
            if outgoing[0].is_empty() && outgoing[1].is_empty() {
                continue;
            }
            round += 1;
            for side in 0..2 {
                messages.push(Transfer {
                    round,
                    from: stores[side].me,
                    to: stores[side].peer,
                    kind: MessageKind::Collab,
                    symbols: outgoing[side].len() as u64,
                });
            }
            for side in 0..2 {
                combine_pairs(p, &mut stores[side], &outgoing[side], &outgoing[1 - side])?;
            }
        }
        Ok(round)
    }

    fn run_cross(&self, passes: &[Vec<Vec<u64>>; 2], helpers: &HelperSet, stores: &mut [Store; 2], messages: &mut Vec<Transfer>) -> Result<()> {
        let p = &self.params;
        let f = p.field();
        let mut buf = PatternBuf::new(p);
        let mut st = self.row_state();
        for side in 0..2 {
            let store = &mut stores[side];
            for &a in passes[side].iter().flatten() {
                self.gather(side, a, store, helpers, &mut buf, &mut st)?;
                if let Some(t) = st.unknown.iter().find(|t| !self.in_cross_bundle(side, store, a, t.node, t.col)) {
                    return Err(Error::internal(format!("row {a}: symbol ({}, {}) unknown outside the bundle", t.node, t.col)));
                }
                for b in self.solve(a, &st)? {
                    let [t] = b.terms[..] else {
                        return Err(Error::internal(format!("row {a}: evaluation point shared by unknowns")));
                    };
                    store.set(t.node, t.col, f.div(b.value, t.scale)?);
                }
            }
        }
        // one round: each side forwards what it learned about the other
        let space = p.space();
        let mut sent = [Vec::new(), Vec::new()];
        for side in 0..2 {
            let (pos, digit) = self.plan.row_sets[side];
            for a in space.axis_set(pos, digit)? {
                let v = stores[side]
                    .get(1, a)
                    .ok_or_else(|| Error::internal(format!("newcomer {} missing peer symbol {a}", stores[side].me)))?;
                sent[side].push((a, v));
            }
        }
        for side in 0..2 {
            messages.push(Transfer {
                round: 1,
                from: stores[side].me,
                to: stores[side].peer,
                kind: MessageKind::Collab,
                symbols: sent[side].len() as u64,
            });
            let me = stores[1 - side].me;
            for &(a, v) in &sent[side] {
                stores[1 - side].set(me, a, v);
            }
        }
        Ok(())
    }

    fn in_cross_bundle(&self, side: usize, store: &Store, a: u64, node: usize, col: u64) -> bool {
        let (rho, digit) = self.plan.row_sets[side];
        let space = self.params.space();
        if node == store.peer {
            return col == a;
        }
        node == store.me && (col == a || (space.digit(col, rho) >= 2 && space.subst(col, rho, digit) == a))
    }
}

/// Pairs each own bundle with the received bundle over the same two symbols
/// and solves the 2x2 system.
fn combine_pairs(params: &CodeParams, store: &mut Store, own: &[Bundle], received: &[Bundle]) -> Result<()> {
    let f = params.field();
    let key = |b: &Bundle| {
        let mut k = [(b.terms[0].node, b.terms[0].col), (b.terms[1].node, b.terms[1].col)];
        k.sort_unstable();
        k
    };
    let mut mine: HashMap<[(usize, u64); 2], &Bundle> = own.iter().map(|b| (key(b), b)).collect();
    for rb in received {
        let k = key(rb);
        let ob = mine.remove(&k).ok_or_else(|| Error::internal(format!("received bundle over {k:?} has no partner")))?;
        let coeff = |b: &Bundle, v: (usize, u64)| b.terms.iter().find(|t| (t.node, t.col) == v).map(|t| t.scale).unwrap();
        let mut m = DenseMatrix::zeros(2, 2);
        for (i, b) in [ob, rb].into_iter().enumerate() {
            for (j, &v) in k.iter().enumerate() {
                m.set(i, j, coeff(b, v));
            }
        }
        let x = f.solve_dense(&m, &[ob.value, rb.value]).map_err(|e| Error::internal(format!("bundle pair {k:?}: {e}")))?;
        for (&(node, col), v) in k.iter().zip(x) {
            store.set(node, col, v);
        }
    }
    if !mine.is_empty() {
        return Err(Error::internal(format!("{} bundles left unmatched", mine.len())));
    }
    Ok(())
}

/// Simulates which rows become solvable in which pass.
fn fixpoint_schedule(params: &CodeParams, plan: &RepairPlan, side: usize, rho: usize) -> Result<Vec<Vec<u64>>> {
    let space = params.space();
    let (me, peer) = if side == 0 { plan.pair } else { (plan.pair.1, plan.pair.0) };
    let digit = plan.row_sets[side].1;
    let r = params.r() as u64;
    let mut known = [vec![false; params.ell() as usize], vec![false; params.ell() as usize]];
    let mut pending: Vec<u64> = space.axis_set(rho, digit)?.collect();
    let mut passes = Vec::new();
    let mut buf = PatternBuf::new(params);
    while !pending.is_empty() {
        let mut solved = Vec::new();
        let mut still = Vec::new();
        for &a in &pending {
            let ready = buf.fill(params, a)?.iter().all(|e| {
                let w = if e.node == me {
                    0
                } else if e.node == peer {
                    1
                } else {
                    return true;
                };
                known[w][e.col as usize]
                    || (w == 1 && e.col == a)
                    || (w == 0 && (e.col == a || (space.digit(e.col, rho) >= 2 && space.subst(e.col, rho, digit) == a)))
            });
            if ready {
                known[0][a as usize] = true;
                known[1][a as usize] = true;
                for w in 2..r {
                    known[0][space.subst(a, rho, w) as usize] = true;
                }
                solved.push(a);
            } else {
                still.push(a);
            }
        }
        if solved.is_empty() {
            return Err(Error::internal(format!(
                "repair of ({}, {}) stalls with {} rows unsolved",
                plan.pair.0,
                plan.pair.1,
                still.len()
            )));
        }
        passes.push(solved);
        pending = still;
    }
    Ok(passes)
}

/// Plans and runs the repair of `(i1, i2)` against a full codeword,
/// reading only the helpers' axis sets.
pub fn repair_pair(params: &CodeParams, cw: &Codeword, i1: usize, i2: usize) -> Result<RepairOutcome> {
    let plan = RepairPlan::new(params, i1, i2)?;
    let engine = RepairEngine::new(params, plan)?;
    let reads = engine
        .plan()
        .helpers(params.n())
        .into_iter()
        .map(|p| helper_read(params, engine.plan(), p, cw.node(p)))
        .collect::<Result<Vec<_>>>()?;
    engine.repair(&reads)
}
