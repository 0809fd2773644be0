//! Seeded verification runs over a grid of small codes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blocks::{self, BlockCodeSpec};
use crate::error::Result;
use crate::gf::Fe;
use crate::msrcode::{digit_count, encode, erasure_decode_batch, max_verify_ell, verify_mds, CodeParams, DEFAULT_PRIME};
use crate::repair::{check_optimal, helper_read, RepairEngine, RepairPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Small,
    Full,
}

impl Grid {
    pub fn codes(self) -> &'static [(usize, usize)] {
        match self {
            Grid::Small => &[(4, 2), (5, 3)],
            Grid::Full => &[(4, 2), (5, 3), (5, 2), (6, 3)],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    fn from_result(name: String, res: Result<Option<String>>) -> Self {
        match res {
            Ok(None) => Check::new(name, true, "ok"),
            Ok(Some(why)) => Check::new(name, false, why),
            Err(e) => Check::new(name, false, e.to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub grid: Grid,
    pub blocks: bool,
    pub seed: u64,
    /// Random codewords per repaired pair.
    pub codewords: usize,
}

fn random_data(params: &CodeParams, rng: &mut impl Rng) -> Vec<Vec<Fe>> {
    let p = params.field().modulus() as u64;
    (0..params.k()).map(|_| (0..params.ell()).map(|_| params.field().elem(rng.gen_range(0..p))).collect()).collect()
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn run(opts: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for &(n, k) in opts.grid.codes() {
        let r = n - k;
        let want = binom(n, 2) - n / r * (binom(r, 2) - 1);
        let got = digit_count(n, k).ok();
        out.push(Check::new(format!("digit-count ({n},{k})"), got == Some(want), format!("m = {got:?}, expected {want}")));

        let params = match CodeParams::new(n, k, DEFAULT_PRIME) {
            Ok(p) => p,
            Err(e) => {
                out.push(Check::new(format!("params ({n},{k})"), false, e.to_string()));
                continue;
            }
        };
        if params.ell() <= max_verify_ell() {
            let res = verify_mds(&params).map(|v| v.failure.map(|f| format!("{:?} has rank {} of {}", f.nodes, f.rank, f.size)));
            out.push(Check::from_result(format!("mds ({n},{k})"), res));
        }
        for i1 in 1..=n {
            for i2 in i1 + 1..=n {
                let res = check_pair(&params, i1, i2, opts.codewords, &mut rng);
                out.push(Check::from_result(format!("repair ({n},{k}) pair ({i1},{i2})"), res));
            }
        }
    }
    if opts.blocks {
        out.extend(block_checks(opts.seed, opts.codewords));
    }
    out
}

fn check_pair(params: &CodeParams, i1: usize, i2: usize, count: usize, rng: &mut impl Rng) -> Result<Option<String>> {
    let cws = (0..count).map(|_| encode(params, &random_data(params, rng))).collect::<Result<Vec<_>>>()?;
    let oracle = erasure_decode_batch(params, &cws, &[i1, i2])?;
    let engine = RepairEngine::new(params, RepairPlan::new(params, i1, i2)?)?;
    let helpers = engine.plan().helpers(params.n());
    for (cw, want) in cws.iter().zip(&oracle) {
        let reads = helpers.iter().map(|&p| helper_read(params, engine.plan(), p, cw.node(p))).collect::<Result<Vec<_>>>()?;
        let out = engine.repair(&reads)?;
        if out.first != want.node(i1) || out.second != want.node(i2) {
            return Ok(Some("repaired symbols differ from the erasure decoder".into()));
        }
        let v = check_optimal(&out.transcript, params);
        if !v.optimal {
            return Ok(Some(format!("gamma {} / {}, gamma_a {} / {}", v.gamma, v.bound_gamma, v.gamma_a, v.bound_gamma_a)));
        }
    }
    Ok(None)
}

fn block_checks(seed: u64, count: usize) -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb10c);
    for n in 4..=6 {
        for k in 1..=n - 2 {
            for spec in [BlockCodeSpec::type1(n, k, DEFAULT_PRIME), BlockCodeSpec::type2(n, k, DEFAULT_PRIME)] {
                let spec = match spec {
                    Ok(s) => s,
                    Err(e) => {
                        out.push(Check::new(format!("block ({n},{k})"), false, e.to_string()));
                        continue;
                    }
                };
                let name = format!("block {:?} ({n},{k})", spec.kind());
                out.push(Check::from_result(name, check_block(&spec, count, &mut rng)));
            }
        }
    }
    out
}

fn check_block(spec: &BlockCodeSpec, count: usize, rng: &mut impl Rng) -> Result<Option<String>> {
    if let Some(f) = blocks::check_mds(spec)?.failure {
        return Ok(Some(format!("{:?} has rank {} of {}", f.nodes, f.rank, f.size)));
    }
    let pairs: Vec<(usize, usize)> = match spec.kind() {
        blocks::BlockKind::TypeI => vec![(1, 2)],
        blocks::BlockKind::TypeII => (1..=spec.r()).flat_map(|a| (a + 1..=spec.r()).map(move |b| (a, b))).collect(),
    };
    let p = spec.field().modulus() as u64;
    let n = spec.n();
    for _ in 0..count {
        let data: Vec<Vec<Fe>> =
            (0..spec.k()).map(|_| (0..spec.ell()).map(|_| spec.field().elem(rng.gen_range(0..p))).collect()).collect();
        let cw = blocks::encode(spec, &data)?;
        for &(a, b) in &pairs {
            let rep = match spec.kind() {
                blocks::BlockKind::TypeI => blocks::repair_type1(spec, &cw)?,
                blocks::BlockKind::TypeII => blocks::repair_type2(spec, &cw, a, b)?,
            };
            let want = blocks::erasure_decode(spec, &cw, &[a, b])?;
            if rep.first != want[a - 1] || rep.second != want[b - 1] {
                return Ok(Some(format!("pair ({a},{b}) differs from the erasure decoder")));
            }
            let t = &rep.transcript;
            if t.bandwidth() != 2 * (n - 1) || t.access() != 2 * (n - 2) {
                return Ok(Some(format!("pair ({a},{b}): bandwidth {}, access {}", t.bandwidth(), t.access())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_with_blocks_passes() {
        let checks = run(&Options { grid: Grid::Small, blocks: true, seed: 1, codewords: 2 });
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(checks.iter().any(|c| c.name.starts_with("block TypeII (6,2)")));
        // 2 digit counts, 2 mds, 6 + 10 pairs
        assert_eq!(checks.iter().filter(|c| !c.name.starts_with("block")).count(), 20);
    }
}
