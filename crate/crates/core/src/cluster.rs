//! In-process storage cluster: striped ingest, failure injection and
//! cooperative repair carried out as logged messages.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::msrcode::{encode, recover_erasures, syndrome, CodeParams, Codeword};
use crate::repair::{check_optimal, helper_read, MessageKind, RepairCase, RepairEngine, RepairPlan, RepairTranscript};

#[derive(Clone, Debug, PartialEq, Eq)]
enum NodeState {
    Alive(Vec<Fe>),
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub stripe: usize,
    pub round: usize,
    pub from: usize,
    pub to: usize,
    pub kind: MessageKind,
    pub symbols: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StripeSummary {
    pub stripe: usize,
    pub gamma: u64,
    pub gamma_a: u64,
    pub optimal: bool,
}

/// Result of repairing both failed nodes across all stripes.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterRepair {
    pub pair: (usize, usize),
    pub case: RepairCase,
    pub stripes: usize,
    /// Full transcript of the first stripe; every stripe follows the same schedule.
    pub transcript: RepairTranscript,
    pub per_stripe: Vec<StripeSummary>,
    pub total_downloaded: u64,
    pub total_collaborated: u64,
    pub total_gamma: u64,
    pub total_gamma_a: u64,
    pub optimal: bool,
}

#[derive(Clone, Debug)]
pub struct Cluster {
    params: CodeParams,
    payload_len: u64,
    stripes: usize,
    nodes: Vec<NodeState>,
    digests: Vec<Option<[u8; 32]>>,
    ledger: Vec<LedgerEntry>,
}

/// Number of stripes for `len` bytes: at least one, `k * ell` bytes each.
pub fn stripe_count(params: &CodeParams, len: u64) -> usize {
    len.div_ceil(params.k() as u64 * params.ell()).max(1) as usize
}

fn digest(symbols: &[Fe]) -> [u8; 32] {
    let mut h = Sha256::new();
    for s in symbols {
        h.update(s.value().to_le_bytes());
    }
    h.finalize().into()
}

impl Cluster {
    /// Splits `bytes` into stripes of `k * ell` bytes (zero padded), one byte per symbol.
    pub fn ingest(params: &CodeParams, bytes: &[u8]) -> Result<Self> {
        if params.field().modulus() <= 256 {
            return Err(Error::InvalidParams(format!(
                "GF({}) cannot hold one byte per symbol",
                params.field().modulus()
            )));
        }
        params.check_materializable()?;
        let ell = params.ell() as usize;
        let stripes = stripe_count(params, bytes.len() as u64);
        let mut payloads = vec![Vec::with_capacity(stripes * ell); params.n()];
        let chunk = params.k() * ell;
        for s in 0..stripes {
            let start = (s * chunk).min(bytes.len());
            let end = ((s + 1) * chunk).min(bytes.len());
            let mut data = vec![vec![Fe::ZERO; ell]; params.k()];
            for (i, &b) in bytes[start..end].iter().enumerate() {
                data[i / ell][i % ell] = params.field().elem(b as u64);
            }
            let cw = encode(params, &data)?;
            for (dst, node) in payloads.iter_mut().zip(cw.into_nodes()) {
                dst.extend(node);
            }
        }
        Self::from_payloads(params, bytes.len() as u64, payloads.into_iter().map(Some).collect())
    }

    /// Rebuilds a cluster from stored payloads; `None` marks a failed node.
    pub fn from_payloads(params: &CodeParams, payload_len: u64, nodes: Vec<Option<Vec<Fe>>>) -> Result<Self> {
        if nodes.len() != params.n() {
            return Err(Error::Dimension(format!("{} node payloads for n = {}", nodes.len(), params.n())));
        }
        let stripes = stripe_count(params, payload_len);
        let want = stripes as u64 * params.ell();
        let mut states = Vec::with_capacity(nodes.len());
        let mut digests = Vec::with_capacity(nodes.len());
        for (i, node) in nodes.into_iter().enumerate() {
            match node {
                Some(v) => {
                    if v.len() as u64 != want {
                        return Err(Error::Dimension(format!("node {} holds {} symbols, expected {want}", i + 1, v.len())));
                    }
                    digests.push(Some(digest(&v)));
                    states.push(NodeState::Alive(v));
                }
                None => {
                    digests.push(None);
                    states.push(NodeState::Failed);
                }
            }
        }
        Ok(Cluster { params: params.clone(), payload_len, stripes, nodes: states, digests, ledger: Vec::new() })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn payload_len(&self) -> u64 {
        self.payload_len
    }

    pub fn stripes(&self) -> usize {
        self.stripes
    }

    fn check_node(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.params.n() {
            return Err(Error::OutOfRange(format!("node {j} not in [1, {}]", self.params.n())));
        }
        Ok(())
    }

    /// Payload of node `j` (all stripes back to back).
    pub fn node(&self, j: usize) -> Result<&[Fe]> {
        self.check_node(j)?;
        match &self.nodes[j - 1] {
            NodeState::Alive(v) => Ok(v),
            NodeState::Failed => Err(Error::NodeFailed(j)),
        }
    }

    pub fn failed(&self) -> Vec<usize> {
        (1..=self.params.n()).filter(|&j| self.nodes[j - 1] == NodeState::Failed).collect()
    }

    pub fn fail_node(&mut self, j: usize) -> Result<()> {
        self.check_node(j)?;
        if self.nodes[j - 1] == NodeState::Failed {
            return Err(Error::AlreadyFailed(j));
        }
        self.nodes[j - 1] = NodeState::Failed;
        Ok(())
    }

    pub fn fail(&mut self, i1: usize, i2: usize) -> Result<()> {
        if i1 == i2 {
            return Err(Error::InvalidParams(format!("cannot fail node {i1} twice in one call")));
        }
        self.check_node(i1)?;
        self.check_node(i2)?;
        for j in [i1, i2] {
            if self.nodes[j - 1] == NodeState::Failed {
                return Err(Error::AlreadyFailed(j));
            }
        }
        self.fail_node(i1)?;
        self.fail_node(i2)
    }

    /// Cooperatively repairs the two failed nodes, stripe by stripe.
    ///
    /// Restored payloads are checked against the digests taken when the
    /// payloads were first loaded, where available.
    pub fn repair(&mut self) -> Result<ClusterRepair> {
        let failed = self.failed();
        let [i1, i2] = failed[..] else {
            return Err(Error::WrongFailureCount(failed.len()));
        };
        let params = self.params.clone();
        let plan = RepairPlan::new(&params, i1, i2)?;
        let engine = RepairEngine::new(&params, plan)?;
        let ell = params.ell() as usize;
        let helpers = engine.plan().helpers(params.n());
        let mut restored = [Vec::with_capacity(self.stripes * ell), Vec::with_capacity(self.stripes * ell)];
        let mut first = None;
        let mut per_stripe = Vec::with_capacity(self.stripes);
        let (mut down, mut collab, mut gamma_a) = (0, 0, 0);
        for s in 0..self.stripes {
            let reads = helpers
                .iter()
                .map(|&p| helper_read(&params, engine.plan(), p, &self.node(p)?[s * ell..(s + 1) * ell]))
                .collect::<Result<Vec<_>>>()?;
            let out = engine.repair(&reads)?;
            let t = out.transcript;
            for m in &t.messages {
                self.ledger.push(LedgerEntry { stripe: s, round: m.round, from: m.from, to: m.to, kind: m.kind, symbols: m.symbols });
            }
            down += t.downloaded;
            collab += t.collaborated;
            gamma_a += t.gamma_a;
            per_stripe.push(StripeSummary { stripe: s, gamma: t.gamma, gamma_a: t.gamma_a, optimal: check_optimal(&t, &params).optimal });
            restored[0].extend(out.first);
            restored[1].extend(out.second);
            first.get_or_insert(t);
        }
        let [r1, r2] = restored;
        for (j, payload) in [(i1, r1), (i2, r2)] {
            if let Some(d) = self.digests[j - 1] {
                if digest(&payload) != d {
                    return Err(Error::internal(format!("restored node {j} differs from its stored content")));
                }
            } else {
                self.digests[j - 1] = Some(digest(&payload));
            }
            self.nodes[j - 1] = NodeState::Alive(payload);
        }
        let transcript = first.expect("at least one stripe");
        Ok(ClusterRepair {
            pair: (i1, i2),
            case: transcript.case,
            stripes: self.stripes,
            optimal: per_stripe.iter().all(|s| s.optimal),
            transcript,
            per_stripe,
            total_downloaded: down,
            total_collaborated: collab,
            total_gamma: down + collab,
            total_gamma_a: gamma_a,
        })
    }

    /// Codeword of stripe `s` with failed nodes decoded from the survivors.
    pub fn stripe_codeword(&self, s: usize) -> Result<Codeword> {
        if s >= self.stripes {
            return Err(Error::OutOfRange(format!("stripe {s} of {}", self.stripes)));
        }
        let ell = self.params.ell() as usize;
        let nodes = self
            .nodes
            .iter()
            .map(|st| match st {
                NodeState::Alive(v) => v[s * ell..(s + 1) * ell].to_vec(),
                NodeState::Failed => vec![Fe::ZERO; ell],
            })
            .collect();
        let mut cw = Codeword::new(nodes)?;
        recover_erasures(&self.params, &mut cw, &self.failed())?;
        Ok(cw)
    }

    /// Reassembles the ingested bytes from the surviving nodes.
    pub fn read_back(&self) -> Result<Vec<u8>> {
        let k = self.params.k();
        let mut out = Vec::with_capacity(self.stripes * k * self.params.ell() as usize);
        for s in 0..self.stripes {
            let cw = self.stripe_codeword(s)?;
            for j in 1..=k {
                for &x in cw.node(j) {
                    let b = u8::try_from(x.value()).map_err(|_| Error::Format(format!("symbol {} is not a byte", x.value())))?;
                    out.push(b);
                }
            }
        }
        out.truncate(self.payload_len as usize);
        Ok(out)
    }

    /// True when every stripe of the live nodes satisfies all parity rows.
    pub fn syndrome_ok(&self) -> Result<bool> {
        if !self.failed().is_empty() {
            return Err(Error::NodeFailed(self.failed()[0]));
        }
        for s in 0..self.stripes {
            if syndrome(&self.params, &self.stripe_codeword(s)?)?.iter().any(|v| !v.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    /// The message ledger as JSON lines.
    pub fn ledger_jsonl(&self) -> String {
        self.ledger.iter().map(|e| serde_json::to_string(e).expect("plain struct") + "\n").collect()
    }

    pub fn ledger_total(&self, kind: MessageKind) -> u64 {
        self.ledger.iter().filter(|e| e.kind == kind).map(|e| e.symbols).sum()
    }

    pub fn clear_ledger(&mut self) {
        self.ledger.clear();
    }
}
