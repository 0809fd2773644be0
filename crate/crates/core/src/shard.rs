//! On-disk node shards.
//!
//! Layout, all integers little-endian `u64`: the magic `CMSR1`, then
//! `n, k, p, m, node`, the points `λ_1..λ_n`, `γ_1..γ_{r-2}`, `τ`, the
//! payload byte length, and finally `S * ell` symbols where `S` is the
//! stripe count for that length.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use crate::cluster::{stripe_count, Cluster};
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::msrcode::CodeParams;

pub const MAGIC: &[u8; 5] = b"CMSR1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardHeader {
    pub n: u64,
    pub k: u64,
    pub p: u64,
    pub m: u64,
    pub node: u64,
    pub lambdas: Vec<u64>,
    pub gammas: Vec<u64>,
    pub tau: u64,
    pub payload_len: u64,
}

impl ShardHeader {
    pub fn new(params: &CodeParams, node: usize, payload_len: u64) -> Self {
        let v = |xs: &[Fe]| xs.iter().map(|x| x.value() as u64).collect();
        ShardHeader {
            n: params.n() as u64,
            k: params.k() as u64,
            p: params.field().modulus() as u64,
            m: params.m() as u64,
            node: node as u64,
            lambdas: v(params.lambdas()),
            gammas: v(params.gammas()),
            tau: params.tau().value() as u64,
            payload_len,
        }
    }

    /// Code parameters described by the header, validated from scratch.
    pub fn params(&self) -> Result<CodeParams> {
        let field = Field::new(self.p)?;
        let elems = |xs: &[u64]| xs.iter().map(|&x| field.try_elem(x)).collect::<Result<Vec<_>>>();
        let params = CodeParams::with_points(
            self.n as usize,
            self.k as usize,
            field,
            elems(&self.lambdas)?,
            elems(&self.gammas)?,
            field.try_elem(self.tau)?,
        )?;
        if params.m() as u64 != self.m {
            return Err(Error::Format(format!("header says m = {}, parameters give {}", self.m, params.m())));
        }
        Ok(params)
    }

    /// Same code and payload, ignoring the node index.
    fn same_code(&self, other: &ShardHeader) -> bool {
        ShardHeader { node: 0, ..self.clone() } == ShardHeader { node: 0, ..other.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct Shard {
    pub header: ShardHeader,
    pub symbols: Vec<Fe>,
}

pub fn shard_path(dir: &Path, node: usize) -> PathBuf {
    dir.join(format!("node_{node}.cmsr"))
}

fn put(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::Format("truncated shard".into()),
        _ => Error::Io(e),
    })?;
    Ok(u64::from_le_bytes(b))
}

pub fn write_shard(path: &Path, header: &ShardHeader, symbols: &[Fe]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    for v in [header.n, header.k, header.p, header.m, header.node] {
        put(&mut w, v)?;
    }
    for &v in header.lambdas.iter().chain(&header.gammas) {
        put(&mut w, v)?;
    }
    put(&mut w, header.tau)?;
    put(&mut w, header.payload_len)?;
    for s in symbols {
        put(&mut w, s.value() as u64)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_shard(path: &Path) -> Result<Shard> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic).map_err(|_| Error::Format("missing magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let (n, k, p, m, node) = (get(&mut r)?, get(&mut r)?, get(&mut r)?, get(&mut r)?, get(&mut r)?);
    if n > 64 || k == 0 || k >= n || node == 0 || node > n {
        return Err(Error::Format(format!("implausible header n = {n}, k = {k}, node = {node}")));
    }
    let lambdas = (0..n).map(|_| get(&mut r)).collect::<Result<Vec<_>>>()?;
    let gammas = (0..(n - k).saturating_sub(2)).map(|_| get(&mut r)).collect::<Result<Vec<_>>>()?;
    let tau = get(&mut r)?;
    let payload_len = get(&mut r)?;
    let header = ShardHeader { n, k, p, m, node, lambdas, gammas, tau, payload_len };
    let params = header.params()?;
    params.check_materializable()?;
    let count = stripe_count(&params, payload_len) as u64 * params.ell();
    let field = params.field();
    let mut symbols = Vec::with_capacity(count as usize);
    for _ in 0..count {
        symbols.push(field.try_elem(get(&mut r)?)?);
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Format("trailing bytes after symbols".into()));
    }
    Ok(Shard { header, symbols })
}

/// Writes every live node of `cluster` to `dir`.
pub fn write_cluster(dir: &Path, cluster: &Cluster) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let failed = cluster.failed();
    for j in (1..=cluster.params().n()).filter(|j| !failed.contains(j)) {
        write_node(dir, cluster, j)?;
    }
    Ok(())
}

pub fn write_node(dir: &Path, cluster: &Cluster, j: usize) -> Result<()> {
    let header = ShardHeader::new(cluster.params(), j, cluster.payload_len());
    write_shard(&shard_path(dir, j), &header, cluster.node(j)?)
}

/// Loads whatever shards exist in `dir`; absent ones become failed nodes.
pub fn load_cluster(dir: &Path) -> Result<Cluster> {
    let mut shards = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
        if name.starts_with("node_") && name.ends_with(".cmsr") {
            shards.push(read_shard(&path)?);
        }
    }
    let Some(first) = shards.first() else {
        return Err(Error::Format(format!("no shards in {}", dir.display())));
    };
    let header = first.header.clone();
    let params = header.params()?;
    let mut nodes: Vec<Option<Vec<Fe>>> = vec![None; params.n()];
    for s in shards {
        if !s.header.same_code(&header) {
            return Err(Error::Format(format!("shard for node {} describes a different code", s.header.node)));
        }
        let slot = &mut nodes[s.header.node as usize - 1];
        if slot.is_some() {
            return Err(Error::Format(format!("two shards for node {}", s.header.node)));
        }
        *slot = Some(s.symbols);
    }
    Cluster::from_payloads(&params, header.payload_len, nodes)
}
