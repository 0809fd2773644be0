//! Partition of node pairs into groups and the pair-to-digit map.
//!
//! Nodes `1..=g*r` (with `g = n / r`) are split into `g` consecutive groups of
//! `r` nodes. Every pair inside group `u` maps to digit `u`; every remaining
//! pair gets its own digit in `g+1..=m`, assigned in ascending `(j', j)`
//! order.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum PairClass {
    /// Both nodes lie in group `u`.
    IntraGroup { u: usize },
    /// The pair owns pair digit `rho`.
    CrossGroup { rho: usize },
}

#[derive(Clone, Debug)]
pub struct PairMap {
    n: usize,
    r: usize,
    g: usize,
    m: usize,
    /// `pi[(j-1) * n + (j'-1)]` for `j < j'`.
    pi: Vec<usize>,
    /// Pair owning pair digit `g + 1 + i`.
    cross_pairs: Vec<(usize, usize)>,
    omega0: Vec<Vec<usize>>,
    omega1: Vec<Vec<usize>>,
}

fn choose2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

impl PairMap {
    pub fn build(n: usize, r: usize) -> Result<Self> {
        if r < 2 || n <= r {
            return Err(Error::InvalidParams(format!("need n > r >= 2, got n = {n}, r = {r}")));
        }
        let g = n / r;
        let m = choose2(n) - g * (choose2(r) - 1);
        let mut pi = vec![0; n * n];
        let group = |j: usize| if j <= g * r { Some((j - 1) / r + 1) } else { None };

        for j in 1..=n {
            for jp in j + 1..=n {
                if let (Some(u), Some(up)) = (group(j), group(jp)) {
                    if u == up {
                        pi[(j - 1) * n + jp - 1] = u;
                    }
                }
            }
        }
        let mut cross_pairs = Vec::with_capacity(m - g);
        for jp in 1..=n {
            for j in 1..jp {
                if pi[(j - 1) * n + jp - 1] == 0 {
                    cross_pairs.push((j, jp));
                    pi[(j - 1) * n + jp - 1] = g + cross_pairs.len();
                }
            }
        }
        debug_assert_eq!(g + cross_pairs.len(), m);

        let mut omega0 = vec![Vec::new(); n];
        let mut omega1 = vec![Vec::new(); n];
        for (i, &(j, jp)) in cross_pairs.iter().enumerate() {
            omega0[j - 1].push(g + 1 + i);
            omega1[jp - 1].push(g + 1 + i);
        }
        for set in omega0.iter_mut().chain(omega1.iter_mut()) {
            set.sort_unstable();
        }
        Ok(PairMap { n, r, g, m, pi, cross_pairs, omega0, omega1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of full groups, `n / r`.
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_pair(&self, i1: usize, i2: usize) -> Result<()> {
        if i1 == 0 || i2 > self.n || i1 >= i2 {
            return Err(Error::OutOfRange(format!(
                "pair ({i1}, {i2}) must satisfy 1 <= i1 < i2 <= {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn pi(&self, i1: usize, i2: usize) -> Result<usize> {
        self.check_pair(i1, i2)?;
        Ok(self.pi[(i1 - 1) * self.n + i2 - 1])
    }

    pub fn classify(&self, i1: usize, i2: usize) -> Result<PairClass> {
        let d = self.pi(i1, i2)?;
        Ok(if d <= self.g { PairClass::IntraGroup { u: d } } else { PairClass::CrossGroup { rho: d } })
    }

    /// `(Omega_{j,0}, Omega_{j,1})`, each sorted ascending.
    pub fn omega(&self, j: usize) -> Result<(&[usize], &[usize])> {
        if j == 0 || j > self.n {
            return Err(Error::OutOfRange(format!("node {j} not in [1, {}]", self.n)));
        }
        Ok((&self.omega0[j - 1], &self.omega1[j - 1]))
    }

    /// Pair owning pair digit `rho`.
    pub fn cross_pair(&self, rho: usize) -> Option<(usize, usize)> {
        rho.checked_sub(self.g + 1).and_then(|i| self.cross_pairs.get(i)).copied()
    }

    /// `(u, v)` with `j = (u-1) r + v + 1`, for grouped nodes.
    pub fn group_of(&self, j: usize) -> Option<(usize, usize)> {
        (j >= 1 && j <= self.g * self.r).then(|| ((j - 1) / self.r + 1, (j - 1) % self.r))
    }

    /// Node `(u-1) r + v + 1`.
    pub fn node_at(&self, u: usize, v: usize) -> usize {
        (u - 1) * self.r + v + 1
    }

    /// Every pair `(j, j')` with `j < j'` together with its digit.
    pub fn table(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        (1..=self.n).flat_map(move |j| (j + 1..=self.n).map(move |jp| ((j, jp), self.pi[(j - 1) * self.n + jp - 1])))
    }
}
