//! Test-only reference constructions, written without the library's index
//! or pair-map helpers.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub const P: u64 = 65537;

pub fn pow(x: u64, mut e: u64) -> u64 {
    let (mut b, mut acc) = (x % P, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

pub fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Dense `H_{t,j}` blocks built entry by entry from the two case tables,
/// with points `lambda_j = j`, `gamma_w = n + w`, `tau = p - 1`.
pub struct DenseH {
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub ell: usize,
    /// `blocks[t-1][j-1][a][b]`
    pub blocks: Vec<Vec<Vec<Vec<u64>>>>,
}

/// `pi` as a map from pairs to 1-based digits: groups first, then the
/// remaining pairs ordered by larger node, then smaller node.
pub fn pair_digits(n: usize, r: usize) -> BTreeMap<(usize, usize), usize> {
    let g = n / r;
    let mut out = BTreeMap::new();
    let group = |j: usize| if j <= g * r { Some((j - 1) / r + 1) } else { None };
    let mut rest = Vec::new();
    for j in 1..=n {
        for jp in j + 1..=n {
            match (group(j), group(jp)) {
                (Some(u), Some(w)) if u == w => {
                    out.insert((j, jp), u);
                }
                _ => rest.push((jp, j)),
            }
        }
    }
    rest.sort();
    for (i, (jp, j)) in rest.into_iter().enumerate() {
        out.insert((j, jp), g + 1 + i);
    }
    out
}

impl DenseH {
    pub fn build(n: usize, k: usize) -> DenseH {
        let r = n - k;
        let g = n / r;
        let m = binom(n, 2) - g * (binom(r, 2) - 1);
        let ell = r.pow(m as u32);
        let pi = pair_digits(n, r);
        let omega = |j: usize, side: usize| -> Vec<usize> {
            let mut s: Vec<usize> = pi
                .iter()
                .filter(|(&(a, b), &d)| d > g && if side == 0 { a == j } else { b == j })
                .map(|(_, &d)| d)
                .collect();
            s.sort();
            s
        };
        let digits = |a: usize| -> Vec<usize> {
            let mut v = vec![0; m + 1];
            let mut x = a;
            for d in v.iter_mut().skip(1) {
                *d = x % r;
                x /= r;
            }
            v
        };
        let number = |d: &[usize]| -> usize { (1..=m).rev().fold(0, |acc, i| acc * r + d[i]) };
        let tau = P - 1;
        let lambda = |j: usize| j as u64;
        let gamma = |w: usize| (n + w) as u64;

        let mut blocks = vec![vec![vec![vec![0u64; ell]; ell]; n]; r];
        for t in 1..=r {
            let e = (t - 1) as u64;
            for j in 1..=n {
                let h = &mut blocks[t - 1][j - 1];
                let mut set = |a: usize, b: usize, v: u64| {
                    assert_eq!(h[a][b], 0, "two cases hit entry ({a},{b}) of H_{t},{j}");
                    h[a][b] = v;
                };
                for a in 0..ell {
                    let da = digits(a);
                    set(a, a, pow(lambda(j), e));
                    if j <= g * r {
                        let (u, v) = ((j - 1) / r + 1, (j - 1) % r);
                        if da[u] == v {
                            for vp in 0..r {
                                if vp == v {
                                    continue;
                                }
                                let mut db = da.clone();
                                db[u] = vp;
                                let base = pow(lambda((u - 1) * r + vp + 1), e);
                                set(a, number(&db), if vp < v { tau * base % P } else { base });
                            }
                        }
                    }
                    for (side, want) in [(0usize, 0usize), (1, 1)] {
                        for i in omega(j, side) {
                            if da[i] != want {
                                continue;
                            }
                            for w in 2..r {
                                let mut db = da.clone();
                                db[i] = w;
                                set(a, number(&db), pow(gamma(w - 1), e));
                            }
                        }
                    }
                }
            }
        }
        DenseH { n, r, m, ell, blocks }
    }

    /// Nonzero entries of row `(t, a)` as `(node, column, value)`, sorted.
    pub fn row(&self, t: usize, a: usize) -> Vec<(usize, u64, u64)> {
        let mut out = Vec::new();
        for j in 1..=self.n {
            for (b, &v) in self.blocks[t - 1][j - 1][a].iter().enumerate() {
                if v != 0 {
                    out.push((j, b as u64, v));
                }
            }
        }
        out
    }
}
