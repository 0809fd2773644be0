//! r-ary digit arithmetic on coordinate indices `a in [0, r^m)`.
//!
//! Digit positions are 1-based and little-endian: `a = sum a_i r^(i-1)`.
//! Positions `1..=g` are the group digits, `g+1..=m` the pair digits.

use crate::error::{Error, Result};

/// Upper bound on `r^m`.
pub const MAX_ELL: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSpace {
    r: u64,
    m: usize,
    g: usize,
    ell: u64,
    /// `stride[i] = r^i` for `i in 0..=m`.
    stride: Vec<u64>,
}

/// Digits `a_1..a_m`, least significant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitVector(pub Vec<u64>);

impl DigitVector {
    /// Digit at 1-based position `i`.
    pub fn get(&self, i: usize) -> u64 {
        self.0[i - 1]
    }
}

impl IndexSpace {
    pub fn new(r: u64, m: usize, g: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidParams(format!("radix r = {r} must be at least 2")));
        }
        if m == 0 || g == 0 || g > m {
            return Err(Error::InvalidParams(format!("need 1 <= g <= m, got g = {g}, m = {m}")));
        }
        let mut stride = Vec::with_capacity(m + 1);
        let mut acc = 1u64;
        stride.push(acc);
        for _ in 0..m {
            acc = acc.saturating_mul(r);
            if acc > MAX_ELL {
                // reports the first partial power past the limit
                return Err(Error::GuardExceeded { what: "partial product of r^m", value: acc, limit: MAX_ELL });
            }
            stride.push(acc);
        }
        Ok(IndexSpace { r, m, g, ell: acc, stride })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// `r^i`
    pub fn stride(&self, i: usize) -> u64 {
        self.stride[i]
    }

    fn check_index(&self, a: u64) -> Result<()> {
        if a < self.ell {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("index {a} not in [0, {})", self.ell)))
        }
    }

    fn check_position(&self, i: usize) -> Result<()> {
        if (1..=self.m).contains(&i) {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("digit position {i} not in [1, {}]", self.m)))
        }
    }

    fn check_digit(&self, v: u64) -> Result<()> {
        if v < self.r {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("digit {v} not in [0, {})", self.r)))
        }
    }

    pub fn expand(&self, a: u64) -> Result<DigitVector> {
        self.check_index(a)?;
        let mut digits = vec![0; self.m];
        self.expand_into(a, &mut digits);
        Ok(DigitVector(digits))
    }

    /// Writes the digits of `a` into `out[0..m]` (position `i` at `out[i-1]`).
    #[inline]
    pub fn expand_into(&self, mut a: u64, out: &mut [u64]) {
        for d in out.iter_mut().take(self.m) {
            *d = a % self.r;
            a /= self.r;
        }
    }

    pub fn compress(&self, digits: &DigitVector) -> Result<u64> {
        if digits.0.len() != self.m {
            return Err(Error::Dimension(format!("{} digits for m = {}", digits.0.len(), self.m)));
        }
        let mut a = 0;
        for (i, &d) in digits.0.iter().enumerate() {
            self.check_digit(d)?;
            a += d * self.stride[i];
        }
        Ok(a)
    }

    /// Digit at 1-based position `i`; unchecked.
    #[inline]
    pub fn digit(&self, a: u64, i: usize) -> u64 {
        (a / self.stride[i - 1]) % self.r
    }

    /// `a(i, v)`: `a` with digit `i` replaced by `v`.
    pub fn substitute(&self, a: u64, i: usize, v: u64) -> Result<u64> {
        self.check_index(a)?;
        self.check_position(i)?;
        self.check_digit(v)?;
        Ok(self.subst(a, i, v))
    }

    #[inline]
    pub(crate) fn subst(&self, a: u64, i: usize, v: u64) -> u64 {
        let s = self.stride[i - 1];
        let cur = (a / s) % self.r;
        a - cur * s + v * s
    }

    /// `A(u, v) = {a : a_u = v}` in ascending order.
    pub fn axis_set(&self, u: usize, v: u64) -> Result<AxisIter> {
        self.check_position(u)?;
        self.check_digit(v)?;
        Ok(AxisIter { low: self.stride[u - 1], r: self.r, v, next: 0, len: self.ell / self.r })
    }

    /// Number of elements in every axis set, `ell / r`.
    pub fn axis_len(&self) -> u64 {
        self.ell / self.r
    }

    /// Rank of `a` inside `A(u, a_u)`: the counter the axis iterator uses.
    #[inline]
    pub fn axis_rank(&self, a: u64, u: usize) -> u64 {
        let low = self.stride[u - 1];
        (a % low) + (a / (low * self.r)) * low
    }

    /// Number of pair digits (positions `g+1..=m`) equal to 0 or 1.
    pub fn suffix_weight(&self, a: u64) -> usize {
        let mut rest = a / self.stride[self.g];
        let mut w = 0;
        for _ in self.g..self.m {
            if rest % self.r <= 1 {
                w += 1;
            }
            rest /= self.r;
        }
        w
    }

    /// Largest shell index, `m - g`.
    pub fn max_shell(&self) -> usize {
        self.m - self.g
    }

    /// Number of `(position, digit)` pins that `a` satisfies.
    pub fn match_count(&self, a: u64, pins: &[(usize, u64)]) -> usize {
        pins.iter().filter(|&&(u, v)| self.digit(a, u) == v).count()
    }

    /// Indices in ascending order of `(suffix_weight, a)`.
    pub fn shell_order(&self) -> Vec<u64> {
        let mut buckets = vec![Vec::new(); self.max_shell() + 1];
        for a in 0..self.ell {
            buckets[self.suffix_weight(a)].push(a);
        }
        buckets.concat()
    }
}

/// Lazy ascending iterator over an axis set.
#[derive(Clone, Debug)]
pub struct AxisIter {
    low: u64,
    r: u64,
    v: u64,
    next: u64,
    len: u64,
}

impl Iterator for AxisIter {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if self.next == self.len {
            return None;
        }
        let i = self.next;
        self.next += 1;
        Some(i % self.low + self.v * self.low + (i / self.low) * self.low * self.r)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = (self.len - self.next) as usize;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for AxisIter {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn expand_examples() {
        let s = IndexSpace::new(3, 2, 1).unwrap();
        assert_eq!(s.expand(5).unwrap().0, vec![2, 1]);
        assert_eq!(s.expand(0).unwrap().0, vec![0, 0]);
        assert!(s.expand(9).is_err());
        let big = IndexSpace::new(3, 17, 2).unwrap();
        assert_eq!(big.expand(big.ell() - 1).unwrap().0, vec![2; 17]);
    }

    #[test]
    fn substitute_examples() {
        let s = IndexSpace::new(3, 2, 1).unwrap();
        assert_eq!(s.substitute(5, 1, 0).unwrap(), 3);
        assert_eq!(s.substitute(5, 2, 0).unwrap(), 2);
        for a in 0..9 {
            for i in 1..=2 {
                assert_eq!(s.substitute(a, i, s.digit(a, i)).unwrap(), a);
            }
        }
        assert!(s.substitute(5, 3, 0).is_err());
        assert!(s.substitute(5, 1, 3).is_err());
    }

    #[test]
    fn axis_set_examples() {
        let s = IndexSpace::new(2, 2, 1).unwrap();
        assert_eq!(s.axis_set(1, 0).unwrap().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.axis_set(2, 1).unwrap().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn axis_sets_partition_and_rank_inverts() {
        let s = IndexSpace::new(3, 4, 2).unwrap();
        for u in 1..=4 {
            let mut seen = vec![0u8; s.ell() as usize];
            for v in 0..3 {
                let set: Vec<u64> = s.axis_set(u, v).unwrap().collect();
                assert_eq!(set.len() as u64, s.axis_len());
                assert!(set.windows(2).all(|w| w[0] < w[1]));
                for (rank, &a) in set.iter().enumerate() {
                    assert_eq!(s.digit(a, u), v);
                    assert_eq!(s.axis_rank(a, u), rank as u64);
                    seen[a as usize] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn suffix_weight_examples() {
        let s = IndexSpace::new(3, 4, 2).unwrap();
        let a = s.compress(&DigitVector(vec![2, 2, 0, 1])).unwrap();
        assert_eq!(s.suffix_weight(a), 2);
        let all2 = s.compress(&DigitVector(vec![2; 4])).unwrap();
        assert_eq!(s.suffix_weight(all2), 0);
        let binary = IndexSpace::new(2, 6, 2).unwrap();
        assert!((0..binary.ell()).all(|a| binary.suffix_weight(a) == 4));
    }

    #[test]
    fn match_count_examples() {
        let s = IndexSpace::new(3, 2, 1).unwrap();
        let a = s.compress(&DigitVector(vec![2, 1])).unwrap();
        assert_eq!(s.match_count(a, &[]), 0);
        assert_eq!(s.match_count(a, &[(1, 2)]), 1);
        assert_eq!(s.match_count(a, &[(1, 0), (2, 1)]), 1);
    }

    #[test]
    fn shells_partition_the_index_range() {
        // (6,3): r = 3, m = 11, g = 2
        let s = IndexSpace::new(3, 11, 2).unwrap();
        let order = s.shell_order();
        assert_eq!(order.len() as u64, s.ell());
        let mut seen = vec![false; s.ell() as usize];
        for &a in &order {
            assert!(!std::mem::replace(&mut seen[a as usize], true));
        }
        let weights: Vec<usize> = order.iter().map(|&a| s.suffix_weight(a)).collect();
        assert!(weights.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*weights.last().unwrap(), s.max_shell());
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(IndexSpace::new(1, 3, 1).is_err());
        assert!(IndexSpace::new(3, 2, 3).is_err());
        assert!(IndexSpace::new(3, 2, 0).is_err());
        assert!(matches!(IndexSpace::new(2, 41, 1), Err(Error::GuardExceeded { .. })));
        assert!(IndexSpace::new(2, 40, 1).is_ok());
    }

    proptest! {
        #[test]
        fn expand_compress_roundtrip(r in 2u64..6, m in 1usize..8, seed in any::<u64>()) {
            let s = IndexSpace::new(r, m, 1).unwrap();
            let a = seed % s.ell();
            let d = s.expand(a).unwrap();
            prop_assert_eq!(s.compress(&d).unwrap(), a);
            for i in 1..=m {
                prop_assert_eq!(d.get(i), s.digit(a, i));
            }
        }

        #[test]
        fn substitution_undoes(r in 2u64..6, m in 1usize..8, seed in any::<u64>(), i in 1usize..8, v in 0u64..6) {
            let s = IndexSpace::new(r, m, 1).unwrap();
            let (a, i, v) = (seed % s.ell(), (i - 1) % m + 1, v % r);
            let b = s.substitute(a, i, v).unwrap();
            prop_assert_eq!(s.digit(b, i), v);
            prop_assert_eq!(s.substitute(b, i, s.digit(a, i)).unwrap(), a);
        }
    }
}
