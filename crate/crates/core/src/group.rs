//! Odd cyclic groups, generator tuples, character slices and the folding map
//! that sends a (tuple, slice) pair to a lattice point of the half box.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, binomial_saturating, gcd, mul_mod};
use crate::error::{Error, Result};

/// Order of an odd cyclic group, `n > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OddModulus(u64);

impl OddModulus {
    pub fn new(n: u64) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::EvenModulus(n));
        }
        if n <= 1 {
            return Err(Error::ModulusTooSmall(n));
        }
        Ok(OddModulus(n))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `(n - 1) / 2`, the largest admissible generator.
    #[inline]
    pub fn half(self) -> u64 {
        (self.0 - 1) / 2
    }

    pub(crate) fn check_k(self, k: usize) -> Result<()> {
        if k as u64 > self.half() {
            return Err(Error::KTooLarge {
                k,
                max: self.half(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_m(self, m: u64) -> Result<()> {
        if m >= self.0 {
            return Err(Error::MOutOfRange { m, max: self.0 - 1 });
        }
        Ok(())
    }
}

impl std::fmt::Display for OddModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// A strictly increasing vector `1 <= a_1 < ... < a_k <= (n-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorTuple {
    n: OddModulus,
    a: Vec<u64>,
}

impl GeneratorTuple {
    pub fn modulus(&self) -> OddModulus {
        self.n
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn generators(&self) -> &[u64] {
        &self.a
    }
}

/// Validates `a` as an element of `A_k(n)`.
pub fn make_tuple(n: u64, a: &[u64]) -> Result<GeneratorTuple> {
    let n = OddModulus::new(n)?;
    if a.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let max = n.half();
    if let Some(&bad) = a.iter().find(|&&x| x < 1 || x > max) {
        return Err(Error::OutOfRange { value: bad, max });
    }
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotStrictlyIncreasing);
    }
    Ok(GeneratorTuple { n, a: a.to_vec() })
}

/// A generator tuple plus the parity flag: the connection set is
/// `T ∪ -T`, with `0` added when the degree is odd.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CayleySpec {
    tuple: GeneratorTuple,
    includes_zero: bool,
}

impl CayleySpec {
    pub fn new(tuple: GeneratorTuple, includes_zero: bool) -> Self {
        CayleySpec {
            tuple,
            includes_zero,
        }
    }

    pub fn tuple(&self) -> &GeneratorTuple {
        &self.tuple
    }

    pub fn modulus(&self) -> OddModulus {
        self.tuple.n
    }

    pub fn includes_zero(&self) -> bool {
        self.includes_zero
    }

    pub fn k(&self) -> usize {
        self.tuple.k()
    }

    /// Degree `r = 2k` or `2k + 1`.
    pub fn degree(&self) -> u64 {
        2 * self.k() as u64 + u64::from(self.includes_zero)
    }

    /// The connection set `S`, sorted.
    pub fn connection_set(&self) -> Vec<u64> {
        let n = self.modulus().get();
        let mut s: Vec<u64> = self
            .tuple
            .a
            .iter()
            .flat_map(|&a| [a, n - a])
            .collect();
        if self.includes_zero {
            s.push(0);
        }
        s.sort_unstable();
        s
    }
}

/// Lexicographic stream over `A_k(n)`.
///
/// Streams can start at any rank, so a consumer may split `[0, count)` into
/// index ranges and hand each to a different worker.
#[derive(Debug, Clone)]
pub struct TupleIter {
    n: OddModulus,
    current: Vec<u64>,
    remaining: u128,
}

impl TupleIter {
    /// Positions the stream at lexicographic rank `rank`.
    pub fn starting_at(n: OddModulus, k: usize, rank: u128) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyTuple);
        }
        n.check_k(k)?;
        let h = n.half();
        let total = binomial_saturating(h, k as u64);
        if rank >= total {
            return Ok(TupleIter {
                n,
                current: Vec::new(),
                remaining: 0,
            });
        }
        let mut current = Vec::with_capacity(k);
        let start = rank;
        let mut rank = rank;
        let mut v = 1u64;
        for i in 0..k {
            loop {
                let block = binomial_saturating(h - v, (k - i - 1) as u64);
                if rank < block {
                    break;
                }
                rank -= block;
                v += 1;
            }
            current.push(v);
            v += 1;
        }
        Ok(TupleIter {
            n,
            current,
            remaining: total - start,
        })
    }

    /// Number of tuples the stream will still yield.
    pub fn remaining(&self) -> u128 {
        self.remaining
    }

    fn advance(&mut self) {
        let h = self.n.half();
        let k = self.current.len();
        for i in (0..k).rev() {
            if self.current[i] < h - (k - 1 - i) as u64 {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return;
            }
        }
    }
}

impl Iterator for TupleIter {
    type Item = GeneratorTuple;

    fn next(&mut self) -> Option<GeneratorTuple> {
        if self.remaining == 0 {
            return None;
        }
        let out = GeneratorTuple {
            n: self.n,
            a: self.current.clone(),
        };
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, usize::try_from(self.remaining).ok())
    }
}

/// Every element of `A_k(n)` exactly once, in lexicographic order.
pub fn enumerate_tuples(n: OddModulus, k: usize) -> Result<TupleIter> {
    TupleIter::starting_at(n, k, 0)
}

/// `#A_k(n) = C((n-1)/2, k)`.
pub fn count_tuples(n: OddModulus, k: usize) -> Result<BigUint> {
    n.check_k(k)?;
    Ok(binomial(n.half(), k as u64))
}

/// The `m`-slice with `d = gcd(m, n)`, `n_1 = n / d`, `m_1 = m / d`.
/// For `m = 0` the convention `gcd(0, n) = n` gives `(n, 1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SliceId {
    pub n: OddModulus,
    pub m: u64,
    pub d: u64,
    pub n1: u64,
    pub m1: u64,
}

pub fn slice_params(n: OddModulus, m: u64) -> Result<SliceId> {
    n.check_m(m)?;
    let d = gcd(m, n.get());
    Ok(SliceId {
        n,
        m,
        d,
        n1: n.get() / d,
        m1: m / d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceClass {
    /// `m >= 1` and no two generators agree up to sign modulo `n_1`.
    Primed,
    DoublePrimed,
}

/// True when some `a_i ≡ ±a_j (mod n1)` with `i < j`.
pub(crate) fn has_signed_collision(a: &[u64], n1: u64) -> bool {
    for (i, &x) in a.iter().enumerate() {
        for &y in &a[i + 1..] {
            if (y - x) % n1 == 0 || (x + y) % n1 == 0 {
                return true;
            }
        }
    }
    false
}

pub fn classify_tuple(t: &GeneratorTuple, s: &SliceId) -> Result<SliceClass> {
    if t.n != s.n {
        return Err(Error::MismatchedModulus {
            tuple: t.n.get(),
            slice: s.n.get(),
        });
    }
    if s.m == 0 || has_signed_collision(&t.a, s.n1) {
        Ok(SliceClass::DoublePrimed)
    } else {
        Ok(SliceClass::Primed)
    }
}

/// Folds the fractional part of `x` into `[0, 1/2]`; `cos(2 pi x)` is unchanged.
pub fn kappa(x: f64) -> f64 {
    let frac = x - x.floor();
    if frac <= 0.5 {
        frac
    } else {
        1.0 - frac
    }
}

/// Integer form of `kappa(num / den)`: returns `b` with `kappa(num/den) = b/den`.
#[inline]
pub fn kappa_numerator(num: u64, den: u64) -> u64 {
    let r = num % den;
    r.min(den - r)
}

/// A point `(b_1/n_1, ..., b_k/n_1)` with `0 <= b_i <= (n_1 - 1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    numerators: Vec<u64>,
    denominator: u64,
}

impl LatticePoint {
    pub fn new(numerators: Vec<u64>, denominator: u64) -> Result<Self> {
        if denominator == 0 || denominator.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "lattice denominator must be odd, got {denominator}"
            )));
        }
        let max = (denominator - 1) / 2;
        if let Some(&b) = numerators.iter().find(|&&b| b > max) {
            return Err(Error::OutOfRange { value: b, max });
        }
        Ok(LatticePoint {
            numerators,
            denominator,
        })
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn coords(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&b| b as f64 / self.denominator as f64)
            .collect()
    }

    pub fn has_distinct_coords(&self) -> bool {
        let mut v = self.numerators.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }
}

/// `P(a, sigma, m, n)`: coordinate `i` is `kappa(m_1 a_{sigma(i)} / n_1)`,
/// computed with modular arithmetic. `perm` is a 0-based permutation.
pub fn lattice_point(t: &GeneratorTuple, perm: &[usize], s: &SliceId) -> Result<LatticePoint> {
    if t.n != s.n {
        return Err(Error::MismatchedModulus {
            tuple: t.n.get(),
            slice: s.n.get(),
        });
    }
    if s.m == 0 {
        return Err(Error::ZeroSlice);
    }
    let k = t.k();
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidPermutation(perm.len()));
    }
    let numerators = perm
        .iter()
        .map(|&p| kappa_numerator(mul_mod(s.m1, t.a[p], s.n1), s.n1))
        .collect();
    Ok(LatticePoint {
        numerators,
        denominator: s.n1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn odd(n: u64) -> OddModulus {
        OddModulus::new(n).unwrap()
    }

    #[test]
    fn make_tuple_examples() {
        assert_eq!(make_tuple(5, &[1]).unwrap().k(), 1);
        assert_eq!(
            make_tuple(5, &[3]),
            Err(Error::OutOfRange { value: 3, max: 2 })
        );
        assert_eq!(make_tuple(9, &[1, 3]).unwrap().k(), 2);
        assert_eq!(make_tuple(4, &[1]), Err(Error::EvenModulus(4)));
        assert_eq!(make_tuple(9, &[3, 1]), Err(Error::NotStrictlyIncreasing));
        assert_eq!(make_tuple(9, &[2, 2]), Err(Error::NotStrictlyIncreasing));
        assert_eq!(make_tuple(9, &[0]), Err(Error::OutOfRange { value: 0, max: 4 }));
        assert_eq!(make_tuple(1, &[1]), Err(Error::ModulusTooSmall(1)));
        assert_eq!(make_tuple(9, &[]), Err(Error::EmptyTuple));
    }

    #[test]
    fn enumerate_examples() {
        let v: Vec<Vec<u64>> = enumerate_tuples(odd(5), 1)
            .unwrap()
            .map(|t| t.generators().to_vec())
            .collect();
        assert_eq!(v, vec![vec![1], vec![2]]);

        let v: Vec<_> = enumerate_tuples(odd(9), 2).unwrap().collect();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0].generators(), &[1, 2]);
        assert_eq!(v[5].generators(), &[3, 4]);

        assert_eq!(enumerate_tuples(odd(101), 3).unwrap().count(), 19_600);
        assert!(matches!(
            enumerate_tuples(odd(9), 5),
            Err(Error::KTooLarge { k: 5, max: 4 })
        ));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_tuples(odd(5), 1).unwrap(), BigUint::from(2u32));
        assert_eq!(count_tuples(odd(9), 2).unwrap(), BigUint::from(6u32));
        assert_eq!(
            count_tuples(odd(2001), 3).unwrap(),
            BigUint::from(166_167_000u64)
        );
        assert_eq!(count_tuples(odd(9), 0).unwrap(), BigUint::from(1u32));
        assert!(count_tuples(odd(9), 5).is_err());
    }

    #[test]
    fn split_streams_cover_everything_once() {
        let n = odd(23);
        let full: Vec<_> = enumerate_tuples(n, 3).unwrap().collect();
        let total = full.len() as u128;
        let mut glued = Vec::new();
        for start in (0..total).step_by(37) {
            glued.extend(
                TupleIter::starting_at(n, 3, start)
                    .unwrap()
                    .take(37),
            );
        }
        assert_eq!(glued, full);
        let tail = TupleIter::starting_at(n, 3, total - 1).unwrap();
        assert_eq!(tail.remaining(), 1);
        assert_eq!(TupleIter::starting_at(n, 3, total).unwrap().count(), 0);
    }

    #[test]
    fn slice_examples() {
        let s = slice_params(odd(9), 3).unwrap();
        assert_eq!((s.d, s.n1, s.m1), (3, 3, 1));
        let s = slice_params(odd(15), 6).unwrap();
        assert_eq!((s.d, s.n1, s.m1), (3, 5, 2));
        let s = slice_params(odd(9), 0).unwrap();
        assert_eq!((s.d, s.n1, s.m1), (9, 1, 0));
        assert!(matches!(
            slice_params(odd(9), 9),
            Err(Error::MOutOfRange { m: 9, max: 8 })
        ));
    }

    #[test]
    fn classify_examples() {
        let s = slice_params(odd(9), 3).unwrap();
        let t = make_tuple(9, &[1, 2]).unwrap();
        assert_eq!(classify_tuple(&t, &s).unwrap(), SliceClass::DoublePrimed);
        let t = make_tuple(9, &[1, 3]).unwrap();
        assert_eq!(classify_tuple(&t, &s).unwrap(), SliceClass::Primed);
        let zero = slice_params(odd(9), 0).unwrap();
        for t in enumerate_tuples(odd(9), 2).unwrap() {
            assert_eq!(classify_tuple(&t, &zero).unwrap(), SliceClass::DoublePrimed);
        }
        let other = slice_params(odd(11), 1).unwrap();
        assert!(matches!(
            classify_tuple(&t, &other),
            Err(Error::MismatchedModulus { .. })
        ));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(0.3), 0.3);
        assert!((kappa(0.7) - 0.3).abs() < 1e-15);
        assert_eq!(kappa(2.25), 0.25);
        assert_eq!(kappa(0.0), 0.0);
        assert_eq!(kappa(0.5), 0.5);
    }

    #[test]
    fn lattice_point_examples() {
        let t = make_tuple(5, &[1]).unwrap();
        let s = slice_params(odd(5), 2).unwrap();
        let p = lattice_point(&t, &[0], &s).unwrap();
        assert_eq!((p.numerators(), p.denominator()), (&[2u64][..], 5));

        let t = make_tuple(5, &[2]).unwrap();
        let p = lattice_point(&t, &[0], &s).unwrap();
        assert_eq!(p.numerators(), &[1]);

        let t = make_tuple(9, &[1, 3]).unwrap();
        let s = slice_params(odd(9), 3).unwrap();
        let p = lattice_point(&t, &[1, 0], &s).unwrap();
        assert_eq!((p.numerators(), p.denominator()), (&[0u64, 1][..], 3));

        let zero = slice_params(odd(9), 0).unwrap();
        assert_eq!(lattice_point(&t, &[0, 1], &zero), Err(Error::ZeroSlice));
        assert_eq!(
            lattice_point(&t, &[0, 0], &s),
            Err(Error::InvalidPermutation(2))
        );
    }

    #[test]
    fn connection_set_and_degree() {
        let spec = CayleySpec::new(make_tuple(5, &[1]).unwrap(), true);
        assert_eq!(spec.degree(), 3);
        assert_eq!(spec.connection_set(), vec![0, 1, 4]);
        let spec = CayleySpec::new(make_tuple(9, &[1, 3]).unwrap(), false);
        assert_eq!(spec.degree(), 4);
        assert_eq!(spec.connection_set(), vec![1, 3, 6, 8]);
    }

    fn all_perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn enumeration_count_matches_binomial(half in 1u64..40, k in 1usize..4) {
            let n = odd(2 * half + 1);
            prop_assume!(k as u64 <= half);
            let counted = enumerate_tuples(n, k).unwrap().count();
            prop_assert_eq!(BigUint::from(counted), count_tuples(n, k).unwrap());
        }

        #[test]
        fn kappa_preserves_cosine(x in -50.0f64..50.0) {
            let c = (2.0 * std::f64::consts::PI * x).cos();
            let ck = (2.0 * std::f64::consts::PI * kappa(x)).cos();
            prop_assert!((c - ck).abs() < 1e-12);
            prop_assert!((0.0..=0.5).contains(&kappa(x)));
            prop_assert!((kappa(kappa(x)) - kappa(x)).abs() < 1e-15);
            prop_assert!((kappa(-x) - kappa(x)).abs() < 1e-13);
        }

        #[test]
        fn classification_symmetric_in_m(half in 2u64..40, seed in 0u64..1000) {
            let n = odd(2 * half + 1);
            let k = 2 + (seed % 2) as usize;
            prop_assume!(k as u64 <= half);
            let tuples: Vec<_> = enumerate_tuples(n, k).unwrap().collect();
            let t = &tuples[(seed as usize) % tuples.len()];
            for m in 1..n.get() {
                let a = classify_tuple(t, &slice_params(n, m).unwrap()).unwrap();
                let b = classify_tuple(t, &slice_params(n, n.get() - m).unwrap()).unwrap();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn primed_points_have_distinct_coords(half in 2u64..30, m in 1u64..61, seed in 0usize..500) {
            let n = odd(2 * half + 1);
            prop_assume!(m < n.get());
            let s = slice_params(n, m).unwrap();
            let k = 2 + seed % 2;
            prop_assume!(k as u64 <= half);
            let tuples: Vec<_> = enumerate_tuples(n, k).unwrap().collect();
            let t = &tuples[seed % tuples.len()];
            let primed = classify_tuple(t, &s).unwrap() == SliceClass::Primed;
            for perm in all_perms(k) {
                let p = lattice_point(t, &perm, &s).unwrap();
                prop_assert_eq!(p.denominator(), s.n1);
                prop_assert!(p.numerators().iter().all(|&b| b <= (s.n1 - 1) / 2));
                if primed {
                    prop_assert!(p.has_distinct_coords());
                }
            }
        }
    }
}
