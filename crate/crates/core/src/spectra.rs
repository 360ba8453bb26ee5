//! Adjacency spectra of circulant Cayley graphs.
//!
//! The character `chi_m(x) = exp(2 pi i m x / n)` gives the eigenvalue
//! `lambda_m = sum_{s in S} chi_m(s)`. With `S = T ∪ -T (∪ {0})` this is
//! `2 tau_m` or `1 + 2 tau_m`, where `tau_m = sum_i cos(2 pi m a_i / n)`.

use serde::{Deserialize, Serialize};

use crate::arith::mul_mod;
use crate::cosine::{CosineTable, KahanSum};
use crate::error::{Error, Result};
use crate::group::{CayleySpec, GeneratorTuple};
use crate::interval::Interval;
use crate::jacobi::symmetric_eigenvalues;

/// Largest `n` accepted by [`spectrum_via_matrix`].
pub const DENSE_LIMIT: u64 = 4096;

/// `tau_m(a)` through the shared cosine table, summed left to right with
/// Kahan compensation.
pub fn tau(table: &CosineTable, t: &GeneratorTuple, m: u64) -> Result<f64> {
    let n = t.modulus();
    n.check_m(m)?;
    debug_assert_eq!(table.modulus(), n.get());
    Ok(tau_unchecked(table, t.generators(), m))
}

#[inline]
pub(crate) fn tau_unchecked(table: &CosineTable, a: &[u64], m: u64) -> f64 {
    let n = table.modulus();
    KahanSum::of(a.iter().map(|&ai| table.get(mul_mod(m, ai, n))))
}

/// `lambda = 2 tau` (even degree) or `1 + 2 tau` (odd degree).
#[inline]
pub fn eigenvalue_from_tau(tau: f64, includes_zero: bool) -> f64 {
    if includes_zero {
        1.0 + 2.0 * tau
    } else {
        2.0 * tau
    }
}

pub fn eigenvalue(table: &CosineTable, spec: &CayleySpec, m: u64) -> Result<f64> {
    let t = tau(table, spec.tuple(), m)?;
    Ok(eigenvalue_from_tau(t, spec.includes_zero()))
}

/// The `n` eigenvalues of `X_gamma`, indexed by character index `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMultiset {
    pub degree: u64,
    pub values: Vec<f64>,
}

impl SpectrumMultiset {
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn trace(&self) -> f64 {
        KahanSum::of(self.values.iter().copied())
    }

    pub fn trace_of_square(&self) -> f64 {
        KahanSum::of(self.values.iter().map(|x| x * x))
    }
}

pub fn spectrum(spec: &CayleySpec) -> SpectrumMultiset {
    let table = CosineTable::new(spec.modulus().get());
    spectrum_with(&table, spec)
}

pub fn spectrum_with(table: &CosineTable, spec: &CayleySpec) -> SpectrumMultiset {
    let n = spec.modulus().get();
    let a = spec.tuple().generators();
    let values = (0..n)
        .map(|m| eigenvalue_from_tau(tau_unchecked(table, a, m), spec.includes_zero()))
        .collect();
    SpectrumMultiset {
        degree: spec.degree(),
        values,
    }
}

/// Dense 0/1 adjacency matrix, `A[g][h] = [g - h mod n ∈ S]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, g: usize, h: usize) -> u8 {
        self.entries[g * self.n + h]
    }

    pub fn row(&self, g: usize) -> &[u8] {
        &self.entries[g * self.n..(g + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|g| (0..g).all(|h| self.get(g, h) == self.get(h, g)))
    }

    fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&x| f64::from(x)).collect()
    }
}

/// Loops sit on the diagonal with weight 1, which is what makes
/// `lambda_m = 1 + 2 tau_m` hold for odd degree.
pub fn adjacency_matrix(spec: &CayleySpec) -> AdjacencyMatrix {
    let n = spec.modulus().get() as usize;
    let mut member = vec![false; n];
    for s in spec.connection_set() {
        member[s as usize] = true;
    }
    let mut entries = vec![0u8; n * n];
    for g in 0..n {
        for h in 0..n {
            entries[g * n + h] = u8::from(member[(g + n - h) % n]);
        }
    }
    AdjacencyMatrix { n, entries }
}

/// Sorted eigenvalues of the dense adjacency matrix (independent oracle).
pub fn spectrum_via_matrix(spec: &CayleySpec) -> Result<SpectrumMultiset> {
    let n = spec.modulus().get();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n,
            max: DENSE_LIMIT,
        });
    }
    let adj = adjacency_matrix(spec);
    Ok(SpectrumMultiset {
        degree: spec.degree(),
        values: symmetric_eigenvalues(adj.to_f64(), n as usize),
    })
}

/// An eigenvalue window `J ⊆ [-r, r]` and its cosine-sum counterpart `I`.
///
/// `i` is the raw affine image (`J/2` or `(J-1)/2`); for odd `r` its lower end
/// may fall below `-k`. [`IntervalPair::clamped`] gives `I ∩ [-k, k]`, which is
/// what every mass computation uses. Membership tests agree either way since
/// `tau` always lies in `[-k, k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalPair {
    pub r: u64,
    pub j: Interval,
    pub i: Interval,
}

impl IntervalPair {
    /// `k = floor(r / 2)`.
    pub fn k(&self) -> u64 {
        self.r / 2
    }

    pub fn includes_zero(&self) -> bool {
        self.r % 2 == 1
    }

    pub fn clamped(&self) -> Interval {
        let k = self.k() as f64;
        self.i.clamp_to(-k, k)
    }

    /// The pair for a cosine interval `I` at degree `r` (inverse of
    /// [`interval_map`]).
    pub fn from_cosine(i: Interval, r: u64) -> Result<Self> {
        if r < 2 {
            return Err(Error::DegreeTooSmall(r));
        }
        let k = (r / 2) as f64;
        if !i.is_within(&Interval::symmetric(k)) {
            return Err(Error::BadInterval(format!("{i} not contained in [-{k}, {k}]")));
        }
        let j = if r.is_multiple_of(2) {
            Interval::new(2.0 * i.lo(), 2.0 * i.hi())?
        } else {
            Interval::new(2.0 * i.lo() + 1.0, 2.0 * i.hi() + 1.0)?
        };
        Ok(IntervalPair { r, j, i })
    }
}

/// Maps an eigenvalue window to the cosine-sum window:
/// `[a/2, b/2]` for even `r`, `[(a-1)/2, (b-1)/2]` for odd `r`.
pub fn interval_map(j: Interval, r: u64) -> Result<IntervalPair> {
    if r < 2 {
        return Err(Error::DegreeTooSmall(r));
    }
    if !j.is_within(&Interval::symmetric(r as f64)) {
        return Err(Error::JOutOfRange {
            lo: j.lo(),
            hi: j.hi(),
            r,
        });
    }
    let i = if r.is_multiple_of(2) {
        Interval::new(j.lo() / 2.0, j.hi() / 2.0)?
    } else {
        Interval::new((j.lo() - 1.0) / 2.0, (j.hi() - 1.0) / 2.0)?
    };
    Ok(IntervalPair { r, j, i })
}
