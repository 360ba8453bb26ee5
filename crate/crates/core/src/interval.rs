use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::BadInterval(format!("non-finite endpoint [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::BadInterval(format!("lower end {lo} exceeds upper end {hi}")));
        }
        Ok(Interval { lo, hi })
    }

    /// `[-k, k]`, the full range of a k-term cosine sum.
    pub fn symmetric(k: f64) -> Self {
        Interval { lo: -k, hi: k }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Intersection with `[lo, hi]`; an empty result collapses to the nearest
    /// endpoint so the returned interval is still valid (and has zero length).
    pub fn clamp_to(&self, lo: f64, hi: f64) -> Interval {
        let a = self.lo.clamp(lo, hi);
        let b = self.hi.clamp(lo, hi);
        Interval { lo: a, hi: b.max(a) }
    }

    pub fn negated(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// `[lo - delta, hi + delta]`.
    pub fn widened(&self, delta: f64) -> Interval {
        Interval {
            lo: self.lo - delta,
            hi: self.hi + delta,
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
