//! Lattice points of the half box `B_k = [0, 1/2)^k` at spacing `1/n`.
//!
//! Since `n` is odd, `b/n < 1/2` exactly when `b <= (n-1)/2`, so `Ω_n` is the
//! integer cube `[0, (n-1)/2]^k` scaled by `1/n`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::binomial_saturating;
use crate::cosine::{CosineTable, KahanSum};
use crate::density::{box_volume, MassEstimate};
use crate::error::{Error, Result};
use crate::group::OddModulus;
use crate::interval::Interval;
use crate::walk::{count_cube, for_each_cube_point};

/// Default cap on the number of lattice points a single count may visit.
pub const DEFAULT_POINT_BUDGET: u64 = 500_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub k: usize,
    /// `None` is the whole box.
    pub interval: Option<Interval>,
    pub distinct_coords: bool,
}

impl RegionSpec {
    pub fn whole(k: usize) -> Self {
        RegionSpec {
            k,
            interval: None,
            distinct_coords: false,
        }
    }

    pub fn with_interval(k: usize, interval: Interval) -> Self {
        RegionSpec {
            k,
            interval: Some(interval),
            distinct_coords: false,
        }
    }

    pub fn distinct(mut self) -> Self {
        self.distinct_coords = true;
        self
    }
}

pub fn in_region(x: &[f64], region: &RegionSpec) -> Result<bool> {
    if x.len() != region.k {
        return Err(Error::DimensionMismatch {
            expected: region.k,
            got: x.len(),
        });
    }
    if !x.iter().all(|&c| (0.0..0.5).contains(&c)) {
        return Ok(false);
    }
    if region.distinct_coords {
        let mut s = x.to_vec();
        s.sort_by(f64::total_cmp);
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Ok(false);
        }
    }
    Ok(match &region.interval {
        None => true,
        Some(iv) => {
            let sum = KahanSum::of(x.iter().map(|&c| (2.0 * std::f64::consts::PI * c).cos()));
            iv.contains(sum)
        }
    })
}

/// `((n+1)/2)^k`, or the falling factorial `((n+1)/2)((n-1)/2)...` when the
/// coordinates must be distinct.
pub fn whole_box_count(n: OddModulus, k: usize, distinct: bool) -> BigUint {
    let side = n.get().div_ceil(2);
    (0..k as u64)
        .map(|i| if distinct { side.saturating_sub(i) } else { side })
        .fold(BigUint::from(1u32), |acc, f| acc * f)
}

/// Exact `#Ω_n(I)` (or `#Ω'_n(I)`) by enumeration over the shared cosine table.
pub fn count_lattice(n: OddModulus, region: &RegionSpec) -> Result<BigUint> {
    count_lattice_with(&CosineTable::new(n.get()), region, DEFAULT_POINT_BUDGET)
}

pub fn count_lattice_with(table: &CosineTable, region: &RegionSpec, budget: u64) -> Result<BigUint> {
    let n = OddModulus::new(table.modulus())?;
    if region.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let k = region.k as f64;
    let interval = match region.interval {
        Some(iv) if !iv.is_within(&Interval::symmetric(k)) => {
            return Err(Error::BadInterval(format!("{iv} not contained in [-{k}, {k}]")));
        }
        // The whole range [-k, k] is the no-interval case: every cosine sum
        // lies in it.
        Some(iv) if iv == Interval::symmetric(k) => None,
        other => other,
    };
    if interval.is_none() {
        return Ok(whole_box_count(n, region.k, region.distinct_coords));
    }
    let side = n.get().div_ceil(2);
    let work = (side as u128).checked_pow(region.k as u32).unwrap_or(u128::MAX);
    if work > budget as u128 {
        return Err(Error::KTooLarge {
            k: region.k,
            max: max_k_within(side, budget),
        });
    }
    Ok(BigUint::from(count_points(
        table,
        region.k,
        interval.as_ref(),
        region.distinct_coords,
    )))
}

/// Enumerated lattice count for any odd `n >= 1` (the table's modulus),
/// without validation or budget checks.
pub(crate) fn count_points(table: &CosineTable, k: usize, interval: Option<&Interval>, distinct: bool) -> u64 {
    let side = table.modulus().div_ceil(2);
    count_cube(&table.as_slice()[..side as usize], k, distinct, interval)
}

fn max_k_within(side: u64, budget: u64) -> u64 {
    let mut k = 0u32;
    while (side as u128).pow(k + 1) <= budget as u128 {
        k += 1;
        if k > 64 {
            break;
        }
    }
    k as u64
}

/// Outcome of the shift check over all points of `Ω_n(I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub n: u64,
    pub k: usize,
    pub interval: Interval,
    pub widened: Interval,
    pub checked: u64,
    /// Points whose shifted cosine sum leaves the widened interval.
    pub counterexample: Option<Vec<u64>>,
    /// Points with some `b_i = (n-1)/2`; shifting those leaves `[0, 1/2)`
    /// altogether, which the sum condition does not see.
    pub box_escapes: u64,
}

impl ShiftReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that every `b` with `Σ cos(2π b_i / n) ∈ [c, d]` satisfies
/// `Σ cos(2π (b_i + 1) / n) ∈ [c - 2πk/n, d + 2πk/n]`.
pub fn shift_check(n: OddModulus, k: usize, interval: Interval) -> Result<ShiftReport> {
    let kf = k as f64;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if !interval.is_within(&Interval::symmetric(kf)) {
        return Err(Error::BadInterval(format!("{interval} not contained in [-{kf}, {kf}]")));
    }
    let side = n.get().div_ceil(2);
    let work = (side as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if work > DEFAULT_POINT_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            needed: work,
            budget: DEFAULT_POINT_BUDGET,
        });
    }
    let table = CosineTable::new(n.get());
    let widened = interval.widened(2.0 * std::f64::consts::PI * kf / n.get() as f64);
    let mut report = ShiftReport {
        n: n.get(),
        k,
        interval,
        widened,
        checked: 0,
        counterexample: None,
        box_escapes: 0,
    };
    for_each_cube_point(side, k, |b| {
        let sum = KahanSum::of(b.iter().map(|&x| table.get(x)));
        if !interval.contains(sum) {
            return;
        }
        report.checked += 1;
        if b.iter().any(|&x| x + 1 == side) {
            report.box_escapes += 1;
        }
        let shifted = KahanSum::of(b.iter().map(|&x| table.get(x + 1)));
        if !widened.contains(shifted) && report.counterexample.is_none() {
            report.counterexample = Some(b.to_vec());
        }
    });
    Ok(report)
}

/// `|#Ω_n(I) / n^k - Vol(B_k(I))|`.
pub fn volume_count_gap(n: OddModulus, k: usize, interval: Interval) -> Result<f64> {
    let count = count_lattice(n, &RegionSpec::with_interval(k, interval))?;
    let vol: MassEstimate = box_volume(k, interval)?;
    let count = count.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    Ok((count / (n.get() as f64).powi(k as i32) - vol.value).abs())
}

/// Upper bound on `#Ω_n - #Ω'_n`: pairs of equal coordinates times the free
/// remaining coordinates.
pub fn distinct_defect_bound(n: OddModulus, k: usize) -> BigUint {
    if k < 2 {
        return BigUint::from(0u32);
    }
    let pairs = binomial_saturating(k as u64, 2);
    BigUint::from(pairs) * whole_box_count(n, k - 1, false)
}
