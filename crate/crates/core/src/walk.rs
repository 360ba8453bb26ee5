//! Enumeration kernels shared by the counting modules. Each leaf sum is the
//! left-to-right Kahan sum of its coordinates, identical to what
//! [`crate::spectra::tau`] computes for the same ordered values.

use crate::cosine::KahanSum;
use crate::interval::Interval;

/// Counts strictly increasing index tuples `i_1 < ... < i_k` into `values`
/// whose value sum lies in `interval`.
pub(crate) fn count_increasing(values: &[f64], k: usize, interval: &Interval) -> u64 {
    fn rec(values: &[f64], start: usize, left: usize, acc: KahanSum, iv: &Interval) -> u64 {
        if left == 1 {
            return values[start..]
                .iter()
                .filter(|&&v| iv.contains(acc.add(v).value()))
                .count() as u64;
        }
        let mut total = 0;
        for i in start..values.len() + 1 - left {
            total += rec(values, i + 1, left - 1, acc.add(values[i]), iv);
        }
        total
    }
    if k == 0 || k > values.len() {
        return u64::from(k == 0 && interval.contains(0.0));
    }
    rec(values, 0, k, KahanSum::default(), interval)
}

/// Counts all vectors in `values.len()^k` (pairwise distinct indices when
/// `distinct`) whose value sum lies in `interval`, if given.
pub(crate) fn count_cube(values: &[f64], k: usize, distinct: bool, interval: Option<&Interval>) -> u64 {
    fn rec(
        values: &[f64],
        left: usize,
        acc: KahanSum,
        used: &mut [bool],
        distinct: bool,
        iv: Option<&Interval>,
    ) -> u64 {
        if left == 0 {
            return u64::from(iv.is_none_or(|iv| iv.contains(acc.value())));
        }
        let mut total = 0;
        for (i, &v) in values.iter().enumerate() {
            if distinct {
                if used[i] {
                    continue;
                }
                used[i] = true;
            }
            total += rec(values, left - 1, acc.add(v), used, distinct, iv);
            if distinct {
                used[i] = false;
            }
        }
        total
    }
    let mut used = vec![false; values.len()];
    rec(values, k, KahanSum::default(), &mut used, distinct, interval)
}

/// Visits every strictly increasing tuple `1 <= a_1 < ... < a_k <= h` in
/// lexicographic order.
pub(crate) fn for_each_increasing<F: FnMut(&[u64])>(h: u64, k: usize, mut f: F) {
    if k as u64 > h {
        return;
    }
    let mut a: Vec<u64> = (1..=k as u64).collect();
    loop {
        f(&a);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if a[i] < h - (k - 1 - i) as u64 {
                a[i] += 1;
                for j in i + 1..k {
                    a[j] = a[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Visits every vector of `[0, len)^k` in row-major order.
pub(crate) fn for_each_cube_point<F: FnMut(&[u64])>(len: u64, k: usize, mut f: F) {
    if k == 0 {
        f(&[]);
        return;
    }
    if len == 0 {
        return;
    }
    let mut b = vec![0u64; k];
    loop {
        f(&b);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            b[i] += 1;
            if b[i] < len {
                break;
            }
            b[i] = 0;
        }
    }
}
