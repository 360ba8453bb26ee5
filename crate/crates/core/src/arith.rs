//! Elementary number theory used by the counting arguments: gcd, Euler's
//! totient, divisors, binomials and Pillai's function.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `(a * b) mod n` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

/// Pillai's arithmetical function `g(n) = sum_{d | n} phi(d) * (n / d)`.
pub fn pillai(n: u64) -> BigUint {
    divisors(n)
        .into_iter()
        .map(|d| BigUint::from(totient(d)) * BigUint::from(n / d))
        .sum()
}

/// Checks Broughan's explicit bound `g(n) <= 27 n (log n / omega(n))^omega(n)`
/// for `n >= 2`. Returns `true` for `n < 2`, where the bound is not stated.
pub fn broughan_check(n: u64) -> bool {
    if n < 2 {
        return true;
    }
    let w = omega(n) as f64;
    let bound = 27.0 * n as f64 * ((n as f64).ln() / w).powf(w);
    pillai(n).to_f64().is_some_and(|g| g <= bound)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient in u128, saturating at `u128::MAX`. Used for work
/// estimates where only comparison against a budget matters.
pub fn binomial_saturating(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        match acc.checked_mul(n as u128 - i) {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

pub fn factorial(k: u64) -> u128 {
    (1..=k as u128).product()
}
