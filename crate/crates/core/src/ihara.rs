//! Ihara zeta data of a regular Cayley graph: the polynomial
//! `h(u) = Π_m (1 - λ_m u + (r-1) u²)`, the inverse zeta function
//! `(1 - u²)^(rank-1) h(u)` and the reciprocal pole pairs of each factor.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cosine::CosineTable;
use crate::density::{conv_mass, DensityQuery};
use crate::error::{Error, Result};
use crate::group::{CayleySpec, OddModulus};
use crate::interval::Interval;
use crate::spectra::spectrum;
use crate::stats::{slice_values, window, Limits};
use crate::walk::count_increasing;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IharaPolynomial {
    pub n: u64,
    pub r: u64,
    /// `|E| - |V| + 1`, loops counted once.
    pub rank: u64,
    /// Ascending coefficients of `h`, length `2n + 1`.
    pub coefficients: Vec<f64>,
}

impl IharaPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn evaluate(&self, u: f64) -> f64 {
        horner(&self.coefficients, u)
    }
}

pub fn horner(coefficients: &[f64], u: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

/// `|E| - |V| + 1` with `|E| = nk + n [r odd]`.
pub fn rank(spec: &CayleySpec) -> u64 {
    let n = spec.modulus().get();
    let edges = n * spec.k() as u64 + if spec.includes_zero() { n } else { 0 };
    edges - n + 1
}

fn multiply(poly: &[f64], factor: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; poly.len() + factor.len() - 1];
    for (i, &p) in poly.iter().enumerate() {
        for (j, &f) in factor.iter().enumerate() {
            out[i + j] += p * f;
        }
    }
    out
}

fn check_finite(poly: &[f64]) -> Result<()> {
    if poly.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::CoefficientOverflow)
    }
}

pub fn ihara_polynomial(spec: &CayleySpec, limits: &Limits) -> Result<IharaPolynomial> {
    let r = spec.degree();
    if r < 2 {
        return Err(Error::DegreeTooSmall(r));
    }
    let n = spec.modulus().get();
    let needed = 6 * (n as u128) * (n as u128);
    if needed > limits.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: limits.budget,
        });
    }
    let q = (r - 1) as f64;
    let mut coefficients = vec![1.0];
    for &lambda in &spectrum(spec).values {
        coefficients = multiply(&coefficients, &[1.0, -lambda, q]);
    }
    check_finite(&coefficients)?;
    Ok(IharaPolynomial {
        n,
        r,
        rank: rank(spec),
        coefficients,
    })
}

/// Direct evaluation of `Π_m (1 - λ_m u + (r-1) u²)`.
pub fn ihara_product(spec: &CayleySpec, u: f64) -> f64 {
    let q = (spec.degree() - 1) as f64;
    spectrum(spec)
        .values
        .iter()
        .map(|&l| 1.0 - l * u + q * u * u)
        .product()
}

/// Ascending coefficients of `(1 - u²)^(rank-1) h(u)`.
pub fn zeta_inverse(spec: &CayleySpec, limits: &Limits) -> Result<Vec<f64>> {
    let h = ihara_polynomial(spec, limits)?;
    let mut out = h.coefficients;
    for _ in 1..h.rank {
        out = multiply(&out, &[1.0, 0.0, -1.0]);
    }
    check_finite(&out)?;
    Ok(out)
}

/// Roots of `1 - α u + (r-1) u²` written as `(α ± √(α² - 4(r-1))) / (2(r-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolePair {
    pub alpha: f64,
    pub r: u64,
    pub plus: Complex64,
    pub minus: Complex64,
}

pub fn pole_pair(alpha: f64, r: u64) -> Result<PolePair> {
    if r < 2 {
        return Err(Error::DegreeTooSmall(r));
    }
    let q = (r - 1) as f64;
    let disc = Complex64::new(alpha * alpha - 4.0 * q, 0.0).sqrt();
    let a = Complex64::new(alpha, 0.0);
    Ok(PolePair {
        alpha,
        r,
        plus: (a + disc) / (2.0 * q),
        minus: (a - disc) / (2.0 * q),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanujanReport {
    pub n: u64,
    pub k: usize,
    pub r: u64,
    /// Pairs with `m != 0` and `|λ| <= 2√(r-1)`.
    pub count: u64,
    pub total: u64,
    pub fraction: f64,
    pub predicted: f64,
}

/// Fraction of nontrivial eigenvalues inside the Ramanujan window, with the
/// limiting mass of that window.
pub fn ramanujan_fraction(n: OddModulus, k: usize, includes_zero: bool, limits: &Limits) -> Result<RamanujanReport> {
    let total = crate::stats::total_pairs(n, k);
    n.half().checked_sub(k as u64).ok_or(Error::KTooLarge { k, max: n.half() })?;
    let needed = total.saturating_mul(k as u128);
    if needed > limits.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: limits.budget,
        });
    }
    let r = 2 * k as u64 + u64::from(includes_zero);
    let bound = 2.0 * ((r - 1) as f64).sqrt();
    let pair = window(Interval::new(-bound, bound)?, k, includes_zero)?;
    let table = CosineTable::new(n.get());
    let count: u64 = (1..n.get())
        .into_par_iter()
        .map(|m| count_increasing(&slice_values(&table, m), k, &pair.i))
        .sum();
    let nontrivial = (total - total / n.get() as u128) as u64;
    let predicted = conv_mass(&DensityQuery::quadrature(k, pair.clamped()).with_tolerance(limits.tolerance))?.value;
    Ok(RamanujanReport {
        n: n.get(),
        k,
        r,
        count,
        total: nontrivial,
        fraction: count as f64 / nontrivial as f64,
        predicted,
    })
}
