use std::f64::consts::PI;
use std::sync::Arc;

/// Table of `cos(2 pi j / n)` for `j in [0, n)`.
///
/// Entries for `j > (n-1)/2` are copied from their mirror `n - j`, so the
/// table is exactly symmetric and `tau_m == tau_{n-m}` holds bit for bit.
#[derive(Debug, Clone)]
pub struct CosineTable {
    n: u64,
    values: Arc<[f64]>,
}

impl CosineTable {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "cosine table needs n >= 1");
        let half = (n - 1) / 2;
        let mut values = vec![0.0; n as usize];
        for j in 0..=half {
            values[j as usize] = (2.0 * PI * j as f64 / n as f64).cos();
        }
        for j in half + 1..n {
            values[j as usize] = values[(n - j) as usize];
        }
        values[0] = 1.0;
        CosineTable {
            n,
            values: values.into(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// `cos(2 pi j / n)`, with `j` reduced modulo `n`.
    #[inline]
    pub fn get(&self, j: u64) -> f64 {
        self.values[(j % self.n) as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Compensated (Kahan) running sum. `Copy` so that enumeration code can keep
/// one state per prefix depth and reproduce exactly what a left-to-right
/// summation of the full tuple gives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(self, x: f64) -> KahanSum {
        let y = x - self.comp;
        let t = self.sum + y;
        KahanSum {
            comp: (t - self.sum) - y,
            sum: t,
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.sum
    }

    pub fn of<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
        xs.into_iter().fold(KahanSum::default(), KahanSum::add).value()
    }
}
