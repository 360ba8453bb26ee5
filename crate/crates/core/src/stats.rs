//! Exact eigenvalue statistics over all pairs (tuple, character), the fast
//! lattice path, `S''` bounds, defect audits and convergence experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial_saturating, divisor_count, divisors, factorial, gcd, pillai, totient};
use crate::cosine::{CosineTable, KahanSum};
use crate::density::{conv_cdf, conv_mass, DensityQuery, DEFAULT_TOLERANCE, MAX_PANELS};
use crate::error::{Error, Result};
use crate::group::{has_signed_collision, slice_params, OddModulus};
use crate::interval::Interval;
use crate::lattice::count_points;
use crate::spectra::{interval_map, IntervalPair};
use crate::walk::{count_increasing, for_each_increasing};

/// Default cap on tuple-slot evaluations.
pub const DEFAULT_BUDGET: u64 = 500_000_000;

/// Resource and accuracy settings shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub budget: u64,
    pub tolerance: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            budget: DEFAULT_BUDGET,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl Limits {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn check(&self, needed: u128) -> Result<()> {
        if needed > self.budget as u128 {
            return Err(Error::BudgetExceeded {
                needed,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// `C_k = 4 C(k,2) 2^(k-1) + 1`.
pub fn c_k(k: usize) -> u128 {
    4 * binomial_saturating(k as u64, 2) * (1u128 << (k - 1)) + 1
}

/// `n C((n-1)/2, k)`, the number of pairs (tuple, m).
pub fn total_pairs(n: OddModulus, k: usize) -> u128 {
    n.get() as u128 * binomial_saturating(n.half(), k as u64)
}

fn exact_work(n: OddModulus, k: usize) -> u128 {
    total_pairs(n, k).saturating_mul(k as u128)
}

fn check_interval(k: usize, interval: &Interval) -> Result<()> {
    let kf = k as f64;
    if !interval.is_within(&Interval::symmetric(kf)) {
        return Err(Error::BadInterval(format!("{interval} not contained in [-{kf}, {kf}]")));
    }
    Ok(())
}

/// `cos(2 pi m a / n)` for `a = 1..=(n-1)/2`.
pub(crate) fn slice_values(table: &CosineTable, m: u64) -> Vec<f64> {
    let n = table.modulus();
    let h = (n - 1) / 2;
    let mut x = 0;
    (0..h)
        .map(|_| {
            x = (x + m) % n;
            table.get(x)
        })
        .collect()
}

/// `#{t in A_k(n) : tau(t, m) in I}`.
pub fn count_slice(n: OddModulus, k: usize, m: u64, interval: Interval, limits: &Limits) -> Result<u64> {
    n.check_k(k)?;
    n.check_m(m)?;
    check_interval(k, &interval)?;
    limits.check(binomial_saturating(n.half(), k as u64).saturating_mul(k as u128))?;
    let table = CosineTable::new(n.get());
    Ok(count_increasing(&slice_values(&table, m), k, &interval))
}

/// One row of a probability experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u64,
    pub k: usize,
    /// Degree and eigenvalue window; `r = 2k`, `J = 2I` unless set from an
    /// [`IntervalPair`].
    pub r: u64,
    pub j: Interval,
    pub interval: Interval,
    pub m: Option<u64>,
    pub count_in: Option<u64>,
    pub fast_count: Option<f64>,
    pub count_total: u128,
    pub probability: f64,
    pub reference_mass: f64,
    pub abs_error: f64,
    pub method: String,
    pub tolerance: f64,
    pub seed: Option<u64>,
    /// Absolute count deviation allowed between fast and exact paths.
    pub deviation_budget: Option<f64>,
}

impl SweepRecord {
    /// Relabels the record with the eigenvalue window it came from.
    pub fn with_window(mut self, pair: &IntervalPair) -> Self {
        self.r = pair.r;
        self.j = pair.j;
        self
    }

    /// The exact count if present, otherwise the fast estimate.
    pub fn count(&self) -> f64 {
        match (self.count_in, self.fast_count) {
            (Some(c), _) => c as f64,
            (None, Some(f)) => f,
            (None, None) => f64::NAN,
        }
    }
}

fn reference_mass(k: usize, interval: Interval, tolerance: f64) -> Result<f64> {
    let q = DensityQuery::quadrature(k, interval).with_tolerance(tolerance);
    Ok(conv_mass(&q)?.value)
}

fn base_record(n: OddModulus, k: usize, interval: Interval, reference: f64, tolerance: f64) -> SweepRecord {
    SweepRecord {
        n: n.get(),
        k,
        r: 2 * k as u64,
        j: Interval::new(2.0 * interval.lo(), 2.0 * interval.hi()).expect("scaled interval stays ordered"),
        interval,
        m: None,
        count_in: None,
        fast_count: None,
        count_total: total_pairs(n, k),
        probability: f64::NAN,
        reference_mass: reference,
        abs_error: f64::NAN,
        method: String::new(),
        tolerance,
        seed: None,
        deviation_budget: None,
    }
}

/// Exact count of pairs `(t, m)` with `tau(t, m) in I`, summed over slices.
pub fn exact_count(n: OddModulus, k: usize, interval: Interval, limits: &Limits) -> Result<u64> {
    n.check_k(k)?;
    check_interval(k, &interval)?;
    limits.check(exact_work(n, k))?;
    let table = CosineTable::new(n.get());
    Ok((0..n.get())
        .into_par_iter()
        .map(|m| count_increasing(&slice_values(&table, m), k, &interval))
        .sum())
}

/// `Prob_I(n, k)` by full enumeration.
pub fn prob_exact(n: OddModulus, k: usize, interval: Interval, limits: &Limits) -> Result<SweepRecord> {
    let count = exact_count(n, k, interval, limits)?;
    let reference = reference_mass(k, interval, limits.tolerance)?;
    let mut rec = base_record(n, k, interval, reference, limits.tolerance);
    rec.count_in = Some(count);
    rec.probability = count as f64 / rec.count_total as f64;
    rec.abs_error = (rec.probability - reference).abs();
    rec.method = "exact".into();
    Ok(rec)
}

/// `C_k d(n) n^k + C_k g(n) n^(k-1)`, with `g` Pillai's function.
pub fn fast_deviation_budget(n: OddModulus, k: usize) -> f64 {
    let ck = c_k(k) as f64;
    let nf = n.get() as f64;
    let g = pillai(n.get()).to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    ck * divisor_count(n.get()) as f64 * nf.powi(k as i32) + ck * g * nf.powi(k as i32 - 1)
}

/// Fast-path work: one lattice enumeration per divisor.
pub fn fast_work(n: OddModulus, k: usize) -> u128 {
    divisors(n.get())
        .into_iter()
        .map(|d| {
            let side = (n.get() / d).div_ceil(2);
            (side as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
        })
        .fold(0u128, u128::saturating_add)
}

/// `Σ_{d | n} φ(n/d) ((d+1)/2)^k #Ω_{n/d}(I) / k!`.
pub fn fast_count(n: OddModulus, k: usize, interval: Interval, limits: &Limits) -> Result<f64> {
    n.check_k(k)?;
    check_interval(k, &interval)?;
    limits.check(fast_work(n, k))?;
    let kf = factorial(k as u64) as f64;
    let parts: Vec<f64> = divisors(n.get())
        .into_par_iter()
        .map(|d| {
            let n1 = n.get() / d;
            let lattice = count_points(&CosineTable::new(n1), k, Some(&interval), false);
            totient(n1) as f64 * (d.div_ceil(2) as f64).powi(k as i32) * lattice as f64 / kf
        })
        .collect();
    Ok(parts.iter().sum())
}

/// `Prob_I(n, k)` from the lattice path, with the allowed deviation.
pub fn prob_fast(n: OddModulus, k: usize, interval: Interval, limits: &Limits) -> Result<SweepRecord> {
    let fast = fast_count(n, k, interval, limits)?;
    let reference = reference_mass(k, interval, limits.tolerance)?;
    let mut rec = base_record(n, k, interval, reference, limits.tolerance);
    rec.fast_count = Some(fast);
    rec.probability = fast / rec.count_total as f64;
    rec.abs_error = (rec.probability - reference).abs();
    rec.method = "fast".into();
    rec.deviation_budget = Some(fast_deviation_budget(n, k));
    Ok(rec)
}

/// Both paths in one record.
pub fn prob_both(n: OddModulus, k: usize, interval: Interval, limits: &Limits) -> Result<SweepRecord> {
    let mut rec = prob_exact(n, k, interval, limits)?;
    rec.fast_count = Some(fast_count(n, k, interval, limits)?);
    rec.deviation_budget = Some(fast_deviation_budget(n, k));
    rec.method = "both".into();
    Ok(rec)
}

/// `#S''(n, k, m)` restricted to slices with the given `n_1`: tuples with some
/// `a_i ≡ ±a_j (mod n_1)`.
fn doubleprime_for_n1(n: OddModulus, k: usize, n1: u64) -> u64 {
    let mut count = 0;
    for_each_increasing(n.half(), k, |a| {
        if has_signed_collision(a, n1) {
            count += 1;
        }
    });
    count
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDoublePrime {
    pub m: u64,
    pub d: u64,
    pub n1: u64,
    pub count: u64,
    /// `C_k n^k / n_1`.
    pub bound: f64,
    /// `4 C(k,2) (floor(n/n_1) + 1) C((n-1)/2, k-1)` for `m >= 1`.
    pub pair_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublePrimeReport {
    pub n: u64,
    pub k: usize,
    pub c_k: u128,
    pub slices: Vec<SliceDoublePrime>,
    pub total: u64,
    /// `C_k d(n) n^k`.
    pub global_bound: f64,
    /// Smallest constant that would make the per-slice bound hold.
    pub tight_slice_constant: f64,
    /// Smallest constant that would make the global bound hold.
    pub tight_global_constant: f64,
}

impl DoublePrimeReport {
    pub fn slice_bounds_hold(&self) -> bool {
        self.slices
            .iter()
            .all(|s| (s.count as f64) < s.bound && s.pair_bound.is_none_or(|b| s.count as f64 <= b))
    }

    pub fn global_bound_holds(&self) -> bool {
        (self.total as f64) < self.global_bound
    }
}

/// Exact `S''` counts per slice, with the polynomial bounds.
pub fn count_doubleprime(n: OddModulus, k: usize, limits: &Limits) -> Result<DoublePrimeReport> {
    n.check_k(k)?;
    let per_class = binomial_saturating(n.half(), k as u64).saturating_mul((k * k) as u128);
    limits.check(per_class.saturating_mul(divisor_count(n.get()) as u128))?;
    let nf = n.get() as f64;
    let ck = c_k(k);
    let full = binomial_saturating(n.half(), k as u64) as u64;
    let by_n1: Vec<(u64, u64)> = divisors(n.get())
        .into_par_iter()
        .filter(|&n1| n1 > 1)
        .map(|n1| (n1, doubleprime_for_n1(n, k, n1)))
        .collect();
    let pair_factor = 4.0 * binomial_saturating(k as u64, 2) as f64 * binomial_saturating(n.half(), k as u64 - 1) as f64;
    let mut slices = Vec::with_capacity(n.get() as usize);
    for m in 0..n.get() {
        let s = slice_params(n, m)?;
        let count = if m == 0 {
            full
        } else {
            by_n1.iter().find(|(n1, _)| *n1 == s.n1).map(|&(_, c)| c).unwrap_or(0)
        };
        slices.push(SliceDoublePrime {
            m,
            d: s.d,
            n1: s.n1,
            count,
            bound: ck as f64 * nf.powi(k as i32) / s.n1 as f64,
            pair_bound: (m > 0).then(|| pair_factor * ((n.get() / s.n1) as f64 + 1.0)),
        });
    }
    let total = slices.iter().map(|s| s.count).sum::<u64>();
    let tight_slice_constant = slices
        .iter()
        .map(|s| s.count as f64 * s.n1 as f64 / nf.powi(k as i32))
        .fold(0.0, f64::max);
    let dn = divisor_count(n.get()) as f64;
    Ok(DoublePrimeReport {
        n: n.get(),
        k,
        c_k: ck,
        slices,
        total,
        global_bound: ck as f64 * dn * nf.powi(k as i32),
        tight_slice_constant,
        tight_global_constant: total as f64 / (dn * nf.powi(k as i32)),
    })
}

/// The identities audited by [`audit_lemma`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaTag {
    /// `#S'(n,k,m)` vs `((d+1)/2)^k #S'(n_1,k,m_1)`.
    SliceReduction,
    /// `#Ω'_{n_1}` vs `k! #S'(n_1,k,m_1)`.
    FoldSurjection,
    /// `k! #S'(n,k,m)` vs `((d+1)/2)^k #Ω'_{n_1}`.
    SliceLattice,
}

impl LemmaTag {
    pub const ALL: [LemmaTag; 3] = [LemmaTag::SliceReduction, LemmaTag::FoldSurjection, LemmaTag::SliceLattice];

    pub fn label(self) -> &'static str {
        match self {
            LemmaTag::SliceReduction => "slice-reduction",
            LemmaTag::FoldSurjection => "fold-surjection",
            LemmaTag::SliceLattice => "slice-lattice",
        }
    }
}

impl std::fmt::Display for LemmaTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub tag: LemmaTag,
    pub n: u64,
    pub k: usize,
    pub m: u64,
    pub d: u64,
    pub n1: u64,
    pub m1: u64,
    pub interval: Option<Interval>,
    pub lhs: u64,
    pub rhs: u64,
    pub defect: u64,
    /// `defect / (s d n^(k-1))` where `s = k!` for the slice-lattice identity
    /// (whose sides carry a `k!`) and `1` otherwise.
    pub normalized: f64,
}

impl DefectReport {
    pub fn within(&self, c: f64) -> bool {
        self.normalized <= c
    }
}

/// `#S'_I(n, k, m)`: tuples with no `a_i ≡ ±a_j (mod n_1)` and, if given,
/// `tau(t, m) in I`.
fn count_primed(n: u64, k: usize, m: u64, interval: Option<&Interval>) -> u64 {
    let n1 = n / gcd(m, n);
    let h = (n - 1) / 2;
    let table = interval.map(|_| CosineTable::new(n));
    let mut count = 0;
    for_each_increasing(h, k, |a| {
        if has_signed_collision(a, n1) {
            return;
        }
        if let (Some(iv), Some(t)) = (interval, &table) {
            let s = a.iter().fold(KahanSum::default(), |acc, &x| acc.add(t.get(m * x % n)));
            if !iv.contains(s.value()) {
                return;
            }
        }
        count += 1;
    });
    count
}

/// Compares both sides of the tagged identity on one slice `m >= 1`.
pub fn audit_lemma(
    tag: LemmaTag,
    n: OddModulus,
    k: usize,
    m: u64,
    interval: Option<Interval>,
    limits: &Limits,
) -> Result<DefectReport> {
    n.check_k(k)?;
    if m == 0 {
        return Err(Error::ZeroSlice);
    }
    let s = slice_params(n, m)?;
    if let Some(iv) = &interval {
        check_interval(k, iv)?;
    }
    let tuples = binomial_saturating(n.half(), k as u64);
    let side = s.n1.div_ceil(2) as u128;
    limits.check(
        tuples
            .saturating_mul((k * k) as u128)
            .saturating_add(side.saturating_pow(k as u32)),
    )?;
    let iv = interval.as_ref();
    let scale = s.d.div_ceil(2);
    let scale_k = scale.pow(k as u32);
    let kf = factorial(k as u64) as u64;
    let lattice = || count_points(&CosineTable::new(s.n1), k, iv, true);
    let (lhs, rhs, norm_scale) = match tag {
        LemmaTag::SliceReduction => (
            count_primed(n.get(), k, m, iv),
            scale_k * count_primed(s.n1, k, s.m1, iv),
            1,
        ),
        LemmaTag::FoldSurjection => (lattice(), kf * count_primed(s.n1, k, s.m1, iv), 1),
        LemmaTag::SliceLattice => (kf * count_primed(n.get(), k, m, iv), scale_k * lattice(), kf),
    };
    let defect = lhs.abs_diff(rhs);
    let denom = norm_scale as f64 * s.d as f64 * (n.get() as f64).powi(k as i32 - 1);
    Ok(DefectReport {
        tag,
        n: n.get(),
        k,
        m,
        d: s.d,
        n1: s.n1,
        m1: s.m1,
        interval,
        lhs,
        rhs,
        defect,
        normalized: defect as f64 / denom,
    })
}

/// Audits every slice `m >= 1` of every odd `n` in `ns`.
pub fn audit_grid(
    tag: LemmaTag,
    ns: &[u64],
    k: usize,
    interval: Option<Interval>,
    limits: &Limits,
) -> Result<Vec<DefectReport>> {
    let mut jobs = Vec::new();
    for &n in ns {
        let n = OddModulus::new(n)?;
        if (k as u64) > n.half() {
            continue;
        }
        jobs.extend((1..n.get()).map(move |m| (n, m)));
    }
    jobs.into_par_iter()
        .map(|(n, m)| audit_lemma(tag, n, k, m, interval, limits))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Slope {
    /// Least-squares slope of `log(abs_error)` against `log(n)`.
    Fitted { slope: f64, intercept: f64, points: usize },
    /// Every error was below the noise floor.
    AllZero,
    /// Fewer than two usable points.
    Undetermined,
}

impl Slope {
    pub fn value(&self) -> Option<f64> {
        match self {
            Slope::Fitted { slope, .. } => Some(*slope),
            _ => None,
        }
    }
}

/// Errors below this are excluded from the slope fit.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub records: Vec<SweepRecord>,
    pub slope: Slope,
}

pub fn fit_slope(points: &[(u64, f64)]) -> Slope {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e >= NOISE_FLOOR)
        .map(|&(n, e)| ((n as f64).ln(), e.ln()))
        .collect();
    if usable.is_empty() {
        return Slope::AllZero;
    }
    if usable.len() < 2 {
        return Slope::Undetermined;
    }
    let len = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / len;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Slope::Undetermined;
    }
    let slope = sxy / sxx;
    Slope::Fitted {
        slope,
        intercept: my - slope * mx,
        points: usable.len(),
    }
}

/// `|prob_exact(n, k, I) - ∫_I δ^(k)|` over a grid of `n`, with the fitted rate.
pub fn convergence_experiment(k: usize, interval: Interval, grid: &[u64], limits: &Limits) -> Result<ConvergenceTable> {
    let grid = grid.iter().map(|&n| OddModulus::new(n)).collect::<Result<Vec<_>>>()?;
    for &n in &grid {
        n.check_k(k)?;
        limits.check(exact_work(n, k))?;
    }
    check_interval(k, &interval)?;
    let reference = reference_mass(k, interval, limits.tolerance)?;
    let mut records = Vec::with_capacity(grid.len());
    for n in grid {
        let count = exact_count(n, k, interval, limits)?;
        let mut rec = base_record(n, k, interval, reference, limits.tolerance);
        rec.count_in = Some(count);
        rec.probability = count as f64 / rec.count_total as f64;
        rec.abs_error = (rec.probability - reference).abs();
        rec.method = "exact".into();
        records.push(rec);
    }
    let points: Vec<(u64, f64)> = records.iter().map(|r| (r.n, r.abs_error)).collect();
    Ok(ConvergenceTable {
        records,
        slope: fit_slope(&points),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub predicted_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub n: u64,
    pub k: usize,
    pub r: u64,
    pub total: u64,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.count as f64 / self.total as f64).collect()
    }
}

fn bin_index(x: f64, lo: f64, width: f64, bins: usize) -> usize {
    (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1)
}

/// Eigenvalue histogram of all pairs over `[-r, r]`, with the limiting
/// per-bin masses.
pub fn eigen_histogram(
    n: OddModulus,
    k: usize,
    includes_zero: bool,
    bins: usize,
    limits: &Limits,
) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    n.check_k(k)?;
    limits.check(exact_work(n, k))?;
    let r = 2 * k as u64 + u64::from(includes_zero);
    let rf = r as f64;
    let width = 2.0 * rf / bins as f64;
    let shift = if includes_zero { 1.0 } else { 0.0 };
    let table = CosineTable::new(n.get());
    let counts = (0..n.get())
        .into_par_iter()
        .map(|m| {
            let values = slice_values(&table, m);
            let mut local = vec![0u64; bins];
            for_each_increasing(n.half(), k, |a| {
                let s = a.iter().fold(KahanSum::default(), |acc, &x| acc.add(values[x as usize - 1]));
                local[bin_index(shift + 2.0 * s.value(), -rf, width, bins)] += 1;
            });
            local
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { rf } else { -rf + width * i as f64 })
        .collect();
    let kf = k as f64;
    let cdf = edges
        .iter()
        .map(|&e| {
            let x = ((e - shift) / 2.0).clamp(-kf, kf);
            conv_cdf(k, x, limits.tolerance, MAX_PANELS).map(|v| v.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total = counts.iter().sum();
    Ok(Histogram {
        n: n.get(),
        k,
        r,
        total,
        bins: (0..bins)
            .map(|i| HistogramBin {
                lo: edges[i],
                hi: edges[i + 1],
                count: counts[i],
                predicted_mass: cdf[i + 1] - cdf[i],
            })
            .collect(),
    })
}

/// The cosine interval for an eigenvalue window at degree `2k` or `2k+1`.
pub fn window(j: Interval, k: usize, includes_zero: bool) -> Result<IntervalPair> {
    interval_map(j, 2 * k as u64 + u64::from(includes_zero))
}
