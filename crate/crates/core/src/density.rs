//! The normalized arcsine density and masses of its k-fold convolution.
//!
//! A sum `u_1 + ... + u_k` of independent arcsine variables has the law of
//! `cos θ_1 + ... + cos θ_k` with `θ_i` uniform on `[0, π]`. All integrals are
//! therefore taken in `θ`, where the integrand is bounded: the CDF
//! `F_k(x) = P(Σ cos θ_i <= x)` satisfies
//!
//! ```text
//! F_1(x) = 1/2 + asin(x)/π,    F_k(x) = (1/π) ∫_0^π F_{k-1}(x - cos θ) dθ
//! ```
//!
//! and interval masses are differences of `F_k`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const MAX_PANELS: usize = 1 << 22;

/// Samples per Monte Carlo batch. Each batch owns one generator stream, so the
/// result does not depend on how batches are spread over threads.
const MC_BATCH: u64 = 1 << 16;

/// 10-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 10] = [
    -0.9739065285171717,
    -0.8650633666889845,
    -0.6794095682990244,
    -0.4333953941292472,
    -0.14887433898163122,
    0.14887433898163122,
    0.4333953941292472,
    0.6794095682990244,
    0.8650633666889845,
    0.9739065285171717,
];
const GL_WEIGHTS: [f64; 10] = [
    0.06667134430868807,
    0.14945134915058036,
    0.219086362515982,
    0.2692667193099965,
    0.295524224714753,
    0.295524224714753,
    0.2692667193099965,
    0.219086362515982,
    0.14945134915058036,
    0.06667134430868807,
];

/// `1 / (π sqrt(1 - u^2))` on `(-1, 1)`, zero elsewhere. The endpoints `±1`,
/// where the density is unbounded, return 0.
pub fn arcsine_pdf(u: f64) -> f64 {
    if u.abs() < 1.0 {
        1.0 / (PI * (1.0 - u * u).sqrt())
    } else {
        0.0
    }
}

pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        0.5 + x.asin() / PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    MonteCarlo { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityQuery {
    pub k: usize,
    pub interval: Interval,
    pub method: Method,
    pub tolerance: f64,
    pub max_panels: usize,
}

impl DensityQuery {
    pub fn quadrature(k: usize, interval: Interval) -> Self {
        DensityQuery {
            k,
            interval,
            method: Method::Quadrature,
            tolerance: DEFAULT_TOLERANCE,
            max_panels: MAX_PANELS,
        }
    }

    pub fn monte_carlo(k: usize, interval: Interval, samples: u64, seed: u64) -> Self {
        DensityQuery {
            k,
            interval,
            method: Method::MonteCarlo { seed, samples },
            tolerance: DEFAULT_TOLERANCE,
            max_panels: MAX_PANELS,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        let k = self.k as f64;
        if !self.interval.is_within(&Interval::symmetric(k)) {
            return Err(Error::BadInterval(format!(
                "{} not contained in [-{k}, {k}]",
                self.interval
            )));
        }
        Ok(())
    }
}

/// A mass in `[0, 1]` with its uncertainty: the last refinement difference
/// for quadrature, the binomial standard error for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub value: f64,
    pub uncertainty: f64,
    pub method: Method,
    /// Panels per smooth segment at convergence (quadrature only).
    pub panels: usize,
}

/// Points where the CDF of a `j`-term sum fails to be smooth: `j, j-2, ..., -j`.
fn breakpoints(j: usize) -> impl Iterator<Item = f64> {
    (0..=j).map(move |i| j as f64 - 2.0 * i as f64)
}

/// Splits `[0, π]` at every `θ` where `x - cos θ` hits a breakpoint of
/// `F_{k-1}`.
fn theta_segments(k: usize, x: f64) -> Vec<f64> {
    let mut cuts = vec![0.0, PI];
    for s in breakpoints(k - 1) {
        let y = x - s;
        if y > -1.0 && y < 1.0 {
            cuts.push(y.acos());
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// `∫_a^b f(θ) dθ` with `panels` uniform Gauss–Legendre panels after the
/// smoothstep substitution `θ = a + (b - a)(3s² - 2s³)`, whose vanishing
/// derivative at both ends absorbs square-root and `x log x` endpoint
/// behaviour of the integrand.
fn graded_segment<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: &F) -> f64 {
    let h = 1.0 / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let left = p as f64 * h;
        let mut panel = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let s = left + 0.5 * h * (x + 1.0);
            let psi = s * s * (3.0 - 2.0 * s);
            let dpsi = 6.0 * s * (1.0 - s);
            panel += w * dpsi * f(a + (b - a) * psi);
        }
        acc += 0.5 * h * panel;
    }
    acc * (b - a)
}

/// `F_k(x)` with `panels` panels per smooth segment at every nesting level.
fn conv_cdf_at(k: usize, x: f64, panels: usize) -> f64 {
    if x <= -(k as f64) {
        return 0.0;
    }
    if x >= k as f64 {
        return 1.0;
    }
    if k == 1 {
        return arcsine_cdf(x);
    }
    let cuts = theta_segments(k, x);
    let inner = |theta: f64| conv_cdf_at(k - 1, x - theta.cos(), panels);
    let parts: Vec<f64> = if k >= 3 {
        cuts.par_windows(2)
            .map(|w| graded_segment(w[0], w[1], panels, &inner))
            .collect()
    } else {
        cuts.windows(2)
            .map(|w| graded_segment(w[0], w[1], panels, &inner))
            .collect()
    };
    // Collected in segment order, so the reduction order is fixed regardless
    // of how rayon scheduled the work.
    pairwise_sum(&parts) / PI
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// CDF of the k-fold convolution at a point, refined until two successive
/// panel doublings agree within `tolerance`. Returns `(value, last_diff, panels)`.
pub fn conv_cdf(k: usize, x: f64, tolerance: f64, max_panels: usize) -> Result<(f64, f64, usize)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k == 1 || x <= -(k as f64) || x >= k as f64 {
        return Ok((conv_cdf_at(k, x, 1), 0.0, 1));
    }
    refine(tolerance, max_panels, |p| conv_cdf_at(k, x, p))
}

fn refine<F: Fn(usize) -> f64>(tolerance: f64, max_panels: usize, eval: F) -> Result<(f64, f64, usize)> {
    let mut panels = 1;
    let mut prev = eval(panels);
    let mut diff = f64::INFINITY;
    while panels < max_panels {
        panels *= 2;
        let cur = eval(panels);
        diff = (cur - prev).abs();
        prev = cur;
        if diff < tolerance {
            return Ok((cur, diff, panels));
        }
    }
    Err(Error::ToleranceNotMet {
        tolerance,
        panels,
        last_diff: diff,
    })
}

/// `∫_c^d δ^(k)(u) du`, by quadrature or Monte Carlo depending on the query.
pub fn conv_mass(q: &DensityQuery) -> Result<MassEstimate> {
    q.validate()?;
    match q.method {
        Method::Quadrature => quadrature_mass(q),
        Method::MonteCarlo { seed, samples } => {
            Ok(mc_masses(q.k, &[q.interval], samples, seed)?[0])
        }
    }
}

fn quadrature_mass(q: &DensityQuery) -> Result<MassEstimate> {
    let (c, d) = (q.interval.lo(), q.interval.hi());
    if q.k == 1 {
        return Ok(MassEstimate {
            value: (arcsine_cdf(d) - arcsine_cdf(c)).clamp(0.0, 1.0),
            uncertainty: 0.0,
            method: Method::Quadrature,
            panels: 0,
        });
    }
    if c == d {
        return Ok(MassEstimate {
            value: 0.0,
            uncertainty: 0.0,
            method: Method::Quadrature,
            panels: 0,
        });
    }
    let k = q.k;
    let (value, diff, panels) = refine(q.tolerance, q.max_panels, |p| {
        conv_cdf_at(k, d, p) - conv_cdf_at(k, c, p)
    })?;
    Ok(MassEstimate {
        value: value.clamp(0.0, 1.0),
        uncertainty: diff,
        method: Method::Quadrature,
        panels,
    })
}

/// Monte Carlo masses for several intervals from one shared sample stream.
///
/// Batch `b` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, so the
/// output is a function of `(k, intervals, samples, seed)` only.
pub fn mc_masses(k: usize, intervals: &[Interval], samples: u64, seed: u64) -> Result<Vec<MassEstimate>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let batches = samples.div_ceil(MC_BATCH);
    let hits: Vec<Vec<u64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = MC_BATCH.min(samples - b * MC_BATCH);
            let mut local = vec![0u64; intervals.len()];
            for _ in 0..len {
                let sum: f64 = (0..k).map(|_| (rng.random::<f64>() * PI).cos()).sum();
                for (h, iv) in local.iter_mut().zip(intervals) {
                    *h += u64::from(iv.contains(sum));
                }
            }
            local
        })
        .collect();
    let method = Method::MonteCarlo { seed, samples };
    Ok((0..intervals.len())
        .map(|i| {
            let h: u64 = hits.iter().map(|v| v[i]).sum();
            let p = h as f64 / samples as f64;
            MassEstimate {
                value: p,
                uncertainty: (p * (1.0 - p) / samples as f64).sqrt(),
                method,
                panels: 0,
            }
        })
        .collect())
}

/// `Vol(B_k(I)) = 2^{-k} ∫_I δ^(k)`.
pub fn box_volume(k: usize, interval: Interval) -> Result<MassEstimate> {
    box_volume_with(&DensityQuery::quadrature(k, interval))
}

pub fn box_volume_with(q: &DensityQuery) -> Result<MassEstimate> {
    let m = conv_mass(q)?;
    let scale = 0.5f64.powi(q.k as i32);
    Ok(MassEstimate {
        value: m.value * scale,
        uncertainty: m.uncertainty * scale,
        ..m
    })
}
