mod cache;
mod table;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cayley_core::density::{conv_mass, DensityQuery, Method, DEFAULT_TOLERANCE, MAX_PANELS};
use cayley_core::ihara::{ihara_polynomial, pole_pair, ramanujan_fraction, zeta_inverse};
use cayley_core::spectra::{spectrum, spectrum_via_matrix};
use cayley_core::stats::{
    convergence_experiment, eigen_histogram, fit_slope, prob_both, prob_exact, prob_fast, window, Limits, Slope,
    SweepRecord, DEFAULT_BUDGET,
};
use cayley_core::{make_tuple, CayleySpec, Error, Interval, OddModulus};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cache::{Cache, CacheKey};
use table::{write_out, Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "cayley", version, about = "Eigenvalue statistics of circulant Cayley graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Worker threads (0 = hardware parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Maximum tuple-slot evaluations per enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, env = "CAYLEY_CACHE_DIR", default_value = ".cayley-cache")]
    cache_dir: PathBuf,
    /// Write results to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Report wall time (stderr, or `meta` in JSON).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Debug, Clone, Copy)]
struct Parity {
    /// Generating set without 0 (r = 2k).
    #[arg(long, conflicts_with = "odd")]
    even: bool,
    /// Generating set including 0 (r = 2k + 1).
    #[arg(long)]
    odd: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityMethod {
    Quad,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumMethod {
    Character,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Path {
    Exact,
    Fast,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Adjacency spectrum of one Cayley graph.
    Spectrum {
        #[arg(long)]
        n: u64,
        #[arg(long = "gen", value_delimiter = ',', required = true)]
        generators: Vec<u64>,
        #[command(flatten)]
        parity: Parity,
        #[arg(long, value_enum, default_value_t = SpectrumMethod::Character)]
        method: SpectrumMethod,
    },
    /// Mass of the limiting density on [c, d].
    Density {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long, value_enum, default_value_t = DensityMethod::Quad)]
        method: DensityMethod,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = MAX_PANELS)]
        max_panels: usize,
    },
    /// Probability that an eigenvalue lies in [a, b].
    Prob {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        parity: Parity,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, value_enum, default_value_t = Path::Exact)]
        path: Path,
    },
    /// Exact probabilities over a range of n, with the fitted error rate.
    Sweep {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        parity: Parity,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["n_min", "n_max"])]
        n_list: Vec<u64>,
        #[arg(long)]
        n_min: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long, default_value_t = 2)]
        step: u64,
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        cache: Toggle,
    },
    /// Run invariant suites.
    Verify {
        #[arg(value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
    },
    /// Eigenvalue histogram with limiting per-bin masses.
    Histogram {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        parity: Parity,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Ihara zeta data.
    Ihara {
        #[command(subcommand)]
        what: IharaCommand,
    },
}

#[derive(Subcommand, Debug)]
enum IharaCommand {
    /// Coefficients of h(u).
    Poly(GraphArgs),
    /// Coefficients of the inverse zeta function.
    Zeta(GraphArgs),
    /// Reciprocal pole pairs, one per eigenvalue.
    Poles(GraphArgs),
    /// Fraction of nontrivial eigenvalues with |λ| <= 2√(r-1).
    Ramanujan {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        parity: Parity,
    },
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    n: u64,
    #[arg(long = "gen", value_delimiter = ',', required = true)]
    generators: Vec<u64>,
    #[command(flatten)]
    parity: Parity,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ToleranceNotMet { .. } => 3,
            Error::BudgetExceeded { .. } | Error::TooLarge { .. } => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 2,
            message: format!("i/o error: {e}"),
        }
    }
}

type Outcome = Result<Table, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    if g.budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()).into());
    }
    if !(g.tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()).into());
    }
    let limits = Limits::default().with_budget(g.budget).with_tolerance(g.tolerance);
    let start = Instant::now();
    let (table, default_format) = match &cli.command {
        Command::Spectrum {
            n,
            generators,
            parity,
            method,
        } => (cmd_spectrum(*n, generators, *parity, *method)?, Format::Csv),
        Command::Density {
            k,
            c,
            d,
            method,
            samples,
            max_panels,
        } => (cmd_density(*k, *c, *d, *method, *samples, *max_panels, g)?, Format::Csv),
        Command::Prob {
            n,
            k,
            parity,
            a,
            b,
            path,
        } => (cmd_prob(*n, *k, *parity, *a, *b, *path, &limits)?, Format::Csv),
        Command::Sweep {
            k,
            parity,
            a,
            b,
            n_list,
            n_min,
            n_max,
            step,
            cache,
        } => {
            let grid = sweep_grid(n_list, *n_min, *n_max, *step)?;
            let cache = (*cache == Toggle::On).then(|| Cache::new(&g.cache_dir));
            (cmd_sweep(*k, *parity, *a, *b, &grid, cache.as_ref(), &limits)?, Format::Csv)
        }
        Command::Verify { suite } => {
            let report = verify::run(*suite);
            let text = report.render();
            write_out(&text, g.output.as_deref())?;
            return Ok(if report.failed() { 1 } else { 0 });
        }
        Command::Histogram { n, k, parity, bins } => (cmd_histogram(*n, *k, *parity, *bins, &limits)?, Format::Tsv),
        Command::Ihara { what } => (cmd_ihara(what, &limits)?, Format::Csv),
    };
    let format = g.format.unwrap_or(default_format);
    let elapsed = start.elapsed().as_secs_f64();
    let text = table.render(format, g.timing.then_some(elapsed));
    write_out(&text, g.output.as_deref())?;
    if g.timing {
        eprintln!("wall time: {elapsed:.3} s");
    }
    Ok(0)
}

fn spec_of(n: u64, generators: &[u64], parity: Parity) -> Result<CayleySpec, Failure> {
    Ok(CayleySpec::new(make_tuple(n, generators)?, parity.odd))
}

fn cmd_spectrum(n: u64, generators: &[u64], parity: Parity, method: SpectrumMethod) -> Outcome {
    let spec = spec_of(n, generators, parity)?;
    let mut t = Table::new("spectrum", &["m", "lambda"]);
    match method {
        SpectrumMethod::Character => {
            for (m, &l) in spectrum(&spec).values.iter().enumerate() {
                t.push(vec![m.into(), l.into()]);
            }
        }
        SpectrumMethod::Dense => {
            t.columns = vec!["index", "lambda"];
            for (i, &l) in spectrum_via_matrix(&spec)?.sorted().iter().enumerate() {
                t.push(vec![i.into(), l.into()]);
            }
        }
    }
    Ok(t)
}

fn cmd_density(k: usize, c: f64, d: f64, method: DensityMethod, samples: u64, max_panels: usize, g: &Global) -> Outcome {
    let interval = Interval::new(c, d)?;
    let q = match method {
        DensityMethod::Quad => DensityQuery::quadrature(k, interval)
            .with_tolerance(g.tolerance)
            .with_max_panels(max_panels),
        DensityMethod::Mc => DensityQuery::monte_carlo(k, interval, samples, g.seed),
    };
    let est = conv_mass(&q)?;
    let mut t = Table::new(
        "density",
        &["k", "c", "d", "value", "uncertainty", "method", "tolerance", "seed", "samples", "panels"],
    );
    let (name, tol, seed, samples, panels) = match est.method {
        Method::Quadrature => ("quadrature", Cell::Float(g.tolerance), Cell::Empty, Cell::Empty, Cell::from(est.panels)),
        Method::MonteCarlo { seed, samples } => ("mc", Cell::Empty, Cell::from(seed), Cell::from(samples), Cell::Empty),
    };
    t.push(vec![
        k.into(),
        c.into(),
        d.into(),
        est.value.into(),
        est.uncertainty.into(),
        name.into(),
        tol,
        seed,
        samples,
        panels,
    ]);
    Ok(t)
}

const RECORD_COLUMNS: [&str; 15] = [
    "n",
    "k",
    "r",
    "a",
    "b",
    "c",
    "d",
    "count_in",
    "count_total",
    "probability",
    "reference_mass",
    "abs_error",
    "method",
    "tolerance",
    "seed",
];

fn record_cells(r: &SweepRecord) -> Vec<Cell> {
    let count_in = match (r.count_in, r.fast_count) {
        (Some(c), _) => Cell::from(c),
        (None, Some(f)) => Cell::from(f),
        (None, None) => Cell::Empty,
    };
    vec![
        r.n.into(),
        r.k.into(),
        r.r.into(),
        r.j.lo().into(),
        r.j.hi().into(),
        r.interval.lo().into(),
        r.interval.hi().into(),
        count_in,
        r.count_total.into(),
        r.probability.into(),
        r.reference_mass.into(),
        r.abs_error.into(),
        r.method.as_str().into(),
        r.tolerance.into(),
        r.seed.into(),
    ]
}

/// Cosine interval for a window, clamped to `[-k, k]`.
fn cosine_interval(k: usize, parity: Parity, a: f64, b: f64) -> Result<(Interval, cayley_core::spectra::IntervalPair), Failure> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()).into());
    }
    let pair = window(Interval::new(a, b)?, k, parity.odd)?;
    Ok((pair.clamped(), pair))
}

fn cmd_prob(n: u64, k: usize, parity: Parity, a: f64, b: f64, path: Path, limits: &Limits) -> Outcome {
    let n = OddModulus::new(n)?;
    let (i, pair) = cosine_interval(k, parity, a, b)?;
    let rec = match path {
        Path::Exact => prob_exact(n, k, i, limits)?,
        Path::Fast => prob_fast(n, k, i, limits)?,
        Path::Both => prob_both(n, k, i, limits)?,
    }
    .with_window(&pair);
    let mut columns = RECORD_COLUMNS.to_vec();
    let mut cells = record_cells(&rec);
    if path != Path::Exact {
        columns.extend(["fast_count", "deviation", "deviation_budget"]);
        let deviation = rec.count_in.zip(rec.fast_count).map(|(e, f)| (f - e as f64).abs());
        cells.extend([rec.fast_count.into(), deviation.into(), rec.deviation_budget.into()]);
    }
    let mut t = Table::new("prob", &[]);
    t.columns = columns;
    t.push(cells);
    Ok(t)
}

fn sweep_grid(list: &[u64], n_min: Option<u64>, n_max: Option<u64>, step: u64) -> Result<Vec<u64>, Failure> {
    let grid: Vec<u64> = if !list.is_empty() {
        list.to_vec()
    } else {
        match (n_min, n_max) {
            (Some(lo), Some(hi)) if step > 0 => (lo..=hi).step_by(step as usize).collect(),
            _ => {
                return Err(Error::InvalidArgument("sweep needs --n-list or --n-min/--n-max with a positive --step".into()).into())
            }
        }
    };
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty n grid".into()).into());
    }
    for &n in &grid {
        OddModulus::new(n)?;
    }
    Ok(grid)
}

fn cmd_sweep(
    k: usize,
    parity: Parity,
    a: f64,
    b: f64,
    grid: &[u64],
    cache: Option<&Cache>,
    limits: &Limits,
) -> Outcome {
    let (i, pair) = cosine_interval(k, parity, a, b)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut missing = Vec::new();
    let keys: Vec<CacheKey> = grid
        .iter()
        .map(|&n| CacheKey::new("sweep", n, k, parity.odd, (a, b), "exact", limits.tolerance, None))
        .collect();
    for (idx, &n) in grid.iter().enumerate() {
        match cache.and_then(|c| c.get::<SweepRecord>(&keys[idx])) {
            Some(rec) => rows.push(Some(rec)),
            None => {
                rows.push(None);
                missing.push(n);
            }
        }
    }
    if !missing.is_empty() {
        for &n in &missing {
            let m = OddModulus::new(n)?;
            check_grid_point(m, k, limits).map_err(|f| Failure {
                code: f.code,
                message: format!("n = {n}: {}", f.message),
            })?;
        }
        let fresh = convergence_experiment(k, i, &missing, limits)?;
        let mut fresh = fresh.records.into_iter();
        for (idx, slot) in rows.iter_mut().enumerate() {
            if slot.is_none() {
                let rec = fresh.next().expect("one record per missing n").with_window(&pair);
                if let Some(c) = cache {
                    c.put(&keys[idx], &rec)?;
                }
                *slot = Some(rec);
            }
        }
    }
    let records: Vec<SweepRecord> = rows.into_iter().map(|r| r.expect("filled above")).collect();
    let mut t = Table::new("sweep", &RECORD_COLUMNS);
    for r in &records {
        t.push(record_cells(r));
    }
    let points: Vec<(u64, f64)> = records.iter().map(|r| (r.n, r.abs_error)).collect();
    let slope = match fit_slope(&points) {
        Slope::Fitted { slope, .. } => Cell::Float(slope),
        Slope::AllZero => Cell::Str("AllZero".into()),
        Slope::Undetermined => Cell::Str("Undetermined".into()),
    };
    t.summary.push(("slope", slope));
    Ok(t)
}

/// Validates one grid point up front so errors name the offending `n`.
fn check_grid_point(n: OddModulus, k: usize, limits: &Limits) -> Result<(), Failure> {
    let work = cayley_core::stats::total_pairs(n, k).saturating_mul(k as u128);
    if k as u64 > n.half() {
        return Err(Error::KTooLarge { k, max: n.half() }.into());
    }
    if work > limits.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: work,
            budget: limits.budget,
        }
        .into());
    }
    Ok(())
}

fn cmd_histogram(n: u64, k: usize, parity: Parity, bins: usize, limits: &Limits) -> Outcome {
    let h = eigen_histogram(OddModulus::new(n)?, k, parity.odd, bins, limits)?;
    let mut t = Table::new("histogram", &["bin_lo", "bin_hi", "empirical_frequency", "predicted_mass"]);
    for (b, f) in h.bins.iter().zip(h.frequencies()) {
        t.push(vec![b.lo.into(), b.hi.into(), f.into(), b.predicted_mass.into()]);
    }
    Ok(t)
}

fn cmd_ihara(what: &IharaCommand, limits: &Limits) -> Outcome {
    match what {
        IharaCommand::Poly(g) => {
            let h = ihara_polynomial(&spec_of(g.n, &g.generators, g.parity)?, limits)?;
            let mut t = Table::new("ihara-poly", &["power", "coefficient"]);
            for (p, &c) in h.coefficients.iter().enumerate() {
                t.push(vec![p.into(), c.into()]);
            }
            t.summary.push(("rank", h.rank.into()));
            Ok(t)
        }
        IharaCommand::Zeta(g) => {
            let z = zeta_inverse(&spec_of(g.n, &g.generators, g.parity)?, limits)?;
            let mut t = Table::new("ihara-zeta", &["power", "coefficient"]);
            for (p, &c) in z.iter().enumerate() {
                t.push(vec![p.into(), c.into()]);
            }
            Ok(t)
        }
        IharaCommand::Poles(g) => {
            let spec = spec_of(g.n, &g.generators, g.parity)?;
            let r = spec.degree();
            let mut t = Table::new(
                "ihara-poles",
                &["m", "alpha", "plus_re", "plus_im", "minus_re", "minus_im", "modulus_plus", "modulus_minus"],
            );
            for (m, &alpha) in spectrum(&spec).values.iter().enumerate() {
                let p = pole_pair(alpha, r)?;
                t.push(vec![
                    m.into(),
                    alpha.into(),
                    p.plus.re.into(),
                    p.plus.im.into(),
                    p.minus.re.into(),
                    p.minus.im.into(),
                    p.plus.norm().into(),
                    p.minus.norm().into(),
                ]);
            }
            Ok(t)
        }
        IharaCommand::Ramanujan { n, k, parity } => {
            let r = ramanujan_fraction(OddModulus::new(*n)?, *k, parity.odd, limits)?;
            let mut t = Table::new("ihara-ramanujan", &["n", "k", "r", "count", "total", "fraction", "predicted"]);
            t.push(vec![
                r.n.into(),
                r.k.into(),
                r.r.into(),
                r.count.into(),
                r.total.into(),
                r.fraction.into(),
                r.predicted.into(),
            ]);
            Ok(t)
        }
    }
}
