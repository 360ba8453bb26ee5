use std::fmt::Write as _;

use cayley_core::arith::{binomial, broughan_check, pillai};
use cayley_core::density::{arcsine_cdf, conv_mass, DensityQuery};
use cayley_core::group::{classify_tuple, count_tuples, enumerate_tuples, kappa, lattice_point, slice_params};
use cayley_core::ihara::{ihara_polynomial, ihara_product, pole_pair, zeta_inverse};
use cayley_core::lattice::{count_lattice, shift_check, volume_count_gap, whole_box_count, RegionSpec};
use cayley_core::spectra::{spectrum, spectrum_via_matrix};
use cayley_core::stats::{
    audit_grid, audit_lemma, count_doubleprime, exact_count, fast_count, fast_deviation_budget, prob_exact, LemmaTag,
    Limits,
};
use cayley_core::{make_tuple, CayleySpec, Interval, OddModulus, SliceClass};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Core,
    Spectra,
    Density,
    Lattice,
    Stats,
    Ihara,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A stated bound that does not hold; reported, not counted as failure.
    KnownDefect,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    /// Extra lines printed after the checks (defect tables).
    pub tables: Vec<String>,
}

impl Report {
    fn check(&mut self, suite: &'static str, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite,
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        });
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::KnownDefect => "KNOWN-DEFECT",
            };
            let _ = writeln!(out, "{tag}\t{}\t{}\t{}", c.suite, c.name, c.detail);
        }
        for t in &self.tables {
            out.push_str(t);
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

pub fn run(suite: Suite) -> Report {
    let mut r = Report::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Core {
        core(&mut r);
    }
    if all || suite == Suite::Spectra {
        spectra(&mut r);
    }
    if all || suite == Suite::Density {
        density(&mut r);
    }
    if all || suite == Suite::Lattice {
        lattice(&mut r);
    }
    if all || suite == Suite::Stats {
        stats(&mut r);
    }
    if all || suite == Suite::Ihara {
        ihara(&mut r);
    }
    r
}

fn odd(n: u64) -> OddModulus {
    OddModulus::new(n).expect("suite moduli are odd")
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).expect("suite intervals are ordered")
}

fn odd_range(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    (lo..=hi).filter(|n| n % 2 == 1)
}

fn core(r: &mut Report) {
    let mut ok = true;
    for n in odd_range(3, 61) {
        for k in 1..=3usize.min(((n - 1) / 2) as usize) {
            let listed = enumerate_tuples(odd(n), k).map(|it| it.count() as u64).unwrap_or(0);
            ok &= count_tuples(odd(n), k).ok() == Some(binomial((n - 1) / 2, k as u64))
                && binomial((n - 1) / 2, k as u64) == listed.into();
        }
    }
    r.check("core", "enumeration count = C((n-1)/2, k)", ok, "odd n <= 61, k <= 3");

    let ok = [-2.3, -0.5, 0.0, 0.2, 0.5, 0.7, 1.0, 3.9].iter().all(|&x| {
        let y = kappa(x);
        (0.0..=0.5).contains(&y) && ((2.0 * std::f64::consts::PI * x).cos() - (2.0 * std::f64::consts::PI * y).cos()).abs() < 1e-12
    });
    r.check("core", "kappa folds into [0, 1/2] preserving cos", ok, "8 sample points");

    let mut ok = true;
    for n in odd_range(5, 45) {
        let n = odd(n);
        for m in 1..n.get() {
            let s = slice_params(n, m).expect("m in range");
            for t in enumerate_tuples(n, 2).expect("k <= half") {
                let class = classify_tuple(&t, &s).expect("same modulus");
                if class == SliceClass::Primed {
                    let p = lattice_point(&t, &[0, 1], &s).expect("primed tuples fold");
                    ok &= p.has_distinct_coords();
                }
            }
        }
    }
    r.check("core", "primed tuples fold to distinct coordinates", ok, "odd n <= 45, k = 2");
}

fn spectra(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut trace_ok = true;
    let mut grid = 0;
    for n in [7u64, 15, 21, 33] {
        for gens in [vec![1u64], vec![1, 2], vec![2, 3, 5]] {
            if gens.iter().any(|&g| g > (n - 1) / 2) {
                continue;
            }
            for zero in [false, true] {
                let spec = CayleySpec::new(make_tuple(n, &gens).expect("valid tuple"), zero);
                let fast = spectrum(&spec);
                let dense = spectrum_via_matrix(&spec).expect("small n");
                let rr = spec.degree() as f64;
                for (a, b) in fast.sorted().iter().zip(dense.sorted()) {
                    worst = worst.max((a - b).abs() / rr);
                }
                let nf = n as f64;
                trace_ok &= (fast.trace() - if zero { nf } else { 0.0 }).abs() < nf * 1e-10;
                trace_ok &= (fast.trace_of_square() - nf * rr).abs() < nf * 1e-10;
                grid += 1;
            }
        }
    }
    r.check(
        "spectra",
        "character sums match dense eigensolver",
        worst < 1e-8,
        format!("{grid} specs, max |diff|/r = {worst:.3e}"),
    );
    r.check("spectra", "trace and trace of square", trace_ok, format!("{grid} specs"));
}

fn density(r: &mut Report) {
    let tol = 1e-10;
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let m = conv_mass(&DensityQuery::quadrature(k, Interval::symmetric(k as f64)).with_tolerance(tol));
        worst = worst.max(m.map_or(f64::INFINITY, |m| (m.value - 1.0).abs()));
    }
    r.check("density", "normalization", worst < 1e-9, format!("k <= 4, max |mass - 1| = {worst:.3e}"));

    let mut worst = 0.0f64;
    for (c, d) in [(-1.0, 1.0), (0.0, 1.0), (-0.3, 0.8), (-0.99, -0.5)] {
        let m = conv_mass(&DensityQuery::quadrature(1, iv(c, d))).map_or(f64::INFINITY, |m| m.value);
        worst = worst.max((m - (arcsine_cdf(d) - arcsine_cdf(c))).abs());
    }
    r.check("density", "k = 1 arcsine closed form", worst < 1e-9, format!("max diff {worst:.3e}"));

    let tol = 1e-8;
    let mass = |k: usize, c: f64, d: f64| {
        conv_mass(&DensityQuery::quadrature(k, iv(c, d)).with_tolerance(tol)).map_or(f64::NAN, |m| m.value)
    };
    let sym = (mass(2, 0.3, 1.4) - mass(2, -1.4, -0.3)).abs();
    r.check("density", "symmetry", sym <= 2.0 * tol, format!("k = 2, [0.3, 1.4], diff {sym:.3e}"));
    let add = (mass(3, -1.0, 0.5) + mass(3, 0.5, 2.0) - mass(3, -1.0, 2.0)).abs();
    r.check("density", "additivity", add <= 2.0 * tol, format!("k = 3, split at 0.5, diff {add:.3e}"));
}

fn lattice(r: &mut Report) {
    let c = count_lattice(odd(5), &RegionSpec::with_interval(1, iv(0.0, 1.0)));
    r.check("lattice", "#Ω_5([0,1]) = 2", c.as_ref().is_ok_and(|c| *c == 2u32.into()), format!("{c:?}"));

    let mut ok = true;
    for n in odd_range(3, 41) {
        for k in 1..=3usize {
            let full = count_lattice(odd(n), &RegionSpec::with_interval(k, Interval::symmetric(k as f64)));
            ok &= full.ok() == Some(whole_box_count(odd(n), k, false));
        }
    }
    r.check("lattice", "full interval = closed form", ok, "odd n <= 41, k <= 3");

    let mut ok = true;
    for (n, k, i) in [(15, 1, iv(0.0, 1.0)), (9, 2, iv(-1.0, 1.0)), (31, 2, iv(0.2, 1.1)), (21, 3, iv(-1.0, 0.5))] {
        ok &= shift_check(odd(n), k, i).is_ok_and(|s| s.passed());
    }
    r.check("lattice", "shift lemma", ok, "4 cases");

    for (k, i) in [(1usize, iv(0.0, 1.0)), (2, iv(-1.0, 1.0))] {
        let scaled: Vec<f64> = [101u64, 201, 501, 1001]
            .iter()
            .map(|&n| volume_count_gap(odd(n), k, i).map_or(f64::INFINITY, |g| g * n as f64))
            .collect();
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        r.check(
            "lattice",
            format!("n * volume gap bounded (k = {k}, I = {i})"),
            max < 10.0,
            format!("n in 101..1001, max {max:.4}"),
        );
    }
}

fn stats(r: &mut Report) {
    let lim = Limits::default();
    let p5 = prob_exact(odd(5), 1, iv(0.0, 1.0), &lim).map(|p| p.probability);
    let p9 = prob_exact(odd(9), 1, iv(0.0, 1.0), &lim).map(|p| p.probability);
    r.check(
        "stats",
        "Prob anchors",
        p5 == Ok(0.6) && p9 == Ok(0.5),
        format!("n=5: {p5:?}, n=9: {p9:?}"),
    );

    let s9 = count_doubleprime(odd(9), 2, &lim);
    r.check(
        "stats",
        "#S''(9,2,3) = 3",
        s9.as_ref().is_ok_and(|s| s.slices[3].count == 3 && s.slices[1].count == 0),
        "",
    );
    let mut ok = true;
    let mut tight: f64 = 0.0;
    for n in odd_range(5, 81) {
        for k in [2usize, 3] {
            if k as u64 > (n - 1) / 2 {
                continue;
            }
            match count_doubleprime(odd(n), k, &lim) {
                Ok(rep) => {
                    ok &= rep.slice_bounds_hold() && rep.global_bound_holds();
                    tight = tight.max(rep.tight_global_constant);
                }
                Err(_) => ok = false,
            }
        }
    }
    r.check(
        "stats",
        "S'' per-slice and global bounds",
        ok,
        format!("odd n <= 81, k in {{2,3}}, tightest global constant {tight:.4}"),
    );

    let mut ok = true;
    for n in odd_range(3, 101) {
        for k in [1usize, 2] {
            if k as u64 > (n - 1) / 2 {
                continue;
            }
            let i = if k == 1 { iv(0.0, 1.0) } else { iv(-1.0, 1.0) };
            let e = exact_count(odd(n), k, i, &lim);
            let f = fast_count(odd(n), k, i, &lim);
            ok &= matches!((e, f), (Ok(e), Ok(f)) if (f - e as f64).abs() <= fast_deviation_budget(odd(n), k));
        }
    }
    r.check("stats", "fast path within deviation budget", ok, "odd n <= 101, k <= 2");

    let ok = pillai(9) == 21u32.into() && pillai(15) == 45u32.into() && (2..=10_000).all(broughan_check);
    r.check("stats", "pillai anchors and Broughan bound", ok, "g(9)=21, g(15)=45, 2 <= n <= 10^4");

    let mut table = String::from("audit\tn\tk\tm\td\tn1\tlhs\trhs\tdefect\tnormalized\n");
    for (n, k) in [(9u64, 1usize), (9, 2), (15, 1), (15, 2)] {
        for m in 1..n {
            for tag in LemmaTag::ALL {
                if let Ok(a) = audit_lemma(tag, odd(n), k, m, None, &lim) {
                    let _ = writeln!(
                        table,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        a.tag, a.n, a.k, a.m, a.d, a.n1, a.lhs, a.rhs, a.defect, a.normalized
                    );
                }
            }
        }
    }
    r.tables.push(table);
    let a = audit_lemma(LemmaTag::SliceReduction, odd(15), 1, 3, None, &lim);
    r.check(
        "stats",
        "slice-reduction counterexample (15,1,3)",
        a.as_ref().is_ok_and(|a| (a.lhs, a.rhs, a.defect) == (7, 4, 3)),
        "7 vs 4, defect 3",
    );
    let grid: Vec<u64> = odd_range(3, 61).collect();
    for tag in LemmaTag::ALL {
        let mut max = 0.0f64;
        let mut at = (0, 0, 0);
        for k in [1usize, 2] {
            for a in audit_grid(tag, &grid, k, None, &lim).unwrap_or_default() {
                if a.normalized > max {
                    max = a.normalized;
                    at = (a.n, a.k, a.m);
                }
            }
        }
        let ok = max <= 4.0;
        r.checks.push(Check {
            suite: "stats",
            name: format!("{tag} normalized defect <= 4"),
            status: match (ok, tag) {
                (true, _) => Status::Pass,
                (false, LemmaTag::FoldSurjection) => Status::Fail,
                (false, _) => Status::KnownDefect,
            },
            detail: format!("odd n <= 61, k <= 2, max {max:.4} at (n,k,m) = {at:?}"),
        });
    }
}

fn ihara(r: &mut Report) {
    let lim = Limits::default();
    let mut ok = true;
    for n in [3u64, 5, 7, 9] {
        let spec = CayleySpec::new(make_tuple(n, &[1]).expect("valid"), false);
        let z = zeta_inverse(&spec, &lim).unwrap_or_default();
        let n = n as usize;
        ok &= z.len() == 2 * n + 1
            && z.iter().enumerate().all(|(i, &c)| {
                let want = if i == 0 || i == 2 * n { 1.0 } else if i == n { -2.0 } else { 0.0 };
                (c - want).abs() < 1e-9
            });
    }
    r.check("ihara", "cycle zeta inverse = (1 - u^n)^2", ok, "n in {3,5,7,9}");

    let mut prod_ok = true;
    let mut circle_ok = true;
    let mut expand_ok = true;
    for n in [7u64, 9, 11] {
        for gens in [vec![1u64], vec![1, 3], vec![1, 2, 3]] {
            for zero in [false, true] {
                let spec = CayleySpec::new(make_tuple(n, &gens).expect("valid"), zero);
                let rr = spec.degree();
                let q = (rr - 1) as f64;
                for &alpha in &spectrum(&spec).values {
                    let Ok(p) = pole_pair(alpha, rr) else {
                        prod_ok = false;
                        continue;
                    };
                    prod_ok &= ((p.plus * p.minus).re - 1.0 / q).abs() < 1e-12 && (p.plus * p.minus).im.abs() < 1e-12;
                    if alpha * alpha <= 4.0 * q {
                        circle_ok &= (p.plus.norm() - q.sqrt().recip()).abs() < 1e-12;
                    }
                }
                if let Ok(h) = ihara_polynomial(&spec, &lim) {
                    for u in [0.3, -0.3, 0.7, -0.7] {
                        let d = ihara_product(&spec, u);
                        expand_ok &= (h.evaluate(u) - d).abs() <= 1e-8 * d.abs().max(f64::MIN_POSITIVE);
                    }
                } else {
                    expand_ok = false;
                }
            }
        }
    }
    r.check("ihara", "pole product = 1/(r-1)", prod_ok, "18 specs");
    r.check("ihara", "Ramanujan poles on radius 1/sqrt(r-1)", circle_ok, "18 specs");
    r.check("ihara", "expansion matches direct product", expand_ok, "u in {±0.3, ±0.7}");
}
