use cayley_core::density::{conv_cdf, conv_mass, DensityQuery};
use cayley_core::group::{enumerate_tuples, slice_params};
use cayley_core::ihara::{ihara_polynomial, zeta_inverse};
use cayley_core::spectra::{interval_map, spectrum};
use cayley_core::stats::{count_slice, eigen_histogram, exact_count, prob_exact, total_pairs, Limits};
use cayley_core::{make_tuple, CayleySpec, Interval, OddModulus};
use proptest::prelude::*;

fn odd(n: u64) -> OddModulus {
    OddModulus::new(n).unwrap()
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn second_moment(k: usize) -> f64 {
    let tail = |x: f64| x * (1.0 - conv_cdf(k, x, 1e-10, 1 << 16).unwrap().0);
    let steps = 400;
    let h = 1.0 / steps as f64;
    let mut total = 0.0;
    for j in 0..k {
        let lo = j as f64;
        let mut s = tail(lo) + tail(lo + 1.0);
        for i in 1..steps {
            s += tail(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    4.0 * total
}

#[test]
fn convolved_law_has_variance_k_over_two() {
    for k in [1usize, 2, 3] {
        let m2 = second_moment(k);
        assert!((m2 - k as f64 / 2.0).abs() < 2e-3, "k = {k}: {m2}");
    }
}

#[test]
fn cycle_graph_spectrum() {
    for n in [5u64, 7, 13] {
        let s = spectrum(&CayleySpec::new(make_tuple(n, &[1]).unwrap(), false));
        for (m, v) in s.values.iter().enumerate() {
            let want = 2.0 * (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos();
            assert!((v - want).abs() < 1e-14);
        }
    }
}

#[test]
fn slices_partition_the_count() {
    let lim = Limits::default();
    for (n, k) in [(15u64, 2usize), (21, 3), (27, 2)] {
        let i = iv(-0.8, 1.3);
        let by_slice: u64 = (0..n).map(|m| count_slice(odd(n), k, m, i, &lim).unwrap()).sum();
        assert_eq!(by_slice, exact_count(odd(n), k, i, &lim).unwrap());
    }
}

#[test]
fn slice_parameters() {
    let s = slice_params(odd(45), 12).unwrap();
    assert_eq!((s.d, s.n1, s.m1), (3, 15, 4));
    let s = slice_params(odd(45), 0).unwrap();
    assert_eq!(s.n1, 1);
}

#[test]
fn histogram_counts_and_masses_are_complete() {
    let lim = Limits::default();
    let h = eigen_histogram(odd(21), 2, false, 8, &lim).unwrap();
    let total: u64 = h.bins.iter().map(|b| b.count).sum();
    assert_eq!(total as u128, total_pairs(odd(21), 2));
    let f: f64 = h.frequencies().iter().sum();
    assert!((f - 1.0).abs() < 1e-12);
    let m: f64 = h.bins.iter().map(|b| b.predicted_mass).sum();
    assert!((m - 1.0).abs() < 1e-8);
}

#[test]
fn cycle_zeta_inverse() {
    let spec = CayleySpec::new(make_tuple(7, &[1]).unwrap(), false);
    let z = zeta_inverse(&spec, &Limits::default()).unwrap();
    let want: Vec<f64> = (0..=14).map(|i| match i { 0 | 14 => 1.0, 7 => -2.0, _ => 0.0 }).collect();
    for (a, b) in z.iter().zip(&want) {
        assert!((a - b).abs() < 1e-9);
    }
    let p = ihara_polynomial(&spec, &Limits::default()).unwrap();
    assert_eq!(p.rank, 1);
}

#[test]
fn tuple_enumeration_is_lexicographic() {
    let all: Vec<Vec<u64>> = enumerate_tuples(odd(9), 2)
        .unwrap()
        .map(|t| t.generators().to_vec())
        .collect();
    assert_eq!(all.len(), 6);
    assert_eq!(all[0], vec![1, 2]);
    assert_eq!(all[5], vec![3, 4]);
    assert!(all.windows(2).all(|w| w[0] < w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn probabilities_add_over_a_split(n in (2u64..40).prop_map(|h| 2 * h + 1), k in 1usize..3, t in 0.05f64..0.95) {
        prop_assume!(k as u64 <= (n - 1) / 2);
        let lim = Limits::default();
        let kf = k as f64;
        let mid = -kf + 2.0 * kf * t;
        let left = exact_count(odd(n), k, iv(-kf, mid), &lim).unwrap();
        let right = exact_count(odd(n), k, iv(mid, kf), &lim).unwrap();
        let at = exact_count(odd(n), k, iv(mid, mid), &lim).unwrap();
        prop_assert_eq!((left + right - at) as u128, total_pairs(odd(n), k));
    }

    #[test]
    fn window_probability_matches_cosine_interval(n in (2u64..30).prop_map(|h| 2 * h + 1), a in -4.0f64..3.9, w in 0.0f64..4.0, zero in any::<bool>()) {
        let k = 2usize;
        prop_assume!(k as u64 <= (n - 1) / 2);
        let r = 2 * k as u64 + zero as u64;
        let rf = r as f64;
        let j = iv(a.max(-rf), (a + w).min(rf));
        let pair = interval_map(j, r).unwrap();
        let lim = Limits::default();
        let p = prob_exact(odd(n), k, pair.clamped(), &lim).unwrap().probability;
        let spec = |g: &[u64]| CayleySpec::new(make_tuple(n, g).unwrap(), zero);
        let mut inside = 0u64;
        let mut total = 0u64;
        for t in enumerate_tuples(odd(n), k).unwrap() {
            for v in spectrum(&spec(t.generators())).values {
                total += 1;
                inside += j.contains(v) as u64;
            }
        }
        prop_assert!((p - inside as f64 / total as f64).abs() < 1e-12);
    }

    #[test]
    fn mass_is_monotone_in_the_interval(k in 1usize..4, c in -3.0f64..0.0, d in 0.0f64..3.0, e in 0.0f64..1.0) {
        let kf = k as f64;
        let (c, d) = (c.max(-kf), d.min(kf));
        let inner = conv_mass(&DensityQuery::quadrature(k, iv(c, d))).unwrap().value;
        let outer = conv_mass(&DensityQuery::quadrature(k, iv(c, (d + e).min(kf)))).unwrap().value;
        prop_assert!(outer >= inner - 2e-8);
    }
}
