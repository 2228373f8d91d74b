use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use dilute_core::combinatorics::{
    catalan, catalan_convolution, catalan_root_degree, convolution_power_row, de_closed_forms, de_recurrence,
    n_12_closed, n_one_multiedge, r_sequence, root_degree_closed_form,
};
use dilute_core::montecarlo::{compare_asymptotic, estimate_moments, sample_matrix, EnsembleConfig, EntryDist};
use dilute_core::rational::{self, Rational};
use dilute_core::series::{moment_residual, solve_catalan, solve_moment_series, SeriesParams, UPolynomial};
use dilute_core::walks::{
    classify, collect_walks, count_24star, count_profile, decompose_moment, exact_moment, Filter, MomentParams, Profile,
};

fn small_rational() -> impl Strategy<Value = Rational> {
    (0i64..200, 1i64..50).prop_map(|(a, b)| rational::ratio(a, b))
}

fn big(v: BigUint) -> Rational {
    Rational::from_integer(v.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn series_residual_vanishes(order in 0usize..24, u in small_rational()) {
        let f = solve_moment_series(&SeriesParams { order, u_value: Some(u.clone()) }).unwrap();
        prop_assert!(moment_residual(&f, &UPolynomial::constant(u)).is_zero());
    }

    #[test]
    fn zero_u_gives_catalan(order in 0usize..40) {
        let f = solve_moment_series(&SeriesParams { order, u_value: Some(rational::int(0)) }).unwrap();
        prop_assert_eq!(f, solve_catalan(order));
    }

    #[test]
    fn coefficients_are_nonnegative_integers(order in 0usize..30) {
        let f = solve_moment_series(&SeriesParams::symbolic(order)).unwrap();
        prop_assert!(f.is_nonneg_integral());
    }

    #[test]
    fn monotone_in_u(s in 0usize..20, a in small_rational(), b in small_rational()) {
        let f = solve_moment_series(&SeriesParams::symbolic(s)).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(f.coeff(s).evaluate(&lo).unwrap() <= f.coeff(s).evaluate(&hi).unwrap());
    }

    #[test]
    fn specialising_after_solving_matches_solving_specialised(order in 0usize..16, u in small_rational()) {
        let symbolic = solve_moment_series(&SeriesParams::symbolic(order)).unwrap();
        let direct = solve_moment_series(&SeriesParams { order, u_value: Some(u.clone()) }).unwrap();
        prop_assert_eq!(symbolic.specialize(&u), direct);
    }

    #[test]
    fn catalan_recurrence(k in 1usize..120) {
        let f = solve_catalan(k);
        let rhs: Rational = (0..k).map(|j| f.scalar(k - 1 - j) * f.scalar(j)).sum();
        prop_assert_eq!(f.scalar(k), rhs);
    }

    #[test]
    fn root_degree_forms_agree(s in 1usize..120, d in 1usize..120) {
        prop_assume!(d <= s);
        prop_assert_eq!(catalan_root_degree(s, d).unwrap(), root_degree_closed_form(s, d).unwrap());
    }

    #[test]
    fn root_degrees_partition_catalan(s in 1usize..80) {
        let total: BigUint = (1..=s).map(|d| root_degree_closed_form(s, d).unwrap()).sum();
        prop_assert_eq!(total, catalan(s));
    }

    #[test]
    fn de_forms_agree(k in 1usize..120, m in 1usize..120) {
        prop_assume!(m <= k);
        let (d, e) = de_recurrence(k, m).unwrap();
        let (dc, ec) = de_closed_forms(k, m).unwrap();
        prop_assert_eq!((num_bigint::BigInt::from(d), num_bigint::BigInt::from(e)), (dc, ec));
    }

    #[test]
    fn n12_and_r_identities(s in 2usize..200) {
        prop_assert_eq!(n_one_multiedge(s, 2).unwrap(), n_12_closed(s).unwrap());
        prop_assert_eq!(r_sequence(s).unwrap(), catalan_convolution(s - 2, 3).unwrap());
    }

    #[test]
    fn convolution_recursion_and_bound(k in 0usize..100, p in 1usize..10) {
        prop_assert_eq!(catalan_convolution(k, 1).unwrap(), catalan(k));
        let prev = convolution_power_row(k, p);
        let expect: BigUint = (0..=k).map(|j| catalan(j) * &prev[k - j]).sum();
        prop_assert_eq!(catalan_convolution(k, p + 1).unwrap(), expect.clone());
        prop_assert!(expect <= BigUint::from(4u32).pow(p as u32 + 1) * catalan(k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dyck_sequences_are_balanced(s in 1usize..6, pick in any::<prop::sample::Index>()) {
        let walks = collect_walks(s, 7, Filter::All).unwrap();
        let c = classify(pick.get(&walks));
        let mut h = 0i32;
        for &step in &c.dyck {
            h += i32::from(step);
            prop_assert!(h >= 0);
        }
        prop_assert_eq!(h, 0);
        prop_assert!(c.is_even);
    }

    #[test]
    fn tree_type_means_acyclic_skeleton(s in 1usize..6, pick in any::<prop::sample::Index>()) {
        let walks = collect_walks(s, 7, Filter::All).unwrap();
        let w = pick.get(&walks);
        let c = classify(w);
        prop_assert_eq!(c.is_tree_type, c.edge_multiplicities.len() + 1 == w.vertex_count());
    }

    #[test]
    fn star_polynomial_specialisations(s in 1usize..7) {
        let p = count_24star(s).unwrap();
        prop_assert_eq!(p.coeff(0), big(catalan(s)));
        if s >= 2 {
            prop_assert_eq!(p.coeff(1), big(n_12_closed(s).unwrap()));
        }
    }

    #[test]
    fn one_edge_profile(s in 1usize..7, m in 1usize..7) {
        prop_assume!(m <= s);
        prop_assert_eq!(count_profile(s, Profile::OneEdge { m: m as u32 }).unwrap(), n_one_multiedge(s, m).unwrap());
    }

    #[test]
    fn moment_parts_sum(s in 0usize..5, n in 2u64..400, rho in (1i64..40, 1i64..4)) {
        let rho = rational::ratio(rho.0, rho.1);
        prop_assume!(rho <= rational::int(n as i64));
        let moments = vec![rational::int(1), rational::ratio(9, 5), rational::ratio(27, 7), rational::int(9)];
        let params = MomentParams::new(n, rho, moments).unwrap();
        let (tree, non_tree) = decompose_moment(&params, s).unwrap();
        prop_assert_eq!(tree + non_tree, exact_moment(&params, s).unwrap());
    }
}

/// `E Tr H^{2s}` for an `n x n` matrix by summing over every entry
/// configuration. Each pair is absent, `+c` or `-c` with `c^2 = 1/(q rho)`,
/// the nonzero values having probability `p q / 2` each where `p = rho/n`.
fn brute_force_moment(n: usize, rho: &Rational, q: &Rational, s: usize) -> Rational {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let p = rho / rational::int(n as i64);
    let nonzero = &p * q / rational::int(2);
    let zero = Rational::one() - &p * q;
    let c2 = Rational::one() / (q * rho);
    let mut total = Rational::zero();
    let states = 3usize.pow(pairs.len() as u32);
    for code in 0..states {
        let mut sign = vec![vec![0i64; n]; n];
        let mut weight = Rational::one();
        let mut x = code;
        for &(i, j) in &pairs {
            let v = [0i64, 1, -1][x % 3];
            x /= 3;
            sign[i][j] = v;
            sign[j][i] = v;
            weight *= if v == 0 { zero.clone() } else { nonzero.clone() };
        }
        if weight.is_zero() {
            continue;
        }
        // G = H^2 has entries c^2 * sum_k sign_ik sign_kj.
        let g: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| &c2 * rational::int((0..n).map(|k| sign[i][k] * sign[k][j]).sum())).collect())
            .collect();
        let mut pw: Vec<Vec<Rational>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        for _ in 0..s {
            pw = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| &pw[i][k] * &g[k][j]).sum()).collect())
                .collect();
        }
        let tr: Rational = (0..n).map(|i| pw[i][i].clone()).sum();
        total += weight * tr;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_engine_matches_brute_force(
        n in 2usize..5,
        s in 1usize..5,
        rho in (1i64..8, 1i64..4),
        q_root in 1i64..4,
    ) {
        let rho = rational::ratio(rho.0, rho.1);
        prop_assume!(rho <= rational::int(n as i64));
        let q = rational::ratio(1, q_root * q_root);
        // V_{2l} = q^{1-l}
        let moments = (1..=s as u32).map(|l| rational::pow(&(Rational::one() / &q), l - 1)).collect();
        let params = MomentParams::new(n as u64, rho.clone(), moments).unwrap();
        prop_assert_eq!(exact_moment(&params, s).unwrap(), brute_force_moment(n, &rho, &q, s));
    }
}

#[test]
fn undiluted_limit_is_wigner() {
    // rho = n: every pair present, entries +-1/sqrt(n)
    for n in 2..5usize {
        for s in 1..5 {
            let params = MomentParams::rademacher(n as u64, rational::int(n as i64), s).unwrap();
            let want = brute_force_moment(n, &rational::int(n as i64), &rational::int(1), s);
            assert_eq!(exact_moment(&params, s).unwrap(), want, "n={n} s={s}");
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    for s in 1..=6 {
        let a = collect_walks(s, 7, Filter::All).unwrap();
        let b = collect_walks(s, 7, Filter::All).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(a, sorted, "walks come out in canonical order");
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        assert_eq!(one.install(|| count_24star(s).unwrap()), many.install(|| count_24star(s).unwrap()));
    }
}

fn ensemble(n: usize, rho: i64, dist: EntryDist, samples: usize) -> EnsembleConfig {
    EnsembleConfig { n, rho: rational::int(rho), dist, master_seed: 99, samples }
}

#[test]
fn sampling_is_reproducible_across_thread_counts() {
    let config = ensemble(40, 6, EntryDist::Uniform, 64);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(5).build().unwrap();
    let a = one.install(|| estimate_moments(&config, 3).unwrap());
    let b = many.install(|| estimate_moments(&config, 3).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn sampled_matrices_are_symmetric_with_zero_diagonal(n in 2usize..60, seed in any::<u64>(), idx in 0u64..1000) {
        let mut c = ensemble(n, 1, EntryDist::Rademacher, 1);
        c.master_seed = seed;
        let h = sample_matrix(&c, idx);
        for i in 0..n {
            prop_assert_eq!(h[(i, i)], 0.0);
            for j in 0..n {
                prop_assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }
}

#[test]
fn dilution_frequency_matches_rho_over_n() {
    let config = ensemble(120, 9, EntryDist::Rademacher, 200);
    let p = 9.0 / 120.0;
    let mut present = 0usize;
    let mut trials = 0usize;
    for k in 0..config.samples as u64 {
        let h = sample_matrix(&config, k);
        for i in 0..config.n {
            for j in i + 1..config.n {
                trials += 1;
                present += usize::from(h[(i, j)] != 0.0);
            }
        }
    }
    let freq = present as f64 / trials as f64;
    let tol = 5.0 * (p * (1.0 - p) / trials as f64).sqrt();
    assert!((freq - p).abs() <= tol, "frequency {freq} vs {p} (tolerance {tol})");
}

#[test]
fn compare_uses_the_entry_law_v4() {
    for dist in [EntryDist::Rademacher, EntryDist::Uniform, EntryDist::TwoPoint { q: rational::ratio(1, 4) }] {
        let config = ensemble(50, 5, dist.clone(), 1);
        let rows = compare_asymptotic(&config, 3, false).unwrap();
        let want = solve_moment_series(&SeriesParams { order: 3, u_value: Some(dist.v4() / rational::int(5)) }).unwrap();
        for r in rows {
            assert_eq!(r.series, want.scalar(r.s));
        }
    }
}
