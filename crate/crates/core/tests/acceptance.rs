//! Acceptance criteria 1-10. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! hard criterion fails. Criterion 10 is a soft band and only reports.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Signed};

use dilute_core::combinatorics::{
    catalan, catalan_convolution, check_de_agreement, check_root_degree_agreement, convolution_power_row,
    n_12_closed, n_one_multiedge, r_sequence,
};
use dilute_core::montecarlo::{estimate_moments, spectral_norm_study, EnsembleConfig, EntryDist};
use dilute_core::rational::{self, Rational};
use dilute_core::series::{check_lower_bound, check_upper_bound, solve_moment_series, SeriesParams, UPolynomial};
use dilute_core::walks::{
    count_24star, count_profile, decompose_moment, exact_moment, rose_polynomial, verify_coloring_rule, MomentParams,
    Profile, RosePolynomial,
};

// Tolerances and parameters, fixed up front.
const C1_S_MAX: usize = 6;
const C3_S_MAX: usize = 6;
const C4_ROOT_DEGREE_S: usize = 200;
const C4_DE_K: usize = 200;
const C4_SEQ_S: usize = 200;
const C4_CONV_K: usize = 100;
const C4_CONV_P: u32 = 10;
const C5_S_MAX: usize = 5;
const C6_N: usize = 300;
const C6_RHO: i64 = 10;
const C6_SAMPLES: usize = 10_000;
const C6_SEED: u64 = 20_240_611;
const C6_STDERR_WINDOW: f64 = 4.0;
const C7_RHO: i64 = 64;
const C7_GRID: [u64; 4] = [500, 1000, 2000, 4000];
const C7_REL_TOL: (i64, i64) = (5, 100);
const C8_LOWER_ORDER: usize = 64;
const C8_UPPER_ORDER: usize = 48;
const C9_S: usize = 4;
const C9_GRID: [u64; 4] = [50, 100, 200, 400];
/// `rho = sqrt(n)` is replaced by `floor(sqrt(n) 10^12) / 10^12` where it is
/// irrational.
const C9_SQRT_DIGITS: u32 = 12;
const C10_N: usize = 2000;
const C10_RHO: i64 = 96;
const C10_SAMPLES: usize = 20;
const C10_SEED: u64 = 7;
const C10_BAND: (f64, f64) = (1.9, 2.4);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn big(v: BigUint) -> Rational {
    Rational::from_integer(v.into())
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn criterion_1() -> Outcome {
    let f = solve_moment_series(&SeriesParams::symbolic(C1_S_MAX)).unwrap();
    for s in 1..=C1_S_MAX {
        let e = count_24star(s).unwrap();
        if &e != f.coeff(s) {
            return outcome(false, format!("s={s}: enumeration {e} but series {}", f.coeff(s)));
        }
    }
    let printed: [(usize, &[i64]); 4] = [(2, &[2, 1]), (3, &[5, 6]), (4, &[14, 28]), (5, &[42, 120, 5])];
    for (s, coeffs) in printed {
        if f.coeff(s) != &UPolynomial::from_integers(coeffs) {
            return outcome(false, format!("m_{s} = {} differs from the printed {coeffs:?}", f.coeff(s)));
        }
    }
    outcome(true, format!("m_6 = {}", f.coeff(6)))
}

fn criterion_2() -> Outcome {
    let expected = [
        RosePolynomial::from_terms(2, &[(&[2], 1)]),
        RosePolynomial::from_terms(3, &[(&[3], 1)]),
        RosePolynomial::from_terms(4, &[(&[2, 2], 3)]),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for want in expected {
        let got = rose_polynomial(want.m).unwrap();
        let ok = got == want;
        pass &= ok;
        parts.push(format!(
            "P({}) = {}{}",
            want.m,
            got,
            if ok { String::new() } else { format!(" (expected {want})") }
        ));
    }
    let mut detail = parts.join("; ");
    if !pass {
        detail.push_str(
            "; the walk 1,2,1,2,1,2,1,2,1 crosses one root edge eight times and is a rose walk \
             with weight V8/rho^3, which the three-term value leaves out",
        );
    }
    outcome(pass, detail)
}

fn criterion_3() -> Outcome {
    let mut cells = 0;
    for s in 1..=C3_S_MAX {
        for m in 1..=s {
            let want = factorial(2 * s) / (factorial(s - m) * factorial(s + m));
            let got = count_profile(s, Profile::OneEdge { m: m as u32 }).unwrap();
            if got != want {
                return outcome(false, format!("s={s} m={m}: enumeration {got}, closed form {want}"));
            }
            cells += 1;
        }
    }
    outcome(true, format!("{cells} (s, m) cells"))
}

fn criterion_4() -> Outcome {
    let root = match check_root_degree_agreement(C4_ROOT_DEGREE_S) {
        Ok(n) => n,
        Err(e) => return outcome(false, e.to_string()),
    };
    let de = match check_de_agreement(C4_DE_K) {
        Ok(n) => n,
        Err(e) => return outcome(false, e.to_string()),
    };
    for s in 2..=C4_SEQ_S {
        if n_12_closed(s).unwrap() != n_one_multiedge(s, 2).unwrap() {
            return outcome(false, format!("N_s^(1,2) closed form vs multiedge count at s={s}"));
        }
        if r_sequence(s).unwrap() != catalan_convolution(s - 2, 3).unwrap() {
            return outcome(false, format!("R_s vs three-fold convolution at s={s}"));
        }
    }
    for p in 1..=C4_CONV_P {
        let row = convolution_power_row(C4_CONV_K, p as usize);
        for (k, v) in row.iter().enumerate() {
            if v > &(BigUint::from(4u32).pow(p) * catalan(k)) {
                return outcome(false, format!("T_{k}^({p}) exceeds 4^{p} t_{k}"));
            }
        }
    }
    outcome(true, format!("{root} root-degree cells, {de} D/E pairs, N12 and R for s<={C4_SEQ_S}, T bound k<={C4_CONV_K} p<={C4_CONV_P}"))
}

fn criterion_5() -> Outcome {
    let mut walks = 0;
    let mut bad = Vec::new();
    for s in 1..=C5_S_MAX {
        let r = verify_coloring_rule(s).unwrap();
        walks += r.walks_checked;
        bad.extend(r.counterexamples.iter().map(|w| w.to_string()));
    }
    if bad.is_empty() {
        outcome(true, format!("{walks} even walks, no red vertex without a blue one"))
    } else {
        outcome(false, format!("counterexamples: {}", bad.join(" | ")))
    }
}

fn criterion_6() -> Outcome {
    let config = EnsembleConfig {
        n: C6_N,
        rho: rational::int(C6_RHO),
        dist: EntryDist::Rademacher,
        master_seed: C6_SEED,
        samples: C6_SAMPLES,
    };
    let est = estimate_moments(&config, 3).unwrap();
    let params = MomentParams::rademacher(C6_N as u64, rational::int(C6_RHO), 3).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for e in &est {
        let exact = exact_moment(&params, e.s).unwrap();
        if e.s == 1 && exact != rational::int(299) {
            return outcome(false, format!("exact M_2 = {exact}, expected 299"));
        }
        let x = rational::to_f64(&exact);
        let z = (e.mean - x) / e.stderr;
        pass &= z.abs() <= C6_STDERR_WINDOW;
        parts.push(format!("s={}: mc {:.4} +- {:.4}, exact {:.4}, z={z:+.2}", e.s, e.mean, e.stderr, x));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let target = solve_moment_series(&SeriesParams { order: 4, u_value: Some(rational::ratio(1, C7_RHO)) })
        .unwrap()
        .scalar(4);
    let ones = vec![rational::int(1); 4];
    let mut gaps = Vec::new();
    for n in C7_GRID {
        let params = MomentParams::new(n, rational::int(C7_RHO), ones.clone()).unwrap();
        let m = exact_moment(&params, 4).unwrap() / rational::int(n as i64);
        let gap = ((&m - &target) / &target).abs();
        gaps.push((n, m, gap));
    }
    let (_, last_m, last_gap) = gaps.last().unwrap();
    let close = last_gap <= &rational::ratio(C7_REL_TOL.0, C7_REL_TOL.1);
    let shrinking = gaps.windows(2).all(|w| w[1].2 < w[0].2);
    let trail: Vec<String> =
        gaps.iter().map(|(n, _, g)| format!("n={n}: {:.5}", rational::to_f64(g))).collect();
    outcome(
        close && shrinking,
        format!(
            "M_8/n = {:.5} vs {} = {:.5}; relative gaps {}",
            rational::to_f64(last_m),
            rational::to_exact_string(&target),
            rational::to_f64(&target),
            trail.join(", ")
        ),
    )
}

fn criterion_8() -> Outcome {
    let lower = check_lower_bound(C8_LOWER_ORDER).unwrap();
    if !lower.all_pass() {
        return outcome(false, "[u^0] or [u^1] coefficient check failed");
    }
    for row in lower.rows.iter().filter(|r| r.s >= 2) {
        if !row.u1_equals_n12 {
            return outcome(false, format!("[u^1] m_{} differs from N_s^(1,2)", row.s));
        }
        if row.u1_coefficient != big(n_12_closed(row.s).unwrap()) {
            return outcome(false, format!("[u^1] m_{} differs from the closed form", row.s));
        }
    }
    let grid = [rational::ratio(1, 100), rational::ratio(1, 10), rational::ratio(1, 2), rational::int(1)];
    let upper = check_upper_bound(C8_UPPER_ORDER, &grid).unwrap();
    if let Some(c) = upper.non_passing().next() {
        return outcome(false, format!("s={} u={}: {:?}", c.s, rational::to_exact_string(&c.u), c.verdict));
    }
    let max_terms = upper.cells.iter().map(|c| c.taylor_terms).max().unwrap_or(0);
    outcome(
        true,
        format!("lower s<={C8_LOWER_ORDER}; {} upper cells certified (at most {max_terms} Taylor terms)", upper.cells.len()),
    )
}

fn sqrt_rho(n: u64) -> Rational {
    let scale = BigUint::from(10u32).pow(C9_SQRT_DIGITS);
    let root = (BigUint::from(n) * &scale * &scale).sqrt();
    Rational::new(root.into(), scale.into())
}

fn criterion_9() -> Outcome {
    let ones = vec![rational::int(1); C9_S];
    let mut ratios = Vec::new();
    for n in C9_GRID {
        let params = MomentParams::new(n, sqrt_rho(n), ones.clone()).unwrap();
        let (tree, non_tree) = decompose_moment(&params, C9_S).unwrap();
        ratios.push((n, non_tree / tree));
    }
    let strict = ratios.windows(2).all(|w| w[1].1 < w[0].1);
    let trail: Vec<String> =
        ratios.iter().map(|(n, r)| format!("n={n}: {:.6}", rational::to_f64(r))).collect();
    outcome(strict, format!("non_tree/tree {}", trail.join(", ")))
}

fn criterion_10() -> Outcome {
    let config = EnsembleConfig {
        n: C10_N,
        rho: rational::int(C10_RHO),
        dist: EntryDist::Rademacher,
        master_seed: C10_SEED,
        samples: C10_SAMPLES,
    };
    let summary = spectral_norm_study(&config, &[0.1], None).unwrap();
    let m = summary.median;
    outcome(m >= C10_BAND.0 && m <= C10_BAND.1, format!("median lambda_max {m:.4}, band [{}, {}]", C10_BAND.0, C10_BAND.1))
}

fn main() {
    let criteria: [(u32, &str, bool, fn() -> Outcome); 10] = [
        (1, "series == enumeration, s <= 6", true, criterion_1),
        (2, "rose sums P(2), P(3), P(4)", true, criterion_2),
        (3, "one-edge profile == (2s)!/((s-m)!(s+m)!), m <= s <= 6", true, criterion_3),
        (4, "closed-form identity suite", true, criterion_4),
        (5, "coloring rule sweep, s <= 5", true, criterion_5),
        (6, "exact vs Monte Carlo, n=300 rho=10", true, criterion_6),
        (7, "M_8/n trend to m_4(1/64)", true, criterion_7),
        (8, "series lower and certified upper bounds", true, criterion_8),
        (9, "non-tree share decreasing, rho = sqrt(n)", true, criterion_9),
        (10, "median lambda_max band (soft)", false, criterion_10),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut hard_failures = Vec::new();
    for (id, name, hard, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = match (o.pass, hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (soft, not counted)",
        };
        println!("criterion {id} [{name}]: {status} ({:.1?}) {}", start.elapsed(), o.detail);
        if hard && !o.pass {
            hard_failures.push(id);
        }
    }
    if !hard_failures.is_empty() {
        println!("acceptance: hard criteria failed: {hard_failures:?}");
        std::process::exit(1);
    }
    println!("acceptance: all hard criteria passed");
}
