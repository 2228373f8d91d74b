use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;

use crate::combinatorics::{
    catalan, catalan_table, check_de_agreement, check_exit_degree_bound, check_root_degree_agreement,
    convolution_power_row, n_12_closed, n_hat_22, n_one_multiedge, r_sequence,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::{
    check_lower_bound, check_upper_bound, phi_12, phi_22, solve_catalan, solve_moment_series, SeriesParams,
};
use crate::walks::{
    count_24star, count_profile, decompose_moment, enum_ceiling, exact_moment, rose_polynomial, verify_coloring_rule,
    MomentParams, Profile, RosePolynomial,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Quick,
    Full,
}

impl std::str::FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Depth::Quick),
            "full" => Ok(Depth::Full),
            _ => Err(Error::Config(format!("depth must be quick or full, got {s:?}"))),
        }
    }
}

/// Deliberate corruption for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    CatalanTable,
}

impl std::str::FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "catalan-table" => Ok(Fault::CatalanTable),
            _ => Err(Error::Config(format!("unknown fault {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    /// Diagnostic rows never affect the exit code.
    pub hard: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckReport {
    pub rows: Vec<CheckRow>,
}

impl SelfcheckReport {
    pub fn first_hard_failure(&self) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.hard && !r.passed)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.first_hard_failure().is_some())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let status = match (r.hard, r.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "ok (diagnostic)",
                (false, false) => "differs (diagnostic)",
            };
            out.push_str(&format!("{}: {status}", r.name));
            if !r.detail.is_empty() {
                out.push_str(&format!("  [{}]", r.detail));
            }
            out.push('\n');
        }
        out
    }
}

struct Runner {
    rows: Vec<CheckRow>,
}

impl Runner {
    fn hard(&mut self, name: String, f: impl FnOnce() -> Result<(bool, String)>) {
        self.push(name, true, f);
    }

    fn soft(&mut self, name: String, f: impl FnOnce() -> Result<(bool, String)>) {
        self.push(name, false, f);
    }

    fn push(&mut self, name: String, hard: bool, f: impl FnOnce() -> Result<(bool, String)>) {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, e.to_string()),
        };
        log::info!("{name}: {passed} in {:.2?}", start.elapsed());
        self.rows.push(CheckRow { name, hard, passed, detail });
    }
}

fn big(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

/// Runs the identity suite. Quick keeps enumeration at `s <= 5`; full uses
/// the enumeration ceiling and extends the closed-form ranges to 200.
pub fn run_selfcheck(depth: Depth, fault: Option<Fault>) -> SelfcheckReport {
    let (s_enum, c_max, order, upper_order) = match depth {
        Depth::Quick => (5.min(enum_ceiling()), 60, 32, 16),
        Depth::Full => (enum_ceiling(), 200, 64, 48),
    };
    let mut r = Runner { rows: Vec::new() };

    r.hard(format!("series==enumeration s<={s_enum}"), || {
        let f = solve_moment_series(&SeriesParams::symbolic(s_enum))?;
        for s in 1..=s_enum {
            let e = count_24star(s)?;
            if &e != f.coeff(s) {
                return Ok((false, format!("s={s}: series {} vs enumeration {e}", f.coeff(s))));
            }
        }
        Ok((true, String::new()))
    });

    r.hard(format!("catalan recurrence k<={c_max}"), || {
        let mut t = catalan_table(c_max);
        if fault == Some(Fault::CatalanTable) {
            t[5] += 1u32;
        }
        for k in 1..=c_max {
            let rhs: num_bigint::BigUint = (0..k).map(|j| &t[k - 1 - j] * &t[j]).sum();
            if t[k] != rhs {
                return Ok((false, format!("t_{k} = {} but the recurrence gives {rhs}", t[k])));
            }
        }
        let f = solve_catalan(c_max);
        let ok = (0..=c_max).all(|k| f.scalar(k) == big(t[k].clone()));
        Ok((ok, if ok { String::new() } else { "solve_catalan disagrees with the table".into() }))
    });

    r.hard(format!("moment series order {order}: residual, integrality, u=0 is Catalan"), || {
        let f = solve_moment_series(&SeriesParams::symbolic(order))?;
        let zero = solve_moment_series(&SeriesParams { order, u_value: Some(rational::int(0)) })?;
        let monotone = f.coeffs().iter().all(|c| c.is_nonneg_integral());
        Ok((monotone && zero == solve_catalan(order), String::new()))
    });

    r.hard(format!("[u^0]=t_s and [u^1]=N_s^(1,2) s<={order}"), || {
        let rep = check_lower_bound(order)?;
        let eq = rep.rows.iter().skip(2).all(|row| row.u1_equals_n12);
        Ok((rep.all_pass() && eq, String::new()))
    });

    r.hard(format!("m_s(u)/t_s <= 4exp(4us) certified s<={upper_order}"), || {
        let grid = [rational::ratio(1, 100), rational::ratio(1, 10), rational::ratio(1, 2), rational::int(1)];
        let rep = check_upper_bound(upper_order, &grid)?;
        Ok((rep.all_pass(), format!("{} cells", rep.cells.len())))
    });

    r.hard(format!("root degree recurrence==closed form s<={c_max}"), || {
        Ok((true, format!("{} cells", check_root_degree_agreement(c_max)?)))
    });

    r.hard(format!("D/E recurrences==closed forms k<={c_max}"), || {
        Ok((true, format!("{} pairs", check_de_agreement(c_max)?)))
    });

    r.hard(format!("N_s^(1,2) closed==multiedge s<={c_max}"), || {
        for s in 2..=c_max {
            if n_12_closed(s)? != n_one_multiedge(s, 2)? {
                return Ok((false, format!("s={s}")));
            }
        }
        Ok((true, String::new()))
    });

    r.hard(format!("R_s==3-fold convolution s<={c_max}"), || {
        let row = convolution_power_row(c_max - 2, 3);
        for s in 2..=c_max {
            if r_sequence(s)? != row[s - 2] {
                return Ok((false, format!("s={s}")));
            }
        }
        Ok((true, String::new()))
    });

    r.hard("T_k^(p) <= 4^p t_k k<=100 p<=10".into(), || {
        let t = catalan_table(100);
        for p in 1..=10u32 {
            let row = convolution_power_row(100, p as usize);
            for (k, v) in row.iter().enumerate() {
                if v > &(num_bigint::BigUint::from(4u32).pow(p) * &t[k]) {
                    return Ok((false, format!("k={k} p={p}")));
                }
            }
        }
        Ok((true, String::new()))
    });

    r.hard(format!("phi_12 coefficients==N_s^(1,2) s<={c_max}"), || {
        let p = phi_12(c_max)?;
        Ok(((2..=c_max).all(|s| p.scalar(s) == big(n_one_multiedge(s, 2).unwrap())), String::new()))
    });

    r.hard(format!("one-edge profile==closed form m<=s<={s_enum}"), || {
        for s in 1..=s_enum {
            for m in 1..=s {
                let e = count_profile(s, Profile::OneEdge { m: m as u32 })?;
                if e != n_one_multiedge(s, m)? {
                    return Ok((false, format!("s={s} m={m}: enumeration {e}")));
                }
            }
        }
        Ok((true, String::new()))
    });

    r.hard(format!("exact moment parts sum, M_2 = n-1, s<={}", s_enum.min(4)), || {
        let params = MomentParams::new(60, rational::ratio(15, 2), vec![rational::int(1), rational::ratio(9, 5), rational::ratio(27, 7), rational::int(9)])?;
        if exact_moment(&params, 1)? != rational::int(59) {
            return Ok((false, "M_2 != n - 1".into()));
        }
        for s in 0..=s_enum.min(4) {
            let (a, b) = decompose_moment(&params, s)?;
            if a + b != exact_moment(&params, s)? {
                return Ok((false, format!("s={s}")));
            }
        }
        Ok((true, String::new()))
    });

    r.hard("rose sums P(2), P(3)".into(), || {
        let ok = rose_polynomial(2)? == RosePolynomial::from_terms(2, &[(&[2], 1)])
            && rose_polynomial(3)? == RosePolynomial::from_terms(3, &[(&[3], 1)]);
        Ok((ok, String::new()))
    });

    if depth == Depth::Full {
        r.hard(format!("coloring rule sweep s<={s_enum}"), || {
            let mut checked = 0;
            let mut ambiguous = 0;
            for s in 1..=s_enum {
                let rep = verify_coloring_rule(s)?;
                if let Some(w) = rep.counterexamples.first() {
                    return Ok((false, format!("counterexample {w}")));
                }
                checked += rep.walks_checked;
                ambiguous += rep.ambiguous;
            }
            Ok((true, format!("{checked} walks, {ambiguous} colored differently by the second-arrival-only reading")))
        });

        r.hard(format!("exit degree bound s<={c_max} outside (1,1)"), || {
            let rep = check_exit_degree_bound(c_max)?;
            let other = rep.failures_outside_known_exception();
            Ok((other.is_empty(), format!("{} cells, failing: {:?}", rep.cells_checked, rep.failures.iter().map(|c| (c.s, c.d)).collect::<Vec<_>>())))
        });
    }

    r.soft("exit degree bound at (1,1)".into(), || {
        let rep = check_exit_degree_bound(1)?;
        Ok((rep.failures.is_empty(), "4^1 t_1^(1) = 4 > 3 = 3^1 t_1".into()))
    });

    r.soft(format!("N-hat_s^(2,2) closed form vs enumeration s<={s_enum}"), || {
        let mut parts = Vec::new();
        let mut equal = true;
        for s in 4..=s_enum {
            let e = count_profile(s, Profile::TwoFourSharing)?;
            let c = n_hat_22(s)?;
            equal &= e == c;
            parts.push(format!("s={s}: {c} vs {e}"));
        }
        Ok((equal, parts.join(", ")))
    });

    r.soft(format!("phi_22 vs two-four enumeration s<={s_enum}"), || {
        let p = phi_22(s_enum.max(4))?;
        let mut parts = Vec::new();
        let mut equal = true;
        for s in 4..=s_enum {
            let e = big(count_profile(s, Profile::TwoFourAny)?);
            equal &= e == p.scalar(s);
            parts.push(format!("s={s}: {} vs {e}", p.scalar(s)));
        }
        Ok((equal, parts.join(", ")))
    });

    r.soft("phi_22 / (s^2 t_s) near 1/2 at s=40".into(), || {
        let p = phi_22(40)?;
        let ratio = rational::to_f64(&(p.scalar(40) / big(catalan(40) * 1600u32)));
        Ok(((ratio - 0.5).abs() <= 0.1, format!("{ratio:.4}")))
    });

    r.soft("rose sum P(4) = 3V4^2/rho^2".into(), || {
        let p = rose_polynomial(4)?;
        Ok((p == RosePolynomial::from_terms(4, &[(&[2, 2], 3)]), p.to_string()))
    });

    SelfcheckReport { rows: r.rows }
}
