//! Catalan-derived counting sequences.
//!
//! Every quantity here is computed exactly. Factorial quotients are checked
//! for exact divisibility, and the sequences that have both a recurrence
//! and a closed form are computed both ways and compared.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Arbitrary-precision non-negative count.
pub type CountValue = BigUint;

static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());
static CATALANS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());

/// `n!`, memoized. The cache only grows; entries are never rewritten.
pub fn factorial(n: usize) -> BigUint {
    if let Some(v) = FACTORIALS.read().expect("factorial cache poisoned").get(n) {
        return v.clone();
    }
    let mut table = FACTORIALS.write().expect("factorial cache poisoned");
    if table.is_empty() {
        table.push(BigUint::one());
    }
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigUint::from(k);
        table.push(next);
    }
    table[n].clone()
}

/// `num / den`, failing if the division leaves a remainder.
pub fn exact_div(num: &BigUint, den: &BigUint, what: &str) -> Result<BigUint> {
    if den.is_zero() {
        return Err(Error::Inconsistency(format!("{what}: division by zero")));
    }
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return Err(Error::Inconsistency(format!("{what}: {num} is not divisible by {den}")));
    }
    Ok(q)
}

/// `(2s)! / ((s-m)! (s+m)!)`, the shape shared by most closed forms here.
fn central_quotient(s: usize, m: usize, what: &str) -> Result<BigUint> {
    exact_div(&factorial(2 * s), &(factorial(s - m) * factorial(s + m)), what)
}

/// Catalan number `t_s = (2s)! / (s! (s+1)!)`.
pub fn catalan(s: usize) -> CountValue {
    if let Some(v) = CATALANS.read().expect("catalan cache poisoned").get(s) {
        return v.clone();
    }
    let value = exact_div(&factorial(2 * s), &(factorial(s) * factorial(s + 1)), "catalan")
        .expect("central binomial divisibility");
    let mut table = CATALANS.write().expect("catalan cache poisoned");
    while table.len() <= s {
        let k = table.len();
        let v = if k == s {
            value.clone()
        } else {
            exact_div(&factorial(2 * k), &(factorial(k) * factorial(k + 1)), "catalan")
                .expect("central binomial divisibility")
        };
        table.push(v);
    }
    value
}

/// `t_0 .. t_n`.
pub fn catalan_table(n: usize) -> Vec<CountValue> {
    (0..=n).map(catalan).collect()
}

/// Number of Catalan trees with `s` edges whose root has degree `d`.
///
/// Computed by the three-term recurrence `t_s^(d) = t_s^(d-1) - t_{s-1}^(d-2)`
/// and by the product closed form; the two must agree.
pub fn catalan_root_degree(s: usize, d: usize) -> Result<CountValue> {
    if d < 1 || d > s {
        return Err(Error::Contract(format!("root degree needs 1 <= d <= s, got s={s}, d={d}")));
    }
    let table = RootDegreeTable::by_recurrence(s)?;
    let rec = table.get(s, d).clone();
    let closed = root_degree_closed_form(s, d)?;
    if rec != closed {
        return Err(Error::Inconsistency(format!(
            "t_{s}^({d}): recurrence gives {rec}, closed form gives {closed}"
        )));
    }
    Ok(rec)
}

/// Rows `t_s^(d)` for `1 <= d <= s <= s_max`, built by the recurrence.
#[derive(Debug, Clone)]
pub struct RootDegreeTable {
    rows: Vec<Vec<BigUint>>,
}

impl RootDegreeTable {
    pub fn by_recurrence(s_max: usize) -> Result<Self> {
        // rows[s][d], index 0 unused.
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::zero()]];
        for s in 1..=s_max {
            let mut row = vec![BigUint::zero(); s + 1];
            row[1] = catalan(s - 1);
            if s >= 2 {
                row[2] = catalan(s - 1);
            }
            for d in 3..=s {
                let a = BigInt::from(row[d - 1].clone());
                let b = BigInt::from(rows[s - 1][d - 2].clone());
                let v = a - b;
                if v.is_negative() {
                    return Err(Error::Inconsistency(format!("t_{s}^({d}) recurrence went negative")));
                }
                row[d] = v.to_biguint().expect("non-negative");
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn s_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, s: usize, d: usize) -> &BigUint {
        &self.rows[s][d]
    }
}

/// Product closed form of `t_s^(d)`, split on the parity of `d`:
/// `(2m-1) t_{s-m} prod_{i<m} (s+1-m-i)/(s+1-i)` for `d = 2m-1` and
/// `m t_{s-m} prod_{i<m} (s-m-i)/(s+1-i)` for `d = 2m`.
pub fn root_degree_closed_form(s: usize, d: usize) -> Result<BigUint> {
    if d < 1 || d > s {
        return Err(Error::Contract(format!("root degree needs 1 <= d <= s, got s={s}, d={d}")));
    }
    let (m, lead, offset) = if d % 2 == 1 {
        let m = (d + 1) / 2;
        (m, 2 * m - 1, s + 1 - m)
    } else {
        let m = d / 2;
        (m, m, s - m)
    };
    let mut num = BigUint::from(lead) * catalan(s - m);
    let mut den = BigUint::one();
    for i in 1..m {
        num *= BigUint::from(offset - i);
        den *= BigUint::from(s + 1 - i);
    }
    exact_div(&num, &den, "root degree closed form")
}

/// Compares recurrence and closed form of `t_s^(d)` on every cell with
/// `s <= s_max`; returns the number of cells checked.
pub fn check_root_degree_agreement(s_max: usize) -> Result<usize> {
    let table = RootDegreeTable::by_recurrence(s_max)?;
    let mut cells = 0;
    for s in 1..=s_max {
        for d in 1..=s {
            let closed = root_degree_closed_form(s, d)?;
            if &closed != table.get(s, d) {
                return Err(Error::Inconsistency(format!(
                    "t_{s}^({d}): recurrence gives {}, closed form gives {closed}",
                    table.get(s, d)
                )));
            }
            cells += 1;
        }
    }
    Ok(cells)
}

/// `T_k^(p) = sum over a_1+..+a_p = k of t_{a_1} ... t_{a_p}`.
///
/// Fails if the value exceeds `4^p t_k`, which holds for every valid input.
pub fn catalan_convolution(k: usize, p: usize) -> Result<CountValue> {
    if p == 0 {
        return Err(Error::Contract("convolution power p must be at least 1".into()));
    }
    let row = convolution_power_row(k, p);
    let value = row[k].clone();
    let bound = BigUint::from(4u32).pow(p as u32) * catalan(k);
    if value > bound {
        return Err(Error::Inconsistency(format!("T_{k}^({p}) = {value} exceeds 4^{p} t_{k}")));
    }
    Ok(value)
}

/// `[T_0^(p), .., T_k^(p)]` by repeated Cauchy convolution of the Catalan
/// sequence.
pub fn convolution_power_row(k: usize, p: usize) -> Vec<BigUint> {
    let t = catalan_table(k);
    let mut acc = vec![BigUint::zero(); k + 1];
    acc[0] = BigUint::one();
    for _ in 0..p {
        let mut next = vec![BigUint::zero(); k + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..=k - i {
                next[i + j] += a * &t[j];
            }
        }
        acc = next;
    }
    acc
}

/// `R_s = 3 (2s-2)! / ((s-2)! (s+1)!)`, the three-fold Catalan convolution.
pub fn r_sequence(s: usize) -> Result<CountValue> {
    if s < 2 {
        return Err(Error::Contract(format!("R_s needs s >= 2, got {s}")));
    }
    let num = BigUint::from(3u32) * factorial(2 * s - 2);
    exact_div(&num, &(factorial(s - 2) * factorial(s + 1)), "R_s")
}

/// Tree-type walks of `2s` steps with one distinguished edge of total
/// multiplicity `2m` and all others of multiplicity 2.
pub fn n_one_multiedge(s: usize, m: usize) -> Result<CountValue> {
    if m < 1 || s < m {
        return Err(Error::Contract(format!("N_s^(1,m) needs s >= m >= 1, got s={s}, m={m}")));
    }
    central_quotient(s, m, "N_s^(1,m)")
}

/// `N_s^(1,2) = s t_s (1 - 3/(s+2))`.
pub fn n_12_closed(s: usize) -> Result<CountValue> {
    if s < 2 {
        return Err(Error::Contract(format!("N_s^(1,2) needs s >= 2, got {s}")));
    }
    let num = BigUint::from(s) * catalan(s) * BigUint::from(s - 1);
    exact_div(&num, &BigUint::from(s + 2), "N_s^(1,2)")
}

/// `(D_k^(m), E_k^(m))` from the coupled recurrences, checked against the
/// closed forms `D = (2k)!/((k-m)!(k+m)!)`, `E = (2k+1)!/((k-m)!(k+m+1)!)`.
pub fn de_recurrence(k: usize, m: usize) -> Result<(CountValue, CountValue)> {
    if m < 1 || k < m {
        return Err(Error::Contract(format!("D/E need k >= m >= 1, got k={k}, m={m}")));
    }
    let mut memo = DeMemo::default();
    let d = memo.d(k, m)?;
    let e = memo.e(k, m)?;
    let (d_closed, e_closed) = de_closed_forms(k, m)?;
    if d != d_closed || e != e_closed {
        return Err(Error::Inconsistency(format!(
            "D/E at (k={k}, m={m}): recurrence ({d}, {e}) vs closed forms ({d_closed}, {e_closed})"
        )));
    }
    Ok((to_count(d, "D")?, to_count(e, "E")?))
}

/// Runs the D/E recurrences once for every `1 <= m <= k <= k_max` and
/// compares with the closed forms; returns the number of pairs checked.
pub fn check_de_agreement(k_max: usize) -> Result<usize> {
    let mut memo = DeMemo::default();
    let mut pairs = 0;
    for k in 1..=k_max {
        for m in 1..=k {
            let (d, e) = (memo.d(k, m)?, memo.e(k, m)?);
            let (dc, ec) = de_closed_forms(k, m)?;
            if d != dc || e != ec {
                return Err(Error::Inconsistency(format!(
                    "D/E at (k={k}, m={m}): recurrence ({d}, {e}) vs closed forms ({dc}, {ec})"
                )));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}

pub fn de_closed_forms(k: usize, m: usize) -> Result<(BigInt, BigInt)> {
    let d = central_quotient(k, m, "D closed form")?;
    let e = exact_div(&factorial(2 * k + 1), &(factorial(k - m) * factorial(k + m + 1)), "E closed form")?;
    Ok((d.into(), e.into()))
}

/// The E closed form exactly as printed alongside the recurrences,
/// `(2k+1)!/((k+1-m)!(k+m)!)`. It equals `E_k^(m-1)`, not `E_k^(m)`.
pub fn e_closed_form_as_printed(k: usize, m: usize) -> Result<BigUint> {
    if m < 1 || k + 1 < m {
        return Err(Error::Contract(format!("needs k+1 >= m >= 1, got k={k}, m={m}")));
    }
    exact_div(&factorial(2 * k + 1), &(factorial(k + 1 - m) * factorial(k + m)), "printed E")
}

fn to_count(v: BigInt, what: &str) -> Result<BigUint> {
    v.to_biguint()
        .ok_or_else(|| Error::Inconsistency(format!("{what} recurrence produced a negative count")))
}

#[derive(Default)]
struct DeMemo {
    d: HashMap<(usize, usize), BigInt>,
    e: HashMap<(usize, usize), BigInt>,
}

impl DeMemo {
    fn d(&mut self, k: usize, m: usize) -> Result<BigInt> {
        if let Some(v) = self.d.get(&(k, m)) {
            return Ok(v.clone());
        }
        let v = if m == 1 {
            BigInt::from(k) * BigInt::from(catalan(k))
        } else {
            self.e(k, m - 1)? - self.d(k, m - 1)?
        };
        self.d.insert((k, m), v.clone());
        Ok(v)
    }

    fn e(&mut self, k: usize, m: usize) -> Result<BigInt> {
        if let Some(v) = self.e.get(&(k, m)) {
            return Ok(v.clone());
        }
        let v = if m == 1 {
            let twice = BigUint::from(k) * catalan(k + 1);
            BigInt::from(exact_div(&twice, &BigUint::from(2u32), "E_k^(1)")?)
        } else {
            self.d(k + 1, m)? - self.e(k, m - 1)?
        };
        self.e.insert((k, m), v.clone());
        Ok(v)
    }
}

/// `4 (2s)! / ((s-4)! (s+4)!)`, the printed count of walks whose two
/// multiplicity-4 edges share a vertex.
pub fn n_hat_22(s: usize) -> Result<CountValue> {
    if s < 4 {
        return Err(Error::Contract(format!("N-hat_s^(2,2) needs s >= 4, got {s}")));
    }
    Ok(BigUint::from(4u32) * central_quotient(s, 4, "N-hat_s^(2,2)")?)
}

/// A rational value kept together with its labeled summands.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTerm {
    pub value: Rational,
    pub components: Vec<(String, Rational)>,
}

impl CorrectionTerm {
    pub fn component(&self, label: &str) -> Option<&Rational> {
        self.components.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }
}

/// Leading terms of the first `1/rho` correction:
/// `4 V4^2/rho (2s)!/((s-4)!(s+4)!) + V6/rho (2s)!/((s-3)!(s+3)!)`.
/// The `o(chi)` remainder is not included.
pub fn first_correction(s: usize, v4: &Rational, v6: &Rational, rho: &Rational) -> Result<CorrectionTerm> {
    if s < 4 {
        return Err(Error::Contract(format!("first correction needs s >= 4, got {s}")));
    }
    if !rho.is_positive() {
        return Err(Error::Contract("rho must be positive".into()));
    }
    let v4_term = Rational::from_integer(n_hat_22(s)?.into()) * v4 * v4 / rho;
    let v6_term = Rational::from_integer(n_one_multiedge(s, 3)?.into()) * v6 / rho;
    Ok(CorrectionTerm {
        value: &v4_term + &v6_term,
        components: vec![("V4^2".into(), v4_term), ("V6".into(), v6_term)],
    })
}

/// One cell of the `4^d t_s^(d) <= 3^d t_s` audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExitDegreeCell {
    pub s: usize,
    pub d: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitDegreeReport {
    pub s_max: usize,
    pub cells_checked: usize,
    pub failures: Vec<ExitDegreeCell>,
}

impl ExitDegreeReport {
    /// `(1, 1)` is the one cell where the bound is false.
    pub fn failures_outside_known_exception(&self) -> Vec<&ExitDegreeCell> {
        self.failures.iter().filter(|c| (c.s, c.d) != (1, 1)).collect()
    }
}

/// Checks `t_s^(d) <= (3/4)^d t_s`, rewritten in integers, for all
/// `1 <= d <= s <= s_max`.
pub fn check_exit_degree_bound(s_max: usize) -> Result<ExitDegreeReport> {
    if s_max < 1 {
        return Err(Error::Contract("s_max must be at least 1".into()));
    }
    let table = RootDegreeTable::by_recurrence(s_max)?;
    let mut failures = Vec::new();
    let mut cells = 0;
    for s in 1..=s_max {
        let ts = catalan(s);
        for d in 1..=s {
            cells += 1;
            let lhs = table.get(s, d) * BigUint::from(4u32).pow(d as u32);
            let rhs = &ts * BigUint::from(3u32).pow(d as u32);
            if lhs > rhs {
                failures.push(ExitDegreeCell { s, d, holds: false });
            }
        }
    }
    Ok(ExitDegreeReport { s_max, cells_checked: cells, failures })
}

/// Exact ratio of two counts as a float, for asymptotic diagnostics.
pub fn count_ratio(num: &BigUint, den: &BigUint) -> f64 {
    crate::rational::to_f64(&Rational::new(num.clone().into(), den.clone().into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Sum over all compositions of `k` into `p` non-negative parts.
    fn brute_convolution(k: usize, p: usize) -> BigUint {
        fn go(k: usize, p: usize, t: &[BigUint]) -> BigUint {
            if p == 1 {
                return t[k].clone();
            }
            (0..=k).map(|a| &t[a] * go(k - a, p - 1, t)).sum()
        }
        go(k, p, &catalan_table(k))
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), n(1));
        assert_eq!(catalan(3), n(5));
        assert_eq!(catalan(6), n(132));
    }

    #[test]
    fn catalan_recurrence_holds() {
        for k in 1..60 {
            let rhs: BigUint = (0..k).map(|j| catalan(k - 1 - j) * catalan(j)).sum();
            assert_eq!(catalan(k), rhs, "k={k}");
        }
    }

    #[test]
    fn root_degree_examples() {
        assert_eq!(catalan_root_degree(3, 3).unwrap(), n(1));
        assert_eq!(catalan_root_degree(5, 2).unwrap(), n(14));
        // t_10^(7) = T_3^(7): compositions of 3 into 7 parts.
        assert_eq!(catalan_root_degree(10, 7).unwrap(), brute_convolution(3, 7));
        assert!(matches!(catalan_root_degree(3, 0), Err(Error::Contract(_))));
        assert!(matches!(catalan_root_degree(3, 4), Err(Error::Contract(_))));
    }

    #[test]
    fn root_degree_is_a_convolution() {
        let table = RootDegreeTable::by_recurrence(14).unwrap();
        for s in 1..=14 {
            for d in 1..=s {
                assert_eq!(table.get(s, d), &brute_convolution(s - d, d), "s={s} d={d}");
            }
        }
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(catalan_convolution(0, 3).unwrap(), n(1));
        assert_eq!(catalan_convolution(1, 3).unwrap(), n(3));
        assert_eq!(catalan_convolution(4, 3).unwrap(), r_sequence(6).unwrap());
        assert_eq!(catalan_convolution(4, 3).unwrap(), brute_convolution(4, 3));
        assert!(catalan_convolution(2, 0).is_err());
    }

    #[test]
    fn r_sequence_examples() {
        assert_eq!(r_sequence(2).unwrap(), n(1));
        assert_eq!(r_sequence(3).unwrap(), n(3));
        assert_eq!(r_sequence(10).unwrap(), brute_convolution(8, 3));
        assert!(r_sequence(1).is_err());
    }

    #[test]
    fn inline_convolution_formula_disagrees_at_small_s() {
        // t_s * 3s / (2(2s-1)): 2 at s=2 and 9/2 at s=3, against R_2 = 1, R_3 = 3.
        let inline = |s: i64| {
            Rational::from_integer(BigInt::from(catalan(s as usize)))
                * Rational::new(BigInt::from(3 * s), BigInt::from(2 * (2 * s - 1)))
        };
        assert_eq!(inline(2), crate::rational::int(2));
        assert_eq!(inline(3), crate::rational::ratio(9, 2));
        assert_ne!(inline(2), Rational::from_integer(r_sequence(2).unwrap().into()));
    }

    #[test]
    fn multiedge_counts() {
        for m in 1..8 {
            assert_eq!(n_one_multiedge(m, m).unwrap(), n(1));
        }
        assert_eq!(n_one_multiedge(2, 2).unwrap(), n(1));
        assert_eq!(n_one_multiedge(4, 3).unwrap(), n(8));
        assert_eq!(n_one_multiedge(4, 2).unwrap(), n(28));
        assert!(n_one_multiedge(2, 3).is_err());
        assert!(n_one_multiedge(2, 0).is_err());
    }

    #[test]
    fn n12_closed_examples() {
        assert_eq!(n_12_closed(2).unwrap(), n(1));
        assert_eq!(n_12_closed(4).unwrap(), n(28));
        assert_eq!(n_12_closed(12).unwrap(), n_one_multiedge(12, 2).unwrap());
    }

    #[test]
    fn de_examples() {
        let (d, _) = de_recurrence(3, 1).unwrap();
        assert_eq!(d, n(15));
        let (_, e) = de_recurrence(1, 1).unwrap();
        assert_eq!(e, n(1));
        // (6, 3): D = 12!/(3! 9!) = 220, E = 13!/(3! 10!) = 286.
        assert_eq!(de_recurrence(6, 3).unwrap(), (n(220), n(286)));
        assert!(de_recurrence(2, 3).is_err());
    }

    #[test]
    fn printed_e_form_is_shifted_by_one() {
        assert_eq!(e_closed_form_as_printed(1, 1).unwrap(), n(3));
        for k in 1..30 {
            for m in 2..=k {
                let (_, e_prev) = de_recurrence(k, m - 1).unwrap();
                assert_eq!(e_closed_form_as_printed(k, m).unwrap(), e_prev);
            }
        }
    }

    #[test]
    fn n_hat_examples() {
        assert_eq!(n_hat_22(4).unwrap(), n(4));
        assert_eq!(n_hat_22(5).unwrap(), n(40));
        assert_eq!(n_hat_22(6).unwrap(), n(264));
        assert!(n_hat_22(3).is_err());
    }

    #[test]
    fn first_correction_examples() {
        use crate::rational::{int, ratio};
        let c = first_correction(4, &int(1), &int(1), &int(1)).unwrap();
        assert_eq!(c.value, int(12));
        assert_eq!(c.component("V4^2"), Some(&int(4)));
        assert_eq!(c.component("V6"), Some(&int(8)));
        let z = first_correction(7, &int(0), &int(0), &int(3)).unwrap();
        assert_eq!(z.value, int(0));
        let (v4, v6, rho) = (ratio(9, 5), int(3), int(10));
        let c6 = first_correction(6, &v4, &v6, &rho).unwrap();
        let n22 = Rational::from_integer(n_hat_22(6).unwrap().into());
        let n13 = Rational::from_integer(n_one_multiedge(6, 3).unwrap().into());
        assert_eq!(c6.component("V4^2").unwrap(), &(n22 * &v4 * &v4 / &rho));
        assert_eq!(c6.component("V6").unwrap(), &(n13 * &v6 / &rho));
        assert!(first_correction(4, &v4, &v6, &int(0)).is_err());
    }

    #[test]
    fn whole_tables() {
        assert_eq!(check_root_degree_agreement(60).unwrap(), 60 * 61 / 2);
        assert_eq!(check_de_agreement(40).unwrap(), 40 * 41 / 2);
    }

    #[test]
    fn exit_degree_audit() {
        let report = check_exit_degree_bound(40).unwrap();
        assert_eq!(report.cells_checked, 40 * 41 / 2);
        assert_eq!(report.failures, vec![ExitDegreeCell { s: 1, d: 1, holds: false }]);
        assert!(report.failures_outside_known_exception().is_empty());
        // (5, 5): 4^5 * 1 <= 3^5 * 42.
        assert_eq!(catalan_root_degree(5, 5).unwrap(), n(1));
        // (8, 3) by the integer inequality.
        let t83 = catalan_root_degree(8, 3).unwrap();
        assert!(t83.clone() * n(64) <= catalan(8) * n(27), "t_8^(3) = {t83}");
    }
}
