use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::classify::{color_vertices, color_vertices_literal, Color};
use super::enumerate::{par_fold_walks, Filter, Step, WalkFilter};
use super::moments::MomentParams;
use super::{enum_ceiling, CanonicalWalk};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::UPolynomial;

/// `[u^p]` counts tree-type walks with multiplicities in {2, 4} and exactly
/// `p` pairwise vertex-disjoint multiplicity-4 edges.
pub fn count_24star(s: usize) -> Result<UPolynomial> {
    let counts = par_fold_walks(
        s,
        enum_ceiling(),
        Filter::TwoFour,
        Vec::<u64>::new,
        |mut acc, walk| {
            let fours: Vec<(u8, u8)> =
                walk.multiplicities().into_iter().filter(|&(_, m)| m == 4).map(|(e, _)| e).collect();
            let ends: BTreeSet<u8> = fours.iter().flat_map(|&(a, b)| [a, b]).collect();
            if ends.len() == 2 * fours.len() {
                if acc.len() <= fours.len() {
                    acc.resize(fours.len() + 1, 0);
                }
                acc[fours.len()] += 1;
            }
            acc
        },
        |mut a, b| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )?;
    Ok(UPolynomial::from_coeffs(counts.into_iter().map(|c| rational::int(c as i64)).collect()))
}

/// Multiplicity profiles understood by [`count_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// One distinguished edge of multiplicity `2m`, every other edge 2.
    /// Counts (walk, edge) pairs, so `m = 1` gives `s` per walk.
    OneEdge { m: u32 },
    /// Exactly two multiplicity-4 edges with a common vertex, rest 2.
    TwoFourSharing,
    /// Exactly two multiplicity-4 edges, adjacent or not, rest 2.
    TwoFourAny,
}

impl Profile {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "unknown profile {text:?}; expected one-edge:<m>, two-four-sharing or two-four-any"
            ))
        };
        match text {
            "two-four-sharing" => Ok(Profile::TwoFourSharing),
            "two-four-any" => Ok(Profile::TwoFourAny),
            _ => {
                let m: u32 = text.strip_prefix("one-edge:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                Ok(Profile::OneEdge { m })
            }
        }
    }

    fn max_multiplicity(self) -> u32 {
        match self {
            Profile::OneEdge { m } => 2 * m,
            _ => 4,
        }
    }

    /// Number of distinguished edges of `walk` matching the profile.
    fn matches(self, walk: &CanonicalWalk) -> u64 {
        let mult = walk.multiplicities();
        let (big, rest): (Vec<_>, Vec<_>) = mult.iter().partition(|(_, &m)| m > 2);
        if !rest.iter().all(|(_, &m)| m == 2) {
            return 0;
        }
        match self {
            Profile::OneEdge { m: 1 } => {
                if big.is_empty() {
                    mult.len() as u64
                } else {
                    0
                }
            }
            Profile::OneEdge { m } => u64::from(big.len() == 1 && *big[0].1 == 2 * m),
            Profile::TwoFourSharing | Profile::TwoFourAny => {
                if big.len() != 2 || big.iter().any(|(_, &m)| m != 4) {
                    return 0;
                }
                let ends: BTreeSet<u8> = big.iter().flat_map(|(&(a, b), _)| [a, b]).collect();
                u64::from(self == Profile::TwoFourAny || ends.len() < 4)
            }
        }
    }
}

#[derive(Clone, Copy)]
struct TreeUpTo(u32);

impl WalkFilter for TreeUpTo {
    fn name(&self) -> &str {
        "tree-bounded"
    }

    fn accept_step(&self, step: &Step<'_>) -> bool {
        (step.new_vertex || step.edge_multiplicity > 1) && u32::from(step.edge_multiplicity) <= self.0
    }
}

/// Counts tree-type walks of `2s` steps matching `profile`.
pub fn count_profile(s: usize, profile: Profile) -> Result<BigUint> {
    let total = par_fold_walks(
        s,
        enum_ceiling(),
        TreeUpTo(profile.max_multiplicity()),
        || 0u64,
        |acc, walk| acc + profile.matches(&walk),
        |a, b| a + b,
    )?;
    Ok(BigUint::from(total))
}

/// One class of rose walks: the sorted half-multiplicities of the edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoseTerm {
    pub half_multiplicities: Vec<u32>,
    pub count: u64,
}

impl RoseTerm {
    fn rho_power(&self) -> u32 {
        self.half_multiplicities.iter().map(|m| m - 1).sum()
    }
}

/// `sum_W pi(W)` kept symbolic in `V_{2l}` and `rho`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RosePolynomial {
    pub m: usize,
    pub terms: Vec<RoseTerm>,
}

impl RosePolynomial {
    /// Builds the polynomial from `(half-multiplicities, count)` pairs.
    pub fn from_terms(m: usize, terms: &[(&[u32], u64)]) -> Self {
        let mut map: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (h, c) in terms {
            let mut h = h.to_vec();
            h.sort_unstable();
            *map.entry(h).or_insert(0) += c;
        }
        Self::from_map(m, map)
    }

    fn from_map(m: usize, map: BTreeMap<Vec<u32>, u64>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(half_multiplicities, count)| RoseTerm { half_multiplicities, count })
            .collect();
        Self { m, terms }
    }

    /// `prod_e V_{2m_e} / rho^{m_e - 1}` summed over walks, without the
    /// `1/n` factors.
    pub fn evaluate(&self, params: &MomentParams) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in &self.terms {
            let mut w = rational::int(t.count as i64);
            for &h in &t.half_multiplicities {
                w *= params.moment(h)?;
            }
            total += w / rational::pow(&params.rho, t.rho_power());
        }
        Ok(total)
    }
}

impl fmt::Display for RosePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.count != 1 {
                write!(f, "{}*", t.count)?;
            }
            let mut powers: BTreeMap<u32, u32> = BTreeMap::new();
            for &h in &t.half_multiplicities {
                *powers.entry(h).or_insert(0) += 1;
            }
            let factors: Vec<String> = powers
                .iter()
                .map(|(&h, &e)| if e == 1 { format!("V{}", 2 * h) } else { format!("V{}^{e}", 2 * h) })
                .collect();
            f.write_str(&factors.join("*"))?;
            match t.rho_power() {
                0 => {}
                1 => f.write_str("/rho")?,
                r => write!(f, "/rho^{r}")?,
            }
        }
        Ok(())
    }
}

/// Walks of `2m` steps whose edges all touch the root and are traversed at
/// least four times, grouped by weight.
pub fn rose_polynomial(m: usize) -> Result<RosePolynomial> {
    let map = par_fold_walks(
        m,
        enum_ceiling(),
        Filter::Rose,
        BTreeMap::<Vec<u32>, u64>::new,
        |mut acc, walk| {
            let mut h: Vec<u32> = walk.multiplicities().values().map(|&x| x / 2).collect();
            h.sort_unstable();
            *acc.entry(h).or_insert(0) += 1;
            acc
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    )?;
    Ok(RosePolynomial::from_map(m, map))
}

pub fn rose_weight_sum(m: usize, params: &MomentParams) -> Result<Rational> {
    rose_polynomial(m)?.evaluate(params)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ColoringReport {
    pub s: usize,
    pub walks_checked: u64,
    pub walks_with_red: u64,
    /// Walks with a red vertex and no blue vertex.
    pub counterexamples: Vec<CanonicalWalk>,
    /// Walks colored differently by the second-arrival-only reading.
    pub ambiguous: u64,
    /// Counterexamples under the second-arrival-only reading.
    pub literal_counterexamples: u64,
    /// Walks where "has no blue vertex" and "is tree-type" disagree.
    pub tree_blue_mismatches: u64,
}

impl ColoringReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn merge(mut self, other: Self) -> Self {
        self.walks_checked += other.walks_checked;
        self.walks_with_red += other.walks_with_red;
        self.counterexamples.extend(other.counterexamples);
        self.ambiguous += other.ambiguous;
        self.literal_counterexamples += other.literal_counterexamples;
        self.tree_blue_mismatches += other.tree_blue_mismatches;
        self
    }
}

fn red_without_blue(colors: &BTreeMap<u8, Color>) -> bool {
    colors.values().any(|&c| c == Color::RedQ) && !colors.values().any(|&c| c == Color::BlueR)
}

/// Every walk with a red vertex must also have a blue one.
pub fn verify_coloring_rule(s: usize) -> Result<ColoringReport> {
    let mut report = par_fold_walks(
        s,
        enum_ceiling(),
        Filter::All,
        ColoringReport::default,
        |mut acc, walk| {
            let colors = color_vertices(&walk);
            let literal = color_vertices_literal(&walk);
            acc.walks_checked += 1;
            if colors.values().any(|&c| c == Color::RedQ) {
                acc.walks_with_red += 1;
            }
            if red_without_blue(&colors) {
                acc.counterexamples.push(walk.clone());
            }
            if colors != literal {
                acc.ambiguous += 1;
            }
            if red_without_blue(&literal) {
                acc.literal_counterexamples += 1;
            }
            let tree = walk.multiplicities().len() + 1 == walk.vertex_count();
            let no_blue = !colors.values().any(|&c| c == Color::BlueR);
            if tree != no_blue {
                acc.tree_blue_mismatches += 1;
            }
            acc
        },
        ColoringReport::merge,
    )?;
    report.s = s;
    Ok(report)
}
