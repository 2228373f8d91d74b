use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{enum_ceiling, par_fold_walks, CanonicalWalk, Filter};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Exact inputs of the finite-`n` moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentParams {
    pub n: u64,
    pub rho: Rational,
    /// `V2, V4, V6, ...`: entry `l - 1` is `E a^{2l}`.
    pub moments: Vec<Rational>,
}

impl MomentParams {
    pub fn new(n: u64, rho: Rational, moments: Vec<Rational>) -> Result<Self> {
        let p = Self { n, rho, moments };
        p.validate()?;
        Ok(p)
    }

    /// All even moments equal to 1, as for symmetric `+-1` entries.
    pub fn rademacher(n: u64, rho: Rational, s: usize) -> Result<Self> {
        Self::new(n, rho, vec![Rational::one(); s.max(1)])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if !self.rho.is_positive() || self.rho > rational::int(self.n as i64) {
            return Err(Error::Config(format!(
                "rho must satisfy 0 < rho <= n, got {}",
                rational::to_exact_string(&self.rho)
            )));
        }
        if self.moments.is_empty() {
            return Err(Error::Config("the moment list must contain V2".into()));
        }
        Ok(())
    }

    /// `V_{2l}`.
    pub fn moment(&self, l: u32) -> Result<&Rational> {
        self.moments
            .get(l as usize - 1)
            .ok_or_else(|| Error::Config(format!("moment V{} is required but only {} given", 2 * l, self.moments.len())))
    }

    fn require(&self, s: usize) -> Result<()> {
        self.validate()?;
        if s > 0 {
            self.moment(s as u32)?;
        }
        Ok(())
    }
}

/// Per-edge half-multiplicities and the number of vertices of a walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightMonomial {
    /// Sorted; an edge traversed `2m` times contributes `m`.
    pub half_multiplicities: Vec<u32>,
    pub vertex_count: usize,
}

impl WeightMonomial {
    pub fn of(walk: &CanonicalWalk) -> Result<Self> {
        let mut half = Vec::new();
        for (&e, &m) in &walk.multiplicities() {
            if m % 2 != 0 {
                return Err(Error::Contract(format!("edge {e:?} of {walk} has odd multiplicity {m}")));
            }
            half.push(m / 2);
        }
        half.sort_unstable();
        Ok(Self { half_multiplicities: half, vertex_count: walk.vertex_count() })
    }

    /// `prod_e V_{2m_e} / (rho^{m_e - 1} n)`.
    pub fn evaluate(&self, params: &MomentParams) -> Result<Rational> {
        let n = rational::int(params.n as i64);
        let mut acc = Rational::one();
        for &m in &self.half_multiplicities {
            acc *= params.moment(m)?;
            acc /= rational::pow(&params.rho, m - 1) * &n;
        }
        Ok(acc)
    }
}

/// Expectation of the product of matrix entries along one labeled walk.
pub fn weight_monomial(walk: &CanonicalWalk, params: &MomentParams) -> Result<Rational> {
    WeightMonomial::of(walk)?.evaluate(params)
}

/// `n (n-1) ... (n-k+1)`.
pub fn falling_factorial(n: u64, k: usize) -> BigInt {
    if k as u64 > n {
        return BigInt::zero();
    }
    (0..k as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CensusKey {
    pub monomial: WeightMonomial,
    pub tree_type: bool,
}

/// Number of even walks per weight class, for one `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub s: usize,
    pub classes: BTreeMap<CensusKey, u64>,
}

impl Census {
    pub fn walk_count(&self) -> u64 {
        self.classes.values().sum()
    }

    /// `(tree part, non-tree part)` of the moment.
    pub fn evaluate(&self, params: &MomentParams) -> Result<(Rational, Rational)> {
        let mut tree = Rational::zero();
        let mut non_tree = Rational::zero();
        for (key, &count) in &self.classes {
            let labelings = falling_factorial(params.n, key.monomial.vertex_count);
            let term = key.monomial.evaluate(params)? * Rational::from_integer(labelings * BigInt::from(count));
            if key.tree_type {
                tree += term;
            } else {
                non_tree += term;
            }
        }
        Ok((tree, non_tree))
    }
}

static CENSUS_CACHE: RwLock<BTreeMap<usize, Arc<Census>>> = RwLock::new(BTreeMap::new());

/// Classifies every even walk of `2s` steps by weight. Results are cached
/// per `s`; the cache never changes a value once stored.
pub fn census(s: usize, s_max: usize) -> Result<Arc<Census>> {
    if let Some(c) = CENSUS_CACHE.read().expect("census cache poisoned").get(&s) {
        return Ok(c.clone());
    }
    let classes = par_fold_walks(
        s,
        s_max,
        Filter::All,
        HashMap::new,
        |mut acc: HashMap<CensusKey, u64>, walk| {
            let monomial = WeightMonomial::of(&walk).expect("enumerated walks are even");
            let tree_type = monomial.half_multiplicities.len() + 1 == monomial.vertex_count;
            *acc.entry(CensusKey { monomial, tree_type }).or_insert(0) += 1;
            acc
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    )?;
    let census = Arc::new(Census { s, classes: classes.into_iter().collect() });
    let mut cache = CENSUS_CACHE.write().expect("census cache poisoned");
    Ok(cache.entry(s).or_insert(census).clone())
}

/// `E Tr H^{2s}` for the dilute ensemble at finite `n`, exactly.
pub fn exact_moment(params: &MomentParams, s: usize) -> Result<Rational> {
    let (tree, non_tree) = decompose_moment(params, s)?;
    Ok(tree + non_tree)
}

/// Splits the exact moment into tree-type and non-tree-type walks.
pub fn decompose_moment(params: &MomentParams, s: usize) -> Result<(Rational, Rational)> {
    params.require(s)?;
    if s == 0 {
        return Ok((rational::int(params.n as i64), Rational::zero()));
    }
    census(s, enum_ceiling())?.evaluate(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::walks::S_ENUM_MAX;

    fn p(n: u64, rho: Rational, v: &[i64]) -> MomentParams {
        MomentParams::new(n, rho, v.iter().map(|&x| int(x)).collect()).unwrap()
    }

    #[test]
    fn weights() {
        let params = p(100, int(10), &[1, 3]);
        let w = |s: &str| weight_monomial(&CanonicalWalk::parse(s).unwrap(), &params).unwrap();
        assert_eq!(w("1,2,1"), ratio(1, 100));
        assert_eq!(w("1,2,1,2,1"), ratio(3, 1000));
        assert_eq!(w("1,2,3,2,1"), ratio(1, 10000));
        let short = p(100, int(10), &[1]);
        assert!(matches!(
            weight_monomial(&CanonicalWalk::parse("1,2,1,2,1").unwrap(), &short),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn small_moments() {
        let n = 37u64;
        let rho = ratio(7, 2);
        let v4 = ratio(9, 5);
        let params = MomentParams::new(n, rho.clone(), vec![int(1), v4.clone(), int(3)]).unwrap();
        assert_eq!(exact_moment(&params, 0).unwrap(), int(37));
        assert_eq!(exact_moment(&params, 1).unwrap(), int(36));
        let expect = int(36) * (&v4 / &rho + int(2) * ratio(35, 37));
        assert_eq!(exact_moment(&params, 2).unwrap(), expect);
        assert_eq!(decompose_moment(&params, 2).unwrap(), (expect, int(0)));
        assert_eq!(decompose_moment(&params, 1).unwrap(), (int(36), int(0)));
    }

    #[test]
    fn parameter_errors() {
        assert!(MomentParams::new(1, int(1), vec![int(1)]).is_err());
        assert!(MomentParams::new(10, int(11), vec![int(1)]).is_err());
        assert!(MomentParams::new(10, int(0), vec![int(1)]).is_err());
        assert!(MomentParams::new(10, int(2), vec![]).is_err());
        let params = p(10, int(2), &[1, 1]);
        assert!(matches!(exact_moment(&params, 3), Err(Error::Config(_))));
    }

    #[test]
    fn falling() {
        assert_eq!(falling_factorial(5, 0), BigInt::from(1));
        assert_eq!(falling_factorial(5, 3), BigInt::from(60));
        assert_eq!(falling_factorial(3, 4), BigInt::from(0));
    }

    #[test]
    fn census_totals() {
        assert_eq!(census(4, S_ENUM_MAX).unwrap().walk_count(), 122);
        let c = census(5, S_ENUM_MAX).unwrap();
        let tree: u64 = c.classes.iter().filter(|(k, _)| k.tree_type).map(|(_, v)| v).sum();
        assert_eq!(tree, 303);
    }
}
