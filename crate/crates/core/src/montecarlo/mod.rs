//! Seeded simulation of the dilute ensemble.
//!
//! Each off-diagonal pair `{i, j}` is present with probability `rho/n` and
//! then carries `a_ij / sqrt(rho)`, with `a_ij` drawn from a bounded
//! symmetric law normalized to `E a^2 = 1`. Sample `k` is generated from its
//! own ChaCha stream, so results do not depend on thread count.

mod compare;
mod sample;
mod spectral;
mod stats;

use num_traits::{One, Signed};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use compare::{
    compare_asymptotic, estimate_moments, mc_json, mc_rows, write_mc_csv, CompareRow, McRow, MomentEstimate, MC_CSV_HEADER,
};
pub use sample::{sample_matrix, trace_powers, N_DENSE_MAX};
pub use spectral::{default_chi, spectral_norm_bound, spectral_norm_study, write_lambda_dump, BoundRow, SpectralSummary};
pub use stats::{pairwise_sum, MeanStderr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryDist {
    /// `+-1`.
    Rademacher,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    Uniform,
    /// `+-1/sqrt(q)` with probability `q`, else 0; `q` in `(0, 1]`.
    TwoPoint { q: Rational },
}

impl EntryDist {
    pub fn parse(name: &str, q: Option<&Rational>) -> Result<Self> {
        let d = match name {
            "rademacher" => EntryDist::Rademacher,
            "uniform" => EntryDist::Uniform,
            "two-point" => EntryDist::TwoPoint {
                q: q.cloned().ok_or_else(|| Error::Config("two-point needs a parameter q".into()))?,
            },
            _ => {
                return Err(Error::Config(format!(
                    "unknown distribution {name:?}; expected rademacher, uniform or two-point"
                )))
            }
        };
        d.validate()?;
        Ok(d)
    }

    pub fn name(&self) -> &'static str {
        match self {
            EntryDist::Rademacher => "rademacher",
            EntryDist::Uniform => "uniform",
            EntryDist::TwoPoint { .. } => "two-point",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let EntryDist::TwoPoint { q } = self {
            if !q.is_positive() || q > &Rational::one() {
                return Err(Error::Config(format!(
                    "two-point parameter must be in (0, 1], got {}",
                    rational::to_exact_string(q)
                )));
            }
        }
        Ok(())
    }

    /// `V_{2l} = E a^{2l}`.
    pub fn moment(&self, l: u32) -> Rational {
        match self {
            EntryDist::Rademacher => Rational::one(),
            EntryDist::Uniform => rational::pow(&rational::int(3), l) / rational::int(2 * l as i64 + 1),
            EntryDist::TwoPoint { q } => rational::pow(&(Rational::one() / q), l - 1),
        }
    }

    /// `[V2, V4, ..., V_{2count}]`.
    pub fn moments(&self, count: usize) -> Vec<Rational> {
        (1..=count as u32).map(|l| self.moment(l)).collect()
    }

    pub fn v4(&self) -> Rational {
        self.moment(2)
    }

    /// Almost-sure bound `U` on `|a|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            EntryDist::Rademacher => 1.0,
            EntryDist::Uniform => 3f64.sqrt(),
            EntryDist::TwoPoint { q } => 1.0 / rational::to_f64(q).sqrt(),
        }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            EntryDist::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDist::Uniform => (2.0 * rng.random::<f64>() - 1.0) * 3f64.sqrt(),
            EntryDist::TwoPoint { q } => {
                let q = rational::to_f64(q);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                if rng.random::<f64>() < q {
                    sign / q.sqrt()
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n: usize,
    pub rho: Rational,
    pub dist: EntryDist,
    pub master_seed: u64,
    pub samples: usize,
}

impl EnsembleConfig {
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
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        self.dist.validate()
    }

    pub fn rho_f64(&self) -> f64 {
        rational::to_f64(&self.rho)
    }

    /// Probability that a given off-diagonal pair is present.
    pub fn edge_probability(&self) -> f64 {
        (self.rho_f64() / self.n as f64).min(1.0)
    }

    /// `u = V4 / rho`.
    pub fn u(&self) -> Rational {
        self.dist.v4() / &self.rho
    }
}
