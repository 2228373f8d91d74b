//! Closed even walks in first-appearance encoding.
//!
//! A walk of `2s` steps starts and ends at the root `1`; each new vertex
//! gets the next unused label. Walks are the terms of the trace expansion
//! of `Tr H^{2s}`, so enumerating them gives both exact moments and the
//! combinatorial counts behind the series coefficients.

mod classify;
mod counting;
mod enumerate;
mod moments;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use classify::{classify, color_vertices, color_vertices_literal, Color, WalkClassification};
pub use counting::{
    count_24star, count_profile, rose_polynomial, rose_weight_sum, verify_coloring_rule, ColoringReport, Profile,
    RosePolynomial, RoseTerm,
};
pub use enumerate::{
    collect_walks, enumerate_walks, par_fold_walks, write_walk_dump, Filter, Step, WalkFilter, WalkIter,
};
pub use moments::{
    census, decompose_moment, exact_moment, falling_factorial, weight_monomial, Census, CensusKey, MomentParams,
    WeightMonomial,
};

/// Default ceiling on `s` for full enumeration.
pub const S_ENUM_MAX: usize = 7;

/// Hard ceiling; labels are stored as bytes.
pub const S_HARD_MAX: usize = 120;

static ENUM_CEILING: AtomicUsize = AtomicUsize::new(S_ENUM_MAX);

/// Ceiling applied by the counting and moment functions.
pub fn enum_ceiling() -> usize {
    ENUM_CEILING.load(Ordering::Relaxed)
}

/// Raises (or lowers) the ceiling; values above [`S_ENUM_MAX`] log a warning
/// when used.
pub fn set_enum_ceiling(s_max: usize) -> Result<()> {
    if s_max < 1 || s_max > S_HARD_MAX {
        return Err(Error::Config(format!("enumeration ceiling must be in 1..={S_HARD_MAX}, got {s_max}")));
    }
    ENUM_CEILING.store(s_max, Ordering::Relaxed);
    Ok(())
}

pub(crate) fn check_enum_range(s: usize, s_max: usize) -> Result<()> {
    if s < 1 || s > s_max || s > S_HARD_MAX {
        return Err(Error::Config(format!("walk half-length must be in 1..={s_max}, got {s}")));
    }
    if s > S_ENUM_MAX {
        log::warn!("enumerating walks with s={s} above the default ceiling {S_ENUM_MAX}; this may take long");
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalWalk {
    letters: Vec<u8>,
}

impl CanonicalWalk {
    /// Validates root endpoints, canonical labeling, no self-loops and even
    /// edge multiplicities.
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        let bad = |why: &str| Error::Contract(format!("not a canonical even walk ({why}): {letters:?}"));
        if letters.len() < 3 || letters.len() % 2 == 0 {
            return Err(bad("length must be 2s+1 with s >= 1"));
        }
        if letters[0] != 1 || *letters.last().unwrap() != 1 {
            return Err(bad("must start and end at 1"));
        }
        let mut seen = 1u32;
        for w in letters.windows(2) {
            if w[0] == w[1] {
                return Err(bad("self-loop step"));
            }
            if w[1] > seen + 1 {
                return Err(bad("label skips ahead"));
            }
            seen = seen.max(w[1]);
        }
        if seen > 255 {
            return Err(bad("too many vertices"));
        }
        let walk = Self { letters: letters.iter().map(|&l| l as u8).collect() };
        if !walk.multiplicities().values().all(|m| m % 2 == 0) {
            return Err(bad("odd edge multiplicity"));
        }
        Ok(walk)
    }

    pub(crate) fn from_bytes_unchecked(letters: Vec<u8>) -> Self {
        Self { letters }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let letters = text
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad walk letter {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn s(&self) -> usize {
        (self.letters.len() - 1) / 2
    }

    pub fn vertex_count(&self) -> usize {
        *self.letters.iter().max().unwrap() as usize
    }

    /// Unordered edge `{a, b}` to its number of traversals.
    pub fn multiplicities(&self) -> std::collections::BTreeMap<(u8, u8), u32> {
        let mut m = std::collections::BTreeMap::new();
        for w in self.letters.windows(2) {
            *m.entry(edge(w[0], w[1])).or_insert(0) += 1;
        }
        m
    }
}

pub(crate) fn edge(a: u8, b: u8) -> (u8, u8) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl fmt::Display for CanonicalWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for CanonicalWalk {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}
