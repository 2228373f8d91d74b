use std::io::Write;

use rayon::prelude::*;

use super::{check_enum_range, edge, CanonicalWalk};
use crate::error::{Error, Result};

/// One extension of a partial walk, as seen by a filter.
#[derive(Debug, Clone, Copy)]
pub struct Step<'a> {
    /// Letters up to and including the step's endpoint.
    pub prefix: &'a [u8],
    pub from: u8,
    pub to: u8,
    /// Traversals of `{from, to}` so far, this step included.
    pub edge_multiplicity: u8,
    pub new_vertex: bool,
    pub s: usize,
}

/// Predicate on partial and complete walks. `accept_step` must only reject
/// prefixes that have no accepted completion.
pub trait WalkFilter: Sync {
    fn name(&self) -> &str;

    fn accept_step(&self, _step: &Step<'_>) -> bool {
        true
    }

    fn accept(&self, _walk: &CanonicalWalk) -> bool {
        true
    }
}

/// Named filters used by the counting code and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    All,
    /// Acyclic skeleton.
    TreeType,
    /// Tree-type with every multiplicity equal to 2.
    Catalan,
    /// Tree-type with multiplicities in {2, 4}.
    TwoFour,
    /// Every step touches the root and every multiplicity is at least 4.
    Rose,
}

impl Filter {
    pub const NAMES: [&'static str; 5] = ["all", "tree", "catalan", "two-four", "rose"];

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "all" => Filter::All,
            "tree" => Filter::TreeType,
            "catalan" => Filter::Catalan,
            "two-four" => Filter::TwoFour,
            "rose" => Filter::Rose,
            _ => {
                return Err(Error::Config(format!(
                    "unknown walk filter {name:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

impl WalkFilter for Filter {
    fn name(&self) -> &str {
        match self {
            Filter::All => "all",
            Filter::TreeType => "tree",
            Filter::Catalan => "catalan",
            Filter::TwoFour => "two-four",
            Filter::Rose => "rose",
        }
    }

    fn accept_step(&self, step: &Step<'_>) -> bool {
        // A first traversal into an old vertex closes a cycle.
        let acyclic = step.new_vertex || step.edge_multiplicity > 1;
        match self {
            Filter::All => true,
            Filter::TreeType => acyclic,
            Filter::Catalan => acyclic && step.edge_multiplicity <= 2,
            Filter::TwoFour => acyclic && step.edge_multiplicity <= 4,
            Filter::Rose => step.from == 1 || step.to == 1,
        }
    }

    fn accept(&self, walk: &CanonicalWalk) -> bool {
        match self {
            Filter::Rose => walk.multiplicities().values().all(|&m| m >= 4),
            Filter::TwoFour => walk.multiplicities().values().all(|&m| m == 2 || m == 4),
            _ => true,
        }
    }
}

impl<F: WalkFilter + ?Sized> WalkFilter for &F {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn accept_step(&self, step: &Step<'_>) -> bool {
        (**self).accept_step(step)
    }
    fn accept(&self, walk: &CanonicalWalk) -> bool {
        (**self).accept(walk)
    }
}

/// Depth-first enumeration of canonical even walks, in lexicographic order.
///
/// The search stops extending a prefix when more edges have odd multiplicity
/// than steps remain, or when the filter rejects the last step. Vertex
/// labels never exceed `s + 1`.
pub struct WalkIter<F> {
    s: usize,
    target: usize,
    floor: usize,
    filter: F,
    width: usize,
    letters: Vec<u8>,
    mult: Vec<u8>,
    odd: usize,
    vertices: Vec<u8>,
    next_candidate: Vec<u8>,
    done: bool,
}

impl<F: WalkFilter> WalkIter<F> {
    fn with_prefix(s: usize, target: usize, prefix: &[u8], filter: F) -> Self {
        let width = s + 2;
        let mut it = Self {
            s,
            target,
            floor: prefix.len() - 1,
            filter,
            width,
            letters: vec![1],
            mult: vec![0; width * width],
            odd: 0,
            vertices: vec![1],
            next_candidate: vec![1],
            done: false,
        };
        for &l in &prefix[1..] {
            it.push(l);
        }
        it
    }

    fn cell(&self, a: u8, b: u8) -> usize {
        let (a, b) = edge(a, b);
        a as usize * self.width + b as usize
    }

    fn push(&mut self, to: u8) {
        let from = *self.letters.last().unwrap();
        let c = self.cell(from, to);
        self.mult[c] += 1;
        if self.mult[c] % 2 == 1 {
            self.odd += 1;
        } else {
            self.odd -= 1;
        }
        let nv = *self.vertices.last().unwrap();
        self.letters.push(to);
        self.vertices.push(nv.max(to));
        self.next_candidate.push(1);
    }

    fn pop(&mut self) {
        let to = self.letters.pop().unwrap();
        let from = *self.letters.last().unwrap();
        let c = self.cell(from, to);
        if self.mult[c] % 2 == 1 {
            self.odd -= 1;
        } else {
            self.odd += 1;
        }
        self.mult[c] -= 1;
        self.vertices.pop();
        self.next_candidate.pop();
    }

    /// Tries candidates at the current depth; returns whether one was pushed.
    fn advance(&mut self) -> bool {
        let t = self.letters.len() - 1;
        let cur = self.letters[t];
        let nv = self.vertices[t];
        let max_label = (nv as usize + 1).min(self.s + 1) as u8;
        let remaining = 2 * self.s - (t + 1);
        let mut c = self.next_candidate[t];
        while c <= max_label {
            let cand = c;
            c += 1;
            if cand == cur {
                continue;
            }
            self.next_candidate[t] = c;
            self.push(cand);
            let accepted = self.odd <= remaining && {
                let m = self.mult[self.cell(cur, cand)];
                let step = Step {
                    prefix: &self.letters,
                    from: cur,
                    to: cand,
                    edge_multiplicity: m,
                    new_vertex: cand > nv,
                    s: self.s,
                };
                self.filter.accept_step(&step)
            };
            if accepted {
                return true;
            }
            self.pop();
        }
        self.next_candidate[t] = c;
        false
    }

    fn next_letters(&mut self) -> Option<Vec<u8>> {
        loop {
            if self.done {
                return None;
            }
            let t = self.letters.len() - 1;
            if t == self.target {
                let out = self.letters.clone();
                if t == self.floor {
                    self.done = true;
                } else {
                    self.pop();
                }
                return Some(out);
            }
            if !self.advance() {
                if t == self.floor {
                    self.done = true;
                } else {
                    self.pop();
                }
            }
        }
    }
}

impl<F: WalkFilter> Iterator for WalkIter<F> {
    type Item = CanonicalWalk;

    fn next(&mut self) -> Option<CanonicalWalk> {
        while let Some(letters) = self.next_letters() {
            let walk = CanonicalWalk::from_bytes_unchecked(letters);
            if self.filter.accept(&walk) {
                return Some(walk);
            }
        }
        None
    }
}

/// Streams every canonical even walk of `2s` steps accepted by `filter`.
/// `s_max` is the configured enumeration ceiling.
pub fn enumerate_walks<F: WalkFilter>(s: usize, s_max: usize, filter: F) -> Result<WalkIter<F>> {
    check_enum_range(s, s_max)?;
    Ok(WalkIter::with_prefix(s, 2 * s, &[1], filter))
}

pub fn collect_walks<F: WalkFilter>(s: usize, s_max: usize, filter: F) -> Result<Vec<CanonicalWalk>> {
    Ok(enumerate_walks(s, s_max, filter)?.collect())
}

/// Prefix depth used to split the search across threads.
fn split_depth(s: usize) -> usize {
    (2 * s).saturating_sub(1).min(4)
}

/// Folds every accepted walk, one fold per DFS prefix, and combines the
/// per-prefix results in prefix order.
pub fn par_fold_walks<F, T, Fold, Merge>(
    s: usize,
    s_max: usize,
    filter: F,
    init: impl Fn() -> T + Sync,
    fold: Fold,
    merge: Merge,
) -> Result<T>
where
    F: WalkFilter + Copy + Send,
    T: Send,
    Fold: Fn(T, CanonicalWalk) -> T + Sync,
    Merge: Fn(T, T) -> T + Sync,
{
    check_enum_range(s, s_max)?;
    let depth = split_depth(s);
    let mut prefixes = Vec::new();
    let mut it = WalkIter::with_prefix(s, depth, &[1], filter);
    while let Some(p) = it.next_letters() {
        prefixes.push(p);
    }
    let parts: Vec<T> = prefixes
        .par_iter()
        .map(|p| WalkIter::with_prefix(s, 2 * s, p, filter).fold(init(), &fold))
        .collect();
    Ok(parts.into_iter().fold(init(), merge))
}

/// Header `# s=<s> filter=<name>` then one comma-separated walk per line.
pub fn write_walk_dump<W: Write, F: WalkFilter>(mut out: W, s: usize, s_max: usize, filter: F) -> Result<usize> {
    writeln!(out, "# s={s} filter={}", filter.name())?;
    let mut n = 0;
    for walk in enumerate_walks(s, s_max, &filter)? {
        writeln!(out, "{walk}")?;
        n += 1;
    }
    Ok(n)
}
