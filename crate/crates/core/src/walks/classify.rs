use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{edge, CanonicalWalk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Color {
    BlueR,
    GreenP,
    RedQ,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkClassification {
    pub edge_multiplicities: BTreeMap<(u8, u8), u32>,
    /// `+1` for a marked step (odd multiplicity after it), `-1` otherwise.
    pub dyck: Vec<i8>,
    /// Marked arrivals per vertex; the root counts its arrival at time 0.
    pub kappa: BTreeMap<u8, u32>,
    pub is_even: bool,
    pub is_tree_type: bool,
    pub four_edge_count: usize,
    /// Multiplicity-4 edges pairwise share no endpoint.
    pub four_edges_disjoint: bool,
    pub colors: BTreeMap<u8, Color>,
    /// Largest number of distinct marked edges leaving a single vertex.
    pub max_exit_degree: usize,
}

/// Times of marked steps and marked arrivals per vertex.
struct Marks {
    marked: Vec<bool>,
    arrivals: HashMap<u8, Vec<usize>>,
    first_marked: HashMap<(u8, u8), usize>,
}

fn marks(walk: &CanonicalWalk) -> Marks {
    let l = walk.letters();
    let mut count: HashMap<(u8, u8), u32> = HashMap::new();
    let mut marked = vec![false; l.len()];
    let mut arrivals: HashMap<u8, Vec<usize>> = HashMap::new();
    let mut first_marked = HashMap::new();
    arrivals.insert(1, vec![0]);
    for t in 1..l.len() {
        let e = edge(l[t - 1], l[t]);
        let c = count.entry(e).or_insert(0);
        *c += 1;
        if *c % 2 == 1 {
            marked[t] = true;
            arrivals.entry(l[t]).or_default().push(t);
            first_marked.entry(e).or_insert(t);
        }
    }
    Marks { marked, arrivals, first_marked }
}

/// Blue or red for a vertex whose deciding arrival at time `t2` comes from `g`.
fn blue_or_red(l: &[u8], m: &Marks, v: u8, t2: usize) -> Color {
    let g = l[t2 - 1];
    let tm = m.first_marked[&edge(g, v)];
    if tm == t2 {
        return Color::BlueR;
    }
    // The edge was first traversed v -> g, i.e. as an arrival at g.
    let j = m.arrivals[&g].iter().position(|&t| t == tm).expect("marked arrival at g") + 1;
    if j <= 2 {
        Color::RedQ
    } else {
        Color::BlueR
    }
}

/// Colors every vertex with at least two marked arrivals.
///
/// The base edge of a vertex is the one it was first reached by (none for
/// the root, whose first arrival is the mute one at time 0). Arrivals
/// through the base edge again leave the vertex green. Otherwise the first
/// marked arrival through another edge decides: blue if that arrival is
/// the first marked traversal of its edge, red if the edge was first
/// marked as one of the first two arrivals at the other endpoint, and blue
/// again past that.
pub fn color_vertices(walk: &CanonicalWalk) -> BTreeMap<u8, Color> {
    let l = walk.letters();
    let m = marks(walk);
    let mut out = BTreeMap::new();
    for (&v, ts) in &m.arrivals {
        if ts.len() < 2 {
            continue;
        }
        let base = if v == 1 { None } else { Some(l[ts[0] - 1]) };
        let color = match ts[1..].iter().find(|&&t| Some(l[t - 1]) != base) {
            None => Color::GreenP,
            Some(&t2) => blue_or_red(l, &m, v, t2),
        };
        out.insert(v, color);
    }
    out
}

/// The rule applied to the second marked arrival only, whatever edge it
/// uses. Differs from [`color_vertices`] when a vertex is re-entered
/// through its base edge before any other edge.
pub fn color_vertices_literal(walk: &CanonicalWalk) -> BTreeMap<u8, Color> {
    let l = walk.letters();
    let m = marks(walk);
    let mut out = BTreeMap::new();
    for (&v, ts) in &m.arrivals {
        if ts.len() < 2 {
            continue;
        }
        let t2 = ts[1];
        let color = if v != 1 && l[t2 - 1] == l[ts[0] - 1] {
            Color::GreenP
        } else {
            blue_or_red(l, &m, v, t2)
        };
        out.insert(v, color);
    }
    out
}

pub fn classify(walk: &CanonicalWalk) -> WalkClassification {
    let l = walk.letters();
    let m = marks(walk);
    let mult = walk.multiplicities();
    let dyck = m.marked[1..].iter().map(|&b| if b { 1 } else { -1 }).collect();
    let kappa = m.arrivals.iter().map(|(&v, ts)| (v, ts.len() as u32)).collect();
    let is_even = mult.values().all(|c| c % 2 == 0);
    let is_tree_type = mult.len() + 1 == walk.vertex_count();
    let fours: Vec<(u8, u8)> = mult.iter().filter(|(_, &c)| c == 4).map(|(&e, _)| e).collect();
    let ends: BTreeSet<u8> = fours.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut exits: HashMap<u8, BTreeSet<u8>> = HashMap::new();
    for t in 1..l.len() {
        if m.marked[t] {
            exits.entry(l[t - 1]).or_default().insert(l[t]);
        }
    }
    WalkClassification {
        four_edge_count: fours.len(),
        four_edges_disjoint: ends.len() == 2 * fours.len(),
        edge_multiplicities: mult,
        dyck,
        kappa,
        is_even,
        is_tree_type,
        colors: color_vertices(walk),
        max_exit_degree: exits.values().map(BTreeSet::len).max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> CanonicalWalk {
        CanonicalWalk::parse(s).unwrap()
    }

    const W16: &str = "1,2,3,4,3,5,1,2,3,4,3,2,3,2,3,5,1";

    #[test]
    fn single_edge() {
        let c = classify(&w("1,2,1,2,1"));
        assert_eq!(c.edge_multiplicities.into_iter().collect::<Vec<_>>(), vec![((1, 2), 4)]);
        assert!(c.is_tree_type && c.is_even);
        assert_eq!(c.four_edge_count, 1);
        assert_eq!(c.dyck, vec![1, -1, 1, -1]);
        // Both arrivals at 2 are marked and come through its base edge.
        assert_eq!(c.kappa[&2], 2);
        assert_eq!(c.kappa[&1], 1);
        assert_eq!(c.colors.into_iter().collect::<Vec<_>>(), vec![(2, Color::GreenP)]);
    }

    #[test]
    fn path() {
        let c = classify(&w("1,2,3,2,1"));
        assert_eq!(c.edge_multiplicities.len(), 2);
        assert!(c.edge_multiplicities.values().all(|&m| m == 2));
        assert!(c.is_tree_type);
        assert_eq!(c.four_edge_count, 0);
        assert_eq!(c.max_exit_degree, 1);
    }

    #[test]
    fn w16_example() {
        let walk = w(W16);
        let c = classify(&walk);
        assert!(!c.is_tree_type);
        assert_eq!(c.colors.get(&1), Some(&Color::BlueR));
        assert_eq!(c.colors.get(&2), Some(&Color::RedQ));
        assert_eq!(c.colors.get(&4), Some(&Color::GreenP));
        assert_eq!(c.colors.len(), 3);
        assert_eq!(color_vertices_literal(&walk), c.colors);
    }

    #[test]
    fn readings_differ_on_base_reentry() {
        let walk = w("1,2,1,2,1,3,2,1,2,3,1");
        let adopted = color_vertices(&walk);
        let literal = color_vertices_literal(&walk);
        assert_ne!(adopted, literal);
        assert!(adopted.values().any(|&c| c == Color::BlueR));
        assert!(literal.values().any(|&c| c == Color::RedQ));
        assert!(!literal.values().any(|&c| c == Color::BlueR));
    }

    #[test]
    fn four_edge_adjacency() {
        let c = classify(&w("1,2,1,2,3,2,3,2,1"));
        assert_eq!(c.four_edge_count, 2);
        assert!(!c.four_edges_disjoint);
        let d = classify(&w("1,2,1,2,1,3,4,3,4,3,1"));
        assert_eq!(d.four_edge_count, 2);
        assert!(d.four_edges_disjoint);
    }
}
