//! Classical baselines: one-round-at-a-time color refinement (1-WL) and a
//! small library of named fixture graphs, including a strongly regular pair
//! that color refinement provably cannot separate.

use std::collections::BTreeMap;

use crate::graph::{Graph, GraphError, WEIGHT_TOL};

/// A stable vertex coloring. Colors are canonical: they are ranks of sorted
/// refinement signatures, so two isomorphic graphs get identical histograms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
    /// Refinement rounds that changed the partition before it stabilized.
    rounds: usize,
}

impl Coloring {
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &c in &self.colors {
            *h.entry(c).or_insert(0usize) += 1;
        }
        h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wl1Outcome {
    /// The stable color histograms differ: definitely not isomorphic.
    Distinguished,
    /// Identical histograms; the test is one-sided and says nothing more.
    Indeterminate,
}

/// Weighted adjacency as (neighbor, weight class) lists. Weight classes are
/// ranks into the sorted distinct weights of all participating graphs, so a
/// shared palette only needs the graphs to be passed together.
fn weighted_adjacency(graphs: &[&Graph]) -> Vec<Vec<Vec<(usize, usize)>>> {
    let mut weights: Vec<f64> = Vec::new();
    for g in graphs {
        let a = g.adjacency();
        for i in 0..g.order() {
            for j in 0..g.order() {
                let w = a[(i, j)];
                if w != 0.0 {
                    weights.push(w);
                }
            }
        }
    }
    weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut classes: Vec<f64> = Vec::new();
    for &w in &weights {
        match classes.last() {
            Some(&last) if (w - last).abs() <= WEIGHT_TOL => {}
            _ => classes.push(w),
        }
    }
    let class_of = |w: f64| -> usize {
        classes
            .binary_search_by(|c| c.partial_cmp(&w).unwrap())
            .unwrap_or_else(|i| {
                // not bit-identical: the neighbor within tolerance
                if i > 0 && (classes[i - 1] - w).abs() <= WEIGHT_TOL {
                    i - 1
                } else {
                    i
                }
            })
    };

    graphs
        .iter()
        .map(|g| {
            let a = g.adjacency();
            (0..g.order())
                .map(|i| {
                    (0..g.order())
                        .filter(|&j| a[(i, j)] != 0.0)
                        .map(|j| (j, class_of(a[(i, j)])))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Core refinement loop over an explicit adjacency structure. Signatures are
/// (own color, sorted multiset of (weight class, neighbor color)); new colors
/// are ranks of sorted distinct signatures, which keeps labels canonical and
/// makes "partition unchanged" the same as "color vector unchanged".
fn refine_colors(adjacency: &[Vec<(usize, usize)>]) -> (Vec<usize>, usize) {
    let n = adjacency.len();
    let mut colors = vec![0usize; n];
    let mut rounds = 0usize;
    loop {
        let mut signatures: Vec<(usize, Vec<(usize, usize)>)> = (0..n)
            .map(|v| {
                let mut nbrs: Vec<(usize, usize)> = adjacency[v]
                    .iter()
                    .map(|&(u, wc)| (wc, colors[u]))
                    .collect();
                nbrs.sort_unstable();
                (colors[v], nbrs)
            })
            .collect();

        let mut distinct = signatures.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let next: Vec<usize> = signatures
            .drain(..)
            .map(|sig| distinct.binary_search(&sig).unwrap())
            .collect();

        if next == colors {
            return (colors, rounds);
        }
        colors = next;
        rounds += 1;
    }
}

/// Stable coloring of a single graph.
pub fn color_refinement(g: &Graph) -> Coloring {
    let adjacency = weighted_adjacency(&[g]).pop().unwrap();
    let (colors, rounds) = refine_colors(&adjacency);
    let num_colors = colors.iter().copied().max().map_or(0, |c| c + 1);
    Coloring { colors, num_colors, rounds }
}

/// 1-WL comparison: refine the disjoint union so both graphs share one color
/// palette, then compare per-graph histograms. One-sided: `Distinguished` is
/// a proof of non-isomorphism, `Indeterminate` proves nothing.
pub fn wl1_compare(g1: &Graph, g2: &Graph) -> Wl1Outcome {
    if g1.order() != g2.order() {
        return Wl1Outcome::Distinguished;
    }
    let adjacencies = weighted_adjacency(&[g1, g2]);
    let m1 = g1.order();
    let mut union: Vec<Vec<(usize, usize)>> = adjacencies[0].clone();
    union.extend(adjacencies[1].iter().map(|nbrs| {
        nbrs.iter().map(|&(u, wc)| (u + m1, wc)).collect::<Vec<_>>()
    }));
    let (colors, _) = refine_colors(&union);

    let mut h1: BTreeMap<usize, usize> = BTreeMap::new();
    let mut h2: BTreeMap<usize, usize> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        if v < m1 {
            *h1.entry(c).or_insert(0) += 1;
        } else {
            *h2.entry(c).or_insert(0) += 1;
        }
    }
    if h1 == h2 {
        Wl1Outcome::Indeterminate
    } else {
        Wl1Outcome::Distinguished
    }
}

/// Named graphs used across tests and benchmarks.
///
/// `shrikhande` and `rook4` are both SRG(16, 6, 2, 2): cospectral, 6-regular,
/// and indistinguishable by color refinement, yet not isomorphic (vertex
/// neighborhoods induce a 6-cycle in one and two triangles in the other).
pub fn fixture(name: &str) -> Result<Graph, GraphError> {
    match name {
        "star5" => {
            let edges: Vec<(usize, usize)> = (1..5).map(|leaf| (0, leaf)).collect();
            Ok(Graph::from_edges(5, &edges)?.with_label("star5"))
        }
        "c4k1" => {
            Ok(Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (0, 3)])?.with_label("c4k1"))
        }
        "petersen" => {
            // vertices are the 2-subsets of {0..4} in lexicographic order,
            // adjacent exactly when disjoint
            let mut subsets = Vec::new();
            for a in 0..5u8 {
                for b in (a + 1)..5 {
                    subsets.push((a, b));
                }
            }
            let mut edges = Vec::new();
            for (i, &(a, b)) in subsets.iter().enumerate() {
                for (j, &(c, d)) in subsets.iter().enumerate().skip(i + 1) {
                    if a != c && a != d && b != c && b != d {
                        edges.push((i, j));
                    }
                }
            }
            Ok(Graph::from_edges(10, &edges)?.with_label("petersen"))
        }
        "rook4" => {
            // vertices (a, b) on a 4x4 grid, adjacent when they share exactly
            // one coordinate
            let idx = |a: usize, b: usize| 4 * a + b;
            let mut edges = Vec::new();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let (u, v) = (idx(a, b), idx(c, d));
                            if u < v && ((a == c) != (b == d)) {
                                edges.push((u, v));
                            }
                        }
                    }
                }
            }
            Ok(Graph::from_edges(16, &edges)?.with_label("rook4"))
        }
        "shrikhande" => {
            // Cayley graph of Z4 x Z4 with connection set
            // {(1,0), (3,0), (0,1), (0,3), (1,1), (3,3)}
            let idx = |a: usize, b: usize| 4 * a + b;
            let diffs = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)];
            let mut edges = Vec::new();
            for a in 0..4 {
                for b in 0..4 {
                    for &(da, db) in &diffs {
                        let (c, d) = ((a + da) % 4, (b + db) % 4);
                        let (u, v) = (idx(a, b), idx(c, d));
                        if u < v {
                            edges.push((u, v));
                        }
                    }
                }
            }
            Ok(Graph::from_edges(16, &edges)?.with_label("shrikhande"))
        }
        other => Err(GraphError::UnknownFixture(other.to_string())),
    }
}

/// The fixture names `fixture` accepts.
pub const FIXTURE_NAMES: [&str; 5] = ["star5", "c4k1", "petersen", "rook4", "shrikhande"];
