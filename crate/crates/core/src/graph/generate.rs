//! Seeded graph generators. A fixed (model, order, seed) triple always yields
//! the same graph, independent of platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, Permutation};

#[derive(Clone, Debug, PartialEq)]
pub enum GraphModel {
    ErdosRenyi { p: f64 },
    RandomRegular { degree: usize },
    Complete,
    Path,
    Cycle,
    Star,
}

pub fn generate(model: &GraphModel, m: usize, seed: u64) -> Result<Graph, GraphError> {
    if m == 0 {
        return Err(GraphError::Infeasible("order must be at least 1".into()));
    }
    match *model {
        GraphModel::ErdosRenyi { p } => erdos_renyi(m, p, seed),
        GraphModel::RandomRegular { degree } => random_regular(m, degree, seed),
        GraphModel::Complete => {
            let mut a = DMatrix::from_element(m, m, 1.0);
            a.fill_diagonal(0.0);
            Graph::from_adjacency(a)
        }
        GraphModel::Path => {
            Graph::from_edges(m, &(1..m).map(|i| (i - 1, i)).collect::<Vec<_>>())
        }
        GraphModel::Cycle => {
            if m < 3 {
                return Err(GraphError::Infeasible(format!("cycle needs order >= 3, got {m}")));
            }
            let mut edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
            edges.push((m - 1, 0));
            Graph::from_edges(m, &edges)
        }
        GraphModel::Star => {
            Graph::from_edges(m, &(1..m).map(|i| (0, i)).collect::<Vec<_>>())
        }
    }
}

fn erdos_renyi(m: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::Infeasible(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            if rng.gen::<f64>() < p {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
        }
    }
    Graph::from_adjacency(a)
}

/// Configuration-model sampler: pair up degree stubs, reject draws with
/// self-loops or parallel edges, retry. Feasibility requires d < m and d*m
/// even.
fn random_regular(m: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    if d >= m || (d * m) % 2 != 0 {
        return Err(GraphError::Infeasible(format!(
            "no {d}-regular graph on {m} vertices"
        )));
    }
    if d == 0 {
        return Graph::empty(m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    const MAX_ATTEMPTS: usize = 10_000;
    'attempt: for _ in 0..MAX_ATTEMPTS {
        // Fisher-Yates, then pair consecutive stubs.
        for i in (1..stubs.len()).rev() {
            stubs.swap(i, rng.gen_range(0..=i));
        }
        let mut a = DMatrix::zeros(m, m);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || a[(u, v)] != 0.0 {
                continue 'attempt;
            }
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        return Graph::from_adjacency(a);
    }
    Err(GraphError::Infeasible(format!(
        "configuration model failed to produce a {d}-regular graph on {m} vertices"
    )))
}

/// Returns a relabelled copy of `g` under a seeded random permutation,
/// together with the permutation that maps `g` onto it.
pub(super) fn random_permutation(m: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut image: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        image.swap(i, rng.gen_range(0..=i));
    }
    Permutation::new(image).expect("shuffle of 0..m is a permutation")
}
