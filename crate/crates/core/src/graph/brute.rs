//! Exhaustive isomorphism search, used as ground truth in tests and on
//! corpora small enough to afford it.

use super::generate::random_permutation;
use super::{is_isomorphism, Graph, GraphError, Permutation, WEIGHT_TOL};

/// Guard on the factorial backtracking search.
pub const BRUTE_FORCE_MAX_ORDER: usize = 10;

/// Relabels `g` under a seeded random permutation pi and returns both. The
/// returned pi maps `g` onto the copy exactly.
pub fn isomorphic_copy(g: &Graph, seed: u64) -> (Graph, Permutation) {
    let pi = random_permutation(g.order(), seed);
    (g.permuted(&pi), pi)
}

/// Exhaustive search for an isomorphism from `g1` to `g2`. Returns the first
/// witness found, or `None` when none exists. Vertices are assigned in an
/// order sorted by (degree, neighbour degree multiset) and candidates are
/// pruned by the same signature, which cannot exclude a true isomorphism.
pub fn brute_force_isomorphism(
    g1: &Graph,
    g2: &Graph,
) -> Result<Option<Permutation>, GraphError> {
    let m = g1.order();
    if m != g2.order() {
        return Ok(None);
    }
    if m > BRUTE_FORCE_MAX_ORDER {
        return Err(GraphError::SizeGuard(format!(
            "brute force search limited to order {BRUTE_FORCE_MAX_ORDER}, got {m}"
        )));
    }

    let sig1 = signatures(g1);
    let sig2 = signatures(g2);
    {
        let mut s1 = sig1.clone();
        let mut s2 = sig2.clone();
        s1.sort();
        s2.sort();
        if s1 != s2 {
            return Ok(None);
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| sig1[a].cmp(&sig1[b]));

    let exact = g1.is_binary_simple() && g2.is_binary_simple();
    let entries_match = |x: f64, y: f64| {
        if exact {
            x == y
        } else {
            (x - y).abs() <= WEIGHT_TOL
        }
    };

    let (a1, a2) = (g1.adjacency(), g2.adjacency());
    let mut image = vec![usize::MAX; m];
    let mut used = vec![false; m];

    fn assign(
        depth: usize,
        order: &[usize],
        sig1: &[Signature],
        sig2: &[Signature],
        a1: &nalgebra::DMatrix<f64>,
        a2: &nalgebra::DMatrix<f64>,
        entries_match: &impl Fn(f64, f64) -> bool,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for w in 0..used.len() {
            if used[w] || sig1[v] != sig2[w] {
                continue;
            }
            if !entries_match(a1[(v, v)], a2[(w, w)]) {
                continue;
            }
            let consistent = order[..depth].iter().all(|&u| {
                entries_match(a1[(v, u)], a2[(w, image[u])])
            });
            if !consistent {
                continue;
            }
            image[v] = w;
            used[w] = true;
            if assign(depth + 1, order, sig1, sig2, a1, a2, entries_match, image, used) {
                return true;
            }
            image[v] = usize::MAX;
            used[w] = false;
        }
        false
    }

    if assign(0, &order, &sig1, &sig2, a1, a2, &entries_match, &mut image, &mut used) {
        let pi = Permutation::new(image).expect("backtracking fills a bijection");
        debug_assert!(is_isomorphism(g1, g2, &pi));
        Ok(Some(pi))
    } else {
        Ok(None)
    }
}

/// (degree key, sorted neighbour degree keys), quantized so weighted graphs
/// get stable comparisons.
type Signature = (i64, Vec<i64>);

fn signatures(g: &Graph) -> Vec<Signature> {
    let quant = |v: f64| (v / WEIGHT_TOL).round() as i64;
    let degs = g.degrees();
    let a = g.adjacency();
    (0..g.order())
        .map(|v| {
            let mut nbr: Vec<i64> = (0..g.order())
                .filter(|&u| u != v && a[(v, u)] != 0.0)
                .map(|u| quant(degs[u]))
                .collect();
            nbr.sort_unstable();
            (quant(degs[v]), nbr)
        })
        .collect()
}
