//! Candidate-permutation bookkeeping: quantized tensor-slice refinement, the
//! permanent-based census of surviving permutations, and capped enumeration
//! of the survivors against the actual adjacency.

use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, One, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::correlations::{bell_number, double_factorial_odd, CorrelationError, CorrelationTensor};
use crate::graph::{Graph, Permutation, WEIGHT_TOL};

/// Glynn enumeration walks 2^(n-1) sign vectors; 24 keeps both the walk and
/// the per-term i128 product (24^24 < 2^127) comfortable.
pub const MAX_EXACT_PERMANENT: usize = 24;

#[derive(Debug, Error)]
pub enum RefinementError {
    #[error("tensor orders or mode counts do not match the candidate matrix")]
    ShapeMismatch,
    #[error("quantization step {0} must be positive and finite")]
    InvalidStep(f64),
    #[error("{0}")]
    SizeGuard(String),
    #[error("matching enumeration exceeded the node cap of {0}")]
    EnumerationCap(u64),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// Rounds a tensor entry onto a grid of step `tau`. Entries closer than
/// tau/2 land in the same bucket and compare equal downstream.
pub fn quantize(v: f64, tau: f64) -> i64 {
    debug_assert!(tau > 0.0);
    (v / tau).round() as i64
}

/// Quantization step for a tensor pair: `tau_rel` times the largest entry
/// magnitude across both, with `tau_rel` itself as the floor so two all-zero
/// tensors still compare.
pub fn quantization_step(c1: &CorrelationTensor, c2: &CorrelationTensor, tau_rel: f64) -> f64 {
    let scale = c1.max_abs().max(c2.max_abs());
    if scale > 0.0 {
        tau_rel * scale
    } else {
        tau_rel
    }
}

/// M x M bit matrix; entry (i, j) says vertex i of the first graph may still
/// map to vertex j of the second. Serializes as one '0'/'1' string per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateMatrix {
    m: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl CandidateMatrix {
    pub fn full(m: usize) -> Self {
        let words_per_row = m.div_ceil(64);
        let mut cm = CandidateMatrix {
            m,
            words_per_row,
            bits: vec![0u64; m * words_per_row],
        };
        for i in 0..m {
            for j in 0..m {
                cm.set(i, j);
            }
        }
        cm
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut cm = Self::full(m);
        for i in 0..m {
            for j in 0..m {
                if !f(i, j) {
                    cm.clear(i, j);
                }
            }
        }
        cm
    }

    pub fn order(&self) -> usize {
        self.m
    }

    #[inline]
    fn word(&self, i: usize, j: usize) -> (usize, u64) {
        (i * self.words_per_row + j / 64, 1u64 << (j % 64))
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        let (w, mask) = self.word(i, j);
        self.bits[w] & mask != 0
    }

    fn set(&mut self, i: usize, j: usize) {
        let (w, mask) = self.word(i, j);
        self.bits[w] |= mask;
    }

    pub fn clear(&mut self, i: usize, j: usize) {
        let (w, mask) = self.word(i, j);
        self.bits[w] &= !mask;
    }

    pub fn row_popcount(&self, i: usize) -> usize {
        self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn col_popcount(&self, j: usize) -> usize {
        (0..self.m).filter(|&i| self.get(i, j)).count()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Columns still allowed for row `i`, ascending.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.m).filter(|&j| self.get(i, j)).collect()
    }
}

impl Serialize for CandidateMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.m))?;
        let mut row = String::with_capacity(self.m);
        for i in 0..self.m {
            row.clear();
            for j in 0..self.m {
                row.push(if self.get(i, j) { '1' } else { '0' });
            }
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// One refinement round: keeps (i, j) only when the first-index slices
/// C1[i, ..] and C2[j, ..] agree as multisets after quantization. Only ever
/// clears bits. Returns the surviving population.
pub fn refine(
    sigma: &mut CandidateMatrix,
    c1: &CorrelationTensor,
    c2: &CorrelationTensor,
    tau: f64,
) -> Result<usize, RefinementError> {
    if c1.order() != c2.order() || c1.modes() != c2.modes() || c1.modes() != sigma.order() {
        return Err(RefinementError::ShapeMismatch);
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(RefinementError::InvalidStep(tau));
    }
    let m = sigma.order();
    let key = |slice: &[f64]| -> Vec<i64> {
        let mut k: Vec<i64> = slice.iter().map(|&v| quantize(v, tau)).collect();
        k.sort_unstable();
        k
    };
    let keys1: Vec<Vec<i64>> = (0..m).map(|i| key(c1.first_index_slice(i))).collect();
    let keys2: Vec<Vec<i64>> = (0..m).map(|j| key(c2.first_index_slice(j))).collect();

    let mut survivors = 0usize;
    for i in 0..m {
        for j in 0..m {
            if !sigma.get(i, j) {
                continue;
            }
            if keys1[i] == keys2[j] {
                survivors += 1;
            } else {
                sigma.clear(i, j);
            }
        }
    }
    Ok(survivors)
}

/// Permanent of the candidate matrix by Glynn's formula with a Gray-code
/// walk over sign vectors: exact count of permutations inside the support.
pub fn exact_permanent(sigma: &CandidateMatrix) -> Result<BigUint, RefinementError> {
    let n = sigma.order();
    if n > MAX_EXACT_PERMANENT {
        return Err(RefinementError::SizeGuard(format!(
            "exact permanent supports order <= {MAX_EXACT_PERMANENT}, got {n}"
        )));
    }
    // column sums under the current sign vector; starts at delta = (1, .., 1)
    let mut col: Vec<i64> = (0..n)
        .map(|j| (0..n).filter(|&i| sigma.get(i, j)).count() as i64)
        .collect();
    let mut sign = 1i128;
    let mut gray = 0u64;
    let mut total = BigInt::zero();
    let iterations = 1u64 << (n - 1);
    for t in 0..iterations {
        let mut prod = sign;
        for &c in &col {
            prod *= c as i128;
        }
        total += BigInt::from(prod);
        if t + 1 == iterations {
            break;
        }
        // flip the delta entry selected by the Gray code (rows 1..n-1)
        let b = (t + 1).trailing_zeros() as usize;
        let row = b + 1;
        let delta_change: i64 = if (gray >> b) & 1 == 0 { -2 } else { 2 };
        gray ^= 1u64 << b;
        for j in 0..n {
            if sigma.get(row, j) {
                col[j] += delta_change;
            }
        }
        sign = -sign;
    }
    let denom = BigInt::one() << (n - 1);
    let quotient = &total / &denom;
    debug_assert!((&total % &denom).is_zero(), "Glynn sum not divisible");
    quotient
        .to_biguint()
        .ok_or_else(|| RefinementError::SizeGuard("negative permanent".into()))
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Minc-Bregman upper bound on the permanent: prod_i (r_i!)^(1/r_i) over row
/// sums r_i, rounded up. Any empty row forces zero.
pub fn count_bound(sigma: &CandidateMatrix) -> BigUint {
    let n = sigma.order();
    let mut ln_sum = 0.0f64;
    for i in 0..n {
        let r = sigma.row_popcount(i);
        if r == 0 {
            return BigUint::zero();
        }
        ln_sum += ln_factorial(r) / r as f64;
    }
    if ln_sum > 700.0 {
        // exp would overflow f64; a power of two one bit up is still a bound
        return BigUint::one() << ((ln_sum / std::f64::consts::LN_2).ceil() as usize + 1);
    }
    let inflated = ln_sum.exp() * (1.0 + 1e-9);
    BigUint::from_f64(inflated.ceil()).unwrap_or_default()
}

/// Exact permanent when affordable, Minc-Bregman bound otherwise.
pub fn surviving_count(sigma: &CandidateMatrix) -> Result<BigUint, RefinementError> {
    if sigma.order() <= MAX_EXACT_PERMANENT {
        exact_permanent(sigma)
    } else {
        Ok(count_bound(sigma))
    }
}

/// Work model that decides when enumerating the surviving permutations is
/// cheaper than computing the next tensor order. The next order costs about
/// M^(k+1) entries times Bell(k+1) partitions times (2k+1)!! matchings;
/// `cost_scale` rescales that threshold (larger favors earlier enumeration).
#[derive(Clone, Copy, Debug)]
pub struct CostModel {
    pub cost_scale: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { cost_scale: 1.0 }
    }
}

impl CostModel {
    pub fn next_order_cost(&self, k_next: usize, m: usize) -> Result<f64, RefinementError> {
        let bell = bell_number(k_next)? as f64;
        let matchings = double_factorial_odd(2 * k_next as u64 - 1) as f64;
        Ok((m as f64).powi(k_next as i32) * bell * matchings * self.cost_scale)
    }
}

/// Where a candidate matrix stands after a refinement round.
#[derive(Clone, Debug)]
pub enum SigmaStatus {
    /// No permutation survives: an empty row/column or a zero permanent.
    Invalid,
    /// Exactly one survivor, extracted as a witness (still unverified).
    Valid(Permutation),
    /// Several survive, but checking them all costs no more than the next
    /// tensor order would.
    IndeterminateBelow(BigUint),
    /// Too many survive; refine further.
    IndeterminateAbove(BigUint),
}

/// Classifies `sigma` after round `k`: per-vertex feasibility first, then a
/// permutation-matrix check, then the census against the cost model.
pub fn classify(
    sigma: &CandidateMatrix,
    k: usize,
    model: &CostModel,
) -> Result<SigmaStatus, RefinementError> {
    let m = sigma.order();
    for i in 0..m {
        if sigma.row_popcount(i) == 0 {
            return Ok(SigmaStatus::Invalid);
        }
    }
    for j in 0..m {
        if sigma.col_popcount(j) == 0 {
            return Ok(SigmaStatus::Invalid);
        }
    }
    if (0..m).all(|i| sigma.row_popcount(i) == 1) && (0..m).all(|j| sigma.col_popcount(j) == 1) {
        let image: Vec<usize> = (0..m).map(|i| sigma.row_support(i)[0]).collect();
        let pi = Permutation::new(image)
            .expect("rows and columns each sum to one, so the support is a permutation matrix");
        return Ok(SigmaStatus::Valid(pi));
    }
    let count = surviving_count(sigma)?;
    if count.is_zero() {
        return Ok(SigmaStatus::Invalid);
    }
    let cost = self::classify_threshold(k, m, model)?;
    let work = &count * BigUint::from(m * m);
    if work <= cost {
        Ok(SigmaStatus::IndeterminateBelow(count))
    } else {
        Ok(SigmaStatus::IndeterminateAbove(count))
    }
}

fn classify_threshold(k: usize, m: usize, model: &CostModel) -> Result<BigUint, RefinementError> {
    let cost = model.next_order_cost(k + 1, m)?;
    Ok(BigUint::from_f64(cost.floor()).unwrap_or_else(|| BigUint::from(u128::MAX)))
}

/// Depth-first search for an isomorphism inside the support of `sigma`.
/// Rows are assigned in ascending-support order; every assignment is checked
/// against all earlier ones through the adjacency, and a completed map is
/// verified outright before being returned. Each attempted assignment costs
/// one node against `cap`.
pub fn enumerate_and_verify(
    g1: &Graph,
    g2: &Graph,
    sigma: &CandidateMatrix,
    cap: u64,
) -> Result<Option<Permutation>, RefinementError> {
    let m = g1.order();
    if g2.order() != m || sigma.order() != m {
        return Err(RefinementError::ShapeMismatch);
    }
    let mut rows: Vec<usize> = (0..m).collect();
    rows.sort_by_key(|&i| (sigma.row_popcount(i), i));

    let a1 = g1.adjacency();
    let a2 = g2.adjacency();
    let binary = g1.is_binary_simple() && g2.is_binary_simple();
    let agree = move |x: f64, y: f64| {
        if binary {
            x == y
        } else {
            (x - y).abs() <= WEIGHT_TOL
        }
    };

    struct Search<'a> {
        rows: &'a [usize],
        sigma: &'a CandidateMatrix,
        a1: &'a nalgebra::DMatrix<f64>,
        a2: &'a nalgebra::DMatrix<f64>,
        agree: &'a dyn Fn(f64, f64) -> bool,
        image: Vec<Option<usize>>,
        used: Vec<bool>,
        nodes: u64,
        cap: u64,
    }

    impl Search<'_> {
        fn go(&mut self, depth: usize) -> Result<Option<Vec<usize>>, RefinementError> {
            if depth == self.rows.len() {
                let image: Vec<usize> = self.image.iter().map(|o| o.unwrap()).collect();
                return Ok(Some(image));
            }
            let i = self.rows[depth];
            for j in self.sigma.row_support(i) {
                if self.used[j] {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.cap {
                    return Err(RefinementError::EnumerationCap(self.cap));
                }
                if !(self.agree)(self.a1[(i, i)], self.a2[(j, j)]) {
                    continue;
                }
                let consistent = self.rows[..depth].iter().all(|&prev| {
                    let pj = self.image[prev].unwrap();
                    (self.agree)(self.a1[(i, prev)], self.a2[(j, pj)])
                });
                if !consistent {
                    continue;
                }
                self.image[i] = Some(j);
                self.used[j] = true;
                if let Some(found) = self.go(depth + 1)? {
                    return Ok(Some(found));
                }
                self.image[i] = None;
                self.used[j] = false;
            }
            Ok(None)
        }
    }

    let mut search = Search {
        rows: &rows,
        sigma,
        a1,
        a2,
        agree: &agree,
        image: vec![None; m],
        used: vec![false; m],
        nodes: 0,
        cap,
    };
    match search.go(0)? {
        Some(image) => {
            let pi = Permutation::new(image).expect("search assigns distinct columns");
            if crate::graph::is_isomorphism(g1, g2, &pi) {
                Ok(Some(pi))
            } else {
                // partial checks cover every pair, so this cannot trigger for
                // symmetric adjacency; kept as a hard backstop
                Ok(None)
            }
        }
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{moments_direct, rescale_pair};
    use crate::graph::{brute_force_isomorphism, generate, isomorphic_copy, GraphModel};

    fn tensor_pair(g1: &Graph, g2: &Graph, k: usize) -> (CorrelationTensor, CorrelationTensor) {
        let (t1, t2, _) = rescale_pair(g1.adjacency(), g2.adjacency(), 0.9).unwrap();
        let m1 = moments_direct(&t1).unwrap();
        let m2 = moments_direct(&t2).unwrap();
        (
            CorrelationTensor::compute(&m1, k).unwrap(),
            CorrelationTensor::compute(&m2, k).unwrap(),
        )
    }

    #[test]
    fn quantize_buckets() {
        assert_eq!(quantize(1.04e-9, 1e-9), 1);
        assert_eq!(quantize(-2.6e-9, 1e-9), -3);
        assert_eq!(quantize(0.0, 1e-9), 0);
        assert_eq!(quantize(4.9e-10, 1e-9), 0);
    }

    #[test]
    fn candidate_matrix_bit_operations() {
        let mut cm = CandidateMatrix::full(70);
        assert_eq!(cm.popcount(), 70 * 70);
        cm.clear(0, 65);
        assert!(!cm.get(0, 65));
        assert_eq!(cm.row_popcount(0), 69);
        assert_eq!(cm.col_popcount(65), 69);
        assert_eq!(cm.row_support(1).len(), 70);
    }

    #[test]
    fn candidate_matrix_serializes_as_bit_rows() {
        let cm = CandidateMatrix::from_fn(3, |i, j| i == j);
        let json = serde_json::to_string(&cm).unwrap();
        assert_eq!(json, r#"["100","010","001"]"#);
    }

    #[test]
    fn refine_keeps_planted_mapping() {
        for seed in 0..30u64 {
            let g = generate(&GraphModel::ErdosRenyi { p: 0.4 }, 7, seed).unwrap();
            let (h, pi) = isomorphic_copy(&g, seed + 1000);
            let mut sigma = CandidateMatrix::full(7);
            for k in 1..=2usize {
                let (c1, c2) = tensor_pair(&g, &h, k);
                let tau = quantization_step(&c1, &c2, 1e-9);
                refine(&mut sigma, &c1, &c2, tau).unwrap();
                for i in 0..7 {
                    assert!(sigma.get(i, pi.map(i)), "seed {seed}, order {k}, vertex {i}");
                }
            }
        }
    }

    #[test]
    fn refine_only_clears_bits() {
        let g = generate(&GraphModel::ErdosRenyi { p: 0.5 }, 6, 3).unwrap();
        let h = generate(&GraphModel::ErdosRenyi { p: 0.5 }, 6, 4).unwrap();
        let (c1, c2) = tensor_pair(&g, &h, 2);
        let tau = quantization_step(&c1, &c2, 1e-9);
        let mut sigma = CandidateMatrix::full(6);
        refine(&mut sigma, &c1, &c2, tau).unwrap();
        let after_first = sigma.clone();
        refine(&mut sigma, &c1, &c2, tau).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!(!sigma.get(i, j) || after_first.get(i, j));
            }
        }
    }

    #[test]
    fn refine_empties_sigma_for_different_degree_profiles() {
        let k3 = generate(&GraphModel::Complete, 3, 0).unwrap();
        let p3 = generate(&GraphModel::Path, 3, 0).unwrap();
        let (c1, c2) = tensor_pair(&k3, &p3, 1);
        let tau = quantization_step(&c1, &c2, 1e-9);
        let mut sigma = CandidateMatrix::full(3);
        let survivors = refine(&mut sigma, &c1, &c2, tau).unwrap();
        assert_eq!(survivors, 0);
    }

    #[test]
    fn refine_validates_shapes_and_step() {
        let g = generate(&GraphModel::Cycle, 4, 0).unwrap();
        let (c1, c2) = tensor_pair(&g, &g, 1);
        let mut sigma = CandidateMatrix::full(5);
        assert!(matches!(
            refine(&mut sigma, &c1, &c2, 1e-9),
            Err(RefinementError::ShapeMismatch)
        ));
        let mut sigma = CandidateMatrix::full(4);
        assert!(matches!(
            refine(&mut sigma, &c1, &c2, 0.0),
            Err(RefinementError::InvalidStep(_))
        ));
    }

    fn naive_permanent(sigma: &CandidateMatrix) -> u64 {
        let n = sigma.order();
        let mut image: Vec<usize> = (0..n).collect();
        let mut count = 0u64;
        // Heap's algorithm over all permutations
        fn heap(k: usize, image: &mut Vec<usize>, sigma: &CandidateMatrix, count: &mut u64) {
            if k == 1 {
                let n = image.len();
                if (0..n).all(|i| sigma.get(i, image[i])) {
                    *count += 1;
                }
                return;
            }
            for i in 0..k {
                heap(k - 1, image, sigma, count);
                if k % 2 == 0 {
                    image.swap(i, k - 1);
                } else {
                    image.swap(0, k - 1);
                }
            }
        }
        heap(n, &mut image, sigma, &mut count);
        count
    }

    #[test]
    fn permanent_of_full_and_identity() {
        assert_eq!(exact_permanent(&CandidateMatrix::full(5)).unwrap(), BigUint::from(120u32));
        let id = CandidateMatrix::from_fn(6, |i, j| i == j);
        assert_eq!(exact_permanent(&id).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn permanent_matches_naive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let cm = CandidateMatrix::from_fn(n, |_, _| rng.gen_bool(0.6));
            let fast = exact_permanent(&cm).unwrap();
            assert_eq!(fast, BigUint::from(naive_permanent(&cm)));
        }
    }

    #[test]
    fn permanent_detects_hall_violation() {
        // rows 0..2 all map into {0, 1}: no empty row or column, permanent 0
        let cm = CandidateMatrix::from_fn(4, |i, j| {
            if i < 3 { j < 2 } else { true }
        });
        assert!(cm.row_popcount(3) == 4 && (0..4).all(|j| cm.col_popcount(j) >= 1));
        assert_eq!(exact_permanent(&cm).unwrap(), BigUint::zero());
        assert!(matches!(
            classify(&cm, 1, &CostModel::default()).unwrap(),
            SigmaStatus::Invalid
        ));
    }

    #[test]
    fn permanent_guard() {
        assert!(exact_permanent(&CandidateMatrix::full(25)).is_err());
    }

    #[test]
    fn count_bound_dominates_exact_permanent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(1..=7);
            let cm = CandidateMatrix::from_fn(n, |_, _| rng.gen_bool(0.7));
            let exact = exact_permanent(&cm).unwrap();
            assert!(count_bound(&cm) >= exact);
        }
        assert_eq!(count_bound(&CandidateMatrix::from_fn(3, |i, _| i != 0)), BigUint::zero());
    }

    #[test]
    fn classify_extracts_permutation_witness() {
        let cm = CandidateMatrix::from_fn(4, |i, j| j == (i + 1) % 4);
        match classify(&cm, 1, &CostModel::default()).unwrap() {
            SigmaStatus::Valid(pi) => {
                assert_eq!(pi.as_slice(), &[1, 2, 3, 0]);
            }
            other => panic!("expected Valid, got {other:?}"),
        }
    }

    #[test]
    fn classify_flags_empty_row() {
        let cm = CandidateMatrix::from_fn(3, |i, _| i != 1);
        assert!(matches!(
            classify(&cm, 1, &CostModel::default()).unwrap(),
            SigmaStatus::Invalid
        ));
    }

    #[test]
    fn classify_cost_boundary() {
        // full 3x3 after round 1: work 6 * 9 = 54 equals the order-2 cost
        // 9 * Bell(2) * 3!! = 54, and ties enumerate
        let cm = CandidateMatrix::full(3);
        match classify(&cm, 1, &CostModel::default()).unwrap() {
            SigmaStatus::IndeterminateBelow(count) => assert_eq!(count, BigUint::from(6u32)),
            other => panic!("expected IndeterminateBelow, got {other:?}"),
        }
        // shrinking the threshold pushes the same matrix above it
        match classify(&cm, 1, &CostModel { cost_scale: 0.5 }).unwrap() {
            SigmaStatus::IndeterminateAbove(count) => assert_eq!(count, BigUint::from(6u32)),
            other => panic!("expected IndeterminateAbove, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_finds_planted_witness() {
        for seed in 0..20u64 {
            let g = generate(&GraphModel::ErdosRenyi { p: 0.5 }, 7, seed).unwrap();
            let (h, _) = isomorphic_copy(&g, seed + 500);
            let sigma = CandidateMatrix::full(7);
            let pi = enumerate_and_verify(&g, &h, &sigma, 1_000_000)
                .unwrap()
                .expect("planted pair must have a witness");
            assert!(crate::graph::is_isomorphism(&g, &h, &pi));
        }
    }

    #[test]
    fn enumeration_rejects_non_isomorphic_pair() {
        // C6 versus two triangles: same degree sequence, not isomorphic
        let c6 = generate(&GraphModel::Cycle, 6, 0).unwrap();
        let two_k3 = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(brute_force_isomorphism(&c6, &two_k3).unwrap().is_none());
        let sigma = CandidateMatrix::full(6);
        assert!(enumerate_and_verify(&c6, &two_k3, &sigma, 1_000_000)
            .unwrap()
            .is_none());
    }

    #[test]
    fn enumeration_respects_support_and_cap() {
        let g = generate(&GraphModel::Cycle, 5, 0).unwrap();
        let (h, pi) = isomorphic_copy(&g, 77);
        // restrict sigma to exactly the planted mapping
        let sigma = CandidateMatrix::from_fn(5, |i, j| j == pi.map(i));
        let found = enumerate_and_verify(&g, &h, &sigma, 100).unwrap().unwrap();
        assert_eq!(found.as_slice(), pi.as_slice());

        let full = CandidateMatrix::full(5);
        assert!(matches!(
            enumerate_and_verify(&g, &h, &full, 1),
            Err(RefinementError::EnumerationCap(1))
        ));
    }

    #[test]
    fn enumeration_handles_weighted_graphs() {
        let g = Graph::from_weighted_edges(4, &[(0, 1, 0.5), (1, 2, 1.5), (2, 3, 0.5), (0, 0, 2.0)])
            .unwrap();
        let (h, _) = isomorphic_copy(&g, 31);
        let sigma = CandidateMatrix::full(4);
        let pi = enumerate_and_verify(&g, &h, &sigma, 10_000).unwrap().unwrap();
        assert!(crate::graph::is_isomorphism(&g, &h, &pi));
    }

    #[test]
    fn quantization_step_floors_at_tau_rel() {
        let g = generate(&GraphModel::Cycle, 4, 0).unwrap();
        let (c1, c2) = tensor_pair(&g, &g, 2);
        let tau = quantization_step(&c1, &c2, 1e-9);
        assert!(tau > 0.0 && tau < 1e-9 * 10.0);
        // cumulants here are nonzero, so the step scales with the content
        let c_max = c1.max_abs().max(c2.max_abs());
        assert!((tau - 1e-9 * c_max).abs() < 1e-24);
    }
}
