//! Photon-number correlations of an encoded sampler: Wick moments, joint
//! cumulants, dense cumulant tensors, and collision-free output pattern
//! probabilities. A slow Fock-space simulator lives in [`fock`] and serves as
//! an independent oracle for everything here.

pub mod combinatorics;
pub mod fock;

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::encoding::{moments_from_sampler, EncodedSampler, EncodingError, GaussianMoments};

pub use combinatorics::{
    bell_number, double_factorial_odd, hafnian, perfect_matchings, set_partitions,
    PerfectMatching, SetPartition,
};
pub use fock::{FockEstimate, FockSimulator, FockState};

/// Largest tensor order; the Wick sum for one entry of order k walks
/// (2k-1)!! matchings per block, which at k = 6 is still cheap.
pub const MAX_TENSOR_ORDER: usize = 6;
/// Cap on materialized tensor entries (M^k).
pub const MAX_TENSOR_ENTRIES: usize = 100_000_000;
/// Pattern probabilities are meant for spot checks, not production sampling.
pub const MAX_PATTERN_MODES: usize = 10;

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("{0}")]
    SizeGuard(String),
    #[error("mode {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("correlation order {0} unsupported (must be 1..={MAX_TENSOR_ORDER})")]
    UnsupportedOrder(usize),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("oracle truncation tail {tail:.3e} above certification threshold")]
    OracleInconclusive { tail: f64 },
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

fn check_modes(moments: &GaussianMoments, modes: &[usize]) -> Result<(), CorrelationError> {
    let m = moments.modes();
    for &x in modes {
        if x >= m {
            return Err(CorrelationError::ModeOutOfRange { mode: x, modes: m });
        }
    }
    Ok(())
}

/// <n_{x_1} .. n_{x_k}> by Wick's theorem. Each n_x = adag_x a_x contributes
/// an ordered (creation, annihilation) pair of operator slots; the moment is
/// the sum over perfect matchings of the 2k slots of the product of pair
/// expectations, read in slot order:
///   (adag, adag) -> E,  (a, a) -> E,  (adag, a) -> N,
///   (a, adag)    -> N + 1 on the diagonal (commutator), N off it.
pub fn wick_moment(
    moments: &GaussianMoments,
    modes: &[usize],
) -> Result<f64, CorrelationError> {
    let k = modes.len();
    if k == 0 {
        return Err(CorrelationError::UnsupportedOrder(0));
    }
    if 2 * k > combinatorics::MAX_MATCHING_GROUND {
        return Err(CorrelationError::SizeGuard(format!(
            "Wick moment of order {k} needs matchings of {} slots, above the cap of {}",
            2 * k,
            combinatorics::MAX_MATCHING_GROUND
        )));
    }
    check_modes(moments, modes)?;

    // slot 2t is the creation operator of n_{x_t}, slot 2t+1 the annihilation
    let pair_value = |p: usize, q: usize| -> f64 {
        let (xp, create_p) = (modes[p / 2], p % 2 == 0);
        let (xq, create_q) = (modes[q / 2], q % 2 == 0);
        match (create_p, create_q) {
            (true, true) | (false, false) => moments.e[(xp, xq)],
            (true, false) => moments.n[(xp, xq)],
            (false, true) => moments.n[(xq, xp)] + if xp == xq { 1.0 } else { 0.0 },
        }
    };

    fn recurse(
        used: &mut [bool],
        partial: f64,
        total: &mut f64,
        pair_value: &dyn Fn(usize, usize) -> f64,
    ) {
        let p = match used.iter().position(|&u| !u) {
            Some(p) => p,
            None => {
                *total += partial;
                return;
            }
        };
        used[p] = true;
        for q in (p + 1)..used.len() {
            if used[q] {
                continue;
            }
            used[q] = true;
            recurse(used, partial * pair_value(p, q), total, pair_value);
            used[q] = false;
        }
        used[p] = false;
    }

    let mut total = 0.0;
    let mut used = vec![false; 2 * k];
    recurse(&mut used, 1.0, &mut total, &pair_value);
    Ok(total)
}

/// Joint cumulant of (n_{x_1}, .., n_{x_k}) by Moebius inversion over set
/// partitions:
///   cum = sum_P (-1)^{|P|-1} (|P|-1)! prod_{B in P} <prod_{i in B} n_{x_i}>.
/// Block moments repeat across partitions, so they are memoized on the sorted
/// mode multiset (number operators commute).
pub fn cumulant(moments: &GaussianMoments, modes: &[usize]) -> Result<f64, CorrelationError> {
    let k = modes.len();
    if k == 0 {
        return Err(CorrelationError::UnsupportedOrder(0));
    }
    check_modes(moments, modes)?;
    let partitions = set_partitions(k)?;

    let mut memo: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut total = 0.0;
    for partition in &partitions {
        let b = partition.num_blocks();
        let mut coeff = if b % 2 == 1 { 1.0 } else { -1.0 };
        for f in 1..b {
            coeff *= f as f64;
        }
        let mut term = coeff;
        for block in partition.blocks() {
            let mut key: Vec<usize> = block.iter().map(|&i| modes[i]).collect();
            key.sort_unstable();
            let moment = match memo.get(&key) {
                Some(&m) => m,
                None => {
                    let m = wick_moment(moments, &key)?;
                    memo.insert(key, m);
                    m
                }
            };
            term *= moment;
        }
        total += term;
    }
    Ok(total)
}

/// Dense order-k cumulant tensor over all M^k mode tuples, stored row-major
/// so the slice with a fixed first index is contiguous. Cumulants are
/// computed once per sorted tuple (they are symmetric in their arguments)
/// and fanned out.
#[derive(Clone, Debug)]
pub struct CorrelationTensor {
    modes: usize,
    order: usize,
    data: Vec<f64>,
}

fn sorted_tuples(modes: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tuple = vec![0usize; order];
    fn recurse(modes: usize, pos: usize, low: usize, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == tuple.len() {
            out.push(tuple.clone());
            return;
        }
        for x in low..modes {
            tuple[pos] = x;
            recurse(modes, pos + 1, x, tuple, out);
        }
    }
    recurse(modes, 0, 0, &mut tuple, &mut out);
    out
}

impl CorrelationTensor {
    pub fn compute(
        moments: &GaussianMoments,
        order: usize,
    ) -> Result<Self, CorrelationError> {
        Self::compute_with_entry_cap(moments, order, MAX_TENSOR_ENTRIES)
    }

    /// As `compute`, with a caller-chosen cap on M^k.
    pub fn compute_with_entry_cap(
        moments: &GaussianMoments,
        order: usize,
        entry_cap: usize,
    ) -> Result<Self, CorrelationError> {
        if order == 0 || order > MAX_TENSOR_ORDER {
            return Err(CorrelationError::UnsupportedOrder(order));
        }
        let modes = moments.modes();
        let entries = modes
            .checked_pow(order as u32)
            .filter(|&e| e <= entry_cap)
            .ok_or_else(|| {
                CorrelationError::SizeGuard(format!(
                    "tensor of order {order} over {modes} modes exceeds the cap of {entry_cap} entries"
                ))
            })?;

        let tuples = sorted_tuples(modes, order);
        let values: Vec<f64> = tuples
            .par_iter()
            .map(|t| cumulant(moments, t))
            .collect::<Result<_, _>>()?;
        let lookup: HashMap<&[usize], f64> = tuples
            .iter()
            .map(Vec::as_slice)
            .zip(values.iter().copied())
            .collect();

        let mut data = vec![0.0f64; entries];
        let mut key = vec![0usize; order];
        for (flat, slot) in data.iter_mut().enumerate() {
            let mut rem = flat;
            for d in (0..order).rev() {
                key[d] = rem % modes;
                rem /= modes;
            }
            key.sort_unstable();
            *slot = lookup[key.as_slice()];
        }
        Ok(CorrelationTensor { modes, order, data })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn value(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), self.order, "index arity mismatch");
        let mut flat = 0usize;
        for &i in indices {
            assert!(i < self.modes, "index {i} out of range");
            flat = flat * self.modes + i;
        }
        self.data[flat]
    }

    /// All entries whose first index is `i`, contiguous in memory.
    pub fn first_index_slice(&self, i: usize) -> &[f64] {
        assert!(i < self.modes, "index {i} out of range");
        let stride = self.data.len() / self.modes;
        &self.data[i * stride..(i + 1) * stride]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Probability of a collision-free (0/1) photon output pattern:
///   Pr(S) = haf(K_S)^2 / Z,   Z = sqrt(det(N + E + I) det(N - E + I)),
/// where K is the sampler kernel and K_S its submatrix on the clicked modes.
/// Z equals prod_i cosh(r_i); computing it from the moment matrices keeps the
/// route independent of the squeezing parameters.
pub fn pattern_probability(
    enc: &EncodedSampler,
    pattern: &[usize],
) -> Result<f64, CorrelationError> {
    let m = enc.modes();
    if m > MAX_PATTERN_MODES {
        return Err(CorrelationError::SizeGuard(format!(
            "pattern probabilities support at most {MAX_PATTERN_MODES} modes, got {m}"
        )));
    }
    if pattern.len() != m {
        return Err(CorrelationError::Unsupported(format!(
            "pattern length {} does not match {m} modes",
            pattern.len()
        )));
    }
    if pattern.iter().any(|&n| n > 1) {
        return Err(CorrelationError::Unsupported(
            "only collision-free 0/1 output patterns are supported".into(),
        ));
    }

    let moments = moments_from_sampler(enc)?;
    let eye = DMatrix::identity(m, m);
    let dp = (&moments.n + &moments.e + &eye).determinant();
    let dm = (&moments.n - &moments.e + &eye).determinant();
    let z = (dp * dm).sqrt();
    if !z.is_finite() || z <= 0.0 {
        return Err(CorrelationError::Unsupported(format!(
            "degenerate normalization {z} for pattern probability"
        )));
    }

    let kernel = enc.kernel();
    let clicked: Vec<usize> = (0..m).filter(|&i| pattern[i] == 1).collect();
    let sub = DMatrix::from_fn(clicked.len(), clicked.len(), |i, j| {
        kernel[(clicked[i], clicked[j])]
    });
    let h = hafnian(&sub)?;
    Ok(h * h / z)
}
