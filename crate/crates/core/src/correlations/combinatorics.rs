//! Set partitions, perfect matchings, and the small exact counts the
//! correlation machinery is checked against.

use nalgebra::DMatrix;

use super::CorrelationError;

/// Hard cap on the ground set for partition enumeration; Bell(12) = 4213597
/// is the largest count we ever materialize.
pub(crate) const MAX_PARTITION_GROUND: usize = 12;
/// Matching enumeration doubles as the hafnian; 20 modes = 9!! * ... is the
/// largest size that stays tractable.
pub(crate) const MAX_MATCHING_GROUND: usize = 20;

/// A partition of {0, .., n-1} into non-empty blocks. Blocks are sorted
/// internally and by their minima, the canonical order restricted-growth
/// enumeration produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// All set partitions of {0, .., n-1} in restricted-growth-string order.
pub fn set_partitions(n: usize) -> Result<Vec<SetPartition>, CorrelationError> {
    if n > MAX_PARTITION_GROUND {
        return Err(CorrelationError::SizeGuard(format!(
            "set partitions of {n} elements exceed the enumeration cap of {MAX_PARTITION_GROUND}"
        )));
    }
    if n == 0 {
        return Ok(vec![SetPartition { blocks: Vec::new() }]);
    }
    // rgs[i] = index of the block containing i; rgs[0] = 0 and
    // rgs[i] <= 1 + max(rgs[..i])
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let num_blocks = rgs.iter().copied().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); num_blocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(SetPartition { blocks });

        // advance: find the rightmost position that can grow
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let prefix_max = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in rgs[i + 1..].iter_mut() {
                    *r = 0;
                }
                break;
            }
        }
    }
}

/// Bell numbers B_0.. up to the enumeration cap, by the triangle recurrence.
pub fn bell_number(n: usize) -> Result<u64, CorrelationError> {
    if n > MAX_PARTITION_GROUND {
        return Err(CorrelationError::SizeGuard(format!(
            "Bell({n}) outside supported range 0..={MAX_PARTITION_GROUND}"
        )));
    }
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    Ok(row[0])
}

/// (n-1)!! for odd n interpreted as the matching count of K_n+1: returns the
/// number of perfect matchings of a 2k-set, (2k-1)!!, for n = 2k.
pub fn double_factorial_odd(n: u64) -> u64 {
    let mut acc = 1u64;
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// A perfect matching of {0, .., 2k-1}: pairs (p, q) with p < q, sorted by p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectMatching {
    pairs: Vec<(usize, usize)>,
}

impl PerfectMatching {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// All perfect matchings of {0, .., n-1}. Odd n has none.
pub fn perfect_matchings(n: usize) -> Result<Vec<PerfectMatching>, CorrelationError> {
    if n > MAX_MATCHING_GROUND {
        return Err(CorrelationError::SizeGuard(format!(
            "perfect matchings of {n} elements exceed the enumeration cap of {MAX_MATCHING_GROUND}"
        )));
    }
    if n % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    fn recurse(
        n: usize,
        used: &mut [bool],
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<PerfectMatching>,
    ) {
        let p = match (0..n).find(|&i| !used[i]) {
            Some(p) => p,
            None => {
                out.push(PerfectMatching { pairs: pairs.clone() });
                return;
            }
        };
        used[p] = true;
        for q in (p + 1)..n {
            if used[q] {
                continue;
            }
            used[q] = true;
            pairs.push((p, q));
            recurse(n, used, pairs, out);
            pairs.pop();
            used[q] = false;
        }
        used[p] = false;
    }
    recurse(n, &mut used, &mut pairs, &mut out);
    Ok(out)
}

/// Hafnian of a symmetric matrix by direct matching enumeration:
/// haf(B) = sum over perfect matchings M of prod_{(p,q) in M} B_pq.
/// The empty matrix has hafnian 1; odd dimension has no matchings, so 0.
pub fn hafnian(b: &DMatrix<f64>) -> Result<f64, CorrelationError> {
    if b.nrows() != b.ncols() {
        return Err(CorrelationError::NotSquare);
    }
    let n = b.nrows();
    if n > MAX_MATCHING_GROUND {
        return Err(CorrelationError::SizeGuard(format!(
            "hafnian of a {n}x{n} matrix exceeds the enumeration cap of {MAX_MATCHING_GROUND}"
        )));
    }
    let mut total = 0.0;
    for matching in perfect_matchings(n)? {
        let mut term = 1.0;
        for &(p, q) in matching.pairs() {
            term *= b[(p, q)];
        }
        total += term;
    }
    if n == 0 {
        total = 1.0;
    }
    Ok(total)
}
