//! Brute-force Fock-space simulation of an encoded sampler, used as an
//! independent oracle for the Wick/cumulant machinery. Nothing here shares
//! code with the closed-form moment path: squeezed inputs are built by
//! exponentiating the squeeze generator numerically, and the interferometer
//! is applied exactly within each total-photon sector.
//!
//! The state is exact up to an explicitly tracked truncation tail, and every
//! estimate refuses to certify itself when that tail is above threshold.

use std::collections::HashMap;

use nalgebra::{DMatrix, Matrix3, Rotation3, UnitQuaternion};
use num_complex::Complex64;

use super::{set_partitions, CorrelationError};
use crate::encoding::EncodedSampler;

/// Mode cap: sector dimensions grow like n^(M-1), and the rotation logarithm
/// is implemented for O(1..=3) only.
pub const MAX_ORACLE_MODES: usize = 3;
/// Per-mode photon cutoff cap.
pub const MAX_ORACLE_CUTOFF: usize = 12;
/// Estimates with more truncated weight than this are not certified.
pub const TAIL_TOL: f64 = 1e-8;

/// Extra Fock levels kept while exponentiating the single-mode squeeze, so
/// boundary reflection cannot reach the reported entries.
const SQUEEZE_PADDING: usize = 33;
/// Input sectors lighter than this are dropped; their weight lands in the
/// tail like any other truncation.
const SECTOR_DROP: f64 = 1e-30;
/// Relative cross-talk allowed when splitting a unitary column into a real
/// vector times a phase.
const COLUMN_PURITY_TOL: f64 = 1e-10;

/// A value obtained from the truncated simulation together with the weight
/// the truncation discarded.
#[derive(Clone, Copy, Debug)]
pub struct FockEstimate {
    pub value: f64,
    pub tail: f64,
}

/// exp(A) v for a sparse real matrix given as (row, col, value) triplets,
/// by scaling and squaring with a Taylor inner loop. The scaling step keeps
/// the per-stage norm at 1/2, where the Taylor series converges to machine
/// precision in under thirty terms.
pub(crate) fn expm_action(
    triplets: &[(usize, usize, f64)],
    dim: usize,
    v: &[Complex64],
) -> Vec<Complex64> {
    assert_eq!(v.len(), dim);
    let mut col_sums = vec![0.0f64; dim];
    for &(_, c, val) in triplets {
        col_sums[c] += val.abs();
    }
    let norm = col_sums.iter().fold(0.0f64, |a, &b| a.max(b));
    let stages = if norm <= 0.5 {
        0
    } else {
        (norm / 0.5).log2().ceil() as u32
    };
    let scale = 0.5f64.powi(stages as i32);

    let mut state = v.to_vec();
    let mut term = vec![Complex64::default(); dim];
    let mut next = vec![Complex64::default(); dim];
    for _ in 0..(1u64 << stages) {
        term.copy_from_slice(&state);
        for t in 1..=60u32 {
            for x in next.iter_mut() {
                *x = Complex64::default();
            }
            for &(r, c, val) in triplets {
                next[r] += term[c] * (val * scale / t as f64);
            }
            std::mem::swap(&mut term, &mut next);
            let mut term_norm = 0.0f64;
            let mut state_norm = 0.0f64;
            for (s, t) in state.iter_mut().zip(term.iter()) {
                *s += t;
                term_norm += t.norm_sqr();
                state_norm += s.norm_sqr();
            }
            if term_norm <= 1e-40 * state_norm.max(1e-300) {
                break;
            }
        }
    }
    state
}

/// S(r)|0> in the number basis up to `cutoff`, computed by exponentiating
/// (r/2)(adag^2 - a^2) in a padded truncated space. Odd entries come out
/// exactly zero because the generator only couples n to n +- 2.
fn squeezed_vacuum(r: f64, cutoff: usize) -> Vec<f64> {
    let dim = cutoff + 1 + SQUEEZE_PADDING;
    let mut triplets = Vec::with_capacity(2 * dim);
    for n in 0..dim {
        if n + 2 < dim {
            let f = (((n + 1) * (n + 2)) as f64).sqrt();
            triplets.push((n + 2, n, r / 2.0 * f));
        }
        if n >= 2 {
            let f = ((n * (n - 1)) as f64).sqrt();
            triplets.push((n - 2, n, -r / 2.0 * f));
        }
    }
    let mut v0 = vec![Complex64::default(); dim];
    v0[0] = Complex64::new(1.0, 0.0);
    let out = expm_action(&triplets, dim, &v0);
    out[..=cutoff].iter().map(|z| z.re).collect()
}

/// Splits the sampler unitary into a proper rotation times per-mode phases:
/// U = Q0 diag(d) with Q0 in SO(M) and d in {1, -1, i, -i}. Takagi unitaries
/// of real symmetric inputs have columns that are purely real or purely
/// imaginary, which is all this supports.
fn split_unitary(
    u: &DMatrix<Complex64>,
) -> Result<(DMatrix<f64>, Vec<Complex64>), CorrelationError> {
    let m = u.nrows();
    let mut q = DMatrix::zeros(m, m);
    let mut phases = vec![Complex64::new(1.0, 0.0); m];
    for j in 0..m {
        let re_norm: f64 = (0..m).map(|i| u[(i, j)].re.powi(2)).sum::<f64>().sqrt();
        let im_norm: f64 = (0..m).map(|i| u[(i, j)].im.powi(2)).sum::<f64>().sqrt();
        let total = (re_norm.powi(2) + im_norm.powi(2)).sqrt();
        if im_norm <= COLUMN_PURITY_TOL * total {
            for i in 0..m {
                q[(i, j)] = u[(i, j)].re;
            }
        } else if re_norm <= COLUMN_PURITY_TOL * total {
            phases[j] = Complex64::new(0.0, 1.0);
            for i in 0..m {
                q[(i, j)] = u[(i, j)].im;
            }
        } else {
            return Err(CorrelationError::Unsupported(format!(
                "unitary column {j} is neither real nor purely imaginary"
            )));
        }
    }
    if q.determinant() < 0.0 {
        let last = m - 1;
        for i in 0..m {
            q[(i, last)] = -q[(i, last)];
        }
        phases[last] = -phases[last];
    }
    Ok((q, phases))
}

/// Principal logarithm of a proper rotation, as an antisymmetric matrix.
fn rotation_log(q: &DMatrix<f64>) -> Result<DMatrix<f64>, CorrelationError> {
    let m = q.nrows();
    let k = match m {
        1 => DMatrix::zeros(1, 1),
        2 => {
            let theta = q[(1, 0)].atan2(q[(0, 0)]);
            DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0])
        }
        3 => {
            let m3 = Matrix3::from_fn(|i, j| q[(i, j)]);
            let rot = Rotation3::from_matrix_unchecked(m3);
            let w = UnitQuaternion::from_rotation_matrix(&rot).scaled_axis();
            DMatrix::from_row_slice(
                3,
                3,
                &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0],
            )
        }
        _ => {
            return Err(CorrelationError::SizeGuard(format!(
                "rotation logarithm implemented for at most {MAX_ORACLE_MODES} modes, got {m}"
            )))
        }
    };
    // confirm exp(K) reproduces Q before trusting it
    let mut triplets = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if k[(i, j)] != 0.0 {
                triplets.push((i, j, k[(i, j)]));
            }
        }
    }
    let mut worst = 0.0f64;
    for j in 0..m {
        let mut e = vec![Complex64::default(); m];
        e[j] = Complex64::new(1.0, 0.0);
        let col = expm_action(&triplets, m, &e);
        for i in 0..m {
            worst = worst.max((col[i].re - q[(i, j)]).abs().max(col[i].im.abs()));
        }
    }
    if worst > 1e-8 {
        return Err(CorrelationError::Unsupported(format!(
            "rotation logarithm residual {worst:.3e}"
        )));
    }
    Ok(k)
}

/// Occupation vectors with the given total, in lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn recurse(total: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = total;
            out.push(cur.clone());
            return;
        }
        for x in 0..=total {
            cur[pos] = x;
            recurse(total - x, pos + 1, cur, out);
        }
    }
    if parts == 0 {
        return out;
    }
    recurse(total, 0, &mut cur, &mut out);
    out
}

struct Sector {
    basis: Vec<Vec<usize>>,
    amplitudes: Vec<Complex64>,
}

/// The simulated output state, organized by total photon number.
pub struct FockState {
    modes: usize,
    sectors: Vec<Sector>,
    norm_sq: f64,
}

/// Truncated Fock-space simulator. `cutoff` bounds the photon number kept
/// per input mode; whatever falls outside is reported as tail weight.
pub struct FockSimulator {
    cutoff: usize,
}

impl FockSimulator {
    pub fn new(cutoff: usize) -> Result<Self, CorrelationError> {
        if cutoff == 0 || cutoff > MAX_ORACLE_CUTOFF {
            return Err(CorrelationError::SizeGuard(format!(
                "oracle cutoff must be in 1..={MAX_ORACLE_CUTOFF}, got {cutoff}"
            )));
        }
        Ok(FockSimulator { cutoff })
    }

    pub fn simulate(&self, enc: &EncodedSampler) -> Result<FockState, CorrelationError> {
        let m = enc.modes();
        if m > MAX_ORACLE_MODES {
            return Err(CorrelationError::SizeGuard(format!(
                "oracle supports at most {MAX_ORACLE_MODES} modes, got {m}"
            )));
        }
        let (q, phases) = split_unitary(enc.unitary())?;
        let k = rotation_log(&q)?;

        let inputs: Vec<Vec<f64>> = enc
            .squeezing()
            .iter()
            .map(|&r| squeezed_vacuum(r, self.cutoff))
            .collect();

        let mut sectors = Vec::new();
        let mut norm_sq = 0.0f64;
        for total in 0..=(m * self.cutoff) {
            let basis = compositions(total, m);
            let index: HashMap<&[usize], usize> = basis
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_slice(), i))
                .collect();

            // product-state amplitudes, with the diagonal phase layer folded
            // in; occupations above the per-mode cutoff were never computed
            // and stay zero, which is exactly the truncation the tail reports
            let mut amps = vec![Complex64::default(); basis.len()];
            let mut weight = 0.0f64;
            for (i, s) in basis.iter().enumerate() {
                if s.iter().any(|&n| n > self.cutoff) {
                    continue;
                }
                let mut a = Complex64::new(1.0, 0.0);
                for (mode, &n) in s.iter().enumerate() {
                    a *= inputs[mode][n] * phases[mode].powu(n as u32);
                }
                amps[i] = a;
                weight += a.norm_sqr();
            }
            if weight < SECTOR_DROP {
                continue;
            }

            // generator of the rotation restricted to this sector:
            // adag_j a_k |s> = sqrt(s_k (s_j + 1)) |s + e_j - e_k>
            let mut triplets = Vec::new();
            for (col, s) in basis.iter().enumerate() {
                for j in 0..m {
                    for l in 0..m {
                        if j == l || k[(j, l)] == 0.0 || s[l] == 0 {
                            continue;
                        }
                        let mut target = s.clone();
                        target[j] += 1;
                        target[l] -= 1;
                        let row = index[target.as_slice()];
                        let f = ((s[l] * (s[j] + 1)) as f64).sqrt();
                        triplets.push((row, col, k[(j, l)] * f));
                    }
                }
            }
            let amplitudes = expm_action(&triplets, basis.len(), &amps);
            norm_sq += amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
            sectors.push(Sector { basis, amplitudes });
        }

        Ok(FockState { modes: m, sectors, norm_sq })
    }
}

impl FockState {
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Weight the truncation discarded: 1 - |kept state|^2.
    pub fn tail(&self) -> f64 {
        (1.0 - self.norm_sq).max(0.0)
    }

    fn certify(&self) -> Result<f64, CorrelationError> {
        let tail = self.tail();
        if tail > TAIL_TOL {
            return Err(CorrelationError::OracleInconclusive { tail });
        }
        Ok(tail)
    }

    fn check_modes(&self, modes: &[usize]) -> Result<(), CorrelationError> {
        if modes.is_empty() {
            return Err(CorrelationError::UnsupportedOrder(0));
        }
        for &x in modes {
            if x >= self.modes {
                return Err(CorrelationError::ModeOutOfRange { mode: x, modes: self.modes });
            }
        }
        Ok(())
    }

    /// <n_{x_1} .. n_{x_k}> as a plain diagonal expectation over the kept
    /// state, renormalized.
    pub fn moment(&self, modes: &[usize]) -> Result<FockEstimate, CorrelationError> {
        self.check_modes(modes)?;
        let tail = self.certify()?;
        let mut acc = 0.0f64;
        for sector in &self.sectors {
            for (s, a) in sector.basis.iter().zip(&sector.amplitudes) {
                let mut w = a.norm_sqr();
                if w == 0.0 {
                    continue;
                }
                for &x in modes {
                    w *= s[x] as f64;
                }
                acc += w;
            }
        }
        Ok(FockEstimate { value: acc / self.norm_sq, tail })
    }

    /// Joint cumulant over the same Moebius sum the production path uses,
    /// but fed exclusively with Fock moments.
    pub fn cumulant(&self, modes: &[usize]) -> Result<FockEstimate, CorrelationError> {
        self.check_modes(modes)?;
        let tail = self.certify()?;
        let partitions = set_partitions(modes.len())?;
        let mut memo: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut total = 0.0f64;
        for partition in &partitions {
            let b = partition.num_blocks();
            let mut term = if b % 2 == 1 { 1.0 } else { -1.0 };
            for f in 1..b {
                term *= f as f64;
            }
            for block in partition.blocks() {
                let mut key: Vec<usize> = block.iter().map(|&i| modes[i]).collect();
                key.sort_unstable();
                let moment = match memo.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = self.moment(&key)?.value;
                        memo.insert(key, v);
                        v
                    }
                };
                term *= moment;
            }
            total += term;
        }
        Ok(FockEstimate { value: total, tail })
    }

    /// Probability of one exact occupation pattern, unnormalized (the kept
    /// amplitude is the true amplitude up to truncation, so the tail is the
    /// honest error budget).
    pub fn pattern_probability(&self, pattern: &[usize]) -> Result<FockEstimate, CorrelationError> {
        if pattern.len() != self.modes {
            return Err(CorrelationError::Unsupported(format!(
                "pattern length {} does not match {} modes",
                pattern.len(),
                self.modes
            )));
        }
        let tail = self.certify()?;
        let total: usize = pattern.iter().sum();
        let mut value = 0.0f64;
        for sector in &self.sectors {
            if sector.basis.first().map(|s| s.iter().sum::<usize>()) != Some(total) {
                continue;
            }
            if let Some(i) = sector.basis.iter().position(|s| s == pattern) {
                value = sector.amplitudes[i].norm_sqr();
            }
        }
        Ok(FockEstimate { value, tail })
    }
}
