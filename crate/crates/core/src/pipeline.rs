//! The end-to-end isomorphism decision procedure: spectral gate, shared
//! encoding, cumulant-tensor refinement rounds with a cost-model driven
//! switch to explicit enumeration, and a serializable run report.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::correlations::{CorrelationError, CorrelationTensor};
use crate::encoding::{moments_from_sampler, rescale_pair, takagi, EncodingError};
use crate::graph::{is_isomorphism, spectral_gate, Graph, GraphError, Permutation};
use crate::refinement::{
    classify, enumerate_and_verify, quantization_step, refine, surviving_count, CandidateMatrix,
    CostModel, RefinementError, SigmaStatus,
};

/// Tolerance of the spectral pre-gate.
pub const GATE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Refinement(#[from] RefinementError),
}

/// Pipeline parameters. `threads` and `seed` do not influence `run` itself
/// (thread pools are global, randomness only enters generation); they are
/// carried so a report records the full execution context.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    /// Highest cumulant order tried before falling back to enumeration.
    pub kmax: usize,
    /// Spectral radius the rescaled adjacency is normalized to.
    pub alpha: f64,
    /// Quantization step relative to the largest tensor entry.
    pub tau_rel: f64,
    /// Node budget for the final enumeration.
    pub enum_cap: u64,
    pub threads: Option<usize>,
    pub seed: u64,
    /// Record wall-clock milliseconds per round. Off by default so reports
    /// are byte-identical across runs.
    pub timings: bool,
    /// Scales the refine-vs-enumerate cost threshold.
    pub cost_scale: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            kmax: 3,
            alpha: 0.9,
            tau_rel: 1e-9,
            enum_cap: 1_000_000,
            threads: None,
            seed: 0,
            timings: false,
            cost_scale: 1.0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.kmax == 0 || self.kmax > crate::correlations::MAX_TENSOR_ORDER {
            return Err(PipelineError::Config(format!(
                "kmax must be in 1..={}, got {}",
                crate::correlations::MAX_TENSOR_ORDER,
                self.kmax
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(PipelineError::Config(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.tau_rel > 0.0 && self.tau_rel.is_finite()) {
            return Err(PipelineError::Config(format!(
                "tau_rel must be positive and finite, got {}",
                self.tau_rel
            )));
        }
        if self.enum_cap == 0 {
            return Err(PipelineError::Config("enum_cap must be positive".into()));
        }
        if !(self.cost_scale > 0.0 && self.cost_scale.is_finite()) {
            return Err(PipelineError::Config(format!(
                "cost_scale must be positive and finite, got {}",
                self.cost_scale
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Isomorphic,
    NotIsomorphic,
    Indeterminate,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Isomorphic => "isomorphic",
            Verdict::NotIsomorphic => "not_isomorphic",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    OrderMismatch,
    SpectralGate,
    /// Refinement round `k` left a vertex with no candidates (or a support
    /// with permanent zero).
    InvalidSigma { k: usize },
    /// Round `k` pinned a unique candidate that fails adjacency verification.
    WitnessFailed { k: usize },
    /// Exhaustive search of the surviving candidates after round `k` found
    /// nothing.
    EnumerationExhausted { k: usize },
}

impl RejectReason {
    pub fn label(&self) -> &'static str {
        match self {
            RejectReason::OrderMismatch => "order_mismatch",
            RejectReason::SpectralGate => "spectral_gate",
            RejectReason::InvalidSigma { .. } => "invalid_sigma",
            RejectReason::WitnessFailed { .. } => "witness_failed",
            RejectReason::EnumerationExhausted { .. } => "enumeration_exhausted",
        }
    }
}

/// What a run decided, with full supporting data.
#[derive(Clone, Debug)]
pub enum Outcome {
    Isomorphic { witness: Permutation },
    NotIsomorphic { reason: RejectReason },
    /// The procedure gave up after round `k` with at least one candidate
    /// left; `surviving` counts (or bounds) the permutations not yet ruled
    /// out. Says nothing about isomorphism either way.
    Indeterminate { k: usize, surviving: BigUint },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Invalid,
    Valid,
    IndeterminateBelow,
    IndeterminateAbove,
}

impl TraceStatus {
    pub fn label(&self) -> &'static str {
        match self {
            TraceStatus::Invalid => "invalid",
            TraceStatus::Valid => "valid",
            TraceStatus::IndeterminateBelow => "indeterminate_below",
            TraceStatus::IndeterminateAbove => "indeterminate_above",
        }
    }
}

/// One refinement round in the report.
#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub k: usize,
    /// Candidate-matrix population after this round's refinement.
    pub surviving: usize,
    pub status: TraceStatus,
    /// Wall-clock for the round; null unless `Config::timings` is set.
    pub millis: Option<u128>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Permutation>,
    /// Decimal count (or upper bound) of surviving permutations; present
    /// only on indeterminate verdicts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surviving_bound: Option<String>,
    /// Final candidate matrix as '0'/'1' rows; present only on
    /// indeterminate verdicts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<CandidateMatrix>,
    pub trace: Vec<TraceEntry>,
    pub config: Config,
    pub versions: BTreeMap<String, String>,
    #[serde(skip)]
    pub outcome: Outcome,
}

fn base_versions() -> BTreeMap<String, String> {
    let mut v = BTreeMap::new();
    v.insert("gbsiso".to_string(), env!("CARGO_PKG_VERSION").to_string());
    v
}

fn conclude(
    outcome: Outcome,
    trace: Vec<TraceEntry>,
    config: &Config,
    order: usize,
    sigma: Option<CandidateMatrix>,
) -> RunReport {
    let (verdict, reason, witness, surviving_bound) = match &outcome {
        Outcome::Isomorphic { witness } => {
            (Verdict::Isomorphic, None, Some(witness.clone()), None)
        }
        Outcome::NotIsomorphic { reason } => (
            Verdict::NotIsomorphic,
            Some(reason.label().to_string()),
            None,
            None,
        ),
        Outcome::Indeterminate { surviving, .. } => (
            Verdict::Indeterminate,
            None,
            None,
            Some(surviving.to_string()),
        ),
    };
    let sigma = match outcome {
        Outcome::Indeterminate { .. } => sigma,
        _ => None,
    };
    RunReport {
        verdict,
        reason,
        order,
        witness,
        surviving_bound,
        sigma,
        trace,
        config: config.clone(),
        versions: base_versions(),
        outcome,
    }
}

/// Decides whether `g1` and `g2` are isomorphic.
///
/// Rounds k = 1..=kmax build order-k cumulant tensors for both encodings and
/// strike candidate pairs whose quantized slice multisets differ. After each
/// round the candidate matrix is classified; enumeration takes over as soon
/// as checking the survivors is no more expensive than the next tensor
/// order. `ISOMORPHIC` always carries a verified witness; `NOT_ISOMORPHIC`
/// relies on the quantization step not splitting genuinely equal slice
/// values, which `tau_rel` controls.
pub fn run(g1: &Graph, g2: &Graph, config: &Config) -> Result<RunReport, PipelineError> {
    config.validate()?;
    let m = g1.order();
    let mut trace: Vec<TraceEntry> = Vec::new();

    if g2.order() != m {
        return Ok(conclude(
            Outcome::NotIsomorphic { reason: RejectReason::OrderMismatch },
            trace,
            config,
            m,
            None,
        ));
    }
    if !spectral_gate(g1, g2, GATE_TOL)? {
        return Ok(conclude(
            Outcome::NotIsomorphic { reason: RejectReason::SpectralGate },
            trace,
            config,
            m,
            None,
        ));
    }
    if g1.is_zero() && g2.is_zero() {
        // edgeless graphs of equal order; the encoder has nothing to rescale
        // and any bijection is an isomorphism
        return Ok(conclude(
            Outcome::Isomorphic { witness: Permutation::identity(m) },
            trace,
            config,
            m,
            None,
        ));
    }

    let (t1, t2, c) = rescale_pair(g1.adjacency(), g2.adjacency(), config.alpha)?;
    let enc1 = takagi(&t1, c)?;
    let enc2 = takagi(&t2, c)?;
    let mom1 = moments_from_sampler(&enc1)?;
    let mom2 = moments_from_sampler(&enc2)?;

    let mut sigma = CandidateMatrix::full(m);
    let model = CostModel { cost_scale: config.cost_scale };

    for k in 1..=config.kmax {
        let started = config.timings.then(Instant::now);
        let (r1, r2) = rayon::join(
            || CorrelationTensor::compute(&mom1, k),
            || CorrelationTensor::compute(&mom2, k),
        );
        let (c1, c2) = match (r1, r2) {
            (Ok(c1), Ok(c2)) => (c1, c2),
            (Err(CorrelationError::SizeGuard(_)), _)
            | (_, Err(CorrelationError::SizeGuard(_))) => {
                // the next tensor does not fit; report what survived so far
                let surviving = surviving_count(&sigma)?;
                return Ok(conclude(
                    Outcome::Indeterminate { k: k - 1, surviving },
                    trace,
                    config,
                    m,
                    Some(sigma),
                ));
            }
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        };

        let tau = quantization_step(&c1, &c2, config.tau_rel);
        let surviving = refine(&mut sigma, &c1, &c2, tau)?;
        let status = classify(&sigma, k, &model)?;
        trace.push(TraceEntry {
            k,
            surviving,
            status: match status {
                SigmaStatus::Invalid => TraceStatus::Invalid,
                SigmaStatus::Valid(_) => TraceStatus::Valid,
                SigmaStatus::IndeterminateBelow(_) => TraceStatus::IndeterminateBelow,
                SigmaStatus::IndeterminateAbove(_) => TraceStatus::IndeterminateAbove,
            },
            millis: started.map(|s| s.elapsed().as_millis()),
        });

        match status {
            SigmaStatus::Invalid => {
                return Ok(conclude(
                    Outcome::NotIsomorphic { reason: RejectReason::InvalidSigma { k } },
                    trace,
                    config,
                    m,
                    None,
                ));
            }
            SigmaStatus::Valid(witness) => {
                let outcome = if is_isomorphism(g1, g2, &witness) {
                    Outcome::Isomorphic { witness }
                } else {
                    Outcome::NotIsomorphic { reason: RejectReason::WitnessFailed { k } }
                };
                return Ok(conclude(outcome, trace, config, m, None));
            }
            SigmaStatus::IndeterminateBelow(count) => {
                return match enumerate_and_verify(g1, g2, &sigma, config.enum_cap) {
                    Ok(Some(witness)) => Ok(conclude(
                        Outcome::Isomorphic { witness },
                        trace,
                        config,
                        m,
                        None,
                    )),
                    Ok(None) => Ok(conclude(
                        Outcome::NotIsomorphic {
                            reason: RejectReason::EnumerationExhausted { k },
                        },
                        trace,
                        config,
                        m,
                        None,
                    )),
                    Err(RefinementError::EnumerationCap(_)) => Ok(conclude(
                        Outcome::Indeterminate { k, surviving: count },
                        trace,
                        config,
                        m,
                        Some(sigma),
                    )),
                    Err(e) => Err(e.into()),
                };
            }
            SigmaStatus::IndeterminateAbove(_) => {}
        }
    }

    // all rounds spent with the candidate set still wide: last-ditch search
    match enumerate_and_verify(g1, g2, &sigma, config.enum_cap) {
        Ok(Some(witness)) => Ok(conclude(
            Outcome::Isomorphic { witness },
            trace,
            config,
            m,
            None,
        )),
        Ok(None) => Ok(conclude(
            Outcome::NotIsomorphic {
                reason: RejectReason::EnumerationExhausted { k: config.kmax },
            },
            trace,
            config,
            m,
            None,
        )),
        Err(RefinementError::EnumerationCap(_)) => {
            let surviving = surviving_count(&sigma)?;
            Ok(conclude(
                Outcome::Indeterminate { k: config.kmax, surviving },
                trace,
                config,
                m,
                Some(sigma),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

/// A labeled pair for batch runs; `truth` is the known answer when the
/// corpus ships one.
#[derive(Clone, Debug)]
pub struct CorpusPair {
    pub id: String,
    pub g1: Graph,
    pub g2: Graph,
    pub truth: Option<bool>,
}

/// Per-pair result of a corpus run. Always timed: batch runs are for
/// benchmarking and never promise byte determinism.
#[derive(Debug, Serialize)]
pub struct PairOutcome {
    pub id: String,
    pub verdict: Option<Verdict>,
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surviving_bound: Option<String>,
    pub millis: u128,
    pub truth: Option<bool>,
    /// Whether a definite verdict matches `truth`; null when either is
    /// missing.
    pub agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Runs every pair, in parallel, collecting outcomes in corpus order.
pub fn run_corpus(pairs: &[CorpusPair], config: &Config) -> Vec<PairOutcome> {
    pairs
        .par_iter()
        .map(|pair| {
            let started = Instant::now();
            match run(&pair.g1, &pair.g2, config) {
                Ok(report) => {
                    let agrees = pair.truth.and_then(|truth| match report.verdict {
                        Verdict::Isomorphic => Some(truth),
                        Verdict::NotIsomorphic => Some(!truth),
                        Verdict::Indeterminate => None,
                    });
                    PairOutcome {
                        id: pair.id.clone(),
                        verdict: Some(report.verdict),
                        reason: report.reason,
                        surviving_bound: report.surviving_bound,
                        millis: started.elapsed().as_millis(),
                        truth: pair.truth,
                        agrees,
                        error: None,
                    }
                }
                Err(e) => PairOutcome {
                    id: pair.id.clone(),
                    verdict: None,
                    reason: None,
                    surviving_bound: None,
                    millis: started.elapsed().as_millis(),
                    truth: pair.truth,
                    agrees: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
