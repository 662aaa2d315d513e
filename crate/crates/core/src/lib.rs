//! Decide or refute graph isomorphism by comparing the photon-number
//! statistics of virtual Gaussian boson samplers.
//!
//! Each adjacency matrix is rescaled to spectral radius below one and encoded
//! into a sampler (an interferometer plus single-mode squeezers) whose output
//! mode correlations are graph invariants. Cumulant tensors of increasing
//! order progressively constrain a candidate vertex-correspondence matrix;
//! the pipeline either extracts and verifies an isomorphism witness, proves
//! the candidate set empty, or reports that the budget was exhausted.
//!
//! Nothing here is sampled: all sampler statistics are evaluated in closed
//! form, with a small truncated Fock-space simulator serving as an
//! independent oracle in the test suite.

pub mod baselines;
pub mod correlations;
pub mod encoding;
pub mod graph;
pub mod pipeline;
pub mod refinement;
pub(crate) mod linalg;

pub use graph::{Graph, Permutation};
pub use pipeline::{run, Config, Outcome, RunReport, Verdict};
