//! Adjacency spectra and the cospectrality gate.

use nalgebra::DMatrix;

use super::{Graph, GraphError};
use crate::linalg;

/// Residual bound for accepting an eigendecomposition, relative to the
/// Frobenius norm of the input.
const RESIDUAL_REL: f64 = 1e-10;
/// Absolute floor so that near-zero matrices are not held to a vacuous bound.
const RESIDUAL_ABS: f64 = 1e-14;

/// Adjacency eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Groups eigenvalues into (value, multiplicity) pairs; consecutive values
    /// within `tol` of each other share a group, represented by the first.
    pub fn multiplicities(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut groups: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match groups.last_mut() {
                Some((rep, count)) if (*rep - v).abs() <= tol => *count += 1,
                _ => groups.push((v, 1)),
            }
        }
        groups
    }

    /// Largest eigenvalue magnitude.
    pub fn radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Eigenvalues of the adjacency matrix, sorted descending. The decomposition
/// is rejected if its reconstruction residual is out of tolerance.
pub fn spectrum(g: &Graph) -> Result<Spectrum, GraphError> {
    matrix_spectrum(g.adjacency())
}

pub(crate) fn matrix_spectrum(a: &DMatrix<f64>) -> Result<Spectrum, GraphError> {
    let (values, vectors) = linalg::symmetric_eigen_desc(a).ok_or(GraphError::EigenFailure)?;
    let residual = linalg::reconstruction_residual(a, &values, &vectors);
    let bound = RESIDUAL_REL * a.norm() + RESIDUAL_ABS;
    if residual > bound {
        return Err(GraphError::EigenResidual { residual });
    }
    Ok(Spectrum { values })
}

/// Spectral radius of a symmetric matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64, GraphError> {
    Ok(matrix_spectrum(a)?.radius())
}

/// True when the sorted spectra agree elementwise within `tol`. Cospectrality
/// is necessary for isomorphism, so `false` certifies non-isomorphic inputs
/// while `true` decides nothing.
pub fn spectral_gate(g1: &Graph, g2: &Graph, tol: f64) -> Result<bool, GraphError> {
    if g1.order() != g2.order() {
        return Ok(false);
    }
    let s1 = spectrum(g1)?;
    let s2 = spectrum(g2)?;
    Ok(s1
        .values()
        .iter()
        .zip(s2.values())
        .all(|(a, b)| (a - b).abs() <= tol))
}
