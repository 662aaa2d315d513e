//! Small shared linear-algebra helpers.

use nalgebra::{DMatrix, SymmetricEigen};

/// Iteration cap for the symmetric QR sweep; generous enough that hitting it
/// signals a genuine numerical problem rather than a large input.
const EIGEN_MAX_ITER: usize = 100_000;

/// Eigendecomposition of a real symmetric matrix with eigenvalues sorted in
/// descending order and eigenvector columns permuted to match. Returns `None`
/// if the iteration fails to converge.
pub(crate) fn symmetric_eigen_desc(a: &DMatrix<f64>) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let m = a.nrows();
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, EIGEN_MAX_ITER)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("symmetric eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Some((values, vectors))
}

/// Max-abs elementwise reconstruction residual |Q diag(v) Q^T - A|.
pub(crate) fn reconstruction_residual(
    a: &DMatrix<f64>,
    values: &[f64],
    vectors: &DMatrix<f64>,
) -> f64 {
    let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values));
    let rebuilt = vectors * lam * vectors.transpose();
    (rebuilt - a).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_descending_and_orthonormal() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen_desc(&a).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let gram = vecs.transpose() * &vecs;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - want).abs() < 1e-12);
            }
        }
        assert!(reconstruction_residual(&a, &vals, &vecs) < 1e-12);
    }
}
