//! Encoding of a symmetric adjacency matrix into a virtual Gaussian boson
//! sampler, and the second-order Gaussian moments of its output state.
//!
//! A rescaled matrix A~ (spectral radius below one) factorizes as
//! A~ = U D U^T with U unitary and D = diag(|lambda_i|) >= 0. For a real
//! symmetric input this follows from the eigendecomposition A~ = Q L Q^T by
//! taking column j of U as q_j when lambda_j >= 0 and i*q_j otherwise, so the
//! squeezing parameters r_i = atanh(|lambda_i|) stay non-negative and the
//! eigenvalue signs live in the column phases.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::spectral_radius;
use crate::linalg;

/// Acceptance bound for |U D U^T - A~| and |U^H U - I| after factorization.
const RECONSTRUCTION_TOL: f64 = 1e-8;
const UNITARITY_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated when a moment matrix is realified.
const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error("cannot encode the zero matrix")]
    ZeroMatrix,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("rescale target alpha = {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("spectral radius {0} not strictly below one")]
    SpectralRadius(f64),
    #[error("eigensolver failed")]
    EigenFailure,
    #[error("factorization residual {0:.3e} above tolerance")]
    FactorizationResidual(f64),
    #[error("(I - A~^2) is numerically singular")]
    Singular,
    #[error("imaginary residue {0:.3e} above tolerance in a moment matrix")]
    ImaginaryResidue(f64),
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<(), EncodingError> {
    if a.nrows() != a.ncols() {
        return Err(EncodingError::NotSquare);
    }
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * a[(i, j)].abs().max(1.0) {
                return Err(EncodingError::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// Scales `a` to spectral radius `alpha`: returns (c*a, c) with
/// c = alpha / rho(a). The zero matrix has no finite c and is rejected.
pub fn rescale(a: &DMatrix<f64>, alpha: f64) -> Result<(DMatrix<f64>, f64), EncodingError> {
    check_symmetric(a)?;
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(EncodingError::InvalidAlpha(alpha));
    }
    let rho = spectral_radius(a).map_err(|_| EncodingError::EigenFailure)?;
    if rho == 0.0 {
        return Err(EncodingError::ZeroMatrix);
    }
    let c = alpha / rho;
    Ok((a * c, c))
}

/// One scale for a pair of matrices: c = alpha / max(rho(a1), rho(a2)), so the
/// rescaled pair stays exactly permutation-conjugate when the inputs are.
pub fn rescale_pair(
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    alpha: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, f64), EncodingError> {
    check_symmetric(a1)?;
    check_symmetric(a2)?;
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(EncodingError::InvalidAlpha(alpha));
    }
    let rho1 = spectral_radius(a1).map_err(|_| EncodingError::EigenFailure)?;
    let rho2 = spectral_radius(a2).map_err(|_| EncodingError::EigenFailure)?;
    let rho = rho1.max(rho2);
    if rho == 0.0 {
        return Err(EncodingError::ZeroMatrix);
    }
    let c = alpha / rho;
    Ok((a1 * c, a2 * c, c))
}

/// A virtual Gaussian boson sampler: interferometer `unitary` and per-mode
/// squeezing parameters, together with the rescale bookkeeping.
#[derive(Clone, Debug)]
pub struct EncodedSampler {
    unitary: DMatrix<Complex64>,
    /// r_i = atanh(|lambda_i|), non-negative, sorted to match `spectrum`.
    squeezing: Vec<f64>,
    /// Signed eigenvalues of the rescaled matrix, descending.
    spectrum: Vec<f64>,
    /// Scale factor applied to the original adjacency matrix.
    rescale_factor: f64,
}

impl EncodedSampler {
    pub fn modes(&self) -> usize {
        self.squeezing.len()
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn squeezing(&self) -> &[f64] {
        &self.squeezing
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn rescale_factor(&self) -> f64 {
        self.rescale_factor
    }

    /// U diag(tanh r~) U^T with the signs restored by the column phases; this
    /// reproduces the rescaled matrix the sampler was built from.
    pub fn kernel(&self) -> DMatrix<f64> {
        let m = self.modes();
        let d = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                Complex64::new(self.squeezing[i].tanh(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let k = &self.unitary * d * self.unitary.transpose();
        DMatrix::from_fn(m, m, |i, j| k[(i, j)].re)
    }
}

/// Autonne-Takagi factorization of a real symmetric matrix with spectral
/// radius below one, packaged as an encoded sampler. `c` records the rescale
/// factor that produced `a_tilde` and is carried through untouched.
pub fn takagi(a_tilde: &DMatrix<f64>, c: f64) -> Result<EncodedSampler, EncodingError> {
    check_symmetric(a_tilde)?;
    let (values, vectors) =
        linalg::symmetric_eigen_desc(a_tilde).ok_or(EncodingError::EigenFailure)?;
    let rho = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if rho >= 1.0 {
        return Err(EncodingError::SpectralRadius(rho));
    }

    let m = a_tilde.nrows();
    let mut unitary = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for j in 0..m {
        let phase = if values[j] >= 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        for i in 0..m {
            unitary[(i, j)] = phase * vectors[(i, j)];
        }
    }
    let squeezing: Vec<f64> = values.iter().map(|v| v.abs().atanh()).collect();

    let sampler = EncodedSampler {
        unitary,
        squeezing,
        spectrum: values,
        rescale_factor: c,
    };

    let residual = (sampler.kernel() - a_tilde)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if residual > RECONSTRUCTION_TOL {
        return Err(EncodingError::FactorizationResidual(residual));
    }
    let gram = sampler.unitary.adjoint() * &sampler.unitary;
    let unit_residual = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .fold(0.0f64, |acc, (i, j)| {
            let want = if i == j { 1.0 } else { 0.0 };
            acc.max((gram[(i, j)] - Complex64::new(want, 0.0)).norm())
        });
    if unit_residual > UNITARITY_TOL {
        return Err(EncodingError::FactorizationResidual(unit_residual));
    }
    Ok(sampler)
}

/// rescale followed by takagi.
pub fn encode(a: &DMatrix<f64>, alpha: f64) -> Result<EncodedSampler, EncodingError> {
    let (a_tilde, c) = rescale(a, alpha)?;
    takagi(&a_tilde, c)
}

/// Encodes two matrices under one shared rescale factor.
pub fn encode_pair(
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    alpha: f64,
) -> Result<(EncodedSampler, EncodedSampler), EncodingError> {
    let (t1, t2, c) = rescale_pair(a1, a2, alpha)?;
    Ok((takagi(&t1, c)?, takagi(&t2, c)?))
}

/// Second moments of the sampler output state: the number contraction
/// N_xy = <adag_x a_y> and the pair contraction E_xy = <a_x a_y>. Both are
/// real symmetric for the phase convention used here.
#[derive(Clone, Debug)]
pub struct GaussianMoments {
    pub n: DMatrix<f64>,
    pub e: DMatrix<f64>,
}

impl GaussianMoments {
    pub fn modes(&self) -> usize {
        self.n.nrows()
    }
}

fn realify(m: DMatrix<Complex64>) -> Result<DMatrix<f64>, EncodingError> {
    let worst = m.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if worst > IMAG_TOL {
        return Err(EncodingError::ImaginaryResidue(worst));
    }
    let mut out = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re);
    // realifying can leave symmetric entries a few ulps apart
    for i in 0..out.nrows() {
        for j in (i + 1)..out.ncols() {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    Ok(out)
}

/// Propagates the per-mode squeezed inputs through the interferometer:
///   N_xy = sum_a sinh^2(r_a) conj(U_xa) U_ya
///   E_xy = sum_a (sinh(2 r_a) / 2) U_xa U_ya
pub fn moments_from_sampler(enc: &EncodedSampler) -> Result<GaussianMoments, EncodingError> {
    let m = enc.modes();
    let diag = |f: &dyn Fn(f64) -> f64| {
        DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                Complex64::new(f(enc.squeezing[i]), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let dn = diag(&|r: f64| r.sinh().powi(2));
    let de = diag(&|r: f64| (2.0 * r).sinh() / 2.0);
    let u = &enc.unitary;
    let n = u.map(|z| z.conj()) * dn * u.transpose();
    let e = u * de * u.transpose();
    Ok(GaussianMoments { n: realify(n)?, e: realify(e)? })
}

/// The same moments in closed form, bypassing the factorization:
///   N = A~^2 (I - A~^2)^-1,   E = A~ (I - A~^2)^-1.
pub fn moments_direct(a_tilde: &DMatrix<f64>) -> Result<GaussianMoments, EncodingError> {
    check_symmetric(a_tilde)?;
    let m = a_tilde.nrows();
    let a2 = a_tilde * a_tilde;
    let sys = DMatrix::identity(m, m) - &a2;
    let lu = sys.lu();
    let n = lu.solve(&a2).ok_or(EncodingError::Singular)?;
    let e = lu.solve(a_tilde).ok_or(EncodingError::Singular)?;
    Ok(GaussianMoments { n, e })
}
