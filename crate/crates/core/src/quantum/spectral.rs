use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{hermiticity_residual, CMatrix, CVector};
use crate::error::{dim_err, Error, Result};

/// Eigenvector columns whose leading component is below this modulus are not used for the
/// phase convention.
const PHASE_ANCHOR_MIN: f64 = 1e-8;

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
///
/// Each eigenvector is rotated so that its first component of modulus above `1e-8` is real
/// and positive, which makes the output reproducible bit for bit.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn eigenvector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `max_i || A v_i - lambda_i v_i ||`.
    pub fn residual(&self, a: &CMatrix) -> f64 {
        let av = a * &self.eigenvectors;
        (0..self.dim())
            .map(|i| {
                let lambda = Complex64::new(self.eigenvalues[i], 0.0);
                (av.column(i) - self.eigenvectors.column(i) * lambda).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^dag V - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        super::unitarity_residual(&self.eigenvectors)
    }

    /// `V f(Lambda) V^dag`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(i).iter_mut().for_each(|z| *z *= w);
        }
        scaled * v.adjoint()
    }
}

pub fn eig_hermitian(a: &CMatrix, tol_herm: f64) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return Err(dim_err(format!(
            "eig_hermitian on {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let herm = hermiticity_residual(a);
    if herm > tol_herm {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian (residual {herm:.3e})"
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let symmetric = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(symmetric);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        if let Some(anchor) = col.iter().find(|z| z.norm() > PHASE_ANCHOR_MIN).copied() {
            let phase = anchor.conj() / anchor.norm();
            col.iter_mut().for_each(|z| *z *= phase);
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `exp(-i H t)` for Hermitian `H`, computed from its spectral decomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64, tol_herm: f64) -> Result<CMatrix> {
    let eig = eig_hermitian(h, tol_herm)?;
    Ok(eig.map(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}
