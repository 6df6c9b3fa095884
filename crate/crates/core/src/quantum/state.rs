use num_complex::Complex64;
use serde::Serialize;

use super::{
    eig_hermitian, hermiticity_residual, max_abs, trace, unitarity_residual, CMatrix, CVector,
    Tolerances, ONE,
};
use crate::error::{dim_err, Error, Result};

/// Per-invariant residuals of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// `max(0, -min_eigenvalue)`.
    pub psd_residual: f64,
}

pub fn validate_density(m: &CMatrix, tol: &Tolerances) -> Result<ValidationReport> {
    if !m.is_square() {
        return Err(dim_err(format!(
            "density matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let hermiticity_residual = hermiticity_residual(m);
    let trace_residual = (trace(m) - ONE).norm();
    let hermitian_part = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eigenvalue = if m.nrows() == 0 {
        0.0
    } else {
        eig_hermitian(&hermitian_part, f64::INFINITY)?.min()
    };
    let psd_residual = (-min_eigenvalue).max(0.0);
    let ok = m.nrows() > 0
        && hermiticity_residual <= tol.herm
        && trace_residual <= tol.trace
        && min_eigenvalue >= -tol.psd;
    Ok(ValidationReport {
        ok,
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        psd_residual,
    })
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        let report = validate_density(&matrix, tol)?;
        if !report.ok {
            return Err(Error::Contract(format!(
                "not a density matrix: hermiticity {:.3e}, trace {:.3e}, min eigenvalue {:.3e}",
                report.hermiticity_residual, report.trace_residual, report.min_eigenvalue
            )));
        }
        Ok(Self { matrix })
    }

    /// Callers guarantee validity (outputs of channels and partial traces of valid states).
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::Contract("pure state vector must be nonzero".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self {
            matrix: &v * v.adjoint(),
        })
    }

    /// `|index><index|`.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Self { matrix: m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// `a * self + (1 - a) * other` for `a` in `[0, 1]`.
    pub fn mix(&self, other: &Self, a: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(dim_err("mixing states of different dimension"));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Contract(format!("mixing weight {a} outside [0, 1]")));
        }
        Ok(Self {
            matrix: self.matrix.scale(a) + other.matrix.scale(1.0 - a),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `U rho U^dag`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim() || !u.is_square() {
            return Err(dim_err(
                "conjugating operator does not match state dimension",
            ));
        }
        Ok(Self {
            matrix: u * &self.matrix * u.adjoint(),
        })
    }

    /// `max |rho - sigma|`.
    pub fn distance_max(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.matrix - &other.matrix))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix, tol_unitary: f64) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        if residual > tol_unitary {
            return Err(Error::NotUnitary {
                residual,
                tol: tol_unitary,
            });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self * other`: `other` acts first.
    pub fn then_after(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(dim_err("composing unitaries of different dimension"));
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }
}
