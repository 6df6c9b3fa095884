use num_complex::Complex64;

use super::{max_abs, CMatrix, DensityMatrix, UnitaryOperator, ONE};
use crate::error::{dim_err, Error, Result};

/// A CPTP map `rho -> sum_k K_k rho K_k^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>, tol_unitary: f64) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Contract("channel needs at least one Kraus operator".into()))?;
        let dim = first.nrows();
        if let Some(k) = kraus.iter().find(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(dim_err(format!(
                "Kraus operator is {}x{}, expected {dim}x{dim}",
                k.nrows(),
                k.ncols()
            )));
        }
        let channel = Self { dim, kraus };
        let residual = channel.completeness_residual();
        if residual > tol_unitary {
            return Err(Error::IncompleteChannel {
                residual,
                tol: tol_unitary,
            });
        }
        Ok(channel)
    }

    pub fn from_unitary(u: &UnitaryOperator) -> Self {
        Self {
            dim: u.dim(),
            kraus: vec![u.matrix().clone()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `max |sum_k K_k^dag K_k - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .kraus
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k.adjoint() * k
            });
        max_abs(&(sum - CMatrix::identity(self.dim, self.dim)))
    }

    /// `sum_k K_k K_k^dag`, the image of the identity. Equals `I` only for unital maps.
    pub fn image_of_identity(&self) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k * k.adjoint()
            })
    }

    /// Action on an arbitrary operator (not necessarily a state).
    pub fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k * x * k.adjoint()
            })
    }

    /// Heisenberg-picture action `X -> sum_k K_k^dag X K_k`.
    pub fn dual_apply(&self, x: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k.adjoint() * x * k
            })
    }

    /// Choi matrix `sum_ij |i><j| (x) M(|i><j|)`, battery-major. Two channels are equal iff their
    /// Choi matrices are.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = CMatrix::zeros(d, d);
                unit[(i, j)] = ONE;
                let image = self.apply_operator(&unit);
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
            }
        }
        choi
    }

    /// `max |Choi(self) - Choi(other)|`.
    pub fn choi_distance(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(dim_err("comparing channels of different dimension"));
        }
        Ok(max_abs(&(self.choi() - other.choi())))
    }

    /// Convex combination `weight * self + (1 - weight) * other`.
    pub fn mixture(&self, other: &Self, weight: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(dim_err("mixing channels of different dimension"));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Contract(format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        let a = Complex64::new(weight.sqrt(), 0.0);
        let b = Complex64::new((1.0 - weight).sqrt(), 0.0);
        let kraus = self
            .kraus
            .iter()
            .map(|k| k * a)
            .chain(other.kraus.iter().map(|k| k * b))
            .collect();
        Ok(Self {
            dim: self.dim,
            kraus,
        })
    }
}

pub fn apply_channel(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.dim() != rho.dim() {
        return Err(dim_err(format!(
            "channel acts on dimension {}, state has dimension {}",
            channel.dim(),
            rho.dim()
        )));
    }
    Ok(DensityMatrix::new_unchecked(
        channel.apply_operator(rho.matrix()),
    ))
}
