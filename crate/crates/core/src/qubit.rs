//! The two-level battery `H = diag(0, 1)` under a general `U(2)` protocol, in closed form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix, UnitaryOperator};

/// `U = [[a, b], [-conj(b) e^{i phase}, conj(a) e^{i phase}]]` with `|a|^2 + |b|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitUnitary {
    pub a: Complex64,
    pub b: Complex64,
    pub phase: f64,
}

impl QubitUnitary {
    pub fn new(a: Complex64, b: Complex64, phase: f64, tol: f64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Contract(format!(
                "|a|^2 + |b|^2 = {norm}, expected 1"
            )));
        }
        Ok(Self { a, b, phase })
    }

    /// Reads `a`, `b` and the phase off any 2x2 unitary (`e^{i phase} = det U`).
    pub fn from_unitary(u: &UnitaryOperator) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::Dimension("expected a 2x2 unitary".into()));
        }
        let m = u.matrix();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        Ok(Self {
            a: m[(0, 0)],
            b: m[(0, 1)],
            phase: det.arg(),
        })
    }

    pub fn matrix(&self) -> CMatrix {
        let e = Complex64::from_polar(1.0, self.phase);
        CMatrix::from_row_slice(
            2,
            2,
            &[self.a, self.b, -self.b.conj() * e, self.a.conj() * e],
        )
    }

    /// `Delta E = Tr[H (U^dag rho U - rho)]` expanded in the entries of `rho`:
    /// `|b|^2 rho_00 + (|a|^2 - 1) rho_11 + 2 Re(conj(a) conj(b) e^{i phase} rho_01)`.
    ///
    /// For a pure state `rho_00 = |alpha|^2`, `rho_11 = |beta|^2`, `rho_01 = alpha conj(beta)`.
    pub fn delta_e_closed_form(&self, rho: &DensityMatrix) -> f64 {
        let m = rho.matrix();
        let (p0, p1, coh) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let cross = self.a.conj() * self.b.conj() * Complex64::from_polar(1.0, self.phase) * coh;
        self.b.norm_sqr() * p0 + (self.a.norm_sqr() - 1.0) * p1 + 2.0 * cross.re
    }
}

/// `(I + x sigma_x + y sigma_y + z sigma_z) / 2`; the north pole `z = 1` is the ground state.
pub fn bloch_state(x: f64, y: f64, z: f64) -> Result<DensityMatrix> {
    if x * x + y * y + z * z > 1.0 + 1e-12 {
        return Err(Error::Contract("Bloch vector outside the unit ball".into()));
    }
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    );
    Ok(DensityMatrix::new_unchecked(m))
}
