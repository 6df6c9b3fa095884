//! Dense complex linear algebra on battery states and channels.
//!
//! Composite spaces are always ordered battery-major: the basis vector
//! `|n, a>` of `H_B (x) H_E` sits at index `n * dim_E + a`.

mod channel;
mod spectral;
mod state;

pub use channel::{apply_channel, QuantumChannel};
pub use spectral::{eig_hermitian, expm_hermitian, SpectralDecomposition};
pub use state::{validate_density, DensityMatrix, UnitaryOperator, ValidationReport};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{dim_err, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerances shared by the validators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub unitary: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            unitary: 1e-10,
            psd: 1e-9,
        }
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |U^dag U - I|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Kronecker product with the left factor's index varying slowest.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

/// Computational basis vector `|index>`.
pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = ONE;
    v
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `sigma_+ = (sigma_x + i sigma_y) / 2`, mapping `|down>` to `|up>` (qubit index 1 to 0).
pub fn sigma_plus() -> CMatrix {
    (pauli_x() + pauli_y() * I) * Complex64::new(0.5, 0.0)
}

pub fn sigma_minus() -> CMatrix {
    (pauli_x() - pauli_y() * I) * Complex64::new(0.5, 0.0)
}

/// Which factor of a bipartite battery-major operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    Battery,
    Environment,
}

/// Partial trace of a `(dim_b * dim_e)`-dimensional battery-major operator.
pub fn partial_trace(m: &CMatrix, dim_b: usize, dim_e: usize, keep: Keep) -> Result<CMatrix> {
    let n = dim_b * dim_e;
    if m.nrows() != n || m.ncols() != n {
        return Err(dim_err(format!(
            "operator is {}x{}, expected {n}x{n} for dims {dim_b}x{dim_e}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Keep::Battery => CMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_e).map(|a| m[(i * dim_e + a, j * dim_e + a)]).sum()
        }),
        Keep::Environment => CMatrix::from_fn(dim_e, dim_e, |a, b| {
            (0..dim_b).map(|i| m[(i * dim_e + a, i * dim_e + b)]).sum()
        }),
    })
}

/// `rho_B = Tr_E rho_total`.
pub fn partial_trace_env(
    rho_total: &DensityMatrix,
    dim_b: usize,
    dim_e: usize,
) -> Result<DensityMatrix> {
    partial_trace(rho_total.matrix(), dim_b, dim_e, Keep::Battery).map(DensityMatrix::new_unchecked)
}

/// `rho_E = Tr_B rho_total`.
pub fn partial_trace_battery(
    rho_total: &DensityMatrix,
    dim_b: usize,
    dim_e: usize,
) -> Result<DensityMatrix> {
    partial_trace(rho_total.matrix(), dim_b, dim_e, Keep::Environment)
        .map(DensityMatrix::new_unchecked)
}

/// `Tr[H rho]` for a Hermitian `H`; the imaginary part is discarded.
pub fn expected_energy(hamiltonian: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    if hamiltonian.nrows() != rho.dim() || hamiltonian.ncols() != rho.dim() {
        return Err(dim_err(format!(
            "hamiltonian is {}x{}, state is {}x{}",
            hamiltonian.nrows(),
            hamiltonian.ncols(),
            rho.dim(),
            rho.dim()
        )));
    }
    Ok(trace_product(hamiltonian, rho.matrix()).re)
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_identity() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(tensor_product(&i2, &i2), CMatrix::identity(4, 4));
    }

    #[test]
    fn tensor_is_battery_major() {
        let h = diag(&[1.5, 2.5]);
        let out = tensor_product(&h, &CMatrix::identity(2, 2));
        assert_eq!(out, diag(&[1.5, 1.5, 2.5, 2.5]));
    }

    #[test]
    fn raising_coupling_has_single_entry() {
        // s^dag on N = 2 maps |1> -> |2>; sigma_+ maps down -> up.
        let s_dag = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
        let out = tensor_product(&s_dag, &sigma_plus());
        let nonzero: Vec<_> = (0..4)
            .flat_map(|r| (0..4).map(move |col| (r, col)))
            .filter(|&(r, col)| out[(r, col)].norm() > 0.0)
            .collect();
        // row |2, up> = 2, column |1, down> = 1
        assert_eq!(nonzero, vec![(2, 1)]);
        assert_eq!(out[(2, 1)], ONE);
    }

    #[test]
    fn pauli_ladder_ops() {
        assert_eq!(
            sigma_plus(),
            CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
        );
        assert_eq!(sigma_minus(), sigma_plus().adjoint());
        assert_eq!(pauli_z(), diag(&[1.0, -1.0]));
    }

    #[test]
    fn partial_trace_of_product() {
        let rb = DensityMatrix::new(
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(0.7),
                    Complex64::new(0.1, 0.2),
                    Complex64::new(0.1, -0.2),
                    c(0.3),
                ],
            ),
            &Tolerances::default(),
        )
        .unwrap();
        let re = DensityMatrix::maximally_mixed(3);
        let joint = DensityMatrix::new_unchecked(tensor_product(rb.matrix(), re.matrix()));
        let back = partial_trace_env(&joint, 2, 3).unwrap();
        assert!(max_abs(&(back.matrix() - rb.matrix())) < 1e-15);
        let env = partial_trace_battery(&joint, 2, 3).unwrap();
        assert!(max_abs(&(env.matrix() - re.matrix())) < 1e-15);
    }

    #[test]
    fn bell_state_reduces_to_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![c(h), ZERO, ZERO, c(h)]);
        let bell = DensityMatrix::from_pure(&psi).unwrap();
        let reduced = partial_trace_env(&bell, 2, 2).unwrap();
        assert!(max_abs(&(reduced.matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(matches!(
            partial_trace_env(&rho, 4, 2),
            Err(crate::Error::Dimension(_))
        ));
    }

    #[test]
    fn energy_examples() {
        let h = diag(&[0.0, 1.0]);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(expected_energy(&h, &mixed).unwrap(), 0.5);
        let h3 = diag(&[-1.0, 0.25, 4.0]);
        for (n, e) in [-1.0, 0.25, 4.0].into_iter().enumerate() {
            let p = DensityMatrix::basis_projector(3, n);
            assert_eq!(expected_energy(&h3, &p).unwrap(), e);
        }
        assert!(expected_energy(&h3, &mixed).is_err());
    }

    #[test]
    fn qubit_pure_state_energy_is_excited_population() {
        // rho = [[|alpha|^2, alpha beta*], [alpha* beta, |beta|^2]]
        let alpha = Complex64::new(0.6, 0.0);
        let beta = Complex64::from_polar(0.8, 0.7);
        let rho = CMatrix::from_row_slice(
            2,
            2,
            &[
                alpha * alpha.conj(),
                alpha * beta.conj(),
                alpha.conj() * beta,
                beta * beta.conj(),
            ],
        );
        let rho = DensityMatrix::new(rho, &Tolerances::default()).unwrap();
        let e = expected_energy(&diag(&[0.0, 1.0]), &rho).unwrap();
        assert!((e - beta.norm_sqr()).abs() < 1e-15);
    }
}
