//! Haar-random unitaries, random states and channels, and the Haar-averaged energy change.
//!
//! Every random quantity drawn under a seed uses a ChaCha stream selected by the sample
//! index, so results do not depend on how samples are scheduled across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::battery::LadderHamiltonian;
use crate::error::{dim_err, Error, Result};
use crate::quantum::{
    trace, trace_product, CMatrix, CVector, DensityMatrix, QuantumChannel, UnitaryOperator,
};

/// Independent generator for sample `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with `E|G_ij|^2 = 1`.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOperator {
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        let phase = if norm > 0.0 {
            rjj / norm
        } else {
            Complex64::new(1.0, 0.0)
        };
        col.iter_mut().for_each(|z| *z *= phase);
    }
    UnitaryOperator::new_unchecked(q)
}

pub fn sample_haar_unitary(d: usize, seed: u64) -> UnitaryOperator {
    haar_unitary(d, &mut substream(seed, 0))
}

/// `count` Haar unitaries, sample `i` drawn from `substream(seed, i)`.
pub fn sample_haar_unitaries(d: usize, count: usize, seed: u64) -> Vec<UnitaryOperator> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| haar_unitary(d, &mut substream(seed, i)))
        .collect()
}

/// Uniformly distributed pure state.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let psi = CVector::from_fn(d, |_, _| complex_normal(rng));
    DensityMatrix::from_pure(&psi).expect("Gaussian vector is nonzero")
}

/// Full-rank state `G G^dag / Tr(G G^dag)` from a Ginibre `G` (Hilbert-Schmidt measure).
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    DensityMatrix::new_unchecked(m.unscale(tr))
}

/// CPTP map with `rank` Kraus operators from a Haar-random Stinespring isometry:
/// `K_k = (I (x) <k|) W (I (x) |0>)` for Haar `W` on `d * rank` dimensions.
pub fn random_cptp_channel<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<QuantumChannel> {
    if rank == 0 {
        return Err(Error::Contract("Kraus rank must be positive".into()));
    }
    let w = haar_unitary(d * rank, rng);
    let w = w.matrix();
    let kraus = (0..rank)
        .map(|k| CMatrix::from_fn(d, d, |i, j| w[(i * rank + k, j * rank)]))
        .collect();
    QuantumChannel::new(kraus, 1e-10)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HaarEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl HaarEstimate {
    /// `|mean - value| <= k * stderr`.
    pub fn compatible_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

fn check_dims(channel: &QuantumChannel, h: &LadderHamiltonian) -> Result<()> {
    if channel.dim() != h.dim() {
        return Err(dim_err(format!(
            "channel dimension {} does not match ladder dimension {}",
            channel.dim(),
            h.dim()
        )));
    }
    let tol = crate::quantum::Tolerances::default().unitary;
    let residual = channel.completeness_residual();
    if residual > tol {
        return Err(Error::IncompleteChannel { residual, tol });
    }
    Ok(())
}

/// `(1/d) Tr[H (sum_k K_k K_k^dag - I)]`: the energy change averaged over Haar rotations of
/// any input state.
pub fn haar_average_exact(channel: &QuantumChannel, h: &LadderHamiltonian) -> Result<f64> {
    check_dims(channel, h)?;
    let d = h.dim();
    let excess = channel.image_of_identity() - CMatrix::identity(d, d);
    Ok(trace_product(&h.matrix(), &excess).re / d as f64)
}

/// Monte Carlo mean of `Delta E(G rho0 G^dag)` over Haar `G`.
pub fn haar_average_mc(
    channel: &QuantumChannel,
    h: &LadderHamiltonian,
    rho0: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Result<HaarEstimate> {
    check_dims(channel, h)?;
    if rho0.dim() != h.dim() {
        return Err(dim_err("initial state does not match ladder"));
    }
    if samples < 100 {
        return Err(Error::Contract(format!(
            "need at least 100 samples, got {samples}"
        )));
    }
    let d = h.dim();
    let q = crate::battery::charging_observable(channel, h)?;
    let q = q.matrix();
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let g = haar_unitary(d, &mut substream(seed, i));
            let g = g.matrix();
            // Tr[Q G rho G^dag] = Tr[G^dag Q G rho]
            trace_product(&(g.adjoint() * q * g), rho0.matrix()).re
        })
        .collect();
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(HaarEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
        seed,
    })
}
