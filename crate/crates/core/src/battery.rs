//! Ladder Hamiltonians, shift operators, ergotropy, and the spectral certificate that decides
//! whether a protocol charges (or discharges) every input state.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::quantum::{
    diag, eig_hermitian, hermiticity_residual, max_abs, trace, trace_product, CMatrix,
    DensityMatrix, QuantumChannel, UnitaryOperator, ONE,
};

/// Default tolerance of [`classify_protocol`].
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderKind {
    Finite,
    /// A window `1..=N` onto a ladder unbounded above.
    SemiInfiniteTruncated,
    /// A window `-L..=L` onto a ladder unbounded in both directions.
    DoubleSidedTruncated,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Explicit(Vec<f64>),
    /// Finite and semi-infinite windows start at energy 0; double-sided windows put label `x`
    /// at energy `x * spacing`.
    Uniform {
        spacing: f64,
    },
}

/// Non-degenerate diagonal Hamiltonian `sum_n E_n |n><n|` on a contiguous label window.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderHamiltonian {
    kind: LadderKind,
    labels: Vec<i64>,
    energies: Vec<f64>,
}

/// `extent` is `N` for finite and semi-infinite windows and the half width `L` for
/// double-sided ones.
pub fn build_ladder(
    kind: LadderKind,
    extent: usize,
    spectrum: Spectrum,
) -> Result<LadderHamiltonian> {
    let labels: Vec<i64> = match kind {
        LadderKind::Finite | LadderKind::SemiInfiniteTruncated => (1..=extent as i64).collect(),
        LadderKind::DoubleSidedTruncated => (-(extent as i64)..=extent as i64).collect(),
    };
    if labels.len() < 2 {
        return Err(Error::InvalidLadder(format!(
            "ladder needs at least 2 levels, got {}",
            labels.len()
        )));
    }
    let energies = match spectrum {
        Spectrum::Explicit(e) => {
            if e.len() != labels.len() {
                return Err(Error::InvalidLadder(format!(
                    "{} energies supplied for {} levels",
                    e.len(),
                    labels.len()
                )));
            }
            e
        }
        Spectrum::Uniform { spacing } => {
            if !(spacing > 0.0 && spacing.is_finite()) {
                return Err(Error::InvalidLadder(format!(
                    "spacing must be positive, got {spacing}"
                )));
            }
            match kind {
                LadderKind::DoubleSidedTruncated => {
                    labels.iter().map(|&x| x as f64 * spacing).collect()
                }
                _ => (0..labels.len()).map(|i| i as f64 * spacing).collect(),
            }
        }
    };
    if let Some(e) = energies.iter().find(|e| !e.is_finite()) {
        return Err(Error::InvalidLadder(format!("non-finite energy {e}")));
    }
    if let Some(i) = energies.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidLadder(format!(
            "energies must be strictly increasing: E[{}] = {} >= E[{}] = {}",
            i,
            energies[i],
            i + 1,
            energies[i + 1]
        )));
    }
    Ok(LadderHamiltonian {
        kind,
        labels,
        energies,
    })
}

impl LadderHamiltonian {
    pub fn finite(energies: Vec<f64>) -> Result<Self> {
        let n = energies.len();
        build_ladder(LadderKind::Finite, n, Spectrum::Explicit(energies))
    }

    pub fn uniform(n: usize, spacing: f64) -> Result<Self> {
        build_ladder(LadderKind::Finite, n, Spectrum::Uniform { spacing })
    }

    pub fn double_sided(half_width: usize, spacing: f64) -> Result<Self> {
        build_ladder(
            LadderKind::DoubleSidedTruncated,
            half_width,
            Spectrum::Uniform { spacing },
        )
    }

    pub fn kind(&self) -> LadderKind {
        self.kind
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn first_label(&self) -> i64 {
        self.labels[0]
    }

    pub fn index_of(&self, label: i64) -> Option<usize> {
        let i = label - self.first_label();
        (0..self.dim() as i64).contains(&i).then_some(i as usize)
    }

    pub fn matrix(&self) -> CMatrix {
        diag(&self.energies)
    }

    /// `Pi_n` for the level at `index` (0-based).
    pub fn projector(&self, index: usize) -> DensityMatrix {
        DensityMatrix::basis_projector(self.dim(), index)
    }

    /// Indices at least `margin` levels away from both window edges.
    pub fn bulk_indices(&self, margin: usize) -> std::ops::Range<usize> {
        let n = self.dim();
        if 2 * margin >= n {
            return 0..0;
        }
        margin..n - margin
    }

    pub fn expected_energy(&self, rho: &DensityMatrix) -> Result<f64> {
        crate::quantum::expected_energy(&self.matrix(), rho)
    }
}

/// Lowering operator `s|n> = |n-1>`, `s|bottom> = 0`, and its adjoint.
///
/// Truncated windows are cut the same way at both ends, so `s^dag |top> = 0`.
pub fn shift_operators(h: &LadderHamiltonian) -> (CMatrix, CMatrix) {
    let n = h.dim();
    let mut s = CMatrix::zeros(n, n);
    for i in 1..n {
        s[(i - 1, i)] = ONE;
    }
    let s_dag = s.adjoint();
    (s, s_dag)
}

/// Heisenberg-picture energy change `Q = sum_k K_k^dag H K_k - H`, so that
/// `Delta E(rho) = Tr[Q rho]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingObservable {
    q: CMatrix,
    source: String,
}

impl ChargingObservable {
    pub fn from_matrix(q: CMatrix, source: impl Into<String>, tol_herm: f64) -> Result<Self> {
        if !q.is_square() {
            return Err(dim_err("charging observable must be square"));
        }
        let r = hermiticity_residual(&q);
        if r > tol_herm {
            return Err(Error::Contract(format!(
                "charging observable not Hermitian ({r:.3e})"
            )));
        }
        Ok(Self {
            q,
            source: source.into(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.q
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.q).re
    }

    pub fn delta_energy(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(dim_err("state does not match charging observable"));
        }
        Ok(trace_product(&self.q, rho.matrix()).re)
    }
}

pub fn charging_observable(
    channel: &QuantumChannel,
    h: &LadderHamiltonian,
) -> Result<ChargingObservable> {
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
    let hm = h.matrix();
    let mut q = channel.dual_apply(&hm) - &hm;
    // exact Hermitian symmetrization; the dual map preserves Hermiticity up to rounding
    q = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(ChargingObservable {
        q,
        source: format!("{}-Kraus channel", channel.kraus().len()),
    })
}

/// `Q` for the unitary protocol `rho -> U rho U^dag`.
pub fn unitary_charging_observable(
    u: &UnitaryOperator,
    h: &LadderHamiltonian,
) -> Result<ChargingObservable> {
    let mut q = charging_observable(&QuantumChannel::from_unitary(u), h)?;
    q.source = "unitary".into();
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "UC")]
    UniversallyCharging,
    #[serde(rename = "UD")]
    UniversallyDischarging,
    #[serde(rename = "neither")]
    Neither,
    #[serde(rename = "trivial")]
    Trivial,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::UniversallyCharging => "UC",
            Verdict::UniversallyDischarging => "UD",
            Verdict::Neither => "neither",
            Verdict::Trivial => "trivial",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolClassification {
    pub verdict: Verdict,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Pure state minimizing `Delta E`.
    pub min_witness: DensityMatrix,
    /// Pure state maximizing `Delta E`.
    pub max_witness: DensityMatrix,
    pub is_nontrivial: bool,
}

/// Decides UC/UD from the extreme eigenvalues of `Q`. The trivial test runs first so a
/// numerically vanishing `Q` is never reported as charging.
pub fn classify_protocol(q: &ChargingObservable, tol: f64) -> Result<ProtocolClassification> {
    let eig = eig_hermitian(q.matrix(), f64::INFINITY)?;
    let (min_eig, max_eig) = (eig.min(), eig.max());
    let is_nontrivial = max_abs(q.matrix()) > tol;
    let verdict = if !is_nontrivial {
        Verdict::Trivial
    } else if min_eig >= -tol && max_eig > tol {
        Verdict::UniversallyCharging
    } else if max_eig <= tol && min_eig < -tol {
        Verdict::UniversallyDischarging
    } else {
        Verdict::Neither
    };
    Ok(ProtocolClassification {
        verdict,
        min_eig,
        max_eig,
        min_witness: DensityMatrix::from_pure(&eig.eigenvector(0))?,
        max_witness: DensityMatrix::from_pure(&eig.eigenvector(eig.dim() - 1))?,
        is_nontrivial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBudget {
    /// Energy extractable by a unitary.
    pub ergotropy: f64,
    /// Energy a unitary can add; the ergotropy with respect to `-H`.
    pub charging_capacity: f64,
    pub unchargeable: bool,
}

pub fn ergotropy_and_capacity(
    rho: &DensityMatrix,
    h: &LadderHamiltonian,
    tol: f64,
) -> Result<EnergyBudget> {
    if rho.dim() != h.dim() {
        return Err(dim_err("state does not match ladder"));
    }
    let energy = h.expected_energy(rho)?;
    // ascending populations; ladder energies are ascending by construction
    let pops = eig_hermitian(rho.matrix(), f64::INFINITY)?.eigenvalues;
    let lowest: f64 = pops
        .iter()
        .rev()
        .zip(h.energies())
        .map(|(r, e)| r * e)
        .sum();
    let highest: f64 = pops.iter().zip(h.energies()).map(|(r, e)| r * e).sum();
    let ergotropy = (energy - lowest).max(0.0);
    let charging_capacity = (highest - energy).max(0.0);
    Ok(EnergyBudget {
        ergotropy,
        charging_capacity,
        unchargeable: charging_capacity <= tol,
    })
}

/// Structural form of unchargeability: diagonal in the energy basis with populations that
/// never decrease with energy.
pub fn is_diagonal_nondecreasing(
    rho: &DensityMatrix,
    h: &LadderHamiltonian,
    tol: f64,
) -> Result<bool> {
    if rho.dim() != h.dim() {
        return Err(dim_err("state does not match ladder"));
    }
    let m = rho.matrix();
    let n = m.nrows();
    let off_diagonal = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .all(|(i, j)| m[(i, j)].norm() <= tol);
    let ordered = (1..n).all(|i| m[(i, i)].re >= m[(i - 1, i - 1)].re - tol);
    Ok(off_diagonal && ordered)
}

/// Brute-force lower bound on the charging capacity: the best energy gain over a fixed
/// sample of unitaries. Evaluating many states against the same sample costs one
/// `d x d` trace per pair.
#[derive(Debug, Clone)]
pub struct CapacityOracle {
    ladder: LadderHamiltonian,
    rotated: Vec<CMatrix>,
}

impl CapacityOracle {
    pub fn new(h: &LadderHamiltonian, unitaries: &[UnitaryOperator]) -> Result<Self> {
        let hm = h.matrix();
        let rotated = unitaries
            .iter()
            .map(|u| {
                if u.dim() != h.dim() {
                    return Err(dim_err("oracle unitary does not match ladder"));
                }
                Ok(u.matrix().adjoint() * &hm * u.matrix())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            ladder: h.clone(),
            rotated,
        })
    }

    pub fn samples(&self) -> usize {
        self.rotated.len()
    }

    /// `max_G Tr[H G rho G^dag] - Tr[H rho]` over the sample.
    pub fn best_gain(&self, rho: &DensityMatrix) -> Result<f64> {
        let energy = self.ladder.expected_energy(rho)?;
        let best = self
            .rotated
            .iter()
            .map(|m| trace_product(m, rho.matrix()).re)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(best - energy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{Tolerances, ZERO};

    #[test]
    fn qubit_battery() {
        let h = LadderHamiltonian::finite(vec![0.0, 1.0]).unwrap();
        assert_eq!(h.matrix(), diag(&[0.0, 1.0]));
        assert_eq!(h.labels(), &[1, 2]);
    }

    #[test]
    fn uniform_finite() {
        let h = LadderHamiltonian::uniform(4, 1.0).unwrap();
        assert_eq!(h.energies(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn double_sided_window() {
        let h = LadderHamiltonian::double_sided(3, 1.0).unwrap();
        assert_eq!(h.labels(), &[-3, -2, -1, 0, 1, 2, 3]);
        assert_eq!(h.energies(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(h.index_of(0), Some(3));
        assert_eq!(h.index_of(4), None);
        assert_eq!(h.bulk_indices(2), 2..5);
    }

    #[test]
    fn ladder_errors() {
        assert!(matches!(
            LadderHamiltonian::finite(vec![0.0, 1.0, 1.0]),
            Err(Error::InvalidLadder(_))
        ));
        assert!(LadderHamiltonian::finite(vec![2.0, 1.0]).is_err());
        assert!(LadderHamiltonian::uniform(1, 1.0).is_err());
        assert!(LadderHamiltonian::uniform(3, 0.0).is_err());
        assert!(LadderHamiltonian::double_sided(0, 1.0).is_err());
        assert!(build_ladder(LadderKind::Finite, 3, Spectrum::Explicit(vec![0.0, 1.0])).is_err());
        assert!(LadderHamiltonian::finite(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn finite_shift() {
        let h = LadderHamiltonian::uniform(3, 1.0).unwrap();
        let (s, s_dag) = shift_operators(&h);
        assert_eq!(s.iter().filter(|z| **z == ONE).count(), 2);
        assert_eq!(s.iter().filter(|z| **z != ZERO).count(), 2);
        assert!(s.column(0).iter().all(|z| *z == ZERO));
        assert_eq!(s_dag, s.adjoint());
    }

    #[test]
    fn shift_products_are_complementary_projectors() {
        for n in 2..7 {
            let h = LadderHamiltonian::uniform(n, 1.0).unwrap();
            let (s, s_dag) = shift_operators(&h);
            let id = CMatrix::identity(n, n);
            let bottom = h.projector(0).into_matrix();
            let top = h.projector(n - 1).into_matrix();
            assert_eq!(&s_dag * &s, &id - bottom);
            assert_eq!(&s * &s_dag, &id - top);
        }
    }

    #[test]
    fn double_sided_raising_is_translation() {
        let h = LadderHamiltonian::double_sided(2, 1.0).unwrap();
        let (_, t) = shift_operators(&h);
        for x in -2..2 {
            let (src, dst) = (h.index_of(x).unwrap(), h.index_of(x + 1).unwrap());
            assert_eq!(t[(dst, src)], ONE);
        }
        assert!(t.column(h.index_of(2).unwrap()).iter().all(|z| *z == ZERO));
    }

    fn up_channel(h: &LadderHamiltonian) -> QuantumChannel {
        let (_, s_dag) = shift_operators(h);
        QuantumChannel::new(vec![s_dag, h.projector(h.dim() - 1).into_matrix()], 1e-10).unwrap()
    }

    fn down_channel(h: &LadderHamiltonian) -> QuantumChannel {
        let (s, _) = shift_operators(h);
        QuantumChannel::new(vec![s, h.projector(0).into_matrix()], 1e-10).unwrap()
    }

    #[test]
    fn raising_channel_observable_is_gap_diagonal() {
        let h = LadderHamiltonian::finite(vec![-0.3, 0.4, 2.0, 2.5]).unwrap();
        let q = charging_observable(&up_channel(&h), &h).unwrap();
        let expected = diag(&[0.7, 1.6, 0.5, 0.0]);
        assert!(max_abs(&(q.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn lowering_channel_observable() {
        let h = LadderHamiltonian::finite(vec![-0.3, 0.4, 2.0, 2.5]).unwrap();
        let q = charging_observable(&down_channel(&h), &h).unwrap();
        let expected = diag(&[0.0, -0.7, -1.6, -0.5]);
        assert!(max_abs(&(q.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn classification_of_ladder_channels() {
        let h = LadderHamiltonian::uniform(5, 1.0).unwrap();
        let up = classify_protocol(
            &charging_observable(&up_channel(&h), &h).unwrap(),
            CLASSIFY_TOL,
        )
        .unwrap();
        assert_eq!(up.verdict, Verdict::UniversallyCharging);
        let down = classify_protocol(
            &charging_observable(&down_channel(&h), &h).unwrap(),
            CLASSIFY_TOL,
        )
        .unwrap();
        assert_eq!(down.verdict, Verdict::UniversallyDischarging);
        assert_eq!(down.min_eig, -1.0);
    }

    #[test]
    fn zero_observable_is_trivial() {
        let q = ChargingObservable::from_matrix(CMatrix::zeros(3, 3), "zero", 1e-10).unwrap();
        let c = classify_protocol(&q, CLASSIFY_TOL).unwrap();
        assert_eq!(c.verdict, Verdict::Trivial);
        assert!(!c.is_nontrivial);
    }

    #[test]
    fn mixed_sign_is_neither() {
        let q = ChargingObservable::from_matrix(diag(&[-1.0, 1.0]), "pauli z", 1e-10).unwrap();
        let c = classify_protocol(&q, CLASSIFY_TOL).unwrap();
        assert_eq!(c.verdict, Verdict::Neither);
        assert!((q.delta_energy(&c.min_witness).unwrap() - c.min_eig).abs() < 1e-15);
        assert!((q.delta_energy(&c.max_witness).unwrap() - c.max_eig).abs() < 1e-15);
    }

    #[test]
    fn observable_rejects_mismatch() {
        let h = LadderHamiltonian::uniform(3, 1.0).unwrap();
        let ch = up_channel(&LadderHamiltonian::uniform(4, 1.0).unwrap());
        assert!(charging_observable(&ch, &h).is_err());
    }

    #[test]
    fn top_state_cannot_be_charged() {
        let h = LadderHamiltonian::uniform(4, 1.0).unwrap();
        let b = ergotropy_and_capacity(&h.projector(3), &h, 1e-10).unwrap();
        assert_eq!(b.charging_capacity, 0.0);
        assert!(b.unchargeable);
        assert_eq!(b.ergotropy, 3.0);
    }

    #[test]
    fn ground_state_budget() {
        let h = LadderHamiltonian::finite(vec![0.0, 1.0]).unwrap();
        let b = ergotropy_and_capacity(&h.projector(0), &h, 1e-10).unwrap();
        assert_eq!(b.ergotropy, 0.0);
        assert_eq!(b.charging_capacity, 1.0);
        assert!(!b.unchargeable);
        assert!(!is_diagonal_nondecreasing(&h.projector(0), &h, 1e-10).unwrap());
        assert!(is_diagonal_nondecreasing(&h.projector(1), &h, 1e-10).unwrap());
    }

    #[test]
    fn coherent_state_is_chargeable() {
        let h = LadderHamiltonian::finite(vec![0.0, 1.0]).unwrap();
        let rho = DensityMatrix::new(
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(0.3, 0.0),
                    Complex64::new(0.1, 0.0),
                    Complex64::new(0.1, 0.0),
                    Complex64::new(0.7, 0.0),
                ],
            ),
            &Tolerances::default(),
        )
        .unwrap();
        let b = ergotropy_and_capacity(&rho, &h, 1e-10).unwrap();
        assert!(b.charging_capacity > 1e-3);
        assert!(!is_diagonal_nondecreasing(&rho, &h, 1e-10).unwrap());
    }
}
