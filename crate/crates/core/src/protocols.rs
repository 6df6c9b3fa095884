//! The two-step battery-qubit drive, its exact time evolution, and the battery channels it
//! induces for a given control-qubit state.
//!
//! Qubit index 0 is `|up>` (the `+1` eigenvector of `sigma_z`) and index 1 is `|down>`.

use num_complex::Complex64;
use serde::Serialize;

use crate::battery::{
    charging_observable, classify_protocol, shift_operators, LadderHamiltonian, Verdict,
    CLASSIFY_TOL,
};
use crate::error::{dim_err, Error, Result};
use crate::haar::{random_pure_state, substream};
use crate::quantum::{
    expm_hermitian, hermiticity_residual, partial_trace_battery, partial_trace_env, pauli_x,
    sigma_minus, sigma_plus, tensor_product, CMatrix, CVector, DensityMatrix, QuantumChannel,
    Tolerances, UnitaryOperator, I, ONE,
};

pub const QUBIT_DIM: usize = 2;
pub const UP: usize = 0;
pub const DOWN: usize = 1;

const TIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSegment {
    pub t_start: f64,
    pub t_end: f64,
    /// Constant generator on `battery (x) qubit`.
    pub generator: CMatrix,
}

/// Piecewise-constant Hamiltonian on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDrive {
    battery_dim: usize,
    segments: Vec<DriveSegment>,
}

impl PiecewiseDrive {
    pub fn new(battery_dim: usize, segments: Vec<DriveSegment>, tol_herm: f64) -> Result<Self> {
        let n = battery_dim * QUBIT_DIM;
        let (first, last) = match (segments.first(), segments.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Contract("drive has no segments".into())),
        };
        if first.t_start.abs() > TIME_TOL || (last.t_end - 1.0).abs() > TIME_TOL {
            return Err(Error::Contract("segments must cover [0, 1]".into()));
        }
        for pair in segments.windows(2) {
            if (pair[0].t_end - pair[1].t_start).abs() > TIME_TOL {
                return Err(Error::Contract(format!(
                    "segments not contiguous at t = {}",
                    pair[0].t_end
                )));
            }
        }
        for seg in &segments {
            if seg.t_end <= seg.t_start {
                return Err(Error::Contract(format!(
                    "empty or reversed segment [{}, {}]",
                    seg.t_start, seg.t_end
                )));
            }
            if seg.generator.nrows() != n || seg.generator.ncols() != n {
                return Err(dim_err(format!("segment generator must be {n}x{n}")));
            }
            let r = hermiticity_residual(&seg.generator);
            if r > tol_herm {
                return Err(Error::Contract(format!(
                    "segment generator not Hermitian ({r:.3e})"
                )));
            }
        }
        Ok(Self {
            battery_dim,
            segments,
        })
    }

    pub fn battery_dim(&self) -> usize {
        self.battery_dim
    }

    pub fn segments(&self) -> &[DriveSegment] {
        &self.segments
    }
}

/// `-pi (I (x) sigma_x)` on `[0, 1/2)`, then `pi (s^dag (x) sigma_+ + s (x) sigma_-)` on
/// `[1/2, 1]`.
pub fn build_drive(h: &LadderHamiltonian) -> PiecewiseDrive {
    let n = h.dim();
    let pi = Complex64::new(std::f64::consts::PI, 0.0);
    let (s, s_dag) = shift_operators(h);
    let flip = tensor_product(&CMatrix::identity(n, n), &pauli_x()) * (-pi);
    let hop = (tensor_product(&s_dag, &sigma_plus()) + tensor_product(&s, &sigma_minus())) * pi;
    PiecewiseDrive {
        battery_dim: n,
        segments: vec![
            DriveSegment {
                t_start: 0.0,
                t_end: 0.5,
                generator: flip,
            },
            DriveSegment {
                t_start: 0.5,
                t_end: 1.0,
                generator: hop,
            },
        ],
    }
}

pub fn evolve_segment(segment: &DriveSegment) -> Result<CMatrix> {
    expm_hermitian(
        &segment.generator,
        segment.t_end - segment.t_start,
        Tolerances::default().herm,
    )
}

/// Time-ordered product of the segment propagators, later segments on the left.
pub fn evolve_drive(drive: &PiecewiseDrive) -> Result<UnitaryOperator> {
    let n = drive.battery_dim * QUBIT_DIM;
    let mut u = CMatrix::identity(n, n);
    for seg in &drive.segments {
        u = evolve_segment(seg)? * u;
    }
    UnitaryOperator::new(u, Tolerances::default().unitary)
}

fn composite(n: usize, qubit: usize) -> usize {
    n * QUBIT_DIM + qubit
}

/// Permutation-with-phases form of the full drive:
/// `|n,up> -> |n+1,up>` below the top, `|top,up> -> i|top,down>`,
/// `|n,down> -> |n-1,down>` above the bottom, `|bottom,down> -> i|bottom,up>`.
pub fn closed_form_unitary(h: &LadderHamiltonian) -> UnitaryOperator {
    let n = h.dim();
    let mut u = CMatrix::zeros(n * QUBIT_DIM, n * QUBIT_DIM);
    for k in 0..n {
        if k + 1 < n {
            u[(composite(k + 1, UP), composite(k, UP))] = ONE;
        } else {
            u[(composite(k, DOWN), composite(k, UP))] = I;
        }
        if k > 0 {
            u[(composite(k - 1, DOWN), composite(k, DOWN))] = ONE;
        } else {
            u[(composite(k, UP), composite(k, DOWN))] = I;
        }
    }
    UnitaryOperator::new_unchecked(u)
}

/// `|chi> = cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlQubitState {
    theta: f64,
    phi: f64,
}

impl ControlQubitState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Contract(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..std::f64::consts::TAU).contains(&phi) {
            return Err(Error::Contract(format!("phi = {phi} outside [0, 2 pi)")));
        }
        Ok(Self { theta, phi })
    }

    pub fn up() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn down() -> Self {
        Self {
            theta: std::f64::consts::PI,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn vector(&self) -> CVector {
        let (s, c) = (self.theta / 2.0).sin_cos();
        CVector::from_vec(vec![
            Complex64::new(c, 0.0),
            Complex64::from_polar(s, self.phi),
        ])
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.vector()).expect("normalized by construction")
    }
}

fn battery_dim_of(u: &UnitaryOperator) -> Result<usize> {
    let d = u.dim();
    if d == 0 || !d.is_multiple_of(QUBIT_DIM) {
        return Err(dim_err(format!(
            "composite dimension {d} is not battery x qubit"
        )));
    }
    Ok(d / QUBIT_DIM)
}

/// Kraus operators `K_a = (I (x) <a|) U (I (x) |chi>)` for `a` in `{up, down}`.
pub fn induced_channel(u: &UnitaryOperator, chi: &ControlQubitState) -> Result<QuantumChannel> {
    let n = battery_dim_of(u)?;
    let amp = chi.vector();
    let m = u.matrix();
    let kraus = [UP, DOWN]
        .iter()
        .map(|&a| {
            CMatrix::from_fn(n, n, |i, j| {
                m[(composite(i, a), composite(j, UP))] * amp[UP]
                    + m[(composite(i, a), composite(j, DOWN))] * amp[DOWN]
            })
        })
        .collect();
    QuantumChannel::new(kraus, Tolerances::default().unitary)
}

/// Battery and qubit marginals of `U (rho (x) |chi><chi|) U^dag`.
pub fn joint_evolution(
    u: &UnitaryOperator,
    rho: &DensityMatrix,
    chi: &ControlQubitState,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let n = battery_dim_of(u)?;
    if rho.dim() != n {
        return Err(dim_err("battery state does not match protocol unitary"));
    }
    let joint = DensityMatrix::new_unchecked(tensor_product(rho.matrix(), chi.density().matrix()))
        .conjugate_by(u.matrix())?;
    Ok((
        partial_trace_env(&joint, n, QUBIT_DIM)?,
        partial_trace_battery(&joint, n, QUBIT_DIM)?,
    ))
}

#[derive(Debug, Clone)]
pub struct ProbeState {
    pub id: String,
    pub rho: DensityMatrix,
}

/// All level projectors `pi_<label>`, the maximally mixed state, and `random_count` seeded
/// random pure states `random_<k>`.
pub fn default_probe_states(
    h: &LadderHamiltonian,
    random_count: usize,
    seed: u64,
) -> Vec<ProbeState> {
    let n = h.dim();
    let mut probes: Vec<ProbeState> = h
        .labels()
        .iter()
        .enumerate()
        .map(|(i, label)| ProbeState {
            id: format!("pi_{label}"),
            rho: h.projector(i),
        })
        .collect();
    probes.push(ProbeState {
        id: "maximally_mixed".into(),
        rho: DensityMatrix::maximally_mixed(n),
    });
    probes.extend((0..random_count).map(|k| ProbeState {
        id: format!("random_{k}"),
        rho: random_pure_state(n, &mut substream(seed, k as u64)),
    }));
    probes
}

/// Random pure states supported on levels at least `margin` away from both window edges.
pub fn bulk_probe_states(
    h: &LadderHamiltonian,
    margin: usize,
    count: usize,
    seed: u64,
) -> Vec<ProbeState> {
    let bulk = h.bulk_indices(margin);
    let n = h.dim();
    (0..count)
        .map(|k| {
            let local = random_pure_state(bulk.len(), &mut substream(seed, k as u64));
            let mut m = CMatrix::zeros(n, n);
            m.view_mut((bulk.start, bulk.start), (bulk.len(), bulk.len()))
                .copy_from(local.matrix());
            ProbeState {
                id: format!("bulk_{k}"),
                rho: DensityMatrix::new_unchecked(m),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub phi: f64,
    pub verdict: Verdict,
    pub min_eig: f64,
    pub max_eig: f64,
    /// `Delta E` per probe, in probe order.
    pub delta_e: Vec<f64>,
    /// Choi distance to `cos^2(theta/2) M_up + sin^2(theta/2) M_down`.
    pub mixture_choi_deviation: f64,
    /// `max_probe |Delta E - cos^2 Delta E_up - sin^2 Delta E_down|`.
    pub mixture_energy_deviation: f64,
}

/// Evaluates the induced channel at every `(theta, phi)` pair.
pub fn sweep_points(
    h: &LadderHamiltonian,
    controls: &[ControlQubitState],
    probes: &[ProbeState],
) -> Result<Vec<SweepPoint>> {
    let u = evolve_drive(&build_drive(h))?;
    let up = induced_channel(&u, &ControlQubitState::up())?;
    let down = induced_channel(&u, &ControlQubitState::down())?;
    let q_up = charging_observable(&up, h)?;
    let q_down = charging_observable(&down, h)?;
    controls
        .iter()
        .map(|chi| {
            let channel = induced_channel(&u, chi)?;
            let q = charging_observable(&channel, h)?;
            let class = classify_protocol(&q, CLASSIFY_TOL)?;
            let weight = (chi.theta() / 2.0).cos().powi(2);
            let mixture = up.mixture(&down, weight)?;
            let mut delta_e = Vec::with_capacity(probes.len());
            let mut energy_dev = 0.0_f64;
            for p in probes {
                let de = q.delta_energy(&p.rho)?;
                let mixed = weight * q_up.delta_energy(&p.rho)?
                    + (1.0 - weight) * q_down.delta_energy(&p.rho)?;
                energy_dev = energy_dev.max((de - mixed).abs());
                delta_e.push(de);
            }
            Ok(SweepPoint {
                theta: chi.theta(),
                phi: chi.phi(),
                verdict: class.verdict,
                min_eig: class.min_eig,
                max_eig: class.max_eig,
                delta_e,
                mixture_choi_deviation: channel.choi_distance(&mixture)?,
                mixture_energy_deviation: energy_dev,
            })
        })
        .collect()
}

/// Cartesian sweep over `thetas x phis`.
pub fn interpolation_sweep(
    h: &LadderHamiltonian,
    thetas: &[f64],
    phis: &[f64],
    probes: &[ProbeState],
) -> Result<Vec<SweepPoint>> {
    let controls = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| ControlQubitState::new(t, p)))
        .collect::<Result<Vec<_>>>()?;
    sweep_points(h, &controls, probes)
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalysisCheck {
    pub probes: usize,
    /// `max |M_up(rho) - s^dag rho s|` over probes.
    pub channel_residual: f64,
    /// `max |rho_E - |up><up||` over probes.
    pub environment_residual: f64,
}

/// Runs the up-controlled drive on bulk-supported states of a double-sided window.
pub fn catalysis_check(h: &LadderHamiltonian, probes: &[ProbeState]) -> Result<CatalysisCheck> {
    let u = evolve_drive(&build_drive(h))?;
    let chi = ControlQubitState::up();
    let channel = induced_channel(&u, &chi)?;
    let (s, s_dag) = shift_operators(h);
    let up = DensityMatrix::basis_projector(QUBIT_DIM, UP);
    let mut channel_residual = 0.0_f64;
    let mut environment_residual = 0.0_f64;
    for p in probes {
        let shifted = DensityMatrix::new_unchecked(&s_dag * p.rho.matrix() * &s);
        let out = crate::quantum::apply_channel(&channel, &p.rho)?;
        channel_residual = channel_residual.max(out.distance_max(&shifted));
        let (_, env) = joint_evolution(&u, &p.rho, &chi)?;
        environment_residual = environment_residual.max(env.distance_max(&up));
    }
    Ok(CatalysisCheck {
        probes: probes.len(),
        channel_residual,
        environment_residual,
    })
}
