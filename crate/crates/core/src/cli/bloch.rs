//! `bloch-grid`: the two-level energy-change landscape over the Bloch ball.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::json;

use super::config::BlochGridConfig;
use super::output::{fmt_f64, Check, Csv, Provenance, Report};
use crate::battery::{unitary_charging_observable, LadderHamiltonian};
use crate::error::{Error, Result};
use crate::haar::sample_haar_unitaries;
use crate::quantum::UnitaryOperator;
use crate::qubit::{bloch_state, QubitUnitary};

pub const AGREEMENT_TOL: f64 = 1e-12;
pub const MEAN_TOL: f64 = 1e-3;
pub const PLANE_TOL: f64 = 1e-6;
/// Rounding allowance for `|a|^2 - 1` at the excited pole.
pub const POLE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub theta: f64,
    pub phi: f64,
    pub r: f64,
    pub closed_form: f64,
    pub numeric: f64,
}

/// Cell midpoints uniform in `cos(theta)`, `phi` and `r^3`.
pub fn grid_points(
    u: &QubitUnitary,
    n_cos: usize,
    n_phi: usize,
    n_r: usize,
) -> Result<Vec<GridPoint>> {
    let h = LadderHamiltonian::finite(vec![0.0, 1.0])?;
    // U acts on the state as U^dag (see QubitUnitary::delta_e_closed_form)
    let protocol = UnitaryOperator::new(u.matrix().adjoint(), 1e-10)?;
    let q = unitary_charging_observable(&protocol, &h)?;
    let mut points = Vec::with_capacity(n_cos * n_phi * n_r);
    for i in 0..n_cos {
        let cos_t = -1.0 + (i as f64 + 0.5) * 2.0 / n_cos as f64;
        let theta = cos_t.acos();
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * std::f64::consts::TAU / n_phi as f64;
            for k in 0..n_r {
                let r = ((k as f64 + 0.5) / n_r as f64).cbrt();
                let sin_t = theta.sin();
                let rho = bloch_state(r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t)?;
                points.push(GridPoint {
                    theta,
                    phi,
                    r,
                    closed_form: u.delta_e_closed_form(&rho),
                    numeric: q.delta_energy(&rho)?,
                });
            }
        }
    }
    Ok(points)
}

/// Least-squares fit `Delta E = c0 + w . r`; returns `(c0, w, max residual)`.
pub fn fit_plane(points: &[GridPoint]) -> (f64, [f64; 3], f64) {
    let rows = points.len();
    let design = DMatrix::from_fn(rows, 4, |i, j| {
        let p = &points[i];
        match j {
            0 => 1.0,
            1 => p.r * p.theta.sin() * p.phi.cos(),
            2 => p.r * p.theta.sin() * p.phi.sin(),
            _ => p.r * p.theta.cos(),
        }
    });
    let target = DVector::from_iterator(rows, points.iter().map(|p| p.numeric));
    let normal = design.transpose() * &design;
    let rhs = design.transpose() * &target;
    let coef = normal.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(4));
    let residual = (&design * &coef - &target).amax();
    (coef[0], [coef[1], coef[2], coef[3]], residual)
}

pub struct BlochOutput {
    pub csv: String,
    pub report: Report,
}

pub fn run(cfg: &BlochGridConfig, provenance: Provenance) -> Result<BlochOutput> {
    let spec = &cfg.unitary;
    let u = QubitUnitary::new(
        Complex64::new(spec.a[0], spec.a[1]),
        Complex64::new(spec.b[0], spec.b[1]),
        spec.phase,
        1e-10,
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let g = &cfg.grid;
    if g.cos_theta == 0 || g.phi == 0 || g.radius == 0 {
        return Err(Error::Config("grid resolutions must be positive".into()));
    }
    let points = grid_points(&u, g.cos_theta, g.phi, g.radius)?;

    let mut csv = Csv::new(
        &provenance,
        &["theta", "phi", "r", "deltaE_closed_form", "deltaE_numeric"],
    );
    let mut max_diff = 0.0_f64;
    let mut sum = 0.0;
    for p in &points {
        max_diff = max_diff.max((p.closed_form - p.numeric).abs());
        sum += p.numeric;
        csv.row(&[p.theta, p.phi, p.r, p.closed_form, p.numeric].map(fmt_f64));
    }
    let mean = sum / points.len() as f64;
    let (offset, normal, plane_residual) = fit_plane(&points);

    let excited = bloch_state(0.0, 0.0, -1.0)?;
    let mut pole_max = f64::NEG_INFINITY;
    for v in sample_haar_unitaries(2, cfg.pole_unitaries, provenance.seed) {
        let w = QubitUnitary::from_unitary(&v)?;
        pole_max = pole_max.max(w.delta_e_closed_form(&excited));
    }
    let north = u.delta_e_closed_form(&bloch_state(0.0, 0.0, 1.0)?);
    let south = u.delta_e_closed_form(&excited);

    let mut checks = vec![
        Check::at_most("closed_form_matches_numeric", max_diff, AGREEMENT_TOL),
        Check::at_most("ball_mean_abs", mean.abs(), MEAN_TOL),
        Check::at_most("plane_fit_residual", plane_residual, PLANE_TOL),
        Check::at_most("plane_offset_abs", offset.abs(), PLANE_TOL),
    ];
    if cfg.pole_unitaries > 0 {
        checks.push(Check::at_most(
            "excited_pole_max_delta_e",
            pole_max,
            POLE_TOL,
        ));
    }
    let normal_norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    let results = json!({
        "grid_points": points.len(),
        "max_abs_difference": max_diff,
        "ball_mean": mean,
        "plane": {
            "offset": offset,
            "normal": normal,
            "max_residual": plane_residual,
            // a vanishing normal means Delta E is identically zero: no sign boundary exists
            "degenerate": normal_norm < PLANE_TOL,
        },
        "poles": { "north": north, "south": south },
        "excited_pole": {
            "unitaries": cfg.pole_unitaries,
            "max_delta_e": if cfg.pole_unitaries > 0 { json!(pole_max) } else { json!(null) },
        },
    });
    Ok(BlochOutput {
        csv: csv.finish(),
        report: Report {
            provenance,
            results,
            checks,
        },
    })
}
