//! `protocol-report`: the auxiliary-qubit drive on a ladder.

use serde_json::json;

use super::config::ProtocolReportConfig;
use super::output::{fmt_f64, Check, Csv, Provenance, Report};
use crate::battery::{LadderHamiltonian, Verdict};
use crate::error::{Error, Result};
use crate::protocols::{
    build_drive, bulk_probe_states, catalysis_check, closed_form_unitary, default_probe_states,
    evolve_drive, sweep_points, ControlQubitState, DOWN, QUBIT_DIM, UP,
};
use crate::quantum::{max_abs, I};
use crate::topology::{flatten_composite, flow_index};

pub const EQUIVALENCE_TOL: f64 = 1e-10;
pub const BASIS_TOL: f64 = 1e-12;
pub const CATALYSIS_TOL: f64 = 1e-12;

pub struct ProtocolOutput {
    pub csv: String,
    pub report: Report,
}

/// Expected `Delta E(Pi_n)` for the pure up (`charging`) or down control.
fn edge_basis_table(h: &LadderHamiltonian, charging: bool) -> Vec<f64> {
    let e = h.energies();
    let n = e.len();
    (0..n)
        .map(|k| match (charging, k) {
            (true, k) if k + 1 < n => e[k + 1] - e[k],
            (false, k) if k > 0 => e[k - 1] - e[k],
            _ => 0.0,
        })
        .collect()
}

pub fn run(cfg: &ProtocolReportConfig, provenance: Provenance) -> Result<ProtocolOutput> {
    let h = cfg.ladder.build()?;
    let n = h.dim();
    let controls = cfg
        .controls
        .iter()
        .map(|c| ControlQubitState::new(c.theta, c.phi))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut checks = Vec::new();

    let evolved = evolve_drive(&build_drive(&h))?;
    let closed = closed_form_unitary(&h);
    let equivalence = max_abs(&(evolved.matrix() - closed.matrix()));
    checks.push(Check::at_most(
        "evolved_matches_closed_form",
        equivalence,
        EQUIVALENCE_TOL,
    ));
    let top_up = (n - 1) * QUBIT_DIM + UP;
    let top_down = (n - 1) * QUBIT_DIM + DOWN;
    let top_phase = evolved.matrix()[(top_down, top_up)];
    let bottom_phase = evolved.matrix()[(UP, DOWN)];
    checks.push(Check::at_most(
        "top_edge_phase_is_i",
        (top_phase - I).norm(),
        EQUIVALENCE_TOL,
    ));
    checks.push(Check::at_most(
        "bottom_edge_phase_is_i",
        (bottom_phase - I).norm(),
        EQUIVALENCE_TOL,
    ));

    let probes = default_probe_states(&h, cfg.random_probes, provenance.seed);
    let sweep = sweep_points(&h, &controls, &probes)?;

    let mut csv = Csv::new(&provenance, &["control", "theta", "phi", "probe", "deltaE"]);
    let mut control_results = Vec::with_capacity(sweep.len());
    for (ci, point) in sweep.iter().enumerate() {
        for (p, de) in probes.iter().zip(&point.delta_e) {
            csv.row(&[
                ci.to_string(),
                fmt_f64(point.theta),
                fmt_f64(point.phi),
                p.id.clone(),
                fmt_f64(*de),
            ]);
        }
        let basis: Vec<f64> = point.delta_e[..n].to_vec();
        let pole = if point.theta == 0.0 {
            Some((true, Verdict::UniversallyCharging))
        } else if point.theta == std::f64::consts::PI {
            Some((false, Verdict::UniversallyDischarging))
        } else {
            None
        };
        if let Some((charging, verdict)) = pole {
            let expected = edge_basis_table(&h, charging);
            let dev = basis
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                format!("control_{ci}_basis_delta_e"),
                dev,
                BASIS_TOL,
            ));
            checks.push(Check::equals(
                format!("control_{ci}_verdict"),
                point.verdict,
                verdict,
            ));
        }
        control_results.push(json!({
            "theta": point.theta,
            "phi": point.phi,
            "verdict": point.verdict,
            "min_eig": point.min_eig,
            "max_eig": point.max_eig,
            "basis_delta_e": basis,
            "mixture_choi_deviation": point.mixture_choi_deviation,
            "mixture_energy_deviation": point.mixture_energy_deviation,
        }));
    }

    let catalysis = match &cfg.catalysis {
        None => json!(null),
        Some(spec) => {
            let ladder = LadderHamiltonian::double_sided(spec.half_width, spec.spacing)
                .map_err(|e| Error::Config(e.to_string()))?;
            let bulk = bulk_probe_states(&ladder, 1, spec.bulk_probes, provenance.seed);
            let cat = catalysis_check(&ladder, &bulk)?;
            checks.push(Check::at_most(
                "catalysis_channel_is_shift",
                cat.channel_residual,
                CATALYSIS_TOL,
            ));
            checks.push(Check::at_most(
                "catalysis_environment_restored",
                cat.environment_residual,
                CATALYSIS_TOL,
            ));
            let u = evolve_drive(&build_drive(&ladder))?;
            let flow = flatten_composite(&u, &ladder)
                .and_then(|b| flow_index(&b, 0))
                .map_err(|e| Error::Config(e.to_string()))?;
            checks.push(Check::flag(
                "composite_flow_index_integral",
                flow.is_integral(),
            ));
            checks.push(Check::equals("composite_flow_index", flow.rounded, 0));
            json!({
                "half_width": spec.half_width,
                "spacing": spec.spacing,
                "bulk_probes": cat.probes,
                "channel_residual": cat.channel_residual,
                "environment_residual": cat.environment_residual,
                "composite_flow_index": flow,
            })
        }
    };

    let results = json!({
        "ladder": {
            "kind": h.kind(),
            "labels": h.labels(),
            "energies": h.energies(),
        },
        "equivalence_residual": equivalence,
        "edge_phases": {
            "top_up_to_down": [top_phase.re, top_phase.im],
            "bottom_down_to_up": [bottom_phase.re, bottom_phase.im],
        },
        "probes": probes.iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
        "controls": control_results,
        "catalysis": catalysis,
    });
    Ok(ProtocolOutput {
        csv: csv.finish(),
        report: Report {
            provenance,
            results,
            checks,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_tables() {
        let h = LadderHamiltonian::finite(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(edge_basis_table(&h, true), vec![1.0, 2.0, 0.0]);
        assert_eq!(edge_basis_table(&h, false), vec![0.0, -1.0, -2.0]);
    }
}
