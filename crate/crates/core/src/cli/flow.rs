//! `flow`: flow index of banded unitaries on a double-sided window.

use serde_json::{json, Value};

use super::config::{FlowConfig, LocalitySpec, OperatorSpec};
use super::output::{Check, Provenance, Report};
use crate::battery::LadderHamiltonian;
use crate::error::{Error, Result};
use crate::haar::substream;
use crate::protocols::{build_drive, evolve_drive};
use crate::quantum::{expm_hermitian, CMatrix, Tolerances};
use crate::topology::{
    flatten_composite, flow_index, locality_check, random_banded_hermitian, BandedBlockUnitary,
    FlowIndexReport, Lattice, INTEGRALITY_TOL,
};

/// Window inconsistencies are configuration problems.
fn as_config(e: Error) -> Error {
    match e {
        Error::BandTooWide { .. } | Error::Dimension(_) | Error::InvalidLadder(_) => {
            Error::Config(e.to_string())
        }
        other => other,
    }
}

struct Instance {
    label: String,
    unitary: BandedBlockUnitary,
    generators: Vec<CMatrix>,
}

fn instances(cfg: &FlowConfig, seed: u64) -> Result<(Vec<Instance>, i64)> {
    let l = cfg.half_width;
    match &cfg.operator {
        OperatorSpec::Shift {
            power,
            internal_dim,
        } => {
            if *internal_dim == 0 {
                return Err(Error::Config("internal_dim must be positive".into()));
            }
            let u = BandedBlockUnitary::shift_power(l, *internal_dim, *power)?;
            let expected = power * *internal_dim as i64;
            Ok((
                vec![Instance {
                    label: format!("shift^{power}"),
                    unitary: u,
                    generators: vec![],
                }],
                expected,
            ))
        }
        OperatorSpec::CompositeProtocol { spacing } => {
            let h = LadderHamiltonian::double_sided(l, *spacing)?;
            let drive = build_drive(&h);
            let u = flatten_composite(&evolve_drive(&drive)?, &h)?;
            let generators = drive
                .segments()
                .iter()
                .map(|s| s.generator.clone())
                .collect();
            Ok((
                vec![Instance {
                    label: "composite_protocol".into(),
                    unitary: u,
                    generators,
                }],
                0,
            ))
        }
        OperatorSpec::RandomLocal {
            band,
            entry_bound,
            truncation_tol,
            count,
        } => {
            if *count == 0 {
                return Err(Error::Config("count must be positive".into()));
            }
            let lattice = Lattice::window(l, 1);
            let tol = Tolerances::default().herm;
            let list = (0..*count)
                .map(|k| {
                    let mut rng = substream(seed, k as u64);
                    let gen = random_banded_hermitian(&lattice, *band, *entry_bound, &mut rng);
                    let u = expm_hermitian(&gen, 1.0, tol)?;
                    let u = BandedBlockUnitary::from_dense_truncated(u, lattice, *truncation_tol)?;
                    Ok(Instance {
                        label: format!("random_local_{k}"),
                        unitary: u,
                        generators: vec![gen],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((list, 0))
        }
    }
}

fn locality(inst: &Instance, spec: Option<LocalitySpec>) -> Result<Option<Value>> {
    let Some(spec) = spec else { return Ok(None) };
    if inst.generators.is_empty() {
        return Ok(None);
    }
    let lattice = *inst.unitary.lattice();
    let reports = inst
        .generators
        .iter()
        .map(|g| locality_check(g, &lattice, spec.c, spec.l))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(Some(json!(reports)))
}

pub fn run(cfg: &FlowConfig, provenance: Provenance) -> Result<Report> {
    if cfg.cuts.is_empty() {
        return Err(Error::Config("cuts must not be empty".into()));
    }
    let (list, default_expected) = instances(cfg, provenance.seed).map_err(as_config)?;
    let expected = cfg.expected_index.unwrap_or(default_expected);
    let mut checks = Vec::new();
    let mut out = Vec::with_capacity(list.len());
    for inst in &list {
        let reports = cfg
            .cuts
            .iter()
            .map(|&c| flow_index(&inst.unitary, c))
            .collect::<Result<Vec<FlowIndexReport>>>()
            .map_err(as_config)?;
        let first = reports[0].raw_value;
        let spread = reports
            .iter()
            .map(|r| (r.raw_value - first).abs())
            .fold(0.0, f64::max);
        let worst_residual = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
        checks.push(Check::at_most(
            format!("{}_integrality", inst.label),
            worst_residual,
            INTEGRALITY_TOL,
        ));
        checks.push(Check::equals(
            format!("{}_index", inst.label),
            reports[0].rounded,
            expected,
        ));
        if reports.len() > 1 {
            checks.push(Check::at_most(
                format!("{}_cut_independence", inst.label),
                spread,
                INTEGRALITY_TOL,
            ));
        }
        let loc = locality(inst, cfg.locality)?;
        if let Some(Value::Array(items)) = &loc {
            let ok = items.iter().all(|r| r["ok"] == json!(true));
            checks.push(Check::flag(format!("{}_locality", inst.label), ok));
        }
        out.push(json!({
            "label": inst.label,
            "band": inst.unitary.band(),
            "truncation_error": inst.unitary.truncation_error(),
            "reports": reports,
            "cut_spread": spread,
            "locality": loc,
        }));
    }
    let results = json!({
        "half_width": cfg.half_width,
        "cuts": cfg.cuts,
        "expected_index": expected,
        "instances": out,
    });
    Ok(Report {
        provenance,
        results,
        checks,
    })
}
