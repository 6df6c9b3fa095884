//! `haar`: exact and Monte Carlo Haar averages of the energy change.

use serde_json::json;

use super::config::{ChannelSpec, HaarConfig, InitialState};
use super::output::{Check, Provenance, Report};
use crate::battery::shift_operators;
use crate::error::{Error, Result};
use crate::haar::{
    haar_average_exact, haar_average_mc, random_cptp_channel, random_pure_state,
    sample_haar_unitary, substream,
};
use crate::quantum::{DensityMatrix, QuantumChannel};

/// Monte Carlo agreement window in standard errors.
pub const COMPATIBILITY_SIGMAS: f64 = 4.0;
pub const MIN_SAMPLES: usize = 100;

pub fn run(cfg: &HaarConfig, provenance: Provenance) -> Result<Report> {
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::Config(format!(
            "samples must be at least {MIN_SAMPLES}, got {}",
            cfg.samples
        )));
    }
    let h = cfg.ladder()?;
    let d = h.dim();
    let seed = provenance.seed;
    let tol = 1e-10;
    let (s, s_dag) = shift_operators(&h);
    let (channel, channel_name, unnormalized) = match &cfg.channel {
        ChannelSpec::RandomUnitary { unitary_seed } => {
            let u = sample_haar_unitary(d, unitary_seed.unwrap_or(seed.wrapping_add(1)));
            (QuantumChannel::from_unitary(&u), "random_unitary", None)
        }
        ChannelSpec::Mup => {
            let top = h.projector(d - 1).into_matrix();
            let e = h.energies();
            (
                QuantumChannel::new(vec![s_dag, top], tol)?,
                "mup",
                Some(e[d - 1] - e[0]),
            )
        }
        ChannelSpec::Mdown => {
            let bottom = h.projector(0).into_matrix();
            let e = h.energies();
            (
                QuantumChannel::new(vec![s, bottom], tol)?,
                "mdown",
                Some(e[0] - e[d - 1]),
            )
        }
        ChannelSpec::RandomCptp { rank, channel_seed } => {
            let mut rng = substream(channel_seed.unwrap_or(seed.wrapping_add(1)), 0);
            let ch = random_cptp_channel(d, *rank, &mut rng)
                .map_err(|e| Error::Config(e.to_string()))?;
            (ch, "random_cptp", None)
        }
    };
    let rho0 = match cfg.initial_state {
        InitialState::Ground => h.projector(0),
        InitialState::Excited => h.projector(d - 1),
        InitialState::MaximallyMixed => DensityMatrix::maximally_mixed(d),
        InitialState::RandomPure => random_pure_state(d, &mut substream(seed.wrapping_add(2), 0)),
    };

    let exact = haar_average_exact(&channel, &h)?;
    let mc = haar_average_mc(&channel, &h, &rho0, cfg.samples, seed)?;
    let deviation = (mc.mean - exact).abs();
    let within = deviation <= COMPATIBILITY_SIGMAS * mc.stderr || deviation <= 1e-12;
    let checks = vec![Check {
        name: "mc_compatible_with_exact".into(),
        pass: within,
        value: json!(deviation),
        limit: json!(COMPATIBILITY_SIGMAS * mc.stderr),
    }];

    let normalization = unnormalized.map(|value| {
        json!({
            "unnormalized_value": value,
            "matches_exact": (value - exact).abs() <= 1e-12,
            "note": "the Haar average carries a 1/d prefactor; the unprefixed top-minus-bottom energy gap is not the average",
        })
    });
    let results = json!({
        "channel": channel_name,
        "kraus_rank": channel.kraus().len(),
        "dimension": d,
        "energies": h.energies(),
        "initial_state": cfg.initial_state_name(),
        "exact": exact,
        "mc": mc,
        "deviation": deviation,
        "compatibility_sigmas": COMPATIBILITY_SIGMAS,
        "compatible": within,
        "normalization_flag": normalization,
    });
    Ok(Report {
        provenance,
        results,
        checks,
    })
}

impl HaarConfig {
    fn initial_state_name(&self) -> &'static str {
        match self.initial_state {
            InitialState::Ground => "ground",
            InitialState::Excited => "excited",
            InitialState::MaximallyMixed => "maximally_mixed",
            InitialState::RandomPure => "random_pure",
        }
    }
}
