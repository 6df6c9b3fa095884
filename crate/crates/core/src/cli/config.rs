//! JSON run configurations. Unknown keys are rejected.

use serde::Deserialize;

use crate::battery::{build_ladder, LadderHamiltonian, LadderKind, Spectrum};
use crate::error::{Error, Result};

fn default_spacing() -> f64 {
    1.0
}

/// Ladder description shared by the commands.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    #[serde(default = "default_kind")]
    pub kind: LadderKind,
    /// Number of levels (finite and semi-infinite windows).
    pub n: Option<usize>,
    /// Half width `L` (double-sided windows).
    pub half_width: Option<usize>,
    pub energies: Option<Vec<f64>>,
    pub spacing: Option<f64>,
}

fn default_kind() -> LadderKind {
    LadderKind::Finite
}

impl LadderSpec {
    pub fn build(&self) -> Result<LadderHamiltonian> {
        let extent = match self.kind {
            LadderKind::DoubleSidedTruncated => {
                if self.n.is_some() {
                    return Err(Error::Config(
                        "double-sided ladders take half_width, not n".into(),
                    ));
                }
                self.half_width
                    .or_else(|| self.energies.as_ref().map(|e| e.len() / 2))
            }
            _ => {
                if self.half_width.is_some() {
                    return Err(Error::Config(
                        "half_width only applies to double-sided ladders".into(),
                    ));
                }
                self.n.or_else(|| self.energies.as_ref().map(Vec::len))
            }
        }
        .ok_or_else(|| Error::Config("ladder needs a size (n / half_width) or energies".into()))?;
        let spectrum = match (&self.energies, self.spacing) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either energies or spacing, not both".into(),
                ))
            }
            (Some(e), None) => Spectrum::Explicit(e.clone()),
            (None, s) => Spectrum::Uniform {
                spacing: s.unwrap_or_else(default_spacing),
            },
        };
        build_ladder(self.kind, extent, spectrum).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitUnitarySpec {
    /// `[re, im]`
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub phase: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub cos_theta: usize,
    pub phi: usize,
    pub radius: usize,
}

fn default_pole_unitaries() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochGridConfig {
    pub unitary: QubitUnitarySpec,
    pub grid: GridSpec,
    #[serde(default = "default_pole_unitaries")]
    pub pole_unitaries: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

fn default_random_probes() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalysisSpec {
    pub half_width: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_random_probes")]
    pub bulk_probes: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolReportConfig {
    pub ladder: LadderSpec,
    pub controls: Vec<ControlSpec>,
    #[serde(default = "default_random_probes")]
    pub random_probes: usize,
    pub catalysis: Option<CatalysisSpec>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Haar-random unitary protocol drawn from `unitary_seed` (defaults to the run seed).
    RandomUnitary { unitary_seed: Option<u64> },
    /// Kraus `{s^dag, Pi_top}`.
    Mup,
    /// Kraus `{s, Pi_bottom}`.
    Mdown,
    /// Stinespring-random channel with `rank` Kraus operators.
    RandomCptp {
        rank: usize,
        channel_seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Ground,
    Excited,
    MaximallyMixed,
    RandomPure,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaarConfig {
    pub channel: ChannelSpec,
    pub dimension: usize,
    pub energies: Option<Vec<f64>>,
    pub spacing: Option<f64>,
    pub samples: usize,
    #[serde(default)]
    pub initial_state: InitialState,
    pub seed: Option<u64>,
}

impl HaarConfig {
    pub fn ladder(&self) -> Result<LadderHamiltonian> {
        LadderSpec {
            kind: LadderKind::Finite,
            n: Some(self.dimension),
            half_width: None,
            energies: self.energies.clone(),
            spacing: self.spacing,
        }
        .build()
    }
}

fn default_band() -> usize {
    2
}

fn default_entry_bound() -> f64 {
    0.5
}

fn default_truncation_tol() -> f64 {
    1e-6
}

fn default_count() -> usize {
    1
}

fn default_internal_dim() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `T^power (x) I_internal_dim`.
    Shift {
        power: i64,
        #[serde(default = "default_internal_dim")]
        internal_dim: usize,
    },
    /// Full battery-qubit drive on a double-sided window.
    CompositeProtocol {
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
    /// `exp(-i H)` for random Hermitian `H` with `band` nonzero diagonals.
    RandomLocal {
        #[serde(default = "default_band")]
        band: usize,
        #[serde(default = "default_entry_bound")]
        entry_bound: f64,
        #[serde(default = "default_truncation_tol")]
        truncation_tol: f64,
        #[serde(default = "default_count")]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalitySpec {
    pub c: f64,
    pub l: f64,
}

fn default_cuts() -> Vec<i64> {
    vec![0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub operator: OperatorSpec,
    pub half_width: usize,
    #[serde(default = "default_cuts")]
    pub cuts: Vec<i64>,
    pub locality: Option<LocalitySpec>,
    pub expected_index: Option<i64>,
    pub seed: Option<u64>,
}

pub fn parse<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let err = parse::<FlowConfig>(
            br#"{"operator":{"family":"shift","power":1},"half_width":8,"typo":1}"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
        let err = parse::<FlowConfig>(
            br#"{"operator":{"family":"shift","power":1,"x":2},"half_width":8}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn ladder_spec_variants() {
        let spec: LadderSpec = serde_json::from_str(r#"{"n": 4}"#).unwrap();
        assert_eq!(spec.build().unwrap().energies(), &[0.0, 1.0, 2.0, 3.0]);
        let spec: LadderSpec = serde_json::from_str(r#"{"energies": [0.0, 0.5, 2.0]}"#).unwrap();
        assert_eq!(spec.build().unwrap().dim(), 3);
        let spec: LadderSpec =
            serde_json::from_str(r#"{"kind": "double_sided_truncated", "half_width": 2}"#).unwrap();
        assert_eq!(spec.build().unwrap().labels(), &[-2, -1, 0, 1, 2]);
        let bad: LadderSpec = serde_json::from_str(r#"{"energies": [1.0, 0.0]}"#).unwrap();
        assert!(matches!(bad.build(), Err(Error::Config(_))));
        let both: LadderSpec =
            serde_json::from_str(r#"{"n": 2, "energies": [0, 1], "spacing": 1}"#).unwrap();
        assert!(both.build().is_err());
        let none: LadderSpec = serde_json::from_str(r#"{}"#).unwrap();
        assert!(none.build().is_err());
    }

    #[test]
    fn channel_tags() {
        let c: HaarConfig =
            parse(br#"{"channel":{"type":"mup"},"dimension":4,"samples":1000}"#).unwrap();
        assert!(matches!(c.channel, ChannelSpec::Mup));
        assert_eq!(c.initial_state, InitialState::Ground);
    }
}
