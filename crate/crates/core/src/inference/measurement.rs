//! Measured noises and loss backtracking.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChannel {
    Diff,
    Probe,
    Conj,
}

impl NoiseChannel {
    pub const ALL: [NoiseChannel; 3] = [NoiseChannel::Diff, NoiseChannel::Probe, NoiseChannel::Conj];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NoiseChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseChannel::Diff => "diff",
            NoiseChannel::Probe => "probe",
            NoiseChannel::Conj => "conj",
        })
    }
}

/// One normalized noise as detected, with the transmission between source
/// and detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseMeasurement {
    pub channel: NoiseChannel,
    pub value: f64,
    pub variance: f64,
    pub eta: f64,
}

impl NoiseMeasurement {
    pub fn new(channel: NoiseChannel, value: f64, variance: f64, eta: f64) -> Result<Self> {
        let m = Self { channel, value, variance, eta };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.value > 0.0) || !self.value.is_finite() {
            return Err(invalid(format!("{} noise {} must be finite and > 0", self.channel, self.value)));
        }
        if !(self.variance > 0.0) || !self.variance.is_finite() {
            return Err(invalid(format!("{} variance {} must be finite and > 0", self.channel, self.variance)));
        }
        check_eta(self.eta)
    }

    /// Detected noise for a source noise `n0` seen through `eta`.
    pub fn forward(channel: NoiseChannel, n0: f64, variance: f64, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Self::new(channel, eta * n0 + (1.0 - eta), variance, eta)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid(format!("transmission eta = {eta} must lie in (0, 1]")));
    }
    Ok(())
}

/// Source-level noise `N₀ = (N_m − (1 − η)) / η`.
pub fn backtrack_noise(n_m: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let n0 = (n_m - (1.0 - eta)) / eta;
    if !(n0 > 0.0) {
        return Err(Error::BacktrackNonPhysical(format!("N_m = {n_m}, eta = {eta} gives N_0 = {n0}")));
    }
    Ok(n0)
}

/// Backtracked noises in channel order (diff, probe, conj).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceNoises {
    pub values: [f64; 3],
    /// `Var(N₀) = Var(N_m) / η²`.
    pub variances: [f64; 3],
}

impl SourceNoises {
    /// Requires exactly one measurement per channel, in any order.
    pub fn from_measurements(measurements: &[NoiseMeasurement]) -> Result<Self> {
        let mut slots: [Option<&NoiseMeasurement>; 3] = [None; 3];
        for m in measurements {
            let slot = &mut slots[m.channel.index()];
            if slot.is_some() {
                return Err(Error::Schema(format!("duplicate '{}' measurement", m.channel)));
            }
            *slot = Some(m);
        }
        let mut values = [0.0; 3];
        let mut variances = [0.0; 3];
        for ch in NoiseChannel::ALL {
            let m = slots[ch.index()].ok_or_else(|| Error::Schema(format!("missing '{ch}' measurement")))?;
            m.validate()?;
            values[ch.index()] = backtrack_noise(m.value, m.eta)?;
            variances[ch.index()] = m.variance / (m.eta * m.eta);
        }
        Ok(Self { values, variances })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backtrack_fixed_points() {
        for eta in [0.1, 0.5, 0.919, 1.0] {
            assert!((backtrack_noise(1.0, eta).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(backtrack_noise(0.37, 1.0).unwrap(), 0.37);
    }

    #[test]
    fn backtrack_eight_db() {
        let n0 = backtrack_noise(0.1585, 0.919).unwrap();
        assert!((n0 - (0.1585 - 0.081) / 0.919).abs() < 1e-15);
        assert!((n0 - 0.0843).abs() < 1e-4);
    }

    #[test]
    fn backtrack_errors() {
        assert!(matches!(backtrack_noise(0.05, 0.9), Err(Error::BacktrackNonPhysical(_))));
        assert!(matches!(backtrack_noise(0.5, 0.0), Err(Error::InvalidArgument(_))));
        assert!(backtrack_noise(0.5, 1.2).is_err());
    }

    #[test]
    fn triple_requires_each_channel_once() {
        let m = |ch| NoiseMeasurement::new(ch, 1.2, 1e-3, 0.9).unwrap();
        let ok = [m(NoiseChannel::Conj), m(NoiseChannel::Diff), m(NoiseChannel::Probe)];
        let src = SourceNoises::from_measurements(&ok).unwrap();
        assert!((src.variances[0] - 1e-3 / 0.81).abs() < 1e-15);
        assert!(matches!(SourceNoises::from_measurements(&ok[..2]), Err(Error::Schema(_))));
        let dup = [m(NoiseChannel::Diff), m(NoiseChannel::Diff), m(NoiseChannel::Probe)];
        assert!(matches!(SourceNoises::from_measurements(&dup), Err(Error::Schema(_))));
    }

    #[test]
    fn json_round_trip() {
        let m = NoiseMeasurement::new(NoiseChannel::Probe, 9.5, 0.04, 0.919).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"probe\""));
        assert_eq!(serde_json::from_str::<NoiseMeasurement>(&text).unwrap(), m);
    }
}
