//! χ² between backtracked noises and a source model.

use super::measurement::{NoiseMeasurement, SourceNoises};
use crate::error::Result;
use crate::source::{analytic_noises, continuum_noises, NoiseTriple, ProbeFormula};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Exact continuum limit of the layered source.
    #[default]
    NumericOracle,
    /// Closed-form expressions as printed.
    PrintedFormulas,
}

impl NoiseModel {
    pub fn theory(self, s: f64, t_a: f64) -> Result<NoiseTriple<f64>> {
        match self {
            NoiseModel::NumericOracle => continuum_noises(s, t_a),
            NoiseModel::PrintedFormulas => analytic_noises(s, t_a, ProbeFormula::AsPrinted),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiScale {
    /// Residuals of `log₁₀ N` with `Var(log₁₀ N) = Var(N) / (N ln10)²`.
    #[default]
    Log10,
    Linear,
}

/// `Σ (measured − theory)² / variance` over the three channels. Returns
/// `+∞` where the theory is non-positive on the log scale.
pub fn chi_square(noises: &SourceNoises, s: f64, t_a: f64, model: NoiseModel, scale: ChiScale) -> Result<f64> {
    let theory = model.theory(s, t_a)?.as_array();
    let mut chi2 = 0.0;
    for ((&n, &var), &th) in noises.values.iter().zip(&noises.variances).zip(&theory) {
        chi2 += match scale {
            ChiScale::Linear => (n - th).powi(2) / var,
            ChiScale::Log10 => {
                if !(th > 0.0) {
                    return Ok(f64::INFINITY);
                }
                let sd = n * LN_10;
                (n.log10() - th.log10()).powi(2) * sd * sd / var
            }
        };
    }
    Ok(chi2)
}

/// [`chi_square`] straight from detected measurements.
pub fn chi_square_measurements(
    measurements: &[NoiseMeasurement],
    s: f64,
    t_a: f64,
    model: NoiseModel,
    scale: ChiScale,
) -> Result<f64> {
    chi_square(&SourceNoises::from_measurements(measurements)?, s, t_a, model, scale)
}
