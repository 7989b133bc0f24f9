//! End-to-end `(s, T_a)` fit from detected noises.

use super::chi2::{chi_square, ChiScale, NoiseModel};
use super::de::{differential_evolution, DEConfig, GenerationRecord};
use super::measurement::{NoiseMeasurement, SourceNoises};
use super::uncertainty::{uncertainty_by_chi2_doubling, DEFAULT_DIRECTIONS};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Three measurements minus two parameters.
pub const FIT_DOF: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub de: DEConfig,
    #[serde(default)]
    pub noise_model: NoiseModel,
    #[serde(default)]
    pub scale: ChiScale,
    #[serde(default = "default_directions")]
    pub contour_directions: usize,
}

fn default_directions() -> usize {
    DEFAULT_DIRECTIONS
}

impl FitConfig {
    pub fn new(de: DEConfig) -> Self {
        Self { de, noise_model: NoiseModel::default(), scale: ChiScale::default(), contour_directions: DEFAULT_DIRECTIONS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub s: f64,
    pub sigma_s: f64,
    pub t_a: f64,
    pub sigma_ta: f64,
    pub chi2: f64,
    /// `Δχ²` of the uncertainty contour.
    pub delta_chi2: f64,
    /// Per-parameter flag: contour open on one side within the bounds.
    pub one_sided: [bool; 2],
    pub generations: usize,
    pub converged: bool,
    /// Largest per-parameter population standard deviation at exit.
    pub population_final_spread: f64,
    pub evaluations: usize,
    /// Backtracked source noises (diff, probe, conj) and their variances.
    pub source_noises: SourceNoises,
    pub config: FitConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<GenerationRecord>,
}

/// Backtracks, minimizes χ² over `(s, T_a)` and attaches contour uncertainties.
pub fn fit_source(measurements: &[NoiseMeasurement], config: &FitConfig) -> Result<FitResult> {
    if config.de.bounds.len() != 2 {
        return Err(invalid("a source fit needs bounds for exactly two parameters (s, T_a)"));
    }
    let noises = SourceNoises::from_measurements(measurements)?;
    let objective = |p: &[f64]| {
        chi_square(&noises, p[0], p[1], config.noise_model, config.scale).unwrap_or(f64::NAN)
    };
    let de = differential_evolution(objective, &config.de)?;
    let unc = uncertainty_by_chi2_doubling(
        objective,
        &de.best,
        de.best_value.max(0.0),
        FIT_DOF,
        &config.de.bounds,
        config.contour_directions,
    )?;
    Ok(FitResult {
        s: de.best[0],
        sigma_s: unc.sigma[0],
        t_a: de.best[1],
        sigma_ta: unc.sigma[1],
        chi2: de.best_value,
        delta_chi2: unc.delta_chi2,
        one_sided: [unc.one_sided[0], unc.one_sided[1]],
        generations: de.generations,
        converged: de.converged,
        population_final_spread: de.spread.iter().cloned().fold(0.0, f64::max),
        evaluations: de.evaluations,
        source_noises: noises,
        config: config.clone(),
        history: de.history,
    })
}

/// Detected measurements generated from the numeric model at `(s, T_a)`
/// with relative measurement standard deviation `rel_std` and a common
/// `eta` per channel (diff, probe, conj).
pub fn synthetic_measurements(s: f64, t_a: f64, etas: [f64; 3], rel_std: f64) -> Result<Vec<NoiseMeasurement>> {
    let theory = NoiseModel::NumericOracle.theory(s, t_a)?.as_array();
    super::measurement::NoiseChannel::ALL
        .iter()
        .zip(theory.iter().zip(etas))
        .map(|(&ch, (&n0, eta))| {
            let n_m = eta * n0 + (1.0 - eta);
            NoiseMeasurement::new(ch, n_m, (rel_std * n_m).powi(2), eta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(seed: u64) -> FitConfig {
        let mut de = DEConfig::source_fit(seed);
        de.population = 60;
        FitConfig::new(de)
    }

    #[test]
    fn noiseless_round_trip() {
        let m = synthetic_measurements(2.04, 0.71, [0.919, 0.945, 0.919], 0.02).unwrap();
        let r = fit_source(&m, &quick(11)).unwrap();
        assert!((r.s - 2.04).abs() < 1e-3 && (r.t_a - 0.71).abs() < 1e-3, "{} {}", r.s, r.t_a);
        assert!(r.chi2 < 1e-8);
        assert!(r.sigma_s > 0.0 && r.sigma_ta > 0.0);
    }

    #[test]
    fn coherent_source_fits_zero_squeezing() {
        let m = synthetic_measurements(0.0, 0.9, [1.0; 3], 0.02).unwrap();
        let r = fit_source(&m, &quick(5)).unwrap();
        assert!(r.s <= 0.01, "{}", r.s);
    }

    #[test]
    fn smaller_errors_halve_uncertainty() {
        let base = synthetic_measurements(2.04, 0.71, [0.919, 0.945, 0.919], 0.02).unwrap();
        let run = |offset: f64, var_scale: f64| {
            let mut m = base.clone();
            m[1].value *= 1.0 + offset;
            m.iter_mut().for_each(|x| x.variance *= var_scale);
            fit_source(&m, &quick(3)).unwrap()
        };
        // residuals and standard deviations both halve, χ²_min is unchanged
        let wide = run(0.01, 1.0);
        let narrow = run(0.005, 0.25);
        assert!((narrow.sigma_s / wide.sigma_s - 0.5).abs() < 0.025, "{}", narrow.sigma_s / wide.sigma_s);
        assert!((narrow.sigma_ta / wide.sigma_ta - 0.5).abs() < 0.025);
    }
}
