//! Monte Carlo emulation of the modulation-ramp measurement.
//!
//! Each time bin carries a modulation of variance `v` (transmission units)
//! that ramps linearly to zero. The analyzer output of a bin is
//! `|a + w|²` with `|a|² = v` and complex Gaussian noise `w` of mean power
//! equal to the per-bin transmission variance. The SNR of a bin is its
//! excess over the mean of an unmodulated trace, and `ΔT` is the square
//! root of the modulation variance where the linear SNR fit crosses one.

use super::estimator::{optimal_gain_or_zero, transmission_variance};
use super::filter::FilterModel;
use crate::chain::ProbeChain;
use crate::error::{invalid, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fitted-SNR window of the refined linear fit.
pub const FIT_WINDOW: (f64, f64) = (0.2, 5.0);

/// Default starting modulation variance in units of the noise floor.
pub const DEFAULT_START_SNR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    /// Conjugate gain; `None` selects the optimal gain.
    pub estimator_gain: Option<f64>,
    /// Modulation frequency (Hz); the analyzer LO is tuned here.
    pub modulation_freq: f64,
    /// Ramp duration (s).
    pub ramp_duration: f64,
    pub filter: FilterModel,
    /// Number of time bins along the ramp.
    pub trials: usize,
    /// Analyzer samples averaged per bin; `None` derives it from the ramp
    /// duration and the effective time.
    pub samples_per_bin: Option<usize>,
    pub rng_seed: u64,
}

impl MeasurementPlan {
    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if let Some(g) = self.estimator_gain {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(invalid(format!("estimator gain g = {g} must be finite and >= 0")));
            }
        }
        if self.trials < 1 {
            return Err(invalid("trials must be >= 1"));
        }
        if !(self.ramp_duration > 0.0) || !(self.modulation_freq > 0.0) {
            return Err(invalid("ramp duration and modulation frequency must be > 0"));
        }
        if self.samples_per_bin == Some(0) {
            return Err(invalid("samples_per_bin must be >= 1"));
        }
        Ok(())
    }

    /// Samples per bin actually used.
    pub fn resolved_samples_per_bin(&self) -> Result<usize> {
        if let Some(m) = self.samples_per_bin {
            return Ok(m);
        }
        let t = self.filter.effective_time()?;
        Ok(((self.ramp_duration / self.trials as f64 / t).round() as usize).max(1))
    }
}

/// Noise floor and starting modulation of one ramp, in transmission units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampProfile {
    /// Per-bin variance of the transmission estimate.
    pub noise_variance: f64,
    /// Modulation variance at the start of the ramp.
    pub start_variance: f64,
}

impl RampProfile {
    pub fn new(noise_variance: f64, start_variance: f64) -> Result<Self> {
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(invalid("noise variance must be finite and >= 0"));
        }
        if !(start_variance > 0.0) || !start_variance.is_finite() {
            return Err(invalid("starting modulation variance must be finite and > 0"));
        }
        Ok(Self { noise_variance, start_variance })
    }

    /// Profile for a chain at transmission `t` with `n_r` photons per bin,
    /// ramping down from [`DEFAULT_START_SNR`].
    pub fn from_chain(chain: &ProbeChain<f64>, t: f64, plan: &MeasurementPlan, n_r: f64) -> Result<Self> {
        let g = match plan.estimator_gain {
            Some(g) => g,
            None => optimal_gain_or_zero(&chain.state_at(t)?)?,
        };
        let v = transmission_variance(chain, t, g, n_r)?;
        Self::new(v, DEFAULT_START_SNR * v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampResult {
    pub delta_t_at_snr1: f64,
    pub fit_slope: f64,
    pub fit_intercept: f64,
    /// Mean unmodulated output over all bins.
    pub noise_floor: f64,
    /// Modulation variance of each bin.
    pub modulation_variance: Vec<f64>,
    /// Mean modulated output of each bin.
    pub signal_trace: Vec<f64>,
    /// Per-bin SNR; empty when the noise floor is zero.
    pub snr_trace: Vec<f64>,
    pub fit_points: usize,
    pub samples_per_bin: usize,
}

fn bin_powers(seed: u64, bin: usize, v: f64, noise: f64, m: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(bin as u64);
    let a = v.sqrt();
    let w = (noise / 2.0).sqrt();
    let mut draw = || w * rng.sample::<f64, _>(StandardNormal);
    let (mut on, mut off) = (0.0, 0.0);
    for _ in 0..m {
        let (x, y) = (a + draw(), draw());
        on += x * x + y * y;
    }
    for _ in 0..m {
        let (x, y) = (draw(), draw());
        off += x * x + y * y;
    }
    (on / m as f64, off / m as f64)
}

fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 3 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Runs the ramp. Bin `k` draws from its own ChaCha stream, so the result
/// does not depend on the number of worker threads.
pub fn snr_ramp_simulate(plan: &MeasurementPlan, profile: &RampProfile) -> Result<RampResult> {
    plan.validate()?;
    let m = plan.resolved_samples_per_bin()?;
    let n = plan.trials;
    let modulation: Vec<f64> =
        (0..n).map(|k| profile.start_variance * (1.0 - (k as f64 + 0.5) / n as f64)).collect();
    let powers: Vec<(f64, f64)> = modulation
        .par_iter()
        .enumerate()
        .map(|(k, &v)| bin_powers(plan.rng_seed, k, v, profile.noise_variance, m))
        .collect();
    let signal_trace: Vec<f64> = powers.iter().map(|p| p.0).collect();
    let noise_floor = powers.iter().map(|p| p.1).sum::<f64>() / n as f64;

    if profile.noise_variance == 0.0 {
        let (slope, intercept) =
            ols(&modulation, &signal_trace).ok_or_else(|| invalid("a noiseless ramp needs at least 3 bins"))?;
        return Ok(RampResult {
            delta_t_at_snr1: 0.0,
            fit_slope: slope,
            fit_intercept: intercept,
            noise_floor,
            modulation_variance: modulation,
            signal_trace,
            snr_trace: Vec::new(),
            fit_points: n,
            samples_per_bin: m,
        });
    }

    let snr: Vec<f64> = signal_trace.iter().map(|&o| (o - noise_floor) / noise_floor).collect();
    let v_max = modulation.iter().cloned().fold(0.0, f64::max);
    let not_bracketed = |slope: f64, icpt: f64| Error::SnrNotBracketed { lo: icpt, hi: icpt + slope * v_max };
    let (s0, i0) = ols(&modulation, &snr).ok_or_else(|| not_bracketed(0.0, 0.0))?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = modulation
        .iter()
        .zip(&snr)
        .filter(|(&v, _)| {
            let fit = i0 + s0 * v;
            fit >= FIT_WINDOW.0 && fit <= FIT_WINDOW.1
        })
        .map(|(&v, &y)| (v, y))
        .unzip();
    let (slope, intercept) = ols(&xs, &ys).ok_or_else(|| not_bracketed(s0, i0))?;
    let v1 = (1.0 - intercept) / slope;
    if !(slope > 0.0) || !(v1 > 0.0 && v1 <= v_max) {
        return Err(not_bracketed(slope, intercept));
    }
    Ok(RampResult {
        delta_t_at_snr1: v1.sqrt(),
        fit_slope: slope,
        fit_intercept: intercept,
        noise_floor,
        modulation_variance: modulation,
        signal_trace,
        snr_trace: snr,
        fit_points: xs.len(),
        samples_per_bin: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(trials: usize, seed: u64) -> MeasurementPlan {
        MeasurementPlan {
            estimator_gain: None,
            modulation_freq: 1.5e6,
            ramp_duration: 1.0,
            filter: FilterModel::sync_tuned(4, 51e3).unwrap(),
            trials,
            samples_per_bin: Some(1),
            rng_seed: seed,
        }
    }

    #[test]
    fn noiseless_ramp_is_recovered_exactly() {
        let r = snr_ramp_simulate(&plan(100, 1), &RampProfile::new(0.0, 2e-6).unwrap()).unwrap();
        assert_eq!(r.delta_t_at_snr1, 0.0);
        assert!((r.fit_slope - 1.0).abs() < 1e-12);
        assert!(r.fit_intercept.abs() < 1e-18);
        for (s, v) in r.signal_trace.iter().zip(&r.modulation_variance) {
            assert!((s - v).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn recovers_noise_level() {
        let v = 3e-8;
        let r = snr_ramp_simulate(&plan(10_000, 7), &RampProfile::new(v, 4.0 * v).unwrap()).unwrap();
        assert!((r.delta_t_at_snr1 / v.sqrt() - 1.0).abs() < 0.05, "{}", r.delta_t_at_snr1 / v.sqrt());
        assert!(r.fit_points > 5000);
    }

    #[test]
    fn weak_ramp_not_bracketed() {
        let err = snr_ramp_simulate(&plan(2000, 3), &RampProfile::new(1.0, 0.05).unwrap()).unwrap_err();
        assert!(matches!(err, Error::SnrNotBracketed { .. }), "{err}");
    }

    #[test]
    fn derived_samples_per_bin() {
        let mut p = plan(10_000, 0);
        p.samples_per_bin = None;
        // 1 s / 1e4 bins / ~8.7 µs
        assert_eq!(p.resolved_samples_per_bin().unwrap(), 12);
    }

    #[test]
    fn invalid_plans() {
        let mut p = plan(0, 0);
        assert!(p.validate().is_err());
        p.trials = 10;
        p.estimator_gain = Some(-0.5);
        assert!(p.validate().is_err());
    }
}
