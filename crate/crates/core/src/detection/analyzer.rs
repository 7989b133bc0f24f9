//! Discrete-time model of the spectrum-analyzer signal chain: split into two
//! channels, mix with quadrature local oscillators, low-pass with the RBW
//! filter, square and sum.

use super::filter::{FilterKind, FilterModel};
use crate::error::{invalid, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Minimum record length in units of the effective measurement time.
pub const MIN_TIME_CONSTANTS: f64 = 100.0;

/// Gaussian FIR taps extend to this many standard deviations.
const GAUSSIAN_SPAN: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    /// Samples per second.
    pub sample_rate: f64,
    pub samples: Vec<f64>,
}

impl SampledSeries {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(invalid(format!("sample rate {sample_rate} must be finite and > 0")));
        }
        Ok(Self { sample_rate, samples })
    }

    /// `A sin(2π f t + φ)` sampled at `sample_rate`.
    pub fn tone(sample_rate: f64, len: usize, amplitude: f64, freq: f64, phase: f64) -> Result<Self> {
        let samples = (0..len)
            .map(|n| amplitude * (2.0 * PI * cycle_fraction(freq, n, sample_rate) + phase).sin())
            .collect();
        Self::new(sample_rate, samples)
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

fn cycle_fraction(freq: f64, n: usize, fs: f64) -> f64 {
    (freq * n as f64 / fs).fract()
}

trait Lowpass {
    fn step(&mut self, x: f64) -> f64;
}

struct Fir {
    taps: Vec<f64>,
    history: Vec<f64>,
    head: usize,
}

impl Fir {
    fn gaussian(rbw: f64, fs: f64) -> Self {
        // |H(f)| = exp(−2π²σ²f²) with σ = √ln2 / (π RBW)
        let sigma = std::f64::consts::LN_2.sqrt() / (PI * rbw) * fs;
        let half = (GAUSSIAN_SPAN * sigma).ceil() as i64;
        let mut taps: Vec<f64> = (-half..=half).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
        let sum: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= sum);
        let len = taps.len();
        Self { taps, history: vec![0.0; len], head: 0 }
    }
}

impl Lowpass for Fir {
    fn step(&mut self, x: f64) -> f64 {
        let len = self.taps.len();
        self.history[self.head] = x;
        let mut acc = 0.0;
        for (k, tap) in self.taps.iter().enumerate() {
            acc += tap * self.history[(self.head + len - k) % len];
        }
        self.head = (self.head + 1) % len;
        acc
    }
}

struct PoleCascade {
    alpha: f64,
    state: Vec<f64>,
}

impl Lowpass for PoleCascade {
    fn step(&mut self, mut x: f64) -> f64 {
        for y in self.state.iter_mut() {
            *y += self.alpha * (x - *y);
            x = *y;
        }
        x
    }
}

fn build(filter: &FilterModel, fs: f64) -> (Box<dyn Lowpass>, usize) {
    match filter.kind {
        FilterKind::Gaussian => {
            let fir = Fir::gaussian(filter.rbw, fs);
            let settle = fir.taps.len();
            (Box::new(fir), settle)
        }
        FilterKind::SyncTuned { poles } => {
            let f1 = filter.pole_frequency().expect("sync-tuned pole");
            let alpha = 1.0 - (-2.0 * PI * f1 / fs).exp();
            let tau = fs / (2.0 * PI * f1);
            let settle = (10.0 * poles as f64 * tau).ceil() as usize;
            (Box::new(PoleCascade { alpha, state: vec![0.0; poles as usize] }), settle)
        }
    }
}

/// Mean analyzer output `⟨O⟩ = ⟨I² + Q²⟩` for LO frequency `f_lo`, after
/// discarding the filter transient.
pub fn sa_chain_simulate(series: &SampledSeries, filter: &FilterModel, f_lo: f64) -> Result<f64> {
    filter.validate()?;
    let fs = series.sample_rate;
    if !(f_lo >= 0.0) || f_lo >= fs / 2.0 {
        return Err(invalid(format!("LO frequency {f_lo} Hz must lie in [0, Nyquist = {} Hz)", fs / 2.0)));
    }
    let t_eff = filter.effective_time()?;
    if series.duration() < MIN_TIME_CONSTANTS * t_eff {
        return Err(invalid(format!(
            "series of {:.3e} s is shorter than {MIN_TIME_CONSTANTS} effective times ({:.3e} s)",
            series.duration(),
            MIN_TIME_CONSTANTS * t_eff
        )));
    }
    let (mut lp_i, settle) = build(filter, fs);
    let (mut lp_q, _) = build(filter, fs);
    if settle >= series.samples.len() {
        return Err(invalid("series is shorter than the filter transient"));
    }
    let mut acc = 0.0;
    for (n, &x) in series.samples.iter().enumerate() {
        let (s, c) = (2.0 * PI * cycle_fraction(f_lo, n, fs)).sin_cos();
        let half = x * FRAC_1_SQRT_2;
        let i = lp_i.step(half * c);
        let q = lp_q.step(half * s);
        if n >= settle {
            acc += i * i + q * q;
        }
    }
    Ok(acc / (series.samples.len() - settle) as f64)
}
