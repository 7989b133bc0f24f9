//! Measurement side: estimator, analyzer chain, ramp emulation and photon
//! accounting.

pub mod analyzer;
pub mod estimator;
pub mod filter;
pub mod photons;
pub mod ramp;

pub use analyzer::{sa_chain_simulate, SampledSeries};
pub use estimator::{
    estimator_variance, optimal_gain, optimal_gain_or_zero, optimized_transmission_variance, transmission_variance,
};
pub use filter::{FilterKind, FilterModel};
pub use photons::photons_from_voltage;
pub use ramp::{snr_ramp_simulate, MeasurementPlan, RampProfile, RampResult};

/// Effective measurement time of an RBW filter.
pub fn effective_time(filter: &FilterModel) -> crate::error::Result<f64> {
    filter.effective_time()
}
