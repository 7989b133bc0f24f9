//! Gaussian-state toolkit for transmission estimation with bright
//! two-mode squeezed light.
//!
//! The physics core ([`gaussian`], [`source`], [`bounds`], [`chain`],
//! [`detection::estimator`]) is generic over [`Real`] and runs in `f32` or
//! `f64`. The signal-processing and fitting layers work in `f64`.
//!
//! ```
//! use tmss_core::{advantage_ratio, LossBudget64, SourceParams64};
//!
//! let r = advantage_ratio(0.84, &SourceParams64::experimental(), &LossBudget64::experimental()).unwrap();
//! assert!((r - 2.6).abs() < 0.1);
//! ```

pub mod bounds;
pub mod chain;
pub mod detection;
pub mod error;
pub mod gaussian;
pub mod inference;
pub mod linalg;
pub mod quad;
pub mod scalar;
pub mod source;

pub use bounds::{
    advantage_ratio, big_gamma, distributed_squeezing_factor, h_c, h_c_prime, qcrb_coherent, qcrb_distributed,
    qcrb_numeric_gaussian, qcrb_pure_btmss, qcrb_ultimate, BoundKind, BoundPoint, LossBudget,
};
pub use chain::ProbeChain;
pub use detection::{
    effective_time, optimal_gain, photons_from_voltage, sa_chain_simulate, snr_ramp_simulate, transmission_variance,
    FilterKind, FilterModel, MeasurementPlan, RampProfile, RampResult, SampledSeries,
};
pub use error::{Error, Result};
pub use gaussian::{ChannelOp, GaussianState, SymplecticOp};
pub use inference::{
    backtrack_noise, chi_square, differential_evolution, fit_source, uncertainty_by_chi2_doubling, ChiScale,
    DEConfig, FitConfig, FitResult, NoiseChannel, NoiseMeasurement, NoiseModel,
};
pub use linalg::Matrix;
pub use scalar::Real;
pub use source::{
    analytic_noises, continuum_noises, continuum_source, converged_source, layered_source, squeezing_db,
    NoiseTriple, ProbeFormula, SourceOutput, SourceParams,
};

pub type GaussianState64 = GaussianState<f64>;
pub type GaussianState32 = GaussianState<f32>;
pub type SymplecticOp64 = SymplecticOp<f64>;
pub type SymplecticOp32 = SymplecticOp<f32>;
pub type ChannelOp64 = ChannelOp<f64>;
pub type ChannelOp32 = ChannelOp<f32>;
pub type SourceParams64 = SourceParams<f64>;
pub type SourceParams32 = SourceParams<f32>;
pub type LossBudget64 = LossBudget<f64>;
pub type LossBudget32 = LossBudget<f32>;
pub type ProbeChain64 = ProbeChain<f64>;
pub type ProbeChain32 = ProbeChain<f32>;
pub type BoundPoint64 = BoundPoint<f64>;
pub type NoiseTriple64 = NoiseTriple<f64>;
pub type Matrix64 = Matrix<f64>;
