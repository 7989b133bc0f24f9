//! Inference of `(s, T_a)` from measured normalized noises.

pub mod chi2;
pub mod de;
pub mod fit;
pub mod measurement;
pub mod uncertainty;

pub use chi2::{chi_square, chi_square_measurements, ChiScale, NoiseModel};
pub use de::{differential_evolution, DEConfig, DEResult, GenerationRecord};
pub use fit::{fit_source, synthetic_measurements, FitConfig, FitResult, FIT_DOF};
pub use measurement::{backtrack_noise, NoiseChannel, NoiseMeasurement, SourceNoises};
pub use uncertainty::{uncertainty_by_chi2_doubling, Uncertainty};
