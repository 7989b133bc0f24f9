//! Probe chain: source → `T_p` → system `T` → `η_p` on the probe, and
//! source → `η_c` on the conjugate.

use crate::bounds::{BoundKind, BoundPoint, LossBudget};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{ChannelOp, GaussianState};
use crate::scalar::{rel_diff, Real};
use crate::source::{converged_source, default_rel_tol, AffineMap, SourceOutput, SourceParams};

/// Smallest seed photon number accepted as "bright".
pub const MIN_BRIGHT_SEED: f64 = 1e4;

/// Relative step of the central-difference derivative check.
const FD_STEP: f64 = 1e-6;

/// Allowed analytic vs finite-difference disagreement.
const FD_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ProbeChain<T> {
    params: SourceParams<T>,
    budget: LossBudget<T>,
    source: SourceOutput<T>,
    at_system: GaussianState<T>,
}

impl<T: Real> ProbeChain<T> {
    pub fn new(params: &SourceParams<T>, budget: &LossBudget<T>) -> Result<Self> {
        let source = converged_source(params, default_rel_tol())?;
        Self::from_source(params, budget, source)
    }

    /// Chain around an already evaluated source (e.g. the continuum limit).
    pub fn from_source(params: &SourceParams<T>, budget: &LossBudget<T>, source: SourceOutput<T>) -> Result<Self> {
        budget.validate()?;
        if !(params.seed_photons >= T::lit(MIN_BRIGHT_SEED)) {
            return Err(invalid(format!(
                "seed of {} photons is not in the bright limit (need >= {MIN_BRIGHT_SEED})",
                params.seed_photons
            )));
        }
        let at_system = source.state.apply_loss(&ChannelOp::new(vec![budget.t_p, T::one()])?)?;
        Ok(Self { params: *params, budget: *budget, source, at_system })
    }

    pub fn params(&self) -> &SourceParams<T> {
        &self.params
    }

    pub fn budget(&self) -> &LossBudget<T> {
        &self.budget
    }

    pub fn source(&self) -> &SourceOutput<T> {
        &self.source
    }

    /// Probe photons incident on the system (bright-limit mean).
    pub fn photons_at_system(&self) -> T {
        self.at_system.mean_photon_bright(0).expect("probe mode")
    }

    /// Detected state for system transmission `t`.
    pub fn state_at(&self, t: T) -> Result<GaussianState<T>> {
        self.at_system
            .apply_loss(&ChannelOp::new(vec![t, T::one()])?)?
            .apply_loss(&ChannelOp::new(vec![self.budget.eta_p, self.budget.eta_c])?)
    }

    /// `∂d/∂T`: the probe displacement scales as `√T`, so its derivative is
    /// `d_probe / (2T)`; the conjugate does not depend on `T`.
    pub fn displacement_derivative(&self, t: T) -> Result<Vec<T>> {
        if !(t > T::zero()) {
            return Err(invalid("the displacement derivative needs T > 0"));
        }
        let d = self.state_at(t)?.displacement().to_vec();
        let two_t = T::lit(2.0) * t;
        Ok(vec![d[0] / two_t, d[1] / two_t, T::zero(), T::zero()])
    }

    /// Central finite difference of the detected displacement in `T`.
    pub fn displacement_derivative_fd(&self, t: T) -> Vec<T> {
        let h = fd_step::<T>() * t.max(T::lit(0.01));
        let detect = AffineMap::probe_loss(self.budget.eta_p);
        let d_at = |tt: T| {
            // unvalidated map so that T + h may exceed 1
            let sys = AffineMap::probe_loss(tt).then(&detect);
            sys.transfer.mul_vec(self.at_system.displacement())
        };
        let plus = d_at(t + h);
        let minus = d_at(t - h);
        plus.iter().zip(&minus).map(|(&a, &b)| (a - b) / (T::lit(2.0) * h)).collect()
    }

    /// Bright-limit quantum Fisher information `∂dᵀ σ⁻¹ ∂d` for the chain's
    /// own photon number, after checking the analytic derivative against
    /// the finite difference.
    pub fn fisher_information(&self, t: T) -> Result<T> {
        let analytic = self.displacement_derivative(t)?;
        let numeric = self.displacement_derivative_fd(t);
        let scale = analytic.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = fd_tol::<T>();
        for (&a, &n) in analytic.iter().zip(&numeric) {
            if rel_diff(a, n, scale) > tol {
                return Err(Error::DerivativeMismatch { analytic: a.as_f64(), numeric: n.as_f64() });
            }
        }
        let state = self.state_at(t)?;
        let inv = state.covariance().inverse()?;
        Ok(inv.bilinear(&analytic, &analytic))
    }

    /// Numeric Gaussian bound at `t`, rescaled to `n_r` probing photons.
    pub fn qcrb(&self, t: T, n_r: T) -> Result<BoundPoint<T>> {
        if !(t > T::zero() && t <= T::one()) {
            return Err(invalid(format!("system transmission T = {t} must lie in (0, 1]")));
        }
        if !(n_r > T::zero()) {
            return Err(invalid("n_r must be > 0"));
        }
        let var_n = self.photons_at_system() / self.fisher_information(t)?;
        Ok(BoundPoint { t, variance: var_n / n_r, n_r, kind: BoundKind::NumericGaussian })
    }
}

fn fd_step<T: Real>() -> T {
    T::lit(FD_STEP).max(T::epsilon().cbrt() * T::lit(0.1))
}

fn fd_tol<T: Real>() -> T {
    T::lit(FD_TOL).max(T::epsilon().sqrt() * T::lit(10.0))
}
