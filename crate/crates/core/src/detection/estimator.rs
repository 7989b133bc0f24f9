//! Optimized intensity-difference estimator `n_p − g·n_c`.

use crate::chain::ProbeChain;
use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;
use crate::scalar::Real;

fn conjugate_is_dark<T: Real>(state: &GaussianState<T>) -> Result<bool> {
    let [x, p] = state.mode_displacement(1)?;
    Ok(x == T::zero() && p == T::zero())
}

/// `Var(n_p − g·n_c)` in the bright limit. A dark conjugate contributes
/// nothing at this order.
pub fn estimator_variance<T: Real>(state: &GaussianState<T>, g: T) -> Result<T> {
    let var_p = state.number_variance_bright(0)?;
    if conjugate_is_dark(state)? {
        return Ok(var_p);
    }
    let var_c = state.number_variance_bright(1)?;
    let cov = state.number_covariance_bright(0, 1)?;
    Ok(var_p + g * g * var_c - T::lit(2.0) * g * cov)
}

/// `g* = Cov(n_p, n_c) / Var(n_c)`.
pub fn optimal_gain<T: Real>(state: &GaussianState<T>) -> Result<T> {
    let var_c = state.number_variance_bright(1)?;
    if !(var_c > T::zero()) {
        return Err(invalid("conjugate number variance is zero; optimal gain undefined"));
    }
    Ok(state.number_covariance_bright(0, 1)? / var_c)
}

/// Optimal gain, or 0 when the conjugate is dark (plain intensity measurement).
pub fn optimal_gain_or_zero<T: Real>(state: &GaussianState<T>) -> Result<T> {
    if conjugate_is_dark(state)? {
        Ok(T::zero())
    } else {
        optimal_gain(state)
    }
}

/// `Var(T_est)` for gain `g`, rescaled to `n_r` photons probing the system.
pub fn transmission_variance<T: Real>(chain: &ProbeChain<T>, t: T, g: T, n_r: T) -> Result<T> {
    if !(n_r > T::zero()) {
        return Err(invalid("n_r must be > 0"));
    }
    if !(g >= T::zero()) {
        return Err(invalid(format!("estimator gain g = {g} must be >= 0")));
    }
    let state = chain.state_at(t)?;
    let n_sys = chain.photons_at_system();
    let slope = chain.budget().eta_p * n_sys;
    if !(slope > T::zero()) {
        return Err(Error::NonPhysical("estimator mean does not depend on T".into()));
    }
    let var = estimator_variance(&state, g)?;
    Ok(var / (slope * slope) * n_sys / n_r)
}

/// `(g*, Var(T_est))` at the optimal gain.
pub fn optimized_transmission_variance<T: Real>(chain: &ProbeChain<T>, t: T, n_r: T) -> Result<(T, T)> {
    let g = optimal_gain_or_zero(&chain.state_at(t)?)?;
    Ok((g, transmission_variance(chain, t, g, n_r)?))
}
