//! Quantum Cramér-Rao bounds for transmission estimation.
//!
//! Every bound is reported both as `Var(T)` for a given probe photon number
//! `n_r` (counted at the system input) and as the photon-number independent
//! product `var_n = Var(T) · n_r`.

use crate::chain::ProbeChain;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::source::{xi, SourceParams};
use serde::{Deserialize, Serialize};

/// Transmissions outside the system under study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBudget<T> {
    /// Probe transmission between source and system.
    pub t_p: T,
    /// Probe transmission after the system, detection included.
    pub eta_p: T,
    /// Conjugate transmission, detection included.
    pub eta_c: T,
}

impl<T: Real> LossBudget<T> {
    pub fn new(t_p: T, eta_p: T, eta_c: T) -> Result<Self> {
        let b = Self { t_p, eta_p, eta_c };
        b.validate()?;
        Ok(b)
    }

    pub fn lossless() -> Self {
        Self { t_p: T::one(), eta_p: T::one(), eta_c: T::one() }
    }

    /// Calibrated losses of the reference experiment.
    pub fn experimental() -> Self {
        Self { t_p: T::lit(0.973), eta_p: T::lit(0.945), eta_c: T::lit(0.919) }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("T_p", self.t_p), ("eta_p", self.eta_p), ("eta_c", self.eta_c)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(invalid(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

impl<T: Real> SourceParams<T> {
    /// Fitted source of the reference experiment (s = 2.04, T_a = 0.71).
    pub fn experimental() -> Self {
        Self::new(T::lit(2.04), T::lit(0.71))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    PureBtmss,
    DistributedBtmss,
    Coherent,
    UltimateIdeal,
    UltimateLossy,
    NumericGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint<T> {
    pub t: T,
    /// Lower bound on `Var(T)` for `n_r` probing photons.
    pub variance: T,
    pub n_r: T,
    pub kind: BoundKind,
}

impl<T: Real> BoundPoint<T> {
    fn from_var_n(t: T, var_n: T, n_r: T, kind: BoundKind) -> Self {
        Self { t, variance: var_n / n_r, n_r, kind }
    }

    /// `Var(T) · n_r`.
    pub fn var_n(&self) -> T {
        self.variance * self.n_r
    }
}

fn check_point<T: Real>(t: T, n_r: T) -> Result<()> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(invalid(format!("system transmission T = {t} outside [0, 1]")));
    }
    if !(n_r > T::zero()) || !n_r.is_finite() {
        return Err(invalid(format!("probe photon number n_r = {n_r} must be finite and > 0")));
    }
    Ok(())
}

fn check_unit<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v >= T::zero() && v <= T::one()) {
        return Err(invalid(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn coherent_term<T: Real>(t: T, eta_p: T) -> Result<T> {
    if !(eta_p > T::zero() && eta_p <= T::one()) {
        return Err(invalid(format!("eta_p = {eta_p} must lie in (0, 1]")));
    }
    Ok(t / eta_p)
}

/// `H_c = (2η_c − 1)(1 + 2 sinh² s) / (1 + 2 η_c sinh² s)`.
pub fn h_c<T: Real>(eta_c: T, s: T) -> Result<T> {
    check_unit("eta_c", eta_c)?;
    if !(s >= T::zero()) {
        return Err(invalid("s must be >= 0"));
    }
    let two = T::lit(2.0);
    let sh2 = s.sinh().powi(2);
    Ok((two * eta_c - T::one()) * (T::one() + two * sh2) / (T::one() + two * eta_c * sh2))
}

/// Bound for a pure bright two-mode squeezed state followed by losses.
pub fn qcrb_pure_btmss<T: Real>(t: T, n_r: T, s: T, budget: &LossBudget<T>) -> Result<BoundPoint<T>> {
    check_point(t, n_r)?;
    budget.validate()?;
    let correlations = budget.t_p * h_c(budget.eta_c, s)? * (T::one() - (T::lit(2.0) * s).cosh().recip());
    let var_n = coherent_term(t, budget.eta_p)? - t * t * correlations;
    Ok(BoundPoint::from_var_n(t, var_n, n_r, BoundKind::PureBtmss))
}

/// `Γ = √T_a {cosh(ξ/2)[ξ² + ln² T_a] − ln T_a [ln T_a + 2ξ sinh(ξ/2)]}`.
pub fn big_gamma<T: Real>(s: T, t_a: T) -> Result<T> {
    let x = xi(s, t_a)?;
    let l = t_a.ln();
    let two = T::lit(2.0);
    Ok(t_a.sqrt() * ((x / two).cosh() * (x * x + l * l) - l * (l + two * x * (x / two).sinh())))
}

/// Role of `H_c` for the distributed-loss source.
///
/// Evaluated in the rearranged form
/// `(2η_c − 1)[ξ²(√T_a − 1) + Γ] / [ξ²(1 + η_c(√T_a − 2)) + η_c Γ]`,
/// which is the printed expression with the `1/η_c` prefactor cancelled and
/// therefore stays finite at `η_c = 0`.
pub fn h_c_prime<T: Real>(eta_c: T, s: T, t_a: T) -> Result<T> {
    check_unit("eta_c", eta_c)?;
    let x = xi(s, t_a)?;
    if x == T::zero() {
        return h_c(eta_c, s);
    }
    let g = big_gamma(s, t_a)?;
    let x2 = x * x;
    let rt = t_a.sqrt();
    let num = (T::lit(2.0) * eta_c - T::one()) * (x2 * (rt - T::one()) + g);
    let den = x2 * (T::one() + eta_c * (rt - T::lit(2.0))) + eta_c * g;
    if !(den > T::zero()) {
        return Err(Error::NonPhysical(format!("H'_c denominator {den} <= 0")));
    }
    Ok(num / den)
}

/// `32 s² √T_a sinh²(ξ/4) / (ξ²(√T_a − 1) + Γ)`, the distributed-loss
/// counterpart of `1 − sech(2s)`.
pub fn distributed_squeezing_factor<T: Real>(s: T, t_a: T) -> Result<T> {
    let x = xi(s, t_a)?;
    if s == T::zero() {
        return Ok(T::zero());
    }
    let rt = t_a.sqrt();
    let den = x * x * (rt - T::one()) + big_gamma(s, t_a)?;
    if !(den > T::zero()) || !den.is_finite() {
        return Err(Error::NonPhysical(format!("squeezing-factor denominator {den}")));
    }
    Ok(T::lit(32.0) * s * s * rt * (x / T::lit(4.0)).sinh().powi(2) / den)
}

/// Bound for the source with distributed internal probe loss.
pub fn qcrb_distributed<T: Real>(
    t: T,
    n_r: T,
    params: &SourceParams<T>,
    budget: &LossBudget<T>,
) -> Result<BoundPoint<T>> {
    check_point(t, n_r)?;
    budget.validate()?;
    let factor = distributed_squeezing_factor(params.s, params.t_a)?;
    let hp = h_c_prime(budget.eta_c, params.s, params.t_a)?;
    let var_n = coherent_term(t, budget.eta_p)? - t * t * budget.t_p * hp * factor;
    if !var_n.is_finite() {
        return Err(Error::NonPhysical("bound is not finite".into()));
    }
    Ok(BoundPoint::from_var_n(t, var_n, n_r, BoundKind::DistributedBtmss))
}

/// Coherent-state bound `T / (η_p n_r)`.
pub fn qcrb_coherent<T: Real>(t: T, n_r: T, eta_p: T) -> Result<BoundPoint<T>> {
    check_point(t, n_r)?;
    Ok(BoundPoint::from_var_n(t, coherent_term(t, eta_p)?, n_r, BoundKind::Coherent))
}

/// Ultimate bound `T/(η_p n_r) − T² T_p / n_r`; `lossless` sets `T_p = η_p = 1`.
pub fn qcrb_ultimate<T: Real>(t: T, n_r: T, budget: &LossBudget<T>, lossless: bool) -> Result<BoundPoint<T>> {
    check_point(t, n_r)?;
    budget.validate()?;
    let (t_p, eta_p, kind) = if lossless {
        (T::one(), T::one(), BoundKind::UltimateIdeal)
    } else {
        (budget.t_p, budget.eta_p, BoundKind::UltimateLossy)
    };
    let var_n = coherent_term(t, eta_p)? - t * t * t_p;
    Ok(BoundPoint::from_var_n(t, var_n, n_r, kind))
}

/// Bright-limit Gaussian bound evaluated from the full source and loss chain.
///
/// Builds a [`ProbeChain`] on every call; use [`ProbeChain::qcrb`] directly
/// when sweeping `T`.
pub fn qcrb_numeric_gaussian<T: Real>(
    t: T,
    params: &SourceParams<T>,
    budget: &LossBudget<T>,
    n_r: T,
) -> Result<BoundPoint<T>> {
    ProbeChain::new(params, budget)?.qcrb(t, n_r)
}

/// Coherent bound over distributed-loss bound at the same `T` and `η_p`.
pub fn advantage_ratio<T: Real>(t: T, params: &SourceParams<T>, budget: &LossBudget<T>) -> Result<T> {
    let coh = qcrb_coherent(t, T::one(), budget.eta_p)?;
    let btmss = qcrb_distributed(t, T::one(), params, budget)?;
    Ok(coh.variance / btmss.variance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn printed_h_c_prime(eta_c: f64, s: f64, t_a: f64) -> f64 {
        let x = xi(s, t_a).unwrap();
        let g = big_gamma(s, t_a).unwrap();
        (2.0 * eta_c - 1.0) / eta_c
            * (1.0 + x * x * (eta_c - 1.0) / (x * x * (1.0 + eta_c * (t_a.sqrt() - 2.0)) + eta_c * g))
    }

    #[test]
    fn h_c_cases() {
        assert_relative_eq!(h_c(1.0, 1.7).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(h_c(0.5, 1.7).unwrap(), 0.0);
        assert!(h_c(1.2, 1.0).is_err());
    }

    #[test]
    fn xi_and_gamma_at_unit_transmission() {
        let s = 1.3f64;
        assert_relative_eq!(xi(s, 1.0).unwrap(), 4.0 * s, max_relative = 1e-15);
        assert_relative_eq!(big_gamma(s, 1.0).unwrap(), 16.0 * s * s * (2.0 * s).cosh(), max_relative = 1e-14);
    }

    #[test]
    fn rearranged_h_c_prime_matches_printed_form() {
        for &(e, s, t) in &[(0.919, 2.04, 0.71), (0.3, 0.4, 0.55), (0.77, 2.9, 0.98), (1.0, 1.0, 0.6)] {
            assert_relative_eq!(h_c_prime(e, s, t).unwrap(), printed_h_c_prime(e, s, t), max_relative = 1e-12);
        }
        assert_eq!(h_c_prime(0.5, 1.1, 0.8).unwrap(), 0.0);
        assert!(h_c_prime(0.0f64, 1.1, 0.8).unwrap().is_finite());
        assert!(h_c_prime(0.8, 1.0, 0.7).unwrap() < 1.0);
        assert!(h_c_prime(0.4, 1.0, 0.7).unwrap() < 0.0);
    }

    #[test]
    fn h_c_prime_reduces_to_h_c() {
        assert_relative_eq!(h_c_prime(0.919, 2.04, 1.0).unwrap(), h_c(0.919, 2.04).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn coherent_values() {
        assert_relative_eq!(qcrb_coherent(0.84, 1.0, 0.945).unwrap().variance, 0.84 / 0.945);
        assert!((qcrb_coherent(0.84f64, 1.0, 0.945).unwrap().variance - 0.8889).abs() < 1e-4);
        assert_eq!(qcrb_coherent(0.0, 1.0, 0.9).unwrap().variance, 0.0);
        assert_eq!(qcrb_coherent(1.0, 1.0, 1.0).unwrap().variance, 1.0);
        assert!(qcrb_coherent(0.5, 0.0, 1.0).is_err());
        assert!(qcrb_coherent(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn ultimate_values() {
        let b = LossBudget::<f64>::experimental();
        assert_eq!(qcrb_ultimate(1.0, 1.0, &b, true).unwrap().variance, 0.0);
        let lossy = qcrb_ultimate(0.84, 1.0, &b, false).unwrap();
        let expect = 0.84 / 0.945 - 0.84 * 0.84 * 0.973;
        assert_relative_eq!(lossy.variance, expect, max_relative = 1e-15);
        assert!((lossy.variance - 0.2023).abs() < 1e-4);
    }

    #[test]
    fn pure_btmss_limits() {
        let b = LossBudget::<f64>::experimental();
        let coh = qcrb_coherent(0.6, 1.0, b.eta_p).unwrap().variance;
        assert_eq!(qcrb_pure_btmss(0.6, 1.0, 0.0, &b).unwrap().variance, coh);
        let half = LossBudget { eta_c: 0.5, ..b };
        assert_eq!(qcrb_pure_btmss(0.6, 1.0, 2.3, &half).unwrap().variance, coh);
        let ideal = qcrb_pure_btmss(1.0f64, 1.0, 20.0, &LossBudget::lossless()).unwrap();
        assert!(ideal.variance.abs() < 1e-15);
    }

    #[test]
    fn distributed_reduces_and_is_coherent_at_zero_squeezing() {
        let b = LossBudget::<f64>::experimental();
        let d = qcrb_distributed(0.6, 1.0, &SourceParams::new(1.7, 1.0), &b).unwrap();
        let p = qcrb_pure_btmss(0.6, 1.0, 1.7, &b).unwrap();
        assert_relative_eq!(d.variance, p.variance, max_relative = 1e-12);
        let z = qcrb_distributed(0.6, 1.0, &SourceParams::new(0.0, 0.7), &b).unwrap();
        assert_eq!(z.variance, qcrb_coherent(0.6, 1.0, b.eta_p).unwrap().variance);
    }

    #[test]
    fn n_r_scaling() {
        let b = LossBudget::<f64>::experimental();
        let params = SourceParams::experimental();
        let a = qcrb_distributed(0.5, 1e9, &params, &b).unwrap();
        let c = qcrb_distributed(0.5, 2e9, &params, &b).unwrap();
        assert_relative_eq!(a.variance, 2.0 * c.variance, max_relative = 1e-15);
        assert_relative_eq!(a.var_n(), c.var_n(), max_relative = 1e-15);
    }

    #[test]
    fn advantage_limits() {
        let b = LossBudget::<f64>::experimental();
        assert_relative_eq!(advantage_ratio(0.5, &SourceParams::new(0.0, 0.8), &b).unwrap(), 1.0);
        let small = advantage_ratio(1e-4f64, &SourceParams::experimental(), &b).unwrap();
        assert!((small - 1.0).abs() < 1e-3);
    }
}
