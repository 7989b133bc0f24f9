//! Resolution-bandwidth filter models and the effective measurement time
//! `t = |H(0)|² / (2 ∫|H(f)|² df)`.

use crate::error::{invalid, Error, Result};
use crate::quad::integrate_half_line;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

const QUAD_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FilterKind {
    /// `|H(f)|² = exp(−4 ln2 f² / RBW²)`.
    Gaussian,
    /// `poles` identical real poles: `|H(f)|² = (1 + (f/f₁)²)^(−poles)`.
    SyncTuned { poles: u32 },
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::Gaussian => write!(f, "gaussian"),
            FilterKind::SyncTuned { poles } => write!(f, "sync{poles}"),
        }
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "gaussian" {
            return Ok(FilterKind::Gaussian);
        }
        let poles = s
            .strip_prefix("sync")
            .and_then(|p| p.trim_start_matches(['-', '_']).parse::<u32>().ok())
            .ok_or_else(|| invalid(format!("unknown filter kind '{s}' (expected 'gaussian' or 'sync<n>')")))?;
        if poles == 0 {
            return Err(invalid("a synchronously tuned filter needs at least one pole"));
        }
        Ok(FilterKind::SyncTuned { poles })
    }
}

impl TryFrom<String> for FilterKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FilterKind> for String {
    fn from(k: FilterKind) -> String {
        k.to_string()
    }
}

/// Spectrum-analyzer RBW filter. `rbw` (Hz) is the FWHM of `|H(f)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterModel {
    pub kind: FilterKind,
    pub rbw: f64,
}

impl FilterModel {
    pub fn new(kind: FilterKind, rbw: f64) -> Result<Self> {
        let m = Self { kind, rbw };
        m.validate()?;
        Ok(m)
    }

    pub fn gaussian(rbw: f64) -> Result<Self> {
        Self::new(FilterKind::Gaussian, rbw)
    }

    pub fn sync_tuned(poles: u32, rbw: f64) -> Result<Self> {
        Self::new(FilterKind::SyncTuned { poles }, rbw)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rbw > 0.0) || !self.rbw.is_finite() {
            return Err(invalid(format!("RBW {} must be finite and > 0", self.rbw)));
        }
        if let FilterKind::SyncTuned { poles: 0 } = self.kind {
            return Err(invalid("a synchronously tuned filter needs at least one pole"));
        }
        Ok(())
    }

    /// Pole frequency `f₁` placing the half-power points at `±RBW/2`.
    pub fn pole_frequency(&self) -> Option<f64> {
        match self.kind {
            FilterKind::Gaussian => None,
            FilterKind::SyncTuned { poles } => {
                Some(0.5 * self.rbw / (2f64.powf(1.0 / poles as f64) - 1.0).sqrt())
            }
        }
    }

    /// `|H(f)|² / |H(0)|²`.
    pub fn power_response(&self, f: f64) -> f64 {
        match self.kind {
            FilterKind::Gaussian => (-4.0 * std::f64::consts::LN_2 * f * f / (self.rbw * self.rbw)).exp(),
            FilterKind::SyncTuned { poles } => {
                let x = f / self.pole_frequency().unwrap();
                (1.0 + x * x).powi(-(poles as i32))
            }
        }
    }

    /// `∫_{−∞}^{∞} |H(f)|² df` with `|H(0)| = 1`, by quadrature.
    pub fn noise_bandwidth(&self) -> Result<f64> {
        self.validate()?;
        let half = integrate_half_line(&|f| self.power_response(f), self.rbw, QUAD_REL_TOL)?;
        Ok(2.0 * half)
    }

    /// Effective measurement time. Closed form `√(ln2/π)/RBW` for the
    /// Gaussian filter, quadrature otherwise.
    pub fn effective_time(&self) -> Result<f64> {
        self.validate()?;
        match self.kind {
            FilterKind::Gaussian => Ok((std::f64::consts::LN_2 / std::f64::consts::PI).sqrt() / self.rbw),
            FilterKind::SyncTuned { .. } => self.effective_time_quadrature(),
        }
    }

    /// Effective measurement time by quadrature for any kind.
    pub fn effective_time_quadrature(&self) -> Result<f64> {
        Ok(1.0 / (2.0 * self.noise_bandwidth()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kinds() {
        assert_eq!("gaussian".parse::<FilterKind>().unwrap(), FilterKind::Gaussian);
        assert_eq!("sync4".parse::<FilterKind>().unwrap(), FilterKind::SyncTuned { poles: 4 });
        assert_eq!("Sync-2".parse::<FilterKind>().unwrap(), FilterKind::SyncTuned { poles: 2 });
        assert!("sync0".parse::<FilterKind>().is_err());
        assert!("boxcar".parse::<FilterKind>().is_err());
        assert_eq!(FilterKind::SyncTuned { poles: 4 }.to_string(), "sync4");
    }

    #[test]
    fn half_power_at_half_rbw() {
        for f in [FilterModel::gaussian(51e3).unwrap(), FilterModel::sync_tuned(4, 51e3).unwrap()] {
            assert!((f.power_response(25.5e3) - 0.5).abs() < 1e-12, "{:?}", f.kind);
            assert_eq!(f.power_response(0.0), 1.0);
        }
    }

    #[test]
    fn invalid_filters() {
        assert!(FilterModel::gaussian(0.0).is_err());
        assert!(FilterModel::gaussian(f64::NAN).is_err());
        assert!(FilterModel::sync_tuned(0, 1e3).is_err());
    }

    #[test]
    fn gaussian_closed_form_vs_quadrature() {
        let f = FilterModel::gaussian(51e3).unwrap();
        let closed = f.effective_time().unwrap();
        let quad = f.effective_time_quadrature().unwrap();
        assert!(((closed - quad) / closed).abs() < 1e-6);
        assert!((closed * 51e3 - 0.4697).abs() < 1e-4);
    }

    #[test]
    fn sync_tuned_matches_beta_function_oracle() {
        // ∫(1+x²)^-n dx over the real line = √π Γ(n−½)/Γ(n)
        for n in 1..=6u32 {
            let f = FilterModel::sync_tuned(n, 1e4).unwrap();
            let mut ratio = std::f64::consts::PI; // √π Γ(½)/Γ(1)
            for k in 1..n {
                ratio *= (k as f64 - 0.5) / k as f64;
            }
            let expect = f.pole_frequency().unwrap() * ratio;
            let got = f.noise_bandwidth().unwrap();
            assert!(((got - expect) / expect).abs() < 1e-9, "n = {n}: {got} vs {expect}");
        }
    }
}
