//! Photon accounting from a DC detector voltage.

use crate::error::{invalid, Result};

/// Planck constant (J·s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light (m/s), exact SI value.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `⟨n⟩ = (λ / hc) · (t / m) · V_dc` for responsivity `m` in V/W.
pub fn photons_from_voltage(v_dc: f64, m: f64, lambda: f64, t: f64) -> Result<f64> {
    if m == 0.0 {
        return Err(invalid("detector responsivity m must be non-zero"));
    }
    for (name, v) in [("V_dc", v_dc), ("m", m), ("lambda", lambda), ("t", t)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} = {v} must be finite and >= 0")));
        }
    }
    Ok(lambda / (PLANCK * SPEED_OF_LIGHT) * (t / m) * v_dc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighty_microwatts() {
        // P = V/m with m = 1 V/W
        let n = photons_from_voltage(80e-6, 1.0, 795e-9, 8.63e-6).unwrap();
        let flux = 80e-6 * 795e-9 / (PLANCK * SPEED_OF_LIGHT);
        assert!((n - flux * 8.63e-6).abs() / n < 1e-12);
        assert!((n / 2.8e9 - 1.0).abs() < 0.05, "{n}");
    }

    #[test]
    fn linear_and_zero_time() {
        let a = photons_from_voltage(0.3, 2e3, 795e-9, 1e-6).unwrap();
        let b = photons_from_voltage(0.6, 2e3, 795e-9, 1e-6).unwrap();
        assert!((b - 2.0 * a).abs() <= 1e-12 * b);
        assert_eq!(photons_from_voltage(0.3, 2e3, 795e-9, 0.0).unwrap(), 0.0);
        assert!(photons_from_voltage(0.3, 0.0, 795e-9, 1e-6).is_err());
        assert!(photons_from_voltage(-0.3, 1.0, 795e-9, 1e-6).is_err());
    }
}
