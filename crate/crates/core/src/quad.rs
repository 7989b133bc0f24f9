//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// `∫_a^b f` to absolute accuracy `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::NoConvergence("non-finite integrand".into()));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NoConvergence(format!("quadrature on [{a}, {b}] exceeded depth {MAX_DEPTH}")));
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// `∫_0^∞ f` via `x = scale · tan θ`; `f` must decay at infinity.
pub fn integrate_half_line(f: &impl Fn(f64) -> f64, scale: f64, rel_tol: f64) -> Result<f64> {
    let mapped = |theta: f64| {
        let c = theta.cos();
        if c <= 1e-300 {
            return 0.0;
        }
        let x = scale * theta.tan();
        let v = f(x) * scale / (c * c);
        if v.is_finite() { v } else { 0.0 }
    };
    let upper = std::f64::consts::FRAC_PI_2;
    // coarse pass sets the absolute target
    let rough = adaptive_simpson(&mapped, 0.0, upper, 1e-3 * scale)?;
    adaptive_simpson(&mapped, 0.0, upper, rel_tol * rough.abs().max(f64::MIN_POSITIVE))
}
