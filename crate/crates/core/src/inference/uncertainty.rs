//! Parameter uncertainties from the `χ² = χ²_min + χ²_min/dof` contour.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Rays cast from the optimum.
pub const DEFAULT_DIRECTIONS: usize = 256;

/// Below this `χ²_min/dof`, the contour falls back to `Δχ² = 1`.
pub const DELTA_CHI2_FLOOR: f64 = 1e-9;

const BISECTIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    /// Half-width of the contour region along each parameter.
    pub sigma: Vec<f64>,
    /// The contour was found on only one side along this parameter.
    pub one_sided: Vec<bool>,
    /// `Δχ²` that defines the contour.
    pub delta_chi2: f64,
    /// Rays that left the bounds before crossing the contour.
    pub unbracketed_rays: usize,
}

/// Casts `directions` rays from `optimum` (in coordinates scaled by the
/// bound widths) and bisects each for `χ² = χ²_min + Δχ²` with
/// `Δχ² = χ²_min/dof`. For a fit with `χ²_min ≈ 0` the standard `Δχ² = 1`
/// is used instead.
pub fn uncertainty_by_chi2_doubling<F>(
    objective: F,
    optimum: &[f64],
    chi2_min: f64,
    dof: usize,
    bounds: &[(f64, f64)],
    directions: usize,
) -> Result<Uncertainty>
where
    F: Fn(&[f64]) -> f64,
{
    if dof < 1 {
        return Err(invalid("dof must be >= 1"));
    }
    if optimum.len() != bounds.len() || optimum.is_empty() {
        return Err(invalid("optimum and bounds must have the same nonzero length"));
    }
    if optimum.len() > 2 {
        return Err(invalid("the radial contour search supports one or two parameters"));
    }
    if !(chi2_min >= 0.0) || !chi2_min.is_finite() {
        return Err(invalid(format!("chi2_min = {chi2_min} must be finite and >= 0")));
    }
    let mut delta = chi2_min / dof as f64;
    if delta < DELTA_CHI2_FLOOR {
        log::warn!("chi2_min = {chi2_min:e} is essentially zero; using delta chi2 = 1");
        delta = 1.0;
    }
    let threshold = chi2_min + delta;
    let dim = optimum.len();
    // ray indices along +axis and −axis for each parameter
    let (rays, axes): (Vec<Vec<f64>>, Vec<[usize; 2]>) = if dim == 1 {
        (vec![vec![1.0], vec![-1.0]], vec![[0, 1]])
    } else {
        let n = directions.max(4).div_ceil(4) * 4;
        let rays = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        (rays, vec![[0, n / 2], [n / 4, 3 * n / 4]])
    };
    let widths: Vec<f64> = bounds.iter().map(|(lo, hi)| hi - lo).collect();
    let mut plus = vec![None::<f64>; dim];
    let mut minus = vec![None::<f64>; dim];
    let mut bracketed = vec![false; rays.len()];
    for (ray, hit) in rays.iter().zip(bracketed.iter_mut()) {
        // largest step that keeps the point inside the bounds
        let mut r_max = f64::INFINITY;
        for d in 0..dim {
            let step = ray[d] * widths[d];
            if step > 0.0 {
                r_max = r_max.min((bounds[d].1 - optimum[d]) / step);
            } else if step < 0.0 {
                r_max = r_max.min((bounds[d].0 - optimum[d]) / step);
            }
        }
        let at = |r: f64| -> Vec<f64> { (0..dim).map(|d| optimum[d] + r * ray[d] * widths[d]).collect() };
        let above = |r: f64| {
            let v = objective(&at(r));
            !v.is_finite() || v >= threshold
        };
        if !(r_max > 0.0) || !above(r_max) {
            continue;
        }
        *hit = true;
        let (mut lo, mut hi) = (0.0, r_max);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if above(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let point = at(0.5 * (lo + hi));
        for d in 0..dim {
            let delta = point[d] - optimum[d];
            let (slot, mag) = if delta >= 0.0 { (&mut plus[d], delta) } else { (&mut minus[d], -delta) };
            *slot = Some(slot.map_or(mag, |m: f64| m.max(mag)));
        }
    }
    let unbracketed = bracketed.iter().filter(|b| !**b).count();
    if unbracketed > 0 {
        log::warn!("{unbracketed} of {} contour rays not bracketed within bounds", rays.len());
    }
    let mut sigma = Vec::with_capacity(dim);
    let mut one_sided = Vec::with_capacity(dim);
    for d in 0..dim {
        let s = match (plus[d], minus[d]) {
            (Some(p), Some(m)) if bracketed[axes[d][0]] && bracketed[axes[d][1]] => 0.5 * (p + m),
            (Some(p), Some(m)) => p.max(m),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => widths[d],
        };
        sigma.push(s);
        one_sided.push(!(bracketed[axes[d][0]] && bracketed[axes[d][1]]));
    }
    Ok(Uncertainty { sigma, one_sided, delta_chi2: delta, unbracketed_rays: unbracketed })
}
