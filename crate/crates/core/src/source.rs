//! Four-wave-mixing source with distributed probe loss.
//!
//! The medium is a stack of infinitesimal two-mode squeezers alternating
//! with probe-only beam splitters. Mode 0 is the probe, mode 1 the
//! conjugate; the conjugate sees no loss. Three evaluations of the stack are
//! provided:
//!
//! * [`layered_source`]: a finite number of literal `[squeezer; loss]` layers.
//! * [`converged_source`]: N-doubling of symmetrically split layers until the
//!   state stops changing.
//! * [`continuum_source`]: the exact infinite-layer limit, solved in closed
//!   form from the (symmetric) generator of each quadrature block.

use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::Matrix;
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Default seed photon number for dimensionless studies.
pub const DEFAULT_SEED_PHOTONS: f64 = 1e6;

/// Layer cap for [`converged_source`].
pub const MAX_LAYERS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams<T> {
    /// Total squeezing parameter (sum over layers).
    pub s: T,
    /// Internal probe transmission (product over layers), in `(0, 1]`.
    pub t_a: T,
    /// Mean photon number of the coherent probe seed.
    pub seed_photons: T,
}

impl<T: Real> SourceParams<T> {
    pub fn new(s: T, t_a: T) -> Self {
        Self { s, t_a, seed_photons: T::lit(DEFAULT_SEED_PHOTONS) }
    }

    pub fn with_seed_photons(mut self, n: T) -> Self {
        self.seed_photons = n;
        self
    }

    /// Seed photons from a photon flux integrated over `time`.
    pub fn with_seed_flux(self, flux: T, time: T) -> Self {
        self.with_seed_photons(flux * time)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= T::zero()) || !self.s.is_finite() {
            return Err(invalid(format!("squeezing parameter s = {} must be finite and >= 0", self.s)));
        }
        if !(self.t_a > T::zero() && self.t_a <= T::one()) {
            return Err(invalid(format!("internal transmission T_a = {} must lie in (0, 1]", self.t_a)));
        }
        if !(self.seed_photons >= T::zero()) || !self.seed_photons.is_finite() {
            return Err(invalid("seed photon number must be finite and >= 0"));
        }
        Ok(())
    }

    fn seed_state(&self) -> GaussianState<T> {
        let alpha = self.seed_photons.sqrt();
        GaussianState::coherent(&[Complex::new(alpha, T::zero()), Complex::new(T::zero(), T::zero())])
            .expect("two modes")
    }
}

/// Gaussian channel `d ← X d`, `σ ← X σ Xᵀ + Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<T> {
    pub transfer: Matrix<T>,
    pub added_noise: Matrix<T>,
}

impl<T: Real> AffineMap<T> {
    pub fn identity(dim: usize) -> Self {
        Self { transfer: Matrix::identity(dim), added_noise: Matrix::zeros(dim, dim) }
    }

    /// Two-mode squeezer on (probe, conjugate).
    pub fn squeezer(r: T) -> Self {
        let s = crate::gaussian::SymplecticOp::two_mode_squeezer(r);
        Self { transfer: s.matrix, added_noise: Matrix::zeros(4, 4) }
    }

    /// Beam splitter with transmission `t` on the probe only.
    pub fn probe_loss(t: T) -> Self {
        let g = t.sqrt();
        let one = T::one();
        let z = T::zero();
        Self {
            transfer: Matrix::from_diag(&[g, g, one, one]),
            added_noise: Matrix::from_diag(&[one - t, one - t, z, z]),
        }
    }

    /// Map "apply `self`, then `next`".
    pub fn then(&self, next: &Self) -> Self {
        Self {
            transfer: &next.transfer * &self.transfer,
            added_noise: &next.transfer.congruence(&self.added_noise) + &next.added_noise,
        }
    }

    /// `self` applied `n` times, by binary exponentiation.
    pub fn repeat(&self, mut n: usize) -> Self {
        let mut acc = Self::identity(self.transfer.rows());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.then(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.then(&base);
            }
        }
        acc
    }

    pub fn apply(&self, state: &GaussianState<T>) -> GaussianState<T> {
        let d = self.transfer.mul_vec(state.displacement());
        let sigma = &self.transfer.congruence(state.covariance()) + &self.added_noise;
        GaussianState::from_parts(d, sigma.symmetrized())
    }
}

/// How each infinitesimal layer is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerOrdering {
    /// Squeezer followed by the full layer loss. First-order accurate in `1/N`.
    SqueezeThenLoss,
    /// Half loss, squeezer, half loss. Second-order accurate in `1/N`.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceOutput<T> {
    /// Output state (probe, conjugate) for the coherent probe seed.
    pub state: GaussianState<T>,
    /// Total linear map of the medium; symplectic only when `T_a = 1`.
    pub transfer: Matrix<T>,
    /// Noise injected by the distributed loss.
    pub added_noise: Matrix<T>,
    /// Number of layers; 0 for the continuum solution.
    pub layers_used: usize,
    /// `⟨n_p⟩_out / ⟨n_p⟩_in`.
    pub gain: T,
}

impl<T: Real> SourceOutput<T> {
    fn from_map(params: &SourceParams<T>, map: AffineMap<T>, layers_used: usize) -> Self {
        let state = map.apply(&params.seed_state());
        let gain = if params.seed_photons > T::zero() {
            state.mean_photon(0).expect("probe mode") / params.seed_photons
        } else {
            T::nan()
        };
        Self { state, transfer: map.transfer, added_noise: map.added_noise, layers_used, gain }
    }

    pub fn medium(&self) -> AffineMap<T> {
        AffineMap { transfer: self.transfer.clone(), added_noise: self.added_noise.clone() }
    }

    pub fn noises(&self) -> Result<NoiseTriple<T>> {
        NoiseTriple::from_state(&self.state)
    }
}

fn layer_map<T: Real>(params: &SourceParams<T>, layers: usize, ordering: LayerOrdering) -> AffineMap<T> {
    let n = T::lit(layers as f64);
    let sq = AffineMap::squeezer(params.s / n);
    let single = match ordering {
        LayerOrdering::SqueezeThenLoss => sq.then(&AffineMap::probe_loss(params.t_a.powf(T::one() / n))),
        LayerOrdering::Symmetric => {
            let half = AffineMap::probe_loss(params.t_a.powf(T::lit(0.5) / n));
            half.then(&sq).then(&half)
        }
    };
    single.repeat(layers)
}

/// `layers` literal repetitions of `[squeezer(s/N); probe loss(T_a^(1/N))]`.
pub fn layered_source<T: Real>(params: &SourceParams<T>, layers: usize) -> Result<SourceOutput<T>> {
    layered_source_with(params, layers, LayerOrdering::SqueezeThenLoss)
}

pub fn layered_source_with<T: Real>(
    params: &SourceParams<T>,
    layers: usize,
    ordering: LayerOrdering,
) -> Result<SourceOutput<T>> {
    params.validate()?;
    if layers == 0 {
        return Err(invalid("layer count must be >= 1"));
    }
    Ok(SourceOutput::from_map(params, layer_map(params, layers, ordering), layers))
}

fn relative_change<T: Real>(a: &SourceOutput<T>, b: &SourceOutput<T>) -> T {
    let tiny = T::min_positive_value();
    let sa = a.state.covariance();
    let sb = b.state.covariance();
    let dsig = sa.max_abs_diff(sb) / sa.max_abs().max(sb.max_abs()).max(tiny);
    let da = a.state.displacement();
    let db = b.state.displacement();
    let dmax = da.iter().chain(db).fold(T::zero(), |m, v| m.max(v.abs())).max(tiny);
    let ddisp = da.iter().zip(db).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())) / dmax;
    // the maps matter too when the seed is dark
    let dx = a.transfer.max_abs_diff(&b.transfer) / a.transfer.max_abs().max(tiny);
    dsig.max(ddisp).max(dx)
}

/// Doubles the layer count (symmetric split) until every covariance and
/// displacement entry moves by less than `rel_tol`, relative to the largest
/// entry. Returns the coarser of the two agreeing outputs.
pub fn converged_source<T: Real>(params: &SourceParams<T>, rel_tol: T) -> Result<SourceOutput<T>> {
    params.validate()?;
    if !(rel_tol > T::zero()) {
        return Err(invalid("rel_tol must be > 0"));
    }
    let mut layers = 1;
    let mut prev = SourceOutput::from_map(params, layer_map(params, 1, LayerOrdering::Symmetric), 1);
    while layers < MAX_LAYERS {
        let next_layers = layers * 2;
        let next =
            SourceOutput::from_map(params, layer_map(params, next_layers, LayerOrdering::Symmetric), next_layers);
        if relative_change(&prev, &next) < rel_tol {
            return Ok(prev);
        }
        prev = next;
        layers = next_layers;
    }
    Err(Error::NoConvergence(format!(
        "layered source did not reach rel_tol {rel_tol} within {MAX_LAYERS} layers"
    )))
}

/// Exact infinite-layer limit.
///
/// Along the medium the state obeys `dX/dz = A X` and
/// `dσ/dz = Aσ + σAᵀ + D` with `A = s K + (ln T_a / 2) P` and
/// `D = -ln T_a P` (`K` the squeezer generator, `P` the probe projector).
/// `A` is symmetric on each of the x- and p-blocks, so both the
/// exponential and the noise integral follow from a 2x2 eigendecomposition.
pub fn continuum_source<T: Real>(params: &SourceParams<T>) -> Result<SourceOutput<T>> {
    params.validate()?;
    let l = params.t_a.ln();
    let half_l = l / T::lit(2.0);
    let mut transfer = Matrix::zeros(4, 4);
    let mut noise = Matrix::zeros(4, 4);
    // x-block couples (x1, x2) with +s, p-block (p1, p2) with -s
    for (offset, k) in [(0usize, params.s), (1usize, -params.s)] {
        let (x, y) = block_solution(half_l, k, -l);
        for i in 0..2 {
            for j in 0..2 {
                transfer[(2 * i + offset, 2 * j + offset)] = x[i][j];
                noise[(2 * i + offset, 2 * j + offset)] = y[i][j];
            }
        }
    }
    Ok(SourceOutput::from_map(params, AffineMap { transfer, added_noise: noise }, 0))
}

/// Bright-limit noises of the continuum source without building the state.
///
/// A seed on the probe x-quadrature only populates the x-block, so the
/// noises follow from `exp(A_x)` and the x-block noise integral.
pub fn continuum_noises<T: Real>(s: T, t_a: T) -> Result<NoiseTriple<T>> {
    check_s_ta(s, t_a)?;
    let l = t_a.ln();
    let (x, y) = block_solution(l / T::lit(2.0), s, -l);
    let (dp, dc) = (x[0][0], x[1][0]);
    let sig = |i: usize, j: usize| x[i][0] * x[j][0] + x[i][1] * x[j][1] + y[i][j];
    let (s11, s22, s12) = (sig(0, 0), sig(1, 1), sig(0, 1));
    let (np, nc) = (dp * dp, dc * dc);
    let diff = if np + nc > T::zero() {
        (np * s11 + nc * s22 - T::lit(2.0) * dp * dc * s12) / (np + nc)
    } else {
        T::nan()
    };
    let conj = if nc > T::zero() { s22 } else { T::one() };
    Ok(NoiseTriple { diff, probe: s11, conj })
}

/// For `A = [[a, b], [b, 0]]` and `D = diag(dp, 0)` returns `exp(A)` and
/// `∫₀¹ exp(Au) D exp(Au) du`.
fn block_solution<T: Real>(a: T, b: T, dp: T) -> ([[T; 2]; 2], [[T; 2]; 2]) {
    let two = T::lit(2.0);
    let theta = (two * b).atan2(a) / two;
    let (sn, cs) = theta.sin_cos();
    let lam = [
        a * cs * cs + two * b * sn * cs,
        a * sn * sn - two * b * sn * cs,
    ];
    // columns of q are eigenvectors
    let q = [[cs, -sn], [sn, cs]];
    // m = qᵀ D q
    let m = [[dp * q[0][0] * q[0][0], dp * q[0][0] * q[0][1]], [dp * q[0][1] * q[0][0], dp * q[0][1] * q[0][1]]];
    let phi = |x: T| if x.abs() < T::lit(1e-8) { T::one() + x / two } else { x.exp_m1() / x };
    let mut inner = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            inner[i][j] = m[i][j] * phi(lam[i] + lam[j]);
        }
    }
    let e = [lam[0].exp(), lam[1].exp()];
    let mut x = [[T::zero(); 2]; 2];
    let mut y = [[T::zero(); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            x[r][c] = q[r][0] * e[0] * q[c][0] + q[r][1] * e[1] * q[c][1];
            let mut acc = T::zero();
            for i in 0..2 {
                for j in 0..2 {
                    acc = acc + q[r][i] * inner[i][j] * q[c][j];
                }
            }
            y[r][c] = acc;
        }
    }
    (x, y)
}

/// Shot-noise-normalized intensity noises of the (probe, conjugate) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseTriple<T> {
    /// `Var(n_p − n_c) / (⟨n_p⟩ + ⟨n_c⟩)`.
    pub diff: T,
    /// `Var(n_p) / ⟨n_p⟩`.
    pub probe: T,
    /// `Var(n_c) / ⟨n_c⟩`.
    pub conj: T,
}

impl<T: Real> NoiseTriple<T> {
    /// Bright-limit noises of modes 0 (probe) and 1 (conjugate).
    pub fn from_state(state: &GaussianState<T>) -> Result<Self> {
        if state.modes() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: state.modes() });
        }
        let vp = state.number_variance_bright(0)?;
        let vc = state.number_variance_bright(1)?;
        let cov = state.number_covariance_bright(0, 1)?;
        let np = state.mean_photon_bright(0)?;
        let nc = state.mean_photon_bright(1)?;
        Ok(Self { diff: (vp + vc - T::lit(2.0) * cov) / (np + nc), probe: vp / np, conj: vc / nc })
    }

    /// The same noises after an independent pure loss `eta` on each beam:
    /// `N → η N + (1 − η)`. The difference noise uses a common `eta`.
    pub fn after_loss(&self, eta: T) -> Self {
        let f = |n: T| eta * n + (T::one() - eta);
        Self { diff: f(self.diff), probe: f(self.probe), conj: f(self.conj) }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.diff, self.probe, self.conj]
    }
}

/// Which trigonometric function the closed-form probe noise uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ProbeFormula {
    /// `cosh(ξ/2)`: reduces to `cosh(2s)` at `T_a = 1` and matches the layered model.
    #[default]
    CoshCorrected,
    /// `cos(ξ/2)` exactly as printed in the source literature; can go negative.
    AsPrinted,
}

/// `ξ = sqrt(16 s² + ln² T_a)`.
pub fn xi<T: Real>(s: T, t_a: T) -> Result<T> {
    check_s_ta(s, t_a)?;
    let l = t_a.ln();
    Ok((T::lit(16.0) * s * s + l * l).sqrt())
}

fn check_s_ta<T: Real>(s: T, t_a: T) -> Result<()> {
    SourceParams { s, t_a, seed_photons: T::one() }.validate()
}

/// Closed-form normalized noises of the distributed-loss source.
///
/// The difference-noise expression is evaluated as printed and does not
/// reduce to `sech(2s)` at `T_a = 1`; the layered model is the reference.
pub fn analytic_noises<T: Real>(s: T, t_a: T, probe_formula: ProbeFormula) -> Result<NoiseTriple<T>> {
    check_s_ta(s, t_a)?;
    let one = T::one();
    let two = T::lit(2.0);
    let l = t_a.ln();
    let xi = xi(s, t_a)?;
    if xi == T::zero() {
        return Ok(NoiseTriple { diff: one, probe: one, conj: one });
    }
    let sq = t_a.sqrt();
    let zeta = (l / xi).atanh();
    let ch = (xi / two + zeta).cosh();
    let sh4 = (xi / T::lit(4.0)).sinh();
    let diff = one - two * s * sh4 * sh4 / (xi * ch)
        - sq * s * l * l * sh4.powi(4) / (two * xi.powi(3) * ch);

    let trig = match probe_formula {
        ProbeFormula::CoshCorrected => (xi / two).cosh(),
        ProbeFormula::AsPrinted => (xi / two).cos(),
    };
    let s16 = T::lit(16.0) * s * s;
    let probe = (s16 * (one - sq * (one - trig)) + l * l) / (xi * xi);

    let conj = s16 * sq / (xi * xi)
        - one
        - two * sq * ((T::lit(8.0) * s * s - xi * xi) * (xi / two).cosh() + xi * l * (xi / two).sinh())
            / (xi * xi);
    Ok(NoiseTriple { diff, probe, conj })
}

/// Relative tolerance used for [`converged_source`] by the convenience
/// functions, loosened for low-precision scalars.
pub fn default_rel_tol<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(100.0))
}

/// Probe power gain of the converged source.
pub fn source_gain<T: Real>(params: &SourceParams<T>) -> Result<T> {
    if !(params.seed_photons > T::zero()) {
        return Err(invalid("gain needs a nonzero probe seed"));
    }
    Ok(converged_source(params, default_rel_tol())?.gain)
}

/// Squeezing in dB below shot noise, `−10 log₁₀ N`.
pub fn squeezing_db<T: Real>(noise: T) -> Result<T> {
    if !(noise > T::zero()) {
        return Err(invalid(format!("normalized noise {noise} must be > 0")));
    }
    Ok(-T::lit(10.0) * noise.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(s: f64, t_a: f64) -> SourceParams<f64> {
        SourceParams::new(s, t_a)
    }

    #[test]
    fn lossless_stack_is_one_squeezer() {
        let single: Matrix<f64> = crate::gaussian::SymplecticOp::two_mode_squeezer(1.3).matrix;
        for n in [1, 3, 64, 1000] {
            let out = layered_source(&p(1.3, 1.0), n).unwrap();
            assert!(out.transfer.max_abs_diff(&single) < 1e-10, "N = {n}");
            assert!(out.added_noise.max_abs() < 1e-12);
        }
    }

    #[test]
    fn no_squeezing_is_pure_loss() {
        for n in [1, 7, 128] {
            let out = layered_source(&p(0.0, 0.6), n).unwrap();
            assert_relative_eq!(out.gain, 0.6, max_relative = 1e-12);
            let c = out.state.covariance();
            assert!(c.max_abs_diff(&Matrix::identity(4)) < 1e-12);
        }
    }

    #[test]
    fn layer_errors() {
        assert!(layered_source(&p(1.0, 0.5), 0).is_err());
        assert!(layered_source(&p(1.0, 0.0), 4).is_err());
        assert!(converged_source(&p(1.0, 0.0), 1e-9).is_err());
        assert!(converged_source(&p(1.0, 0.5), 0.0).is_err());
        assert!(analytic_noises(1.0, 0.0, ProbeFormula::CoshCorrected).is_err());
    }

    #[test]
    fn converged_lossless_stops_at_one_layer() {
        let out = converged_source(&p(2.04, 1.0), 1e-9).unwrap();
        assert_eq!(out.layers_used, 1);
    }

    #[test]
    fn fast_noises_match_continuum_state() {
        for (s, t) in [(0.3, 0.95), (2.04, 0.71), (3.0, 0.5)] {
            let full = continuum_source(&p(s, t)).unwrap().noises().unwrap();
            let fast = continuum_noises(s, t).unwrap();
            for (a, b) in full.as_array().iter().zip(fast.as_array()) {
                assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "({s}, {t}): {a} vs {b}");
            }
        }
        let coherent = continuum_noises(0.0f64, 0.8).unwrap();
        assert!(coherent.as_array().iter().all(|n| (n - 1.0).abs() < 1e-14));
    }

    #[test]
    fn converged_matches_continuum() {
        for (s, t) in [(2.04, 0.71), (0.5, 0.9), (2.5, 0.6), (0.1, 0.95)] {
            let layered = converged_source(&p(s, t), 1e-9).unwrap();
            let exact = continuum_source(&p(s, t)).unwrap();
            let rel = layered.state.covariance().max_abs_diff(exact.state.covariance())
                / exact.state.covariance().max_abs();
            assert!(rel < 5e-9, "(s, T_a) = ({s}, {t}): rel {rel}");
            assert_relative_eq!(layered.gain, exact.gain, max_relative = 5e-9);
        }
    }

    #[test]
    fn literal_split_converges_to_same_limit() {
        // first-order splitting: halving 1/N halves the error
        let exact = continuum_source(&p(2.04, 0.71)).unwrap().noises().unwrap();
        let err = |n| (layered_source(&p(2.04, 0.71), n).unwrap().noises().unwrap().diff - exact.diff).abs();
        let (coarse, fine) = (err(5_000), err(10_000));
        assert!(fine / exact.diff < 1e-3);
        assert!((coarse / fine - 2.0).abs() < 0.05, "ratio {}", coarse / fine);
    }

    #[test]
    fn pure_squeezer_noises_and_gain() {
        let out = continuum_source(&p(1.0, 1.0)).unwrap();
        let n = out.noises().unwrap();
        assert_relative_eq!(n.diff, 1.0 / 2.0f64.cosh(), max_relative = 1e-12);
        assert_relative_eq!(n.probe, 2.0f64.cosh(), max_relative = 1e-12);
        assert_relative_eq!(n.conj, 2.0f64.cosh(), max_relative = 1e-12);

        let g = source_gain(&p(2.04, 1.0)).unwrap();
        // exact mean photon includes the sinh² spontaneous term
        let expect = 2.04f64.cosh().powi(2) + 2.04f64.sinh().powi(2) / DEFAULT_SEED_PHOTONS;
        assert_relative_eq!(g, expect, max_relative = 1e-12);
        assert!((g - 15.3).abs() < 0.1);
        assert_relative_eq!(source_gain(&p(0.0, 1.0)).unwrap(), 1.0);
        assert!(source_gain(&p(1.0, 1.0).with_seed_photons(0.0)).is_err());
    }

    #[test]
    fn squeezing_db_values() {
        assert!((squeezing_db(0.1585f64).unwrap() - 8.0).abs() < 0.01);
        assert!(squeezing_db(0.0f64).is_err());
        assert_eq!(squeezing_db(1.0f64).unwrap(), 0.0);
    }

    #[test]
    fn analytic_limits() {
        let lim = analytic_noises(1e-6f64, 1.0 - 1e-9, ProbeFormula::CoshCorrected).unwrap();
        assert!((lim.probe - 1.0).abs() < 1e-6);
        assert!((lim.conj - 1.0).abs() < 1e-6);
        let at_one = analytic_noises(1.0, 1.0, ProbeFormula::CoshCorrected).unwrap();
        assert_relative_eq!(at_one.probe, 2.0f64.cosh(), max_relative = 1e-12);
        assert_relative_eq!(at_one.conj, 2.0f64.cosh(), max_relative = 1e-12);
        // printed cos variant: 1 - 1 + cos(2)
        let printed = analytic_noises(1.0f64, 1.0, ProbeFormula::AsPrinted).unwrap();
        assert_relative_eq!(printed.probe, 2.0f64.cos(), max_relative = 1e-12);
        assert!(printed.probe < 0.0);
    }

    #[test]
    fn analytic_probe_and_conj_match_model() {
        let exact = continuum_source(&p(0.5, 0.9)).unwrap().noises().unwrap();
        let closed = analytic_noises(0.5, 0.9, ProbeFormula::CoshCorrected).unwrap();
        assert_relative_eq!(closed.conj, exact.conj, max_relative = 1e-6);
        assert_relative_eq!(closed.probe, exact.probe, max_relative = 1e-6);
    }

    #[test]
    fn affine_repeat_matches_loop() {
        let m = AffineMap::squeezer(0.1).then(&AffineMap::probe_loss(0.97));
        let mut looped = AffineMap::identity(4);
        for _ in 0..13 {
            looped = looped.then(&m);
        }
        let fast = m.repeat(13);
        assert!(fast.transfer.max_abs_diff(&looped.transfer) < 1e-12);
        assert!(fast.added_noise.max_abs_diff(&looped.added_noise) < 1e-12);
    }

    #[test]
    fn f32_source_runs() {
        let params = SourceParams::<f32>::new(1.0, 0.8);
        let out = converged_source(&params, default_rel_tol()).unwrap();
        let exact = continuum_source(&SourceParams::<f64>::new(1.0, 0.8)).unwrap();
        assert!((out.gain as f64 - exact.gain).abs() / exact.gain < 1e-4);
    }
}
