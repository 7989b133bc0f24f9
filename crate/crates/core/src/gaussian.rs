//! Gaussian-state bookkeeping: displacement vectors, covariance matrices,
//! symplectic maps, pure-loss channels and bright-limit photon statistics.
//!
//! Quadratures are ordered `x1, p1, ..., xM, pM` with `x = a + a†` and
//! `p = i(a† - a)`, so the vacuum covariance is the identity and shot noise
//! is 1.

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use num_complex::Complex;

/// Default absolute tolerance for matrix identities.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Standard symplectic form `Ω = ⊕ [[0, 1], [-1, 0]]` for `modes` modes.
pub fn symplectic_form<T: Real>(modes: usize) -> Matrix<T> {
    let mut omega = Matrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    omega
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T> {
    d: Vec<T>,
    sigma: Matrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// Validated constructor (symmetry and positivity of `sigma`).
    pub fn new(d: Vec<T>, sigma: Matrix<T>) -> Result<Self> {
        Self::new_with_tol(d, sigma, T::lit(DEFAULT_TOL))
    }

    pub fn new_with_tol(d: Vec<T>, sigma: Matrix<T>, tol: T) -> Result<Self> {
        if d.is_empty() || !d.len().is_multiple_of(2) {
            return Err(invalid("displacement length must be a positive even number"));
        }
        if sigma.rows() != d.len() || !sigma.is_square() {
            return Err(Error::DimensionMismatch { expected: d.len(), got: sigma.rows() });
        }
        let scale = sigma.max_abs().max(T::one());
        if !sigma.is_symmetric(tol * scale) {
            return Err(invalid("covariance matrix is not symmetric"));
        }
        let min_eig = sigma.symmetric_eigenvalues()?[0];
        if !(min_eig > T::zero()) {
            return Err(invalid("covariance matrix is not positive definite"));
        }
        Ok(Self { d, sigma })
    }

    /// Trusted constructor for states produced by exact maps of valid states.
    pub(crate) fn from_parts(d: Vec<T>, sigma: Matrix<T>) -> Self {
        debug_assert_eq!(d.len(), sigma.rows());
        Self { d, sigma }
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(invalid("vacuum state needs at least one mode"));
        }
        Ok(Self { d: vec![T::zero(); 2 * modes], sigma: Matrix::identity(2 * modes) })
    }

    /// Product of coherent states `|α_1⟩ ⊗ ... ⊗ |α_M⟩`.
    pub fn coherent(alphas: &[Complex<T>]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("coherent state needs at least one mode"));
        }
        let two = T::lit(2.0);
        let d = alphas.iter().flat_map(|a| [two * a.re, two * a.im]).collect();
        Ok(Self { d, sigma: Matrix::identity(2 * alphas.len()) })
    }

    pub fn modes(&self) -> usize {
        self.d.len() / 2
    }

    pub fn displacement(&self) -> &[T] {
        &self.d
    }

    pub fn covariance(&self) -> &Matrix<T> {
        &self.sigma
    }

    /// Quadrature means `(x, p)` of one mode.
    pub fn mode_displacement(&self, mode: usize) -> Result<[T; 2]> {
        self.check_mode(mode)?;
        Ok([self.d[2 * mode], self.d[2 * mode + 1]])
    }

    /// 2x2 covariance block between modes `i` and `j`.
    pub fn covariance_block(&self, i: usize, j: usize) -> Result<Matrix<T>> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        Ok(self.sigma.block(2 * i, 2 * j, 2, 2))
    }

    /// `d ← S d`, `σ ← S σ Sᵀ`.
    pub fn apply_symplectic(&self, op: &SymplecticOp<T>) -> Result<Self> {
        if op.matrix.rows() != self.d.len() {
            return Err(Error::DimensionMismatch { expected: self.d.len(), got: op.matrix.rows() });
        }
        Ok(Self { d: op.matrix.mul_vec(&self.d), sigma: op.matrix.congruence(&self.sigma) })
    }

    /// Pure-loss channel with vacuum admixture on each mode.
    pub fn apply_loss(&self, channel: &ChannelOp<T>) -> Result<Self> {
        if channel.eta.len() != self.modes() {
            return Err(Error::DimensionMismatch { expected: self.modes(), got: channel.eta.len() });
        }
        let n = self.d.len();
        let gains: Vec<T> = channel.eta.iter().flat_map(|&e| [e.sqrt(), e.sqrt()]).collect();
        let d = self.d.iter().zip(&gains).map(|(&v, &g)| v * g).collect();
        let sigma = Matrix::from_fn(n, n, |i, j| {
            let mut v = gains[i] * self.sigma[(i, j)] * gains[j];
            if i == j {
                v = v + T::one() - gains[i] * gains[i];
            }
            v
        });
        Ok(Self { d, sigma })
    }

    /// Exact mean photon number `⟨a†a⟩` of a mode.
    pub fn mean_photon(&self, mode: usize) -> Result<T> {
        let [x, p] = self.mode_displacement(mode)?;
        let four = T::lit(4.0);
        let sxx = self.sigma[(2 * mode, 2 * mode)];
        let spp = self.sigma[(2 * mode + 1, 2 * mode + 1)];
        Ok((x * x + p * p) / four + (sxx + spp - T::lit(2.0)) / four)
    }

    /// Coherent-amplitude part of the mean photon number, `|d|²/4`.
    ///
    /// This is the mean photon number in the bright limit, where the
    /// spontaneous contribution is negligible.
    pub fn mean_photon_bright(&self, mode: usize) -> Result<T> {
        let [x, p] = self.mode_displacement(mode)?;
        Ok((x * x + p * p) / T::lit(4.0))
    }

    /// Bright-limit photon-number variance `d_iᵀ σ_ii d_i / 4`.
    pub fn number_variance_bright(&self, mode: usize) -> Result<T> {
        self.number_covariance_bright(mode, mode)
    }

    /// Bright-limit photon-number covariance `d_iᵀ σ_ij d_j / 4`.
    pub fn number_covariance_bright(&self, i: usize, j: usize) -> Result<T> {
        let di = self.bright_displacement(i)?;
        let dj = self.bright_displacement(j)?;
        let block = self.covariance_block(i, j)?;
        Ok(block.bilinear(&di, &dj) / T::lit(4.0))
    }

    /// Symplectic eigenvalues `ν_k` (ascending, one per mode).
    ///
    /// Computed as square roots of the eigenvalues of `σ^½ Ωᵀ σ Ω σ^½`,
    /// which carries each `ν_k²` twice.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<T>> {
        let omega = symplectic_form::<T>(self.modes());
        let root = self.sigma.sqrt_psd()?;
        let inner = omega.transpose().congruence(&self.sigma);
        let m = root.congruence(&inner);
        let vals = m.symmetric_eigenvalues()?;
        Ok(vals.chunks(2).map(|pair| ((pair[0] + pair[1]) / T::lit(2.0)).max(T::zero()).sqrt()).collect())
    }

    /// Checks `σ + iΩ ⪰ 0`, i.e. every symplectic eigenvalue is at least 1.
    pub fn satisfies_uncertainty(&self, tol: T) -> Result<bool> {
        Ok(self.symplectic_eigenvalues()?.iter().all(|&nu| nu >= T::one() - tol))
    }

    /// Purity `1/sqrt(det σ)` in the vacuum-is-identity convention.
    pub fn purity(&self) -> T {
        T::one() / self.sigma.determinant().sqrt()
    }

    fn bright_displacement(&self, mode: usize) -> Result<[T; 2]> {
        let d = self.mode_displacement(mode)?;
        if d[0] == T::zero() && d[1] == T::zero() {
            return Err(Error::NotBright { mode });
        }
        Ok(d)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(invalid(format!("mode {mode} out of range for {} modes", self.modes())));
        }
        Ok(())
    }
}

/// Linear quadrature map that preserves the canonical commutators.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp<T> {
    pub matrix: Matrix<T>,
    pub label: String,
}

impl<T: Real> SymplecticOp<T> {
    pub fn new(matrix: Matrix<T>, label: impl Into<String>) -> Result<Self> {
        Self::new_with_tol(matrix, label, T::lit(DEFAULT_TOL))
    }

    pub fn new_with_tol(matrix: Matrix<T>, label: impl Into<String>, tol: T) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_multiple_of(2) {
            return Err(invalid("symplectic matrix must be square with even size"));
        }
        let op = Self { matrix, label: label.into() };
        if !op.is_symplectic(tol) {
            return Err(invalid(format!("matrix '{}' violates S Ω Sᵀ = Ω", op.label)));
        }
        Ok(op)
    }

    pub fn identity(modes: usize) -> Self {
        Self { matrix: Matrix::identity(2 * modes), label: "identity".into() }
    }

    /// Two-mode squeezer on modes (1, 2):
    /// `x1 → x1 cosh r + x2 sinh r`, `x2 → x2 cosh r + x1 sinh r`,
    /// `p1 → p1 cosh r − p2 sinh r`, `p2 → p2 cosh r − p1 sinh r`.
    ///
    /// With this sign choice `x1 − x2` is the squeezed combination.
    pub fn two_mode_squeezer(r: T) -> Self {
        let c = r.cosh();
        let s = r.sinh();
        let z = T::zero();
        let matrix = Matrix::from_rows(&[&[c, z, s, z], &[z, c, z, -s], &[s, z, c, z], &[z, -s, z, c]]);
        Self { matrix, label: format!("tms({r})") }
    }

    /// Returns the map "apply `self`, then `next`".
    pub fn then(&self, next: &Self) -> Self {
        Self { matrix: &next.matrix * &self.matrix, label: format!("{} ∘ {}", next.label, self.label) }
    }

    pub fn modes(&self) -> usize {
        self.matrix.rows() / 2
    }

    pub fn is_symplectic(&self, tol: T) -> bool {
        let omega = symplectic_form::<T>(self.modes());
        let scale = self.matrix.max_abs().max(T::one());
        self.matrix.congruence(&omega).max_abs_diff(&omega) <= tol * scale * scale
    }
}

/// Independent pure-loss channel per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOp<T> {
    eta: Vec<T>,
}

impl<T: Real> ChannelOp<T> {
    pub fn new(eta_per_mode: Vec<T>) -> Result<Self> {
        if let Some(bad) = eta_per_mode.iter().find(|e| !(**e >= T::zero() && **e <= T::one())) {
            return Err(invalid(format!("transmission {bad} outside [0, 1]")));
        }
        Ok(Self { eta: eta_per_mode })
    }

    pub fn eta(&self) -> &[T] {
        &self.eta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn vacuum_convention() {
        let v = GaussianState::<f64>::vacuum(2).unwrap();
        assert_eq!(v.displacement(), &[0.0; 4]);
        assert_eq!(v.covariance(), &Matrix::identity(4));
        for nu in v.symplectic_eigenvalues().unwrap() {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-12);
        }
        assert_eq!(GaussianState::<f64>::vacuum(1).unwrap().mean_photon(0).unwrap(), 0.0);
        assert!(GaussianState::<f64>::vacuum(0).is_err());
    }

    #[test]
    fn coherent_amplitudes() {
        let s = GaussianState::coherent(&[c(2.0, 0.0)]).unwrap();
        assert_eq!(s.displacement(), &[4.0, 0.0]);
        assert_eq!(s.mean_photon(0).unwrap(), 4.0);

        let s = GaussianState::coherent(&[c(0.0, 3.0)]).unwrap();
        assert_eq!(s.displacement(), &[0.0, 6.0]);
        assert_eq!(s.mean_photon(0).unwrap(), 9.0);

        let zero = GaussianState::coherent(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(zero, GaussianState::vacuum(2).unwrap());
    }

    #[test]
    fn squeezer_identity_and_inverse() {
        let id = SymplecticOp::<f64>::two_mode_squeezer(0.0);
        assert_eq!(id.matrix, Matrix::identity(4));

        let st = GaussianState::coherent(&[c(1.5, -0.3), c(0.2, 0.7)]).unwrap();
        let there = st.apply_symplectic(&SymplecticOp::two_mode_squeezer(0.8)).unwrap();
        let back = there.apply_symplectic(&SymplecticOp::two_mode_squeezer(-0.8)).unwrap();
        assert!(back.covariance().max_abs_diff(st.covariance()) < 1e-10);
        for (a, b) in back.displacement().iter().zip(st.displacement()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(st.apply_symplectic(&SymplecticOp::identity(2)).unwrap(), st);
    }

    #[test]
    fn squeezers_compose_additively() {
        let vac = GaussianState::<f64>::vacuum(2).unwrap();
        let ab = SymplecticOp::two_mode_squeezer(0.4).then(&SymplecticOp::two_mode_squeezer(0.9));
        let lhs = vac.apply_symplectic(&ab).unwrap();
        let rhs = vac.apply_symplectic(&SymplecticOp::two_mode_squeezer(1.3)).unwrap();
        assert!(lhs.covariance().max_abs_diff(rhs.covariance()) < 1e-12);
    }

    #[test]
    fn tms_vacuum_squeezes_difference_quadrature() {
        let st = GaussianState::<f64>::vacuum(2)
            .unwrap()
            .apply_symplectic(&SymplecticOp::two_mode_squeezer(1.0))
            .unwrap();
        // Var((x1 - x2)/√2) = (σ_x1x1 + σ_x2x2 - 2σ_x1x2)/2
        let s = st.covariance();
        let var = (s[(0, 0)] + s[(2, 2)] - 2.0 * s[(0, 2)]) / 2.0;
        assert_relative_eq!(var, (-2.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(st.mean_photon(0).unwrap(), 1.0f64.sinh().powi(2), max_relative = 1e-12);
        assert_relative_eq!(var, 0.1353352832366127, max_relative = 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let one = GaussianState::<f64>::vacuum(1).unwrap();
        assert!(matches!(
            one.apply_symplectic(&SymplecticOp::two_mode_squeezer(0.1)),
            Err(Error::DimensionMismatch { .. })
        ));
        let ch = ChannelOp::new(vec![0.5, 0.5]).unwrap();
        assert!(one.apply_loss(&ch).is_err());
    }

    #[test]
    fn loss_channel_cases() {
        let coh = GaussianState::coherent(&[c(2.0, 0.0)]).unwrap();
        assert_eq!(coh.apply_loss(&ChannelOp::new(vec![1.0]).unwrap()).unwrap(), coh);
        assert_eq!(
            coh.apply_loss(&ChannelOp::new(vec![0.0]).unwrap()).unwrap(),
            GaussianState::vacuum(1).unwrap()
        );
        let half = coh.apply_loss(&ChannelOp::new(vec![0.5]).unwrap()).unwrap();
        assert_relative_eq!(half.mean_photon(0).unwrap(), 2.0, max_relative = 1e-15);
        assert!(half.covariance().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!(ChannelOp::new(vec![1.2]).is_err());
        assert!(ChannelOp::new(vec![-0.1]).is_err());
        assert!(ChannelOp::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn bright_limit_statistics() {
        let coh = GaussianState::coherent(&[c(2.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(coh.number_variance_bright(0).unwrap(), 4.0);
        assert_eq!(coh.number_covariance_bright(0, 1).unwrap(), 0.0);

        let vac = GaussianState::<f64>::vacuum(1).unwrap();
        assert_eq!(vac.number_variance_bright(0), Err(Error::NotBright { mode: 0 }));

        // seed |α|² = 1e6, r = 1: brute-force dᵀσd/4 gives sech(2)
        let seeded = GaussianState::coherent(&[c(1e3, 0.0), c(0.0, 0.0)])
            .unwrap()
            .apply_symplectic(&SymplecticOp::two_mode_squeezer(1.0))
            .unwrap();
        let var = seeded.number_variance_bright(0).unwrap() + seeded.number_variance_bright(1).unwrap()
            - 2.0 * seeded.number_covariance_bright(0, 1).unwrap();
        let norm = seeded.mean_photon_bright(0).unwrap() + seeded.mean_photon_bright(1).unwrap();
        assert_relative_eq!(var / norm, 1.0 / 2.0f64.cosh(), max_relative = 1e-10);
    }

    #[test]
    fn validated_constructor() {
        let bad = Matrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(GaussianState::new(vec![0.0, 0.0], bad).is_err());
        let neg = Matrix::from_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        assert!(GaussianState::new(vec![0.0, 0.0], neg).is_err());
        assert!(GaussianState::new(vec![0.0, 0.0], Matrix::identity(2)).is_ok());
    }

    #[test]
    fn squashed_state_violates_uncertainty() {
        let sub = Matrix::from_diag(&[0.5, 0.5]);
        let st = GaussianState::new(vec![0.0, 0.0], sub).unwrap();
        assert!(!st.satisfies_uncertainty(1e-12).unwrap());
    }

    #[test]
    fn f32_squeezer_is_symplectic() {
        let op = SymplecticOp::<f32>::two_mode_squeezer(0.7);
        assert!(op.is_symplectic(1e-5));
    }
}
