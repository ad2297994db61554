//! Gaussian states of up to a few bosonic modes in the covariance-matrix
//! picture.
//!
//! Quadratures are `X₁ = (a + a†)/√2`, `X₂ = -i(a - a†)/√2` per mode, ordered
//! `(x₁, p₁, x₂, p₂, …)`, and `Σᵢⱼ = ⟨XᵢXⱼ + XⱼXᵢ⟩ - 2⟨Xᵢ⟩⟨Xⱼ⟩`, so the vacuum
//! has `Σ = 1`. Genuine probe modes come first, ancillas after.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Tolerance on `Σ + iΩ ⪰ 0`.
pub const BONA_FIDE_TOL: f64 = 1e-10;
/// Elementwise tolerance on `S Ω Sᵀ = Ω`, relative to `max(1, max|Sᵢⱼ|²)`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

pub fn pauli_x() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

pub fn pauli_y() -> Matrix2<Complex64> {
    let i = Complex64::i();
    Matrix2::new(Complex64::ZERO, -i, i, Complex64::ZERO)
}

/// `Ω_k = -iσ_y` as a real matrix.
pub fn omega_k() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Symplectic form `⊕ₖ Ω_k` on `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(2 * k, 2 * k + 1)] = -1.0;
        m[(2 * k + 1, 2 * k)] = 1.0;
    }
    m
}

/// How the squeezing parameter enters the single-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezingConvention {
    /// Eigenvalues `μ e^{±2r}`: the `cosh 2r`, `sinh 2r` coefficients.
    #[default]
    Single,
    /// Eigenvalues `μ e^{±r}`: the `diag(e^r, e^{-r})` form.
    Appendix,
}

impl SqueezingConvention {
    pub const ALL: [SqueezingConvention; 2] = [SqueezingConvention::Single, SqueezingConvention::Appendix];

    /// Argument of `cosh`/`sinh` in the covariance matrix for squeezing `r`.
    pub fn hyperbolic_argument(self, r: f64) -> f64 {
        match self {
            SqueezingConvention::Single => 2.0 * r,
            SqueezingConvention::Appendix => r,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SqueezingConvention::Single => "single",
            SqueezingConvention::Appendix => "appendix",
        }
    }
}

/// Real symplectic matrix acting on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    matrix: DMatrix<f64>,
}

/// Largest elementwise deviation of `S Ω Sᵀ` from `Ω`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let omega = symplectic_form(n);
    (m * &omega * m.transpose() - omega).amax()
}

impl SymplecticMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (matrix.nrows() / 2).max(1),
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite symplectic matrix entry".into()));
        }
        let residual = symplectic_residual(&matrix);
        let scale = matrix.amax().powi(2).max(1.0);
        if residual > SYMPLECTIC_TOL * scale {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.matrix)
    }

    pub fn compose(&self, after: &SymplecticMatrix) -> Result<Self> {
        if self.n_modes() != after.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: after.n_modes(),
            });
        }
        Ok(Self {
            matrix: &after.matrix * &self.matrix,
        })
    }

    pub fn direct_sum(&self, other: &SymplecticMatrix) -> Self {
        Self {
            matrix: block_diag(&self.matrix, &other.matrix),
        }
    }

    /// Embed an operation on `modes.len()` modes into an `n`-mode identity.
    pub fn embed(&self, n: usize, modes: &[usize]) -> Result<Self> {
        if modes.len() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: modes.len(),
            });
        }
        check_mode_list(modes, n)?;
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for (i, &mi) in modes.iter().enumerate() {
            for (j, &mj) in modes.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        m[(2 * mi + a, 2 * mj + b)] = self.matrix[(2 * i + a, 2 * j + b)];
                    }
                }
            }
        }
        Ok(Self { matrix: m })
    }

    /// Single-mode squeezer for the squeezing parameter `r e^{iφ}`.
    pub fn squeezer(r: f64, phi: f64) -> Result<Self> {
        check_finite("r", r)?;
        check_finite("phi", phi)?;
        bogoliubov_to_symplectic(&BogoliubovCoefficients::single_mode_squeezer(r, phi))
    }

    /// Phase-space rotation by `φ` on one mode (`a → e^{-iφ} a`).
    pub fn phase_rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        }
    }
}

/// Bogoliubov coefficients `b'ₘ = Σₙ (ᾱₘₙ bₙ - β̄ₘₙ bₙ†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovCoefficients {
    pub alpha: DMatrix<Complex64>,
    pub beta: DMatrix<Complex64>,
}

impl BogoliubovCoefficients {
    pub fn passive(alpha: DMatrix<Complex64>) -> Self {
        let (r, c) = alpha.shape();
        Self {
            alpha,
            beta: DMatrix::zeros(r, c),
        }
    }

    /// Real beam splitter with `α_bb = α_cc = Θ`, `α_bc = -α_cb = √(1-Θ²)`.
    pub fn beam_splitter(theta: f64) -> Result<Self> {
        let s = check_theta("theta", theta)?;
        let t = Complex64::from(theta);
        let s = Complex64::from(s);
        Ok(Self::passive(DMatrix::from_row_slice(2, 2, &[t, s, -s, t])))
    }

    pub fn single_mode_squeezer(r: f64, phi: f64) -> Self {
        Self {
            alpha: DMatrix::from_element(1, 1, Complex64::from(r.cosh())),
            beta: DMatrix::from_element(1, 1, Complex64::from_polar(r.sinh(), phi)),
        }
    }
}

/// Assemble the real symplectic matrix from 2×2 blocks
/// `Mₘₙ = [[Re(α-β), Im(α+β)], [-Im(α-β), Re(α+β)]]`.
pub fn bogoliubov_to_symplectic(coeffs: &BogoliubovCoefficients) -> Result<SymplecticMatrix> {
    let (n, nc) = coeffs.alpha.shape();
    if n != nc {
        return Err(Error::DimensionMismatch { expected: n, found: nc });
    }
    if coeffs.beta.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coeffs.beta.nrows(),
        });
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let a = coeffs.alpha[(i, j)];
            let b = coeffs.beta[(i, j)];
            let diff = a - b;
            let sum = a + b;
            m[(2 * i, 2 * j)] = diff.re;
            m[(2 * i, 2 * j + 1)] = sum.im;
            m[(2 * i + 1, 2 * j)] = -diff.im;
            m[(2 * i + 1, 2 * j + 1)] = sum.re;
        }
    }
    SymplecticMatrix::new(m)
}

/// `√(1-Θ²)` after checking `0 ≤ Θ ≤ 1`.
fn check_theta(name: &'static str, theta: f64) -> Result<f64> {
    check_finite(name, theta)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter {
            name,
            value: theta,
            reason: "overlap must lie in [0, 1]",
        });
    }
    Ok(((1.0 - theta) * (1.0 + theta)).sqrt())
}

/// Two-mode beam splitter `[[Θ 1, √(1-Θ²) 1], [-√(1-Θ²) 1, Θ 1]]` on `(b, c)`.
pub fn beam_splitter(theta: f64) -> Result<SymplecticMatrix> {
    bogoliubov_to_symplectic(&BogoliubovCoefficients::beam_splitter(theta)?)
}

/// `dS/dΘ` of [`beam_splitter`]; defined for `0 ≤ Θ < 1`.
pub fn beam_splitter_derivative(theta: f64) -> Result<DMatrix<f64>> {
    let s = check_theta("theta", theta)?;
    if s == 0.0 {
        return Err(Error::SingularFormula("beam-splitter derivative at theta = 1".into()));
    }
    let k = theta / s;
    Ok(kron_identity(&DMatrix::from_row_slice(2, 2, &[1.0, -k, k, 1.0])))
}

/// Four-mode channel on `(b₁, b₂, c₁, c₂)`:
/// `bᵢ → Θᵢ bᵢ + √(1-Θᵢ²) cᵢ`, `cᵢ → √(1-Θᵢ²) bᵢ - Θᵢ cᵢ`.
pub fn two_channel_beam_splitter(theta1: f64, theta2: f64) -> Result<SymplecticMatrix> {
    let s1 = check_theta("theta1", theta1)?;
    let s2 = check_theta("theta2", theta2)?;
    #[rustfmt::skip]
    let core = DMatrix::from_row_slice(4, 4, &[
        theta1, 0.0, s1, 0.0,
        0.0, theta2, 0.0, s2,
        s1, 0.0, -theta1, 0.0,
        0.0, s2, 0.0, -theta2,
    ]);
    SymplecticMatrix::new(kron_identity(&core))
}

/// Partial derivatives of [`two_channel_beam_splitter`] with respect to `(Θ₁, Θ₂)`.
pub fn two_channel_beam_splitter_derivatives(theta1: f64, theta2: f64) -> Result<[DMatrix<f64>; 2]> {
    let s1 = check_theta("theta1", theta1)?;
    let s2 = check_theta("theta2", theta2)?;
    if s1 == 0.0 || s2 == 0.0 {
        return Err(Error::SingularFormula("channel derivative at theta = 1".into()));
    }
    let k1 = -theta1 / s1;
    let k2 = -theta2 / s2;
    #[rustfmt::skip]
    let d1 = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, k1, 0.0,
        0.0, 0.0, 0.0, 0.0,
        k1, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ]);
    #[rustfmt::skip]
    let d2 = DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, k2,
        0.0, 0.0, 0.0, 0.0,
        0.0, k2, 0.0, -1.0,
    ]);
    Ok([kron_identity(&d1), kron_identity(&d2)])
}

/// `M ⊗ 1₂`.
fn kron_identity(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.kronecker(&DMatrix::identity(2, 2))
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

fn check_mode_list(modes: &[usize], n_modes: usize) -> Result<()> {
    for (k, &m) in modes.iter().enumerate() {
        if m >= n_modes || modes[..k].contains(&m) {
            return Err(Error::InvalidMode { index: m, n_modes });
        }
    }
    Ok(())
}

/// First moments and covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct GaussianState {
    first_moments: DVector<f64>,
    covariance: DMatrix<f64>,
}

/// JSON layout: covariance flattened row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    n_modes: usize,
    first_moments: Vec<f64>,
    covariance: Vec<f64>,
}

impl From<GaussianState> for StateRecord {
    fn from(s: GaussianState) -> Self {
        let n = s.covariance.nrows();
        let mut cov = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                cov.push(s.covariance[(i, j)]);
            }
        }
        StateRecord {
            n_modes: s.n_modes(),
            first_moments: s.first_moments.iter().copied().collect(),
            covariance: cov,
        }
    }
}

impl TryFrom<StateRecord> for GaussianState {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        let dim = 2 * r.n_modes;
        if r.first_moments.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.first_moments.len(),
            });
        }
        if r.covariance.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: r.covariance.len(),
            });
        }
        GaussianState::new(
            DVector::from_vec(r.first_moments),
            DMatrix::from_row_slice(dim, dim, &r.covariance),
        )
    }
}

impl GaussianState {
    /// Validated constructor: symmetric, finite, bona fide.
    pub fn new(first_moments: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let dim = covariance.nrows();
        if dim == 0 || dim % 2 != 0 || !covariance.is_square() {
            return Err(Error::DimensionMismatch {
                expected: 2 * (dim / 2).max(1),
                found: covariance.ncols(),
            });
        }
        if first_moments.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: first_moments.len(),
            });
        }
        if covariance.iter().chain(first_moments.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NotBonaFide("non-finite entry".into()));
        }
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > SYMMETRY_TOL * covariance.amax().max(1.0) {
            return Err(Error::NotBonaFide(format!("covariance not symmetric (asymmetry {asym:e})")));
        }
        let covariance = (&covariance + covariance.transpose()) * 0.5;
        let state = Self {
            first_moments,
            covariance,
        };
        let min_eig = state.min_uncertainty_eigenvalue();
        if min_eig < -BONA_FIDE_TOL * state.covariance.amax().max(1.0) {
            return Err(Error::NotBonaFide(format!(
                "Σ + iΩ has eigenvalue {min_eig:e}"
            )));
        }
        Ok(state)
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            first_moments: DVector::zeros(2 * n),
            covariance: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn coherent(alpha: Complex64) -> Self {
        let s = std::f64::consts::SQRT_2;
        Self {
            first_moments: DVector::from_vec(vec![s * alpha.re, s * alpha.im]),
            covariance: DMatrix::identity(2, 2),
        }
    }

    pub fn thermal(mu: f64) -> Result<Self> {
        check_mu("mu", mu)?;
        Ok(Self {
            first_moments: DVector::zeros(2),
            covariance: DMatrix::identity(2, 2) * mu,
        })
    }

    /// Pure squeezed vacuum, `Σ = [[B₋, B], [B, B₊]]` with
    /// `B± = cosh 2r ± cos 2ψ sinh 2r`, `B = -sin 2ψ sinh 2r`.
    pub fn squeezed(r: f64, psi: f64) -> Result<Self> {
        Self::squeezed_thermal(1.0, r, psi, SqueezingConvention::Single)
    }

    /// Squeezed thermal state with mixedness `μ`.
    pub fn squeezed_thermal(mu: f64, r: f64, psi: f64, convention: SqueezingConvention) -> Result<Self> {
        check_mu("mu", mu)?;
        check_finite("r", r)?;
        check_finite("psi", psi)?;
        let h = convention.hyperbolic_argument(r);
        let sh = h.sinh();
        let (sp, cp) = psi.sin_cos();
        // cosh h ∓ cos 2ψ sinh h as sums of non-negative terms.
        let b_minus = mu * ((-h).exp() + 2.0 * sh * sp * sp);
        let b_plus = mu * ((-h).exp() + 2.0 * sh * cp * cp);
        let b = -mu * (2.0 * psi).sin() * sh;
        Ok(Self {
            first_moments: DVector::zeros(2),
            covariance: DMatrix::from_row_slice(2, 2, &[b_minus, b, b, b_plus]),
        })
    }

    /// `Σ̃ = [[cosh 2r 1, sinh 2r σ_x], [sinh 2r σ_x, cosh 2r 1]]`.
    pub fn two_mode_squeezed(r: f64) -> Result<Self> {
        check_finite("r", r)?;
        let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            ch, 0.0, 0.0, sh,
            0.0, ch, sh, 0.0,
            0.0, sh, ch, 0.0,
            sh, 0.0, 0.0, ch,
        ]);
        Ok(Self {
            first_moments: DVector::zeros(4),
            covariance: cov,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.covariance.nrows() / 2
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn first_moments(&self) -> &DVector<f64> {
        &self.first_moments
    }

    pub fn determinant(&self) -> f64 {
        self.covariance.determinant()
    }

    /// `1/√det Σ`.
    pub fn purity(&self) -> f64 {
        1.0 / self.determinant().sqrt()
    }

    /// `ρ₁ ⊗ ρ₂` with the modes of `self` first.
    pub fn tensor(&self, other: &GaussianState) -> Self {
        let mut x = self.first_moments.as_slice().to_vec();
        x.extend_from_slice(other.first_moments.as_slice());
        Self {
            first_moments: DVector::from_vec(x),
            covariance: block_diag(&self.covariance, &other.covariance),
        }
    }

    /// Product of single- or multi-mode states in order.
    pub fn product(states: &[GaussianState]) -> Option<Self> {
        let (first, rest) = states.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, s| acc.tensor(s)))
    }

    pub fn apply(&self, s: &SymplecticMatrix) -> Result<Self> {
        if s.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: s.n_modes(),
            });
        }
        let m = s.matrix();
        let cov = m * &self.covariance * m.transpose();
        Ok(Self {
            first_moments: m * &self.first_moments,
            covariance: (&cov + cov.transpose()) * 0.5,
        })
    }

    /// Reduced state on `keep` (in the given order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidMode {
                index: 0,
                n_modes: 0,
            });
        }
        check_mode_list(keep, self.n_modes())?;
        let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(Self {
            first_moments: DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.first_moments[i])),
            covariance: DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.covariance[(idx[i], idx[j])]),
        })
    }

    /// Smallest eigenvalue of the Hermitian matrix `Σ + iΩ`.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let d = self.covariance.nrows();
        let omega = symplectic_form(d / 2);
        // Real form [[A, -B], [B, A]] of A + iB, eigenvalues doubled.
        let mut real = DMatrix::zeros(2 * d, 2 * d);
        real.view_mut((0, 0), (d, d)).copy_from(&self.covariance);
        real.view_mut((d, d), (d, d)).copy_from(&self.covariance);
        real.view_mut((0, d), (d, d)).copy_from(&(-&omega));
        real.view_mut((d, 0), (d, d)).copy_from(&omega);
        SymmetricEigen::new(real).eigenvalues.min()
    }

    pub fn is_bona_fide(&self) -> bool {
        self.min_uncertainty_eigenvalue() >= -BONA_FIDE_TOL * self.covariance.amax().max(1.0)
    }

    /// Williamson eigenvalues in ascending order; all `≥ 1` for a physical state.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let d = self.covariance.nrows();
        let eig = SymmetricEigen::new(self.covariance.clone());
        let sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()))
            * eig.eigenvectors.transpose();
        // √Σ Ω √Σ is antisymmetric with eigenvalues ±iνₖ.
        let a = &sqrt * symplectic_form(d / 2) * &sqrt;
        let mut real = DMatrix::zeros(2 * d, 2 * d);
        real.view_mut((0, d), (d, d)).copy_from(&(-&a));
        real.view_mut((d, 0), (d, d)).copy_from(&a);
        let mut v: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().copied().filter(|x| *x > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.into_iter().step_by(2).collect()
    }
}

fn check_mu(name: &'static str, mu: f64) -> Result<()> {
    check_finite(name, mu)?;
    if mu < 1.0 {
        return Err(Error::InvalidParameter {
            name,
            value: mu,
            reason: "mixedness must be at least 1",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn identity_bogoliubov_is_identity() {
        let n = 3;
        let c = BogoliubovCoefficients::passive(DMatrix::identity(n, n));
        assert_eq!(bogoliubov_to_symplectic(&c).unwrap().matrix(), &DMatrix::identity(6, 6));
    }

    #[test]
    fn beam_splitter_layout() {
        let t = 0.8;
        let s = 0.6;
        let m = beam_splitter(t).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            t, 0.0, s, 0.0,
            0.0, t, 0.0, s,
            -s, 0.0, t, 0.0,
            0.0, -s, 0.0, t,
        ]);
        assert!(close(m.matrix(), &expected, 1e-15));
        assert_eq!(beam_splitter(1.0).unwrap().matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn symplectic_residuals_are_tiny() {
        for t in [0.0, 0.3, 0.99] {
            assert!(beam_splitter(t).unwrap().residual() < 1e-14);
            assert!(two_channel_beam_splitter(t, 0.5).unwrap().residual() < 1e-14);
        }
        for (r, phi) in [(0.3, 0.1), (1.0, 2.0), (2.5, -1.0)] {
            let s = SymplecticMatrix::squeezer(r, phi).unwrap();
            assert!(s.residual() < 1e-12 * s.matrix().amax().powi(2).max(1.0));
        }
    }

    #[test]
    fn invalid_bogoliubov_is_rejected() {
        let c = BogoliubovCoefficients {
            alpha: DMatrix::from_element(1, 1, Complex64::from(2.0)),
            beta: DMatrix::zeros(1, 1),
        };
        assert!(matches!(bogoliubov_to_symplectic(&c), Err(Error::NotSymplectic { .. })));
        let bad = BogoliubovCoefficients {
            alpha: DMatrix::identity(2, 2),
            beta: DMatrix::zeros(1, 1),
        };
        assert!(matches!(bogoliubov_to_symplectic(&bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn theta_out_of_range() {
        assert!(beam_splitter(1.1).is_err());
        assert!(beam_splitter(-0.1).is_err());
        assert!(two_channel_beam_splitter(0.5, f64::NAN).is_err());
    }

    #[test]
    fn equal_channels_are_two_splitters_up_to_ancilla_sign() {
        let t = 0.7;
        let four = two_channel_beam_splitter(t, t).unwrap();
        let two = beam_splitter(t).unwrap();
        // Reorder (b1, b2, c1, c2) -> (b1, c1, b2, c2) and flip the ancilla outputs.
        let order = [0usize, 2, 1, 3];
        let flip = [1.0, -1.0, 1.0, -1.0];
        let mut reordered = DMatrix::zeros(8, 8);
        for (i, &oi) in order.iter().enumerate() {
            for (j, &oj) in order.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        reordered[(2 * i + a, 2 * j + b)] = flip[i] * four.matrix()[(2 * oi + a, 2 * oj + b)];
                    }
                }
            }
        }
        let expected = two.direct_sum(&two);
        assert!(close(&reordered, expected.matrix(), 1e-15));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = 0.6;
        let h = 1e-6;
        let fd = (beam_splitter(t + h).unwrap().matrix() - beam_splitter(t - h).unwrap().matrix()) / (2.0 * h);
        assert!(close(&fd, &beam_splitter_derivative(t).unwrap(), 1e-8));
        let [d1, d2] = two_channel_beam_splitter_derivatives(0.6, 0.8).unwrap();
        let fd1 = (two_channel_beam_splitter(t + h, 0.8).unwrap().matrix()
            - two_channel_beam_splitter(t - h, 0.8).unwrap().matrix())
            / (2.0 * h);
        let fd2 = (two_channel_beam_splitter(0.6, 0.8 + h).unwrap().matrix()
            - two_channel_beam_splitter(0.6, 0.8 - h).unwrap().matrix())
            / (2.0 * h);
        assert!(close(&fd1, &d1, 1e-8));
        assert!(close(&fd2, &d2, 1e-8));
    }

    #[test]
    fn constructors_are_bona_fide_and_pure() {
        let states = [
            GaussianState::vacuum(2),
            GaussianState::coherent(Complex64::new(1.5, -0.5)),
            GaussianState::squeezed(1.2, 0.3).unwrap(),
            GaussianState::two_mode_squeezed(0.8).unwrap(),
        ];
        for s in &states {
            assert!(s.is_bona_fide());
            assert!((s.determinant() - 1.0).abs() < 1e-10);
        }
        assert!(GaussianState::thermal(1.3).unwrap().is_bona_fide());
        assert!(GaussianState::thermal(0.9).is_err());
    }

    #[test]
    fn trivial_squeezing_is_vacuum() {
        for psi in [0.0, 0.4, 2.0] {
            let s = GaussianState::squeezed(0.0, psi).unwrap();
            assert_eq!(s, GaussianState::vacuum(1));
        }
        assert_eq!(GaussianState::two_mode_squeezed(0.0).unwrap(), GaussianState::vacuum(2));
    }

    #[test]
    fn squeezed_conventions_at_zero_angle() {
        let r = 0.7;
        let s = GaussianState::squeezed(r, 0.0).unwrap();
        assert!((s.covariance()[(0, 0)] - (-2.0 * r).exp()).abs() < 1e-15);
        assert!((s.covariance()[(1, 1)] - (2.0 * r).exp()).abs() < 1e-14);
        let a = GaussianState::squeezed_thermal(1.0, r, 0.0, SqueezingConvention::Appendix).unwrap();
        let mut eig: Vec<f64> = a.covariance().diagonal().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] - (-r).exp()).abs() < 1e-15 && (eig[1] - r.exp()).abs() < 1e-14);
    }

    #[test]
    fn squeezed_state_is_squeezer_on_vacuum() {
        let (r, psi) = (0.9, 0.35);
        let via_op = GaussianState::vacuum(1)
            .apply(&SymplecticMatrix::squeezer(r, -2.0 * psi).unwrap())
            .unwrap();
        let direct = GaussianState::squeezed(r, psi).unwrap();
        assert!(close(via_op.covariance(), direct.covariance(), 1e-13));
    }

    #[test]
    fn coherent_through_beam_splitter_scales_moments() {
        let alpha = Complex64::new(1.2, 0.7);
        let t = 0.9;
        let input = GaussianState::coherent(alpha).tensor(&GaussianState::vacuum(1));
        let out = input.apply(&beam_splitter(t).unwrap()).unwrap();
        let b = out.partial_trace(&[0]).unwrap();
        let x = b.first_moments();
        assert!((x[0] - t * 2f64.sqrt() * alpha.re).abs() < 1e-15);
        assert!((x[1] - t * 2f64.sqrt() * alpha.im).abs() < 1e-15);
        assert!(close(b.covariance(), &DMatrix::identity(2, 2), 1e-15));
        let unchanged = input.apply(&beam_splitter(1.0).unwrap()).unwrap();
        assert_eq!(unchanged, input);
    }

    #[test]
    fn reduced_squeezed_thermal_matches_closed_form() {
        let (mu_a, mu_b, r, psi, t) = (1.1, 1.3, 0.8, 0.4, 0.93);
        let input = GaussianState::squeezed_thermal(mu_a, r, psi, SqueezingConvention::Single)
            .unwrap()
            .tensor(&GaussianState::thermal(mu_b).unwrap());
        let b = input.apply(&beam_splitter(t).unwrap()).unwrap().partial_trace(&[0]).unwrap();
        let t2 = t * t;
        let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let (s2, c2) = (2.0 * psi).sin_cos();
        let c_minus = (1.0 - t2) * mu_b + t2 * mu_a * (ch - c2 * sh);
        let c_plus = (1.0 - t2) * mu_b + t2 * mu_a * (ch + c2 * sh);
        let c = -s2 * t2 * mu_a * sh;
        let expected = DMatrix::from_row_slice(2, 2, &[c_minus, c, c, c_plus]);
        assert!(close(b.covariance(), &expected, 1e-14));
    }

    #[test]
    fn reduced_two_mode_channel_matches_closed_form() {
        let (r, t1, t2) = (0.6, 0.9, 0.8);
        let input = GaussianState::two_mode_squeezed(r).unwrap().tensor(&GaussianState::vacuum(2));
        let out = input
            .apply(&two_channel_beam_splitter(t1, t2).unwrap())
            .unwrap()
            .partial_trace(&[0, 1])
            .unwrap();
        let sh2 = r.sinh().powi(2);
        let c = out.covariance();
        assert!((c[(0, 0)] - (1.0 + 2.0 * sh2 * t1 * t1)).abs() < 1e-14);
        assert!((c[(2, 2)] - (1.0 + 2.0 * sh2 * t2 * t2)).abs() < 1e-14);
        let off = c.view((0, 2), (2, 2)).into_owned();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]) * ((2.0 * r).sinh() * t1 * t2);
        assert!(close(&off, &expected, 1e-14));
    }

    #[test]
    fn partial_trace_checks() {
        let s = GaussianState::two_mode_squeezed(0.5).unwrap();
        assert_eq!(s.partial_trace(&[0, 1]).unwrap(), s);
        assert!(s.partial_trace(&[]).is_err());
        assert!(s.partial_trace(&[2]).is_err());
        assert!(s.partial_trace(&[0, 0]).is_err());
        let swapped = s.partial_trace(&[1, 0]).unwrap();
        assert_eq!(swapped.covariance()[(0, 2)], s.covariance()[(2, 0)]);
    }

    #[test]
    fn bona_fide_rejection() {
        let cov = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        assert!(matches!(GaussianState::new(DVector::zeros(2), cov), Err(Error::NotBonaFide(_))));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GaussianState::new(DVector::zeros(2), asym).is_err());
        assert!(GaussianState::new(DVector::zeros(4), DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn symplectic_eigenvalues_of_known_states() {
        let s = GaussianState::squeezed_thermal(1.7, 0.9, 0.2, SqueezingConvention::Single).unwrap();
        let nu = s.symplectic_eigenvalues();
        assert_eq!(nu.len(), 1);
        assert!((nu[0] - 1.7).abs() < 1e-12);
        let lossy = GaussianState::two_mode_squeezed(0.5)
            .unwrap()
            .tensor(&GaussianState::vacuum(2))
            .apply(&two_channel_beam_splitter(0.5, 0.5).unwrap())
            .unwrap()
            .partial_trace(&[0, 1])
            .unwrap();
        assert!(lossy.symplectic_eigenvalues().iter().all(|&v| v >= 1.0 - 1e-10));
        let nu = GaussianState::two_mode_squeezed(0.7).unwrap().symplectic_eigenvalues();
        assert!(nu.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn json_round_trip() {
        let s = GaussianState::squeezed(0.4, 0.1).unwrap().tensor(&GaussianState::coherent(Complex64::new(0.3, 0.2)));
        let text = serde_json::to_string(&s).unwrap();
        let back: GaussianState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n_modes"], 2);
        assert_eq!(v["covariance"].as_array().unwrap().len(), 16);
        let bad = r#"{"n_modes":1,"first_moments":[0,0],"covariance":[0.1,0,0,0.1]}"#;
        assert!(serde_json::from_str::<GaussianState>(bad).is_err());
    }

    #[test]
    fn pauli_matrices() {
        let y = pauli_y();
        let i = Complex64::i();
        let xz = pauli_x() * pauli_z();
        let xz_c = xz.map(Complex64::from);
        assert_eq!(xz_c, -(y * i));
        assert_eq!(omega_k().map(Complex64::from), -(y * i));
    }
}
