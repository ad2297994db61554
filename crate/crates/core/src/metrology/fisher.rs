//! Gaussian quantum Fisher information and the `(r_S, L)` Fisher matrix.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use super::{Parameter, SchemeSpec};
use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, GaussianState};
use crate::spacetime::{ObserverPair, SchwarzschildGeometry};

/// How the central matrix `M = Σ⊗Σ - Ω⊗Ω` enters the quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralMatrixMode {
    /// `2 vec(∂Σ)ᵀ M vec(∂Σ)`, as written for the two-parameter case.
    Literal,
    /// `½ vec(∂Σ)ᵀ M⁻¹ vec(∂Σ)`: the exact QFI for `Σ_vac = 1`.
    Inverse,
}

impl CentralMatrixMode {
    pub const ALL: [CentralMatrixMode; 2] = [CentralMatrixMode::Literal, CentralMatrixMode::Inverse];

    pub fn name(self) -> &'static str {
        match self {
            CentralMatrixMode::Literal => "literal",
            CentralMatrixMode::Inverse => "inverse",
        }
    }
}

/// Fisher information of a Gaussian family at one point, given `∂⟨X⟩` and `∂Σ`.
///
/// Both modes add the first-moment term `2 ∂⟨X⟩ᵀ Σ⁻¹ ∂⟨X⟩`.
pub fn gaussian_qfi(
    state: &GaussianState,
    d_moments: &DVector<f64>,
    d_cov: &DMatrix<f64>,
    mode: CentralMatrixMode,
) -> Result<f64> {
    let sigma = state.covariance();
    let d = sigma.nrows();
    if d_cov.shape() != (d, d) || d_moments.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: d_cov.nrows(),
        });
    }
    let sigma_inv = sigma
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularFormula("covariance matrix is singular".into()))?;
    let moment_term = 2.0 * (d_moments.transpose() * &sigma_inv * d_moments)[(0, 0)];
    if d_cov.amax() == 0.0 {
        return Ok(moment_term);
    }
    let omega = symplectic_form(d / 2);
    let central = sigma.kronecker(sigma) - omega.kronecker(&omega);
    let v = DVector::from_column_slice(d_cov.as_slice());
    let cov_term = match mode {
        CentralMatrixMode::Literal => 2.0 * (v.transpose() * &central * &v)[(0, 0)],
        CentralMatrixMode::Inverse => {
            let w = central.lu().solve(&v).ok_or_else(|| {
                Error::SingularFormula("Σ⊗Σ - Ω⊗Ω is singular (pure state with varying covariance)".into())
            })?;
            0.5 * v.dot(&w)
        }
    };
    Ok(cov_term + moment_term)
}

/// Two-parameter Fisher matrix over `(r_S, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub params: [Parameter; 2],
    pub matrix: Matrix2<f64>,
    pub mode: CentralMatrixMode,
    /// Fisher information with respect to δ.
    pub q_delta: f64,
    /// `(∂δ/∂r_S, ∂δ/∂L)` at first order.
    pub gradient: [f64; 2],
}

impl FisherMatrix {
    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `Q_LL / Q_{r_S r_S}`.
    pub fn ratio_ll(&self) -> f64 {
        self.matrix[(1, 1)] / self.matrix[(0, 0)]
    }

    /// `Q_{r_S L} / Q_{r_S r_S}`.
    pub fn ratio_rl(&self) -> f64 {
        self.matrix[(0, 1)] / self.matrix[(0, 0)]
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let e = self.matrix.symmetric_eigenvalues();
        e.iter().all(|&v| v >= -tol * self.frobenius_norm().max(f64::MIN_POSITIVE))
    }
}

/// `Q = Q_δδ ∇δ ∇δᵀ`; singular because both parameters enter through δ alone.
pub fn fisher_matrix_rs_l(
    scheme: &SchemeSpec,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
    sigma: f64,
    mode: CentralMatrixMode,
) -> Result<FisherMatrix> {
    scheme.validate()?;
    let delta = geom.delta_exact(pair)?;
    let (overlaps, rates) = scheme.overlaps_at_delta(delta, sigma)?;
    let state = scheme.output_state(&overlaps)?;
    let (dx, dcov) = scheme.output_derivative(&overlaps, &rates)?;
    let q_delta = gaussian_qfi(&state, &dx, &dcov, mode)?;
    let g = [geom.ddelta_approx_drs(pair)?, geom.ddelta_approx_dl(pair)?];
    let matrix = Matrix2::new(g[0] * g[0], g[0] * g[1], g[1] * g[0], g[1] * g[1]) * q_delta;
    Ok(FisherMatrix {
        params: [Parameter::RS, Parameter::L],
        matrix,
        mode,
        q_delta,
        gradient: g,
    })
}
