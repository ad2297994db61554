//! Uhlmann fidelity `F = (Tr √(√ρ ρ' √ρ))²` of one- and two-mode Gaussian states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::dd::DdMatrix;
use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, GaussianState};

/// Imaginary part tolerated in determinants that are real in exact arithmetic.
pub const IMAGINARY_TOL: f64 = 1e-10;
/// Negative radicands above this (relative) magnitude are treated as errors.
pub const RADICAND_TOL: f64 = 1e-10;
/// `det(1 + iΩΣ)` below this (scaled by `max|Σ|²`) is taken as an exactly pure state.
pub const PURITY_TOL: f64 = 1e-12;
/// First moments below this magnitude count as zero for the two-mode formula.
pub const ZERO_MEAN_TOL: f64 = 1e-12;

/// The determinant combinations entering the closed-form fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityTerms {
    /// Two-mode only; zero for a single mode.
    pub gamma: f64,
    pub lambda: f64,
    pub eta: f64,
    /// Exponent from the first moments; single mode only.
    pub xi: f64,
}

fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(Complex64::from)
}

fn real_det(m: DMatrix<Complex64>, what: &str) -> Result<f64> {
    let d = m.determinant();
    if d.im.abs() > IMAGINARY_TOL * d.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("{what} has imaginary part {:e}", d.im)));
    }
    Ok(d.re)
}

/// `det(iΩΣ + 1)`, evaluated through complex matrices.
fn det_i_omega_sigma_plus_one(s: &GaussianState) -> Result<f64> {
    let d = s.covariance().nrows();
    let iomega = complex(&symplectic_form(d / 2)) * Complex64::i();
    let m = iomega * complex(s.covariance()) + DMatrix::identity(d, d);
    let v = real_det(m, "det(iΩΣ + 1)")?;
    Ok(snap_pure(v, s.covariance().amax()))
}

/// Rounding leaves `det(1 + iΩΣ) ~ 1e-16` for pure states, and `√λ` is not
/// analytic there, so finite differences over a pure family would see noise.
fn snap_pure(v: f64, amax: f64) -> f64 {
    if v.abs() <= PURITY_TOL * (amax * amax).max(1.0) {
        0.0
    } else {
        v
    }
}

/// `1/√d` for `d = 1 + e`, `|e| ≲ 1e-12`, by series so no dd division is needed.
fn inv_sqrt_near_one(d: TwoFloat) -> TwoFloat {
    let e = d - TwoFloat::from(1.0);
    TwoFloat::from(1.0) - e * 0.5 + e * e * 0.375
}

fn snap_pure_dd(v: TwoFloat, amax: f64) -> TwoFloat {
    if v.hi().abs() <= PURITY_TOL * (amax * amax).max(1.0) {
        TwoFloat::from(0.0)
    } else {
        v
    }
}

fn clamp_nonneg(name: &str, v: f64, scale: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -RADICAND_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("{name} is negative ({v:e})")))
    }
}

fn check_pair(s1: &GaussianState, s2: &GaussianState, n: usize) -> Result<()> {
    for s in [s1, s2] {
        if s.n_modes() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.n_modes(),
            });
        }
    }
    Ok(())
}

fn max_moment(s: &GaussianState) -> f64 {
    s.first_moments().amax()
}

pub fn single_mode_terms(s1: &GaussianState, s2: &GaussianState) -> Result<FidelityTerms> {
    check_pair(s1, s2, 1)?;
    let sum = s1.covariance() + s2.covariance();
    let inv = sum
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularFormula("Σ₁ + Σ₂ is singular".into()))?;
    let dx = s2.first_moments() - s1.first_moments();
    let xi = -(dx.transpose() * inv * &dx)[(0, 0)];
    let eta = sum.determinant() / 4.0;
    let lambda = det_i_omega_sigma_plus_one(s1)? * det_i_omega_sigma_plus_one(s2)? / 4.0;
    Ok(FidelityTerms {
        gamma: 0.0,
        lambda: clamp_nonneg("lambda", lambda, eta)?,
        eta,
        xi,
    })
}

/// `F = e^ξ / (√(η + λ) - √λ)` with the single-mode `1/4` prefactors.
pub fn fidelity_single_mode(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    let t = single_mode_terms(s1, s2)?;
    let denom = (t.eta + t.lambda).sqrt() - t.lambda.sqrt();
    if !(denom > 0.0) {
        return Err(Error::Numerical(format!("fidelity denominator {denom:e}")));
    }
    Ok(t.xi.exp() / denom)
}

pub fn two_mode_terms(s1: &GaussianState, s2: &GaussianState) -> Result<FidelityTerms> {
    check_pair(s1, s2, 2)?;
    let m = max_moment(s1).max(max_moment(s2));
    if m > ZERO_MEAN_TOL {
        return Err(Error::NonZeroFirstMoments { max_moment: m });
    }
    let iomega = complex(&symplectic_form(2)) * Complex64::i();
    let p = &iomega * complex(s1.covariance()) * &iomega * complex(s2.covariance()) + DMatrix::identity(4, 4);
    let gamma = real_det(p, "det(iΩΣ₁iΩΣ₂ + 1)")? / 16.0;
    let lambda = det_i_omega_sigma_plus_one(s1)? * det_i_omega_sigma_plus_one(s2)? / 16.0;
    let eta = (s1.covariance() + s2.covariance()).determinant() / 16.0;
    Ok(FidelityTerms {
        gamma: clamp_nonneg("gamma", gamma, eta)?,
        lambda: clamp_nonneg("lambda", lambda, eta)?,
        eta,
        xi: 0.0,
    })
}

/// Two-mode zero-mean fidelity `F = 1/(w - √(w² - η))`, `w = √γ + √λ`.
pub fn fidelity_two_mode_zero_mean(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    let t = two_mode_terms(s1, s2)?;
    let w = t.gamma.sqrt() + t.lambda.sqrt();
    let rad = clamp_nonneg("(√γ + √λ)² - η", w * w - t.eta, w * w)?;
    let inv = w - rad.sqrt();
    if !(inv > 0.0) {
        return Err(Error::Numerical(format!("fidelity denominator {inv:e}")));
    }
    Ok(1.0 / inv)
}

/// Dispatch on the mode count.
pub fn fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    match s1.n_modes() {
        1 => fidelity_single_mode(s1, s2),
        2 => fidelity_two_mode_zero_mean(s1, s2),
        n => Err(Error::DimensionMismatch { expected: 2, found: n }),
    }
}

fn dd(v: f64) -> TwoFloat {
    TwoFloat::from(v)
}

fn dd_sqrt_nonneg(name: &str, v: TwoFloat, scale: f64) -> Result<TwoFloat> {
    if v.hi() >= 0.0 {
        Ok(v.sqrt())
    } else {
        clamp_nonneg(name, v.hi(), scale).map(|_| dd(0.0))
    }
}

/// `1 - √F` without cancellation, for states that are close to each other.
///
/// The determinant combinations are formed in double-double arithmetic, so
/// the result keeps full relative precision even when `1 - F` is far below
/// the f64 rounding level of `F`.
pub fn one_minus_sqrt_fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1 == s2 && s1.n_modes() <= 2 {
        return Ok(0.0);
    }
    match s1.n_modes() {
        1 => {
            check_pair(s1, s2, 1)?;
            let a = DdMatrix::from_f64(s1.covariance());
            let b = DdMatrix::from_f64(s2.covariance());
            let one = dd(1.0);
            let (det_a, det_b) = (a.det(), b.det());
            let pa = snap_pure_dd(one - det_a, s1.covariance().amax());
            let pb = snap_pure_dd(one - det_b, s2.covariance().amax());
            // Rescale a pure input to unit determinant before forming det(A + B):
            // with λ = 0 its rounding error would otherwise enter F linearly.
            let scale = |p: TwoFloat, d: TwoFloat| if p.hi() == 0.0 { inv_sqrt_near_one(d) } else { one };
            let (ca, cb) = (scale(pa, det_a), scale(pb, det_b));
            let cross = a.add(&b).det() - det_a - det_b;
            let eta = (ca * ca * det_a + cb * cb * det_b + ca * cb * cross) * 0.25;
            let lambda = pa * pb * 0.25;
            let lambda_sqrt = dd_sqrt_nonneg("lambda", lambda, eta.hi())?;
            let u_minus_1 = (eta + lambda).sqrt() - lambda_sqrt - one;
            let xi = single_mode_terms(s1, s2)?.xi;
            Ok(-(0.5 * xi - 0.5 * u_minus_1.hi().ln_1p()).exp_m1())
        }
        2 => {
            check_pair(s1, s2, 2)?;
            let m = max_moment(s1).max(max_moment(s2));
            if m > ZERO_MEAN_TOL {
                return Err(Error::NonZeroFirstMoments { max_moment: m });
            }
            let a = DdMatrix::from_f64(s1.covariance());
            let b = DdMatrix::from_f64(s2.covariance());
            let omega = DdMatrix::from_f64(&symplectic_form(2));
            let one4 = DdMatrix::identity(4);
            let gamma = one4.sub(&omega.mul(&a).mul(&omega).mul(&b)).det() * 0.0625;
            // det(1 + iΩΣ) = 1 - (det A + det B + 2 det C) + det Σ for Σ = [[A, C], [Cᵀ, B]].
            let one = dd(1.0);
            let d_plus = |s: &DdMatrix, amax: f64| {
                let delta = s.block_det(0, 0) + s.block_det(2, 2) + 2.0 * s.block_det(0, 2);
                snap_pure_dd(one - delta + s.det(), amax)
            };
            let lambda = d_plus(&a, s1.covariance().amax()) * d_plus(&b, s2.covariance().amax()) * 0.0625;
            let eta = a.add(&b).det() * 0.0625;
            let scale = eta.hi();
            let w = dd_sqrt_nonneg("gamma", gamma, scale)? + dd_sqrt_nonneg("lambda", lambda, scale)?;
            let rad = dd_sqrt_nonneg("(√γ + √λ)² - η", w * w - eta, (w * w).hi())?;
            let inv_f_minus_1 = w - one - rad;
            Ok(-(-0.5 * inv_f_minus_1.hi().ln_1p()).exp_m1())
        }
        n => Err(Error::DimensionMismatch { expected: 2, found: n }),
    }
}
