//! Quantum Fisher information from the fidelity limit and the closed-form
//! single-mode squeezed result.

use crate::error::{check_finite, Error, Result};
use crate::fidelity::one_minus_sqrt_fidelity;
use crate::gaussian::GaussianState;

/// Step halvings in the Richardson table.
pub const RICHARDSON_HALVINGS: usize = 4;
/// Relative error estimate above which extrapolation is reported as failed.
pub const RICHARDSON_TOL: f64 = 1e-4;
/// Below `1 - Θ` of this size the appendix path defers to the series bound.
pub const SERIES_SWITCH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct QfiEstimate {
    pub value: f64,
    /// `|T₄₄ - T₃₃|` of the Richardson table.
    pub error_estimate: f64,
    /// Raw `8(1 - √F)/dΘ²` values, largest step first.
    pub raw: Vec<f64>,
}

/// `1e-4 · max(|Θ|, 1)`.
pub fn default_step(theta0: f64) -> f64 {
    1e-4 * theta0.abs().max(1.0)
}

/// `H(Θ₀) = lim 8(1 - √F(ρ_{Θ₀-h/2}, ρ_{Θ₀+h/2}))/h²`.
///
/// The pair is centred on `Θ₀` so the quotient is even in `h`, and the
/// table extrapolates in `h²`.
pub fn qfi_from_fidelity<F>(family: F, theta0: f64, d_theta: f64) -> Result<QfiEstimate>
where
    F: Fn(f64) -> Result<GaussianState>,
{
    check_finite("theta0", theta0)?;
    check_finite("d_theta", d_theta)?;
    if d_theta <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "d_theta",
            value: d_theta,
            reason: "step must be positive",
        });
    }
    let mut raw = Vec::with_capacity(RICHARDSON_HALVINGS + 1);
    let mut h = d_theta;
    for _ in 0..=RICHARDSON_HALVINGS {
        let lo = family(theta0 - 0.5 * h)?;
        let hi = family(theta0 + 0.5 * h)?;
        raw.push(8.0 * one_minus_sqrt_fidelity(&lo, &hi)? / (h * h));
        h *= 0.5;
    }
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for (k, &g) in raw.iter().enumerate() {
        let mut row = vec![g];
        for j in 1..=k {
            let f = 4f64.powi(j as i32);
            let prev = &table[k - 1];
            row.push(row[j - 1] + (row[j - 1] - prev[j - 1]) / (f - 1.0));
        }
        table.push(row);
    }
    let n = RICHARDSON_HALVINGS;
    let value = table[n][n];
    let error_estimate = (table[n][n] - table[n - 1][n - 1]).abs();
    if error_estimate > RICHARDSON_TOL * value.abs() && error_estimate > f64::MIN_POSITIVE {
        return Err(Error::NonConvergent {
            value,
            relative_error: error_estimate / value.abs(),
        });
    }
    Ok(QfiEstimate {
        value,
        error_estimate,
        raw,
    })
}

fn check_open_theta(theta: f64) -> Result<()> {
    check_finite("theta", theta)?;
    if theta == 1.0 {
        return Err(Error::SingularFormula(
            "closed-form H diverges at theta = 1; use the series bound".into(),
        ));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "must lie in (0, 1)",
        });
    }
    Ok(())
}

fn check_squeezing(r: f64) -> Result<()> {
    check_finite("r", r)?;
    if r < 0.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "squeezing must be non-negative",
        });
    }
    Ok(())
}

/// `(1 - Θ²)(Θ²(1 - Θ²) + 1/(2 sinh²r))` and `1 - 2Θ² + 2Θ⁴`.
fn appendix_parts(theta: f64, r: f64) -> (f64, f64) {
    let t2 = theta * theta;
    let q = (1.0 - theta) * (1.0 + theta);
    let denom = q * (t2 * q + 0.5 / r.sinh().powi(2));
    (denom, 1.0 - 2.0 * t2 + 2.0 * t2 * t2)
}

/// `H(Θ) = 8Θ̇²(1 - 2Θ² + 2Θ⁴) / ((1 - Θ²)(Θ²(1 - Θ²) + (2 sinh²r)⁻¹))` as printed.
pub fn qfi_closed_form_appendix(theta: f64, theta_dot: f64, r: f64) -> Result<f64> {
    check_open_theta(theta)?;
    check_finite("theta_dot", theta_dot)?;
    check_squeezing(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let (denom, num) = appendix_parts(theta, r);
    Ok(8.0 * theta_dot * theta_dot * num / denom)
}

/// Printed `ΔΘ ≥ √((1-Θ²)(Θ²(1-Θ²) + (2 sinh²r)⁻¹)) / (Θ̇ √(2N) √(1 - 2Θ² + 2Θ⁴))`.
pub fn appendix_delta_theta_bound(theta: f64, theta_dot: f64, r: f64, n: f64) -> Result<f64> {
    check_open_theta(theta)?;
    check_squeezing(r)?;
    if r == 0.0 || theta_dot == 0.0 {
        return Err(Error::NoResources("no squeezing or no dependence on theta"));
    }
    let (denom, num) = appendix_parts(theta, r);
    Ok(denom.sqrt() / (theta_dot.abs() * (2.0 * n).sqrt() * num.sqrt()))
}

/// `1/√(N H)`.
pub fn delta_from_qfi(h: f64, n: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::NoResources("vanishing Fisher information"));
    }
    Ok(1.0 / (n * h).sqrt())
}

/// Which quantity an appendix-based `Δx/x` was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppendixPath {
    /// `1/(x √(N H))` with the printed `H(Θ)`.
    ClosedFormH,
    /// The printed `ΔΘ` expression divided by `x`.
    PrintedDeltaTheta,
    /// `1/(2√N √x sinh r)`; used for every path once `x < 1e-6`.
    Series,
}

/// Relative error on `x = 1 - Θ` from the appendix results, `Θ̇ = -1`.
pub fn appendix_relative_bound_x(x: f64, r: f64, n: f64, path: AppendixPath) -> Result<(f64, AppendixPath)> {
    check_finite("x", x)?;
    if !(x > 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must be positive",
        });
    }
    check_squeezing(r)?;
    if r == 0.0 {
        return Err(Error::NoResources("r = 0"));
    }
    if x < SERIES_SWITCH || path == AppendixPath::Series {
        return Ok((1.0 / (2.0 * n.sqrt() * x.sqrt() * r.sinh()), AppendixPath::Series));
    }
    let theta = 1.0 - x;
    let dtheta = match path {
        AppendixPath::ClosedFormH => delta_from_qfi(qfi_closed_form_appendix(theta, -1.0, r)?, n)?,
        _ => appendix_delta_theta_bound(theta, -1.0, r, n)?,
    };
    Ok((dtheta / x, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::SchemeSpec;
    use num_complex::Complex64;

    #[test]
    fn constant_family_has_zero_information() {
        let s = GaussianState::squeezed(0.5, 0.1).unwrap();
        let est = qfi_from_fidelity(|_| Ok(s.clone()), 0.9, default_step(0.9)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn coherent_family_gives_four_alpha_squared() {
        let alpha = Complex64::new(2.0, -1.5);
        let scheme = SchemeSpec::coherent(alpha, 4e14);
        for theta in [0.5, 0.9, 0.99] {
            let est = qfi_from_fidelity(|t| scheme.output_state_at_theta(t), theta, default_step(theta)).unwrap();
            assert!((est.value / (4.0 * alpha.norm_sqr()) - 1.0).abs() < 1e-10, "{}", est.value);
        }
    }

    #[test]
    fn rejects_bad_steps() {
        let s = GaussianState::vacuum(1);
        assert!(qfi_from_fidelity(|_| Ok(s.clone()), 0.5, 0.0).is_err());
        assert!(qfi_from_fidelity(|_| Ok(s.clone()), 0.5, -1.0).is_err());
    }

    #[test]
    fn appendix_formula_edge_cases() {
        assert!(matches!(qfi_closed_form_appendix(1.0, 1.0, 1.0), Err(Error::SingularFormula(_))));
        assert!(qfi_closed_form_appendix(1.2, 1.0, 1.0).is_err());
        assert!(qfi_closed_form_appendix(0.9, 1.0, 1e-9).unwrap() < 1e-15);
        assert_eq!(qfi_closed_form_appendix(0.9, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn appendix_h_is_four_times_the_fidelity_qfi() {
        // The printed H exceeds the fidelity-limit QFI of the same family by exactly 4.
        for r in [0.5, 1.5, 3.0] {
            let scheme = SchemeSpec::single_mode_squeezed(r, 4e14);
            for theta in [0.5, 0.9, 0.999] {
                let est = qfi_from_fidelity(|t| scheme.output_state_at_theta(t), theta, default_step(theta)).unwrap();
                let h = qfi_closed_form_appendix(theta, 1.0, r).unwrap();
                assert!((est.value / (h / 4.0) - 1.0).abs() < 1e-6, "r={r} theta={theta}");
            }
        }
    }

    #[test]
    fn printed_delta_theta_matches_quarter_h() {
        for (theta, r) in [(0.6, 0.5), (0.95, 2.0), (0.999, 1.5)] {
            let n = 1e4;
            let printed = appendix_delta_theta_bound(theta, 1.0, r, n).unwrap();
            let h = qfi_closed_form_appendix(theta, 1.0, r).unwrap();
            assert!((printed / delta_from_qfi(h / 4.0, n).unwrap() - 1.0).abs() < 1e-12);
            assert!((printed / delta_from_qfi(h, n).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn appendix_paths_near_series_regime() {
        let (x, r, n) = (1e-4, 1.5, 1e10);
        let (series, _) = appendix_relative_bound_x(x, r, n, AppendixPath::Series).unwrap();
        let (via_h, p) = appendix_relative_bound_x(x, r, n, AppendixPath::ClosedFormH).unwrap();
        assert_eq!(p, AppendixPath::ClosedFormH);
        let (via_dt, _) = appendix_relative_bound_x(x, r, n, AppendixPath::PrintedDeltaTheta).unwrap();
        assert!((series / via_h / 2f64.sqrt() - 1.0).abs() < 1e-2);
        assert!((via_dt / series / 2f64.sqrt() - 1.0).abs() < 1e-2);
        let (_, p) = appendix_relative_bound_x(1e-8, r, n, AppendixPath::ClosedFormH).unwrap();
        assert_eq!(p, AppendixPath::Series);
    }
}
