//! Second-order fidelity coefficient for a mixed squeezed probe at `Θ = 1`.

use crate::error::{check_finite, Error, Result};

/// `c` in `F = 1 - c dx²` around `Θ = 1`:
/// `[μa² + μa⁴ + μb² + μbμa(μaμb cosh 4r - 2(μa² + 1) cosh 2r)] / (μa⁴ - 1)`.
pub fn general_mixed_fidelity_coefficient(r: f64, mu_a: f64, mu_b: f64) -> Result<f64> {
    check_finite("r", r)?;
    check_finite("mu_a", mu_a)?;
    check_finite("mu_b", mu_b)?;
    if mu_a <= 1.0 {
        return Err(Error::SingularFormula(
            "mu_a = 1 makes the mixed-state expansion singular; use the appendix result for pure probes".into(),
        ));
    }
    if mu_b < 1.0 {
        return Err(Error::InvalidParameter {
            name: "mu_b",
            value: mu_b,
            reason: "mixedness must be at least 1",
        });
    }
    let (a2, a4) = (mu_a * mu_a, mu_a.powi(4));
    let num = a2 + a4 + mu_b * mu_b + mu_b * mu_a * (mu_a * mu_b * (4.0 * r).cosh() - 2.0 * (a2 + 1.0) * (2.0 * r).cosh());
    Ok(num / (a4 - 1.0))
}
