//! Relative-error bounds on `x`, `r_S` and `L` for the three schemes.
//!
//! Every bound is `prefactor / √N` with the division done last, so
//! quadrupling `N` halves the bound exactly.

use serde::{Deserialize, Serialize};

use super::{SchemeKind, SchemeSpec};
use crate::error::{check_finite, Error, Result};
use crate::spacetime::{ObserverPair, SchwarzschildGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    X,
    Theta,
    RS,
    L,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::X => "x",
            Parameter::Theta => "theta",
            Parameter::RS => "r_s",
            Parameter::L => "L",
        }
    }
}

/// A Cramér–Rao relative-error bound with the inputs it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionBound {
    pub parameter: Parameter,
    pub relative_error_bound: f64,
    pub n_measurements: f64,
    pub mean_photon_number: f64,
    pub scheme: SchemeSpec,
    /// Which formula produced the number.
    pub formula: String,
}

fn check_n(n: f64) -> Result<()> {
    check_finite("N", n)?;
    if n < 1.0 {
        return Err(Error::InvalidParameter {
            name: "N",
            value: n,
            reason: "at least one measurement is needed",
        });
    }
    Ok(())
}

fn check_resources(scheme: &SchemeSpec) -> Result<()> {
    scheme.validate()?;
    match scheme.kind {
        SchemeKind::Coherent if scheme.alpha.norm() == 0.0 => Err(Error::NoResources("|alpha| = 0")),
        SchemeKind::SingleModeSqueezed | SchemeKind::TwoModeSqueezed if scheme.r == 0.0 => {
            Err(Error::NoResources("r = 0"))
        }
        _ => Ok(()),
    }
}

/// `Δx/x` prefactor (times `√N`) for the scheme.
///
/// Coherent: `1/(2 x |α|)`. Single-mode squeezed: `1/(2 √x sinh r)`.
/// Two-mode squeezed: `1/(√x sinh r)` with `x = δ²(Ω₁² + Ω₂²)/(16σ²)`, the
/// form whose chain-rule image is the two-mode `Δr_S/r_S` bound.
fn x_prefactor(scheme: &SchemeSpec, x: f64) -> f64 {
    match scheme.kind {
        SchemeKind::Coherent => 1.0 / (2.0 * x * scheme.alpha.norm()),
        SchemeKind::SingleModeSqueezed => 1.0 / (2.0 * x.sqrt() * scheme.r.sinh()),
        SchemeKind::TwoModeSqueezed => 1.0 / (x.sqrt() * scheme.r.sinh()),
    }
}

fn x_formula(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::Coherent => "dx/x = 1/(2 sqrt(N) x |alpha|)",
        SchemeKind::SingleModeSqueezed => "dx/x = 1/(2 sqrt(N) sqrt(x) sinh r)",
        SchemeKind::TwoModeSqueezed => "dx/x = 1/(sqrt(N) sqrt(x) sinh r)",
    }
}

pub fn scheme_relative_bound_x(scheme: &SchemeSpec, x: f64, n: f64) -> Result<PrecisionBound> {
    check_n(n)?;
    check_finite("x", x)?;
    if !(x > 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must be positive",
        });
    }
    check_resources(scheme)?;
    Ok(PrecisionBound {
        parameter: Parameter::X,
        relative_error_bound: x_prefactor(scheme, x) / n.sqrt(),
        n_measurements: n,
        mean_photon_number: scheme.mean_photon_number(),
        scheme: *scheme,
        formula: x_formula(scheme.kind).into(),
    })
}

/// Same bound written with `n̄` in place of `|α|²` or `sinh²r`.
pub fn scheme_relative_bound_x_nbar(kind: SchemeKind, x: f64, nbar: f64, n: f64) -> Result<f64> {
    check_n(n)?;
    if !(nbar > 0.0) {
        return Err(Error::NoResources("n_bar = 0"));
    }
    Ok(match kind {
        SchemeKind::Coherent => 1.0 / (2.0 * x * nbar.sqrt()),
        SchemeKind::SingleModeSqueezed => 1.0 / (2.0 * x.sqrt() * nbar.sqrt()),
        SchemeKind::TwoModeSqueezed => 1.0 / (x.sqrt() * nbar.sqrt()),
    } / n.sqrt())
}

/// Small parameter at first order in `r_S/r`: `x = δ² Σᵢ Ωᵢ²/(8σ² m)` over the `m` probe modes.
pub fn x_from_link(scheme: &SchemeSpec, geom: &SchwarzschildGeometry, pair: &ObserverPair, sigma: f64) -> Result<f64> {
    check_finite("sigma", sigma)?;
    let delta = geom.delta_approx(pair)?;
    let omegas = scheme.omegas();
    let mean_sq = omegas.iter().map(|w| w * w).sum::<f64>() / omegas.len() as f64;
    Ok(delta * delta * mean_sq / (8.0 * sigma * sigma))
}

struct Link {
    x: f64,
    r_a: f64,
    l: f64,
}

fn link(scheme: &SchemeSpec, geom: &SchwarzschildGeometry, pair: &ObserverPair, sigma: f64) -> Result<Link> {
    check_resources(scheme)?;
    let l = pair.separation();
    if l == 0.0 {
        return Err(Error::NoResources("L = 0: no redshift signal"));
    }
    if geom.r_s() == 0.0 {
        return Err(Error::NoResources("r_s = 0: no redshift signal"));
    }
    Ok(Link {
        x: x_from_link(scheme, geom, pair, sigma)?,
        r_a: pair.r_a,
        l,
    })
}

/// `Δr_S/r_S` by the chain rule: `x ∝ r_S²`, so it is half of `Δx/x`.
pub fn bound_rs(
    scheme: &SchemeSpec,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
    sigma: f64,
    n: f64,
) -> Result<PrecisionBound> {
    let lk = link(scheme, geom, pair, sigma)?;
    let bx = scheme_relative_bound_x(scheme, lk.x, n)?;
    Ok(PrecisionBound {
        parameter: Parameter::RS,
        relative_error_bound: 0.5 * x_prefactor(scheme, lk.x) / n.sqrt(),
        formula: format!("chain rule on {}, dln x/dln r_s = 2", bx.formula),
        ..bx
    })
}

/// `ΔL/L` by the chain rule: `d ln x / d ln L = 2 r_A/(r_A + L)`.
pub fn bound_l(
    scheme: &SchemeSpec,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
    sigma: f64,
    n: f64,
) -> Result<PrecisionBound> {
    let lk = link(scheme, geom, pair, sigma)?;
    let bx = scheme_relative_bound_x(scheme, lk.x, n)?;
    let dlnx_dlnl = 2.0 * lk.r_a / (lk.r_a + lk.l);
    Ok(PrecisionBound {
        parameter: Parameter::L,
        relative_error_bound: x_prefactor(scheme, lk.x) / dlnx_dlnl.abs() / n.sqrt(),
        formula: format!("chain rule on {}, dln x/dln L = 2 r_A/(r_A + L)", bx.formula),
        ..bx
    })
}

/// Closed-form `Δr_S/r_S` as printed for the squeezed schemes.
///
/// Single mode: `2√2 σ r_A (r_A + L)/(√N Ω r_S L sinh r)`.
/// Two mode: `8σ r_A (r_A + L)/(√(N(Ω₁² + Ω₂²)) r_S L sinh r)`.
/// `None` for the coherent scheme, which has no printed closed form.
pub fn printed_bound_rs(
    scheme: &SchemeSpec,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
    sigma: f64,
    n: f64,
) -> Result<Option<f64>> {
    check_n(n)?;
    let lk = link(scheme, geom, pair, sigma)?;
    let (r_a, l, r_s, sh) = (lk.r_a, lk.l, geom.r_s(), scheme.r.sinh());
    Ok(match scheme.kind {
        SchemeKind::Coherent => None,
        SchemeKind::SingleModeSqueezed => {
            Some(2.0 * 2f64.sqrt() * sigma * r_a * (r_a + l) / (scheme.omega1 * r_s * l.abs() * sh) / n.sqrt())
        }
        SchemeKind::TwoModeSqueezed => {
            let w = (scheme.omega1.powi(2) + scheme.omega2.powi(2)).sqrt();
            Some(8.0 * sigma * r_a * (r_a + l) / (w * r_s * l.abs() * sh) / n.sqrt())
        }
    })
}

/// Closed-form `ΔL/L` as printed.
///
/// Single mode: `2√2 σ (r_A + L)²/(√N Ω r_S L sinh r)`, which agrees with
/// [`bound_l`]. Two mode: `8σ r_A²/(√(N(Ω₁² + Ω₂²)) r_S L sinh r)`, which
/// does not: the chain rule gives `(r_A + L)²` in place of `r_A²`.
pub fn printed_bound_l(
    scheme: &SchemeSpec,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
    sigma: f64,
    n: f64,
) -> Result<Option<f64>> {
    check_n(n)?;
    let lk = link(scheme, geom, pair, sigma)?;
    let (r_a, l, r_s, sh) = (lk.r_a, lk.l, geom.r_s(), scheme.r.sinh());
    Ok(match scheme.kind {
        SchemeKind::Coherent => None,
        SchemeKind::SingleModeSqueezed => {
            Some(2.0 * 2f64.sqrt() * sigma * (r_a + l).powi(2) / (scheme.omega1 * r_s * l.abs() * sh) / n.sqrt())
        }
        SchemeKind::TwoModeSqueezed => {
            let w = (scheme.omega1.powi(2) + scheme.omega2.powi(2)).sqrt();
            Some(8.0 * sigma * r_a * r_a / (w * r_s * l.abs() * sh) / n.sqrt())
        }
    })
}

/// `σ r_A² / (Ω sinh r √N r_S L)`.
pub fn figure_of_merit(
    sigma: f64,
    omega: f64,
    r: f64,
    n: f64,
    geom: &SchwarzschildGeometry,
    pair: &ObserverPair,
) -> Result<f64> {
    check_n(n)?;
    let l = pair.separation();
    if l == 0.0 || geom.r_s() == 0.0 || r == 0.0 {
        return Err(Error::NoResources("figure of merit needs L, r_s and r nonzero"));
    }
    Ok(sigma * pair.r_a * pair.r_a / (omega * r.sinh() * geom.r_s() * l.abs()) / n.sqrt())
}

/// Bounds for two schemes carrying the same `n̄`; errors if the resources differ.
pub fn compare_at_equal_resources(
    a: &SchemeSpec,
    b: &SchemeSpec,
    x: f64,
    n: f64,
) -> Result<(PrecisionBound, PrecisionBound)> {
    let (na, nb) = (a.mean_photon_number(), b.mean_photon_number());
    if ((na - nb) / na.max(nb)).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "n_bar",
            value: nb,
            reason: "schemes must be compared at equal mean photon number",
        });
    }
    Ok((scheme_relative_bound_x(a, x, n)?, scheme_relative_bound_x(b, x, n)?))
}
