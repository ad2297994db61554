//! Exterior Schwarzschild geometry of a spherical, non-rotating mass.
//!
//! Observers hover at fixed radial coordinates. Everything here is a pure
//! function of the Schwarzschild radius and the two radii, and every query
//! rejects radii at or inside the horizon.
//!
//! The deformation parameter δ is of order 1e-10 for an Earth-to-satellite
//! link, so the ratios below are evaluated through `ln_1p`/`exp_m1` rather
//! than by subtracting numbers close to one.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Physical constants used when the geometry is built from a mass.
pub mod constants {
    /// Newtonian gravitational constant, m³ kg⁻¹ s⁻².
    pub const G: f64 = 6.674_30e-11;
    /// Speed of light in vacuum, m s⁻¹.
    pub const C: f64 = 299_792_458.0;
    /// Mass of the Earth, kg.
    pub const EARTH_MASS: f64 = 5.972e24;
    /// Mean radius of the Earth, m.
    pub const EARTH_RADIUS: f64 = 6.371e6;
}

/// Schwarzschild space-time outside a spherical mass, fixed by `r_s = 2GM/c²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzschildGeometry {
    r_s: f64,
}

/// Emitter (`r_a`) and receiver (`r_b`) radial coordinates in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverPair {
    pub r_a: f64,
    pub r_b: f64,
}

impl ObserverPair {
    pub fn new(r_a: f64, r_b: f64) -> Result<Self> {
        for (name, r) in [("r_a", r_a), ("r_b", r_b)] {
            check_finite(name, r)?;
            if r <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: r,
                    reason: "radial coordinate must be positive",
                });
            }
        }
        Ok(Self { r_a, r_b })
    }

    /// Pair at `r_a` and `r_a + separation`; a negative separation is a downlink.
    pub fn from_separation(r_a: f64, separation: f64) -> Result<Self> {
        check_finite("separation", separation)?;
        Self::new(r_a, r_a + separation)
    }

    /// `L = r_b - r_a`.
    pub fn separation(&self) -> f64 {
        self.r_b - self.r_a
    }

    pub fn swapped(&self) -> Self {
        Self {
            r_a: self.r_b,
            r_b: self.r_a,
        }
    }
}

impl SchwarzschildGeometry {
    /// Geometry with the given Schwarzschild radius in metres.
    ///
    /// `r_s = 0` is accepted and represents flat space-time.
    pub fn new(r_s: f64) -> Result<Self> {
        check_finite("r_s", r_s)?;
        if r_s < 0.0 {
            return Err(Error::InvalidParameter {
                name: "r_s",
                value: r_s,
                reason: "Schwarzschild radius cannot be negative",
            });
        }
        Ok(Self { r_s })
    }

    pub fn flat() -> Self {
        Self { r_s: 0.0 }
    }

    /// `r_s = 2GM/c²` with the default `G` and `c`.
    pub fn from_mass(mass: f64) -> Result<Self> {
        Self::from_mass_with_constants(mass, constants::G, constants::C)
    }

    pub fn from_mass_with_constants(mass: f64, g: f64, c: f64) -> Result<Self> {
        check_finite("mass", mass)?;
        if g <= 0.0 || !g.is_finite() {
            return Err(Error::InvalidParameter {
                name: "G",
                value: g,
                reason: "must be positive",
            });
        }
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                reason: "must be positive",
            });
        }
        Self::new(2.0 * g * mass / (c * c))
    }

    /// Earth with the default constants, `r_s ≈ 8.870e-3 m`.
    pub fn earth() -> Self {
        Self::from_mass(constants::EARTH_MASS).expect("Earth constants are valid")
    }

    pub fn r_s(&self) -> f64 {
        self.r_s
    }

    fn check_exterior(&self, r: f64) -> Result<()> {
        if !r.is_finite() && r != f64::INFINITY {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "must be a number",
            });
        }
        if r <= 0.0 || r <= self.r_s {
            return Err(Error::NotExterior { r, r_s: self.r_s });
        }
        Ok(())
    }

    /// `r_s / r = 1 - f(r)`, exact in floating point.
    pub fn compactness(&self, r: f64) -> Result<f64> {
        self.check_exterior(r)?;
        Ok(self.r_s / r)
    }

    /// `ln f(r)`, accurate even when `f(r)` is within 1e-9 of one.
    fn ln_metric(&self, r: f64) -> Result<f64> {
        Ok((-self.compactness(r)?).ln_1p())
    }

    /// Metric function `f(r) = 1 - r_s/r`.
    pub fn metric_function(&self, r: f64) -> Result<f64> {
        Ok(1.0 - self.compactness(r)?)
    }

    /// `√f(r0)`: proper time of a static observer at `r0` per unit Schwarzschild time.
    pub fn proper_time_factor(&self, r0: f64) -> Result<f64> {
        Ok((0.5 * self.ln_metric(r0)?).exp())
    }

    /// `ln(f(r_a)/f(r_b))`.
    fn ln_metric_ratio(&self, pair: &ObserverPair) -> Result<f64> {
        Ok(self.ln_metric(pair.r_a)? - self.ln_metric(pair.r_b)?)
    }

    /// Gravitational redshift `Ω_B/Ω_A = √(f(r_a)/f(r_b))`; below one for an uplink.
    pub fn redshift_ratio(&self, pair: &ObserverPair) -> Result<f64> {
        Ok((0.5 * self.ln_metric_ratio(pair)?).exp())
    }

    /// Ratio of receiver to emitter proper-time intervals, `τ_B/τ_A = √(f(r_b)/f(r_a))`.
    pub fn proper_time_ratio(&self, pair: &ObserverPair) -> Result<f64> {
        Ok((-0.5 * self.ln_metric_ratio(pair)?).exp())
    }

    /// Deformation parameter `δ = (f(r_a)/f(r_b))^{1/4} - 1`.
    pub fn delta_exact(&self, pair: &ObserverPair) -> Result<f64> {
        Ok((0.25 * self.ln_metric_ratio(pair)?).exp_m1())
    }

    /// Leading-order deformation `-(r_s/4) L / (r_a (r_a + L))`.
    pub fn delta_approx(&self, pair: &ObserverPair) -> Result<f64> {
        self.check_exterior(pair.r_a)?;
        self.check_exterior(pair.r_b)?;
        Ok(-0.25 * self.r_s * pair.separation() / (pair.r_a * pair.r_b))
    }

    /// `∂δ_approx/∂r_s` at fixed `r_a` and `L`.
    pub fn ddelta_approx_drs(&self, pair: &ObserverPair) -> Result<f64> {
        self.check_exterior(pair.r_a)?;
        self.check_exterior(pair.r_b)?;
        Ok(-0.25 * pair.separation() / (pair.r_a * pair.r_b))
    }

    /// `∂δ_approx/∂L` at fixed `r_a` and `r_s`.
    pub fn ddelta_approx_dl(&self, pair: &ObserverPair) -> Result<f64> {
        self.check_exterior(pair.r_a)?;
        self.check_exterior(pair.r_b)?;
        Ok(-0.25 * self.r_s / (pair.r_b * pair.r_b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn uplink() -> ObserverPair {
        ObserverPair::new(6.371e6, 4.237e7).unwrap()
    }

    #[test]
    fn earth_schwarzschild_radius() {
        let r_s = SchwarzschildGeometry::earth().r_s();
        assert!((r_s - 8.870e-3).abs() < 1e-6, "r_s = {r_s}");
    }

    #[test]
    fn metric_function_values() {
        let g = SchwarzschildGeometry::new(1.0).unwrap();
        assert_eq!(g.metric_function(2.0).unwrap(), 0.5);
        assert_eq!(g.metric_function(f64::INFINITY).unwrap(), 1.0);
        assert_eq!(g.proper_time_factor(f64::INFINITY).unwrap(), 1.0);
        assert!((g.proper_time_factor(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);

        let earth = SchwarzschildGeometry::new(8.870e-3).unwrap();
        let one_minus_f = 1.0 - earth.metric_function(6.371e6).unwrap();
        assert!((one_minus_f / 1.4e-9 - 1.0).abs() < 0.01, "{one_minus_f}");
    }

    #[test]
    fn horizon_and_interior_rejected() {
        let g = SchwarzschildGeometry::new(1.0).unwrap();
        assert!(matches!(g.metric_function(1.0), Err(Error::NotExterior { .. })));
        assert!(matches!(g.metric_function(0.5), Err(Error::NotExterior { .. })));
        assert!(g.metric_function(-3.0).is_err());
        assert!(g.delta_exact(&ObserverPair { r_a: 0.9, r_b: 5.0 }).is_err());
        assert!(SchwarzschildGeometry::new(-1.0).is_err());
        assert!(SchwarzschildGeometry::new(f64::NAN).is_err());
        assert!(ObserverPair::new(0.0, 1.0).is_err());
    }

    #[test]
    fn same_height_and_flat_space_are_trivial() {
        let earth = SchwarzschildGeometry::earth();
        let same = ObserverPair::new(7.0e6, 7.0e6).unwrap();
        assert_eq!(earth.delta_exact(&same).unwrap(), 0.0);
        assert_eq!(earth.delta_approx(&same).unwrap(), 0.0);
        assert_eq!(earth.redshift_ratio(&same).unwrap(), 1.0);

        let flat = SchwarzschildGeometry::flat();
        assert_eq!(flat.delta_exact(&uplink()).unwrap(), 0.0);
        assert_eq!(flat.redshift_ratio(&uplink()).unwrap(), 1.0);
        assert_eq!(flat.proper_time_ratio(&uplink()).unwrap(), 1.0);
    }

    #[test]
    fn uplink_redshifts_and_downlink_blueshifts() {
        let earth = SchwarzschildGeometry::earth();
        let up = uplink();
        assert!(earth.redshift_ratio(&up).unwrap() < 1.0);
        assert!(earth.delta_exact(&up).unwrap() < 0.0);
        assert!(earth.delta_approx(&up).unwrap() < 0.0);
        assert!(earth.delta_exact(&up.swapped()).unwrap() > 0.0);
        assert!(earth.redshift_ratio(&up.swapped()).unwrap() > 1.0);
    }

    #[test]
    fn delta_approx_is_antisymmetric_at_leading_order() {
        let earth = SchwarzschildGeometry::earth();
        let up = uplink();
        let down = up.swapped();
        // -(r_s/4) L/(r_a r_b) flips sign exactly when the roles swap.
        assert_eq!(
            earth.delta_approx(&up).unwrap(),
            -earth.delta_approx(&down).unwrap()
        );
    }

    #[test]
    fn redshift_round_trip_is_unity() {
        let earth = SchwarzschildGeometry::earth();
        for (a, b) in [(6.371e6, 4.237e7), (6.371e6, 6.771e6), (1.0e7, 2.0e6)] {
            let p = ObserverPair::new(a, b).unwrap();
            let prod = earth.redshift_ratio(&p).unwrap() * earth.redshift_ratio(&p.swapped()).unwrap();
            assert!((prod - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_and_leading_order_delta_agree() {
        let earth = SchwarzschildGeometry::earth();
        let p = uplink();
        let exact = earth.delta_exact(&p).unwrap();
        let approx = earth.delta_approx(&p).unwrap();
        assert!(rel(approx, exact) <= 10.0 * earth.r_s() / p.r_a);
        assert!(exact.abs() > 1e-10 && exact.abs() < 1e-9);
    }

    #[test]
    fn delta_derivatives_match_finite_differences() {
        let earth = SchwarzschildGeometry::earth();
        let p = uplink();
        let h = 1e-6 * earth.r_s();
        let plus = SchwarzschildGeometry::new(earth.r_s() + h).unwrap();
        let minus = SchwarzschildGeometry::new(earth.r_s() - h).unwrap();
        let fd = (plus.delta_approx(&p).unwrap() - minus.delta_approx(&p).unwrap()) / (2.0 * h);
        assert!(rel(fd, earth.ddelta_approx_drs(&p).unwrap()) < 1e-8);

        let l = p.separation();
        let hl = 1.0;
        let pp = ObserverPair::from_separation(p.r_a, l + hl).unwrap();
        let pm = ObserverPair::from_separation(p.r_a, l - hl).unwrap();
        let fd = (earth.delta_approx(&pp).unwrap() - earth.delta_approx(&pm).unwrap()) / (2.0 * hl);
        assert!(rel(fd, earth.ddelta_approx_dl(&p).unwrap()) < 1e-6);
    }
}
